#include "solvorder/group.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>
#include <utility>

#include "solvorder/rng.hpp"

namespace solvorder {

namespace {

u128 low_mask(unsigned bits) {
  return bits >= 128 ? ~u128{0} : ((u128{1} << bits) - 1);
}

unsigned bits_for(std::uint64_t count) {
  // Width needed to write values 0..count-1, at least one bit.
  return count <= 1 ? 1u : static_cast<unsigned>(std::bit_width(count - 1));
}

// ---------------------------------------------------------------------------
// Backends

class CyclicBackend final : public GroupBackend {
 public:
  explicit CyclicBackend(std::uint64_t order) : order_(order), bits_(bits_for(order)) {}

  unsigned encoding_length() const override { return bits_; }
  u128 identity() const override { return 0; }
  std::vector<u128> generators() const override { return {u128{order_ == 1 ? 0u : 1u}}; }
  u128 product(u128 a, u128 b) const override { return (a + b) % order_; }
  u128 inverse(u128 a) const override { return a == 0 ? 0 : order_ - a; }
  bool is_valid(u128 a) const override { return a < order_; }

 private:
  std::uint64_t order_;
  unsigned bits_;
};

class PermutationBackend final : public GroupBackend {
 public:
  PermutationBackend(unsigned degree, const std::vector<std::vector<unsigned>>& gens)
      : degree_(degree), width_(bits_for(degree)) {
    for (const auto& images : gens) generators_.push_back(encode(images));
    identity_ = encode(identity_images());
  }

  unsigned encoding_length() const override { return degree_ * width_; }
  u128 identity() const override { return identity_; }
  std::vector<u128> generators() const override { return generators_; }

  // (a*b)(x) = a(b(x))
  u128 product(u128 a, u128 b) const override {
    u128 out = 0;
    for (unsigned x = 0; x < degree_; ++x) {
      const unsigned bx = image(b, x);
      out |= static_cast<u128>(image(a, bx)) << (x * width_);
    }
    return out;
  }

  u128 inverse(u128 a) const override {
    u128 out = 0;
    for (unsigned x = 0; x < degree_; ++x)
      out |= static_cast<u128>(x) << (image(a, x) * width_);
    return out;
  }

  bool is_valid(u128 a) const override {
    if (a > low_mask(encoding_length())) return false;
    std::vector<bool> seen(degree_, false);
    for (unsigned x = 0; x < degree_; ++x) {
      const unsigned y = image(a, x);
      if (y >= degree_ || seen[y]) return false;
      seen[y] = true;
    }
    return true;
  }

  u128 encode(const std::vector<unsigned>& images) const {
    u128 out = 0;
    for (unsigned x = 0; x < degree_; ++x) out |= static_cast<u128>(images[x]) << (x * width_);
    return out;
  }

 private:
  unsigned image(u128 code, unsigned x) const {
    return static_cast<unsigned>((code >> (x * width_)) & low_mask(width_));
  }
  std::vector<unsigned> identity_images() const {
    std::vector<unsigned> id(degree_);
    for (unsigned x = 0; x < degree_; ++x) id[x] = x;
    return id;
  }

  unsigned degree_;
  unsigned width_;
  u128 identity_ = 0;
  std::vector<u128> generators_;
};

// Factor 0 occupies the lowest bits.
class DirectProductBackend final : public GroupBackend {
 public:
  explicit DirectProductBackend(std::vector<std::unique_ptr<GroupBackend>> factors)
      : factors_(std::move(factors)) {
    unsigned offset = 0;
    for (const auto& f : factors_) {
      offsets_.push_back(offset);
      offset += f->encoding_length();
    }
    bits_ = std::max(offset, 1u);
  }

  unsigned encoding_length() const override { return bits_; }

  u128 identity() const override {
    u128 out = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) out |= factors_[i]->identity() << offsets_[i];
    return out;
  }

  std::vector<u128> generators() const override {
    const u128 id = identity();
    std::vector<u128> out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      const u128 mask = low_mask(factors_[i]->encoding_length()) << offsets_[i];
      for (u128 g : factors_[i]->generators()) out.push_back((id & ~mask) | (g << offsets_[i]));
    }
    return out;
  }

  u128 product(u128 a, u128 b) const override {
    u128 out = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      out |= factors_[i]->product(slice(a, i), slice(b, i)) << offsets_[i];
    return out;
  }

  u128 inverse(u128 a) const override {
    u128 out = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      out |= factors_[i]->inverse(slice(a, i)) << offsets_[i];
    return out;
  }

  bool is_valid(u128 a) const override {
    if (a > low_mask(bits_)) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (!factors_[i]->is_valid(slice(a, i))) return false;
    return true;
  }

 private:
  u128 slice(u128 a, std::size_t i) const {
    return (a >> offsets_[i]) & low_mask(factors_[i]->encoding_length());
  }

  std::vector<std::unique_ptr<GroupBackend>> factors_;
  std::vector<unsigned> offsets_;
  unsigned bits_ = 1;
};

// Seeded bijection on n-bit strings: rounds of odd multiply, add and
// xorshift, all invertible modulo 2^n.
class KeyedBijection {
 public:
  KeyedBijection(unsigned bits, std::uint64_t seed) : bits_(bits), mask_(low_mask(bits)) {
    shift_ = std::max(1u, (bits + 1) / 2);
    std::uint64_t state = seed;
    for (auto& r : rounds_) {
      state = mix64(state);
      const u128 hi = mix64(state ^ 0x5bd1e995ULL);
      r.mul = ((hi << 64) | state | 1) & mask_;
      if (r.mul == 0) r.mul = 1;
      state = mix64(state);
      r.add = ((static_cast<u128>(mix64(state)) << 64) | state) & mask_;
      r.mul_inv = odd_inverse(r.mul);
    }
  }

  u128 forward(u128 x) const {
    for (const auto& r : rounds_) {
      x = (x * r.mul) & mask_;
      x = (x + r.add) & mask_;
      x ^= x >> shift_;
    }
    return x;
  }

  u128 backward(u128 x) const {
    for (auto it = rounds_.rbegin(); it != rounds_.rend(); ++it) {
      for (unsigned s = shift_; s < bits_; s *= 2) x ^= x >> s;
      x = (x - it->add) & mask_;
      x = (x * it->mul_inv) & mask_;
    }
    return x;
  }

 private:
  struct Round {
    u128 mul = 1;
    u128 add = 0;
    u128 mul_inv = 1;
  };

  u128 odd_inverse(u128 a) const {
    u128 inv = a;  // Newton: correct to 3 bits, doubles each step.
    for (int i = 0; i < 7; ++i) inv *= 2 - a * inv;
    return inv & mask_;
  }

  unsigned bits_;
  u128 mask_;
  unsigned shift_ = 1;
  std::array<Round, 3> rounds_{};
};

class RelabeledBackend final : public GroupBackend {
 public:
  RelabeledBackend(std::unique_ptr<GroupBackend> inner, std::uint64_t seed)
      : inner_(std::move(inner)), map_(inner_->encoding_length(), seed) {}

  unsigned encoding_length() const override { return inner_->encoding_length(); }
  u128 identity() const override { return map_.forward(inner_->identity()); }
  std::vector<u128> generators() const override {
    auto gens = inner_->generators();
    for (auto& g : gens) g = map_.forward(g);
    return gens;
  }
  u128 product(u128 a, u128 b) const override {
    return map_.forward(inner_->product(map_.backward(a), map_.backward(b)));
  }
  u128 inverse(u128 a) const override { return map_.forward(inner_->inverse(map_.backward(a))); }
  bool is_valid(u128 a) const override {
    if (a > low_mask(encoding_length())) return false;
    return inner_->is_valid(map_.backward(a));
  }

 private:
  std::unique_ptr<GroupBackend> inner_;
  KeyedBijection map_;
};

// ---------------------------------------------------------------------------
// Spec validation and construction

void validate_images(unsigned degree, const std::vector<unsigned>& images) {
  if (images.size() != degree)
    throw std::invalid_argument("permutation generator has " + std::to_string(images.size()) +
                                " images, expected degree " + std::to_string(degree));
  std::vector<bool> seen(degree, false);
  for (unsigned y : images) {
    if (y >= degree || seen[y])
      throw std::invalid_argument("permutation generator is not a bijection on {1.." +
                                  std::to_string(degree) + "}");
    seen[y] = true;
  }
}

std::unique_ptr<GroupBackend> build_backend(const ConcreteGroupSpec& spec) {
  std::unique_ptr<GroupBackend> backend = std::visit(
      [](const auto& v) -> std::unique_ptr<GroupBackend> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConcreteGroupSpec::Cyclic>) {
          if (v.order == 0) throw std::invalid_argument("cyclic order must be >= 1");
          return std::make_unique<CyclicBackend>(v.order);
        } else if constexpr (std::is_same_v<T, ConcreteGroupSpec::Permutation>) {
          if (v.degree == 0) throw std::invalid_argument("permutation degree must be >= 1");
          for (const auto& g : v.generators) validate_images(v.degree, g);
          return std::make_unique<PermutationBackend>(v.degree, v.generators);
        } else {
          if (v.factors.empty()) throw std::invalid_argument("direct product needs factors");
          std::vector<std::unique_ptr<GroupBackend>> parts;
          for (const auto& f : v.factors) parts.push_back(build_backend(f));
          return std::make_unique<DirectProductBackend>(std::move(parts));
        }
      },
      spec.variant);
  if (backend->encoding_length() > kMaxEncodingBits)
    throw std::invalid_argument("encoding length " + std::to_string(backend->encoding_length()) +
                                " exceeds " + std::to_string(kMaxEncodingBits) + " bits");
  if (spec.relabel_seed)
    backend = std::make_unique<RelabeledBackend>(std::move(backend), *spec.relabel_seed);
  return backend;
}

// ---------------------------------------------------------------------------
// Spec grammar

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
  s = trim(s);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument(std::string("invalid ") + what + ": '" + std::string(s) + "'");
  return value;
}

bool starts_factor(std::string_view s) {
  s = trim(s);
  return s.starts_with("cyclic:") || s.starts_with("perm:") || s.starts_with("direct:") ||
         s.starts_with("[");
}

ConcreteGroupSpec parse_body(std::string_view text);

std::vector<std::string_view> split_factors(std::string_view list) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const char c = list[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0 && starts_factor(list.substr(i + 1))) {
      out.push_back(list.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(list.substr(start));
  return out;
}

ConcreteGroupSpec parse_body(std::string_view text) {
  text = trim(text);
  ConcreteGroupSpec spec;
  if (text.starts_with("[") && text.ends_with("]")) return parse_body(text.substr(1, text.size() - 2));
  if (text.starts_with("cyclic:")) {
    spec.variant = ConcreteGroupSpec::Cyclic{parse_u64(text.substr(7), "cyclic order")};
  } else if (text.starts_with("perm:")) {
    const auto rest = text.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument("perm spec needs 'perm:<degree>:<generators>'");
    ConcreteGroupSpec::Permutation perm;
    const auto degree = parse_u64(rest.substr(0, colon), "permutation degree");
    if (degree == 0 || degree > kMaxEncodingBits)
      throw std::invalid_argument("permutation degree out of range");
    perm.degree = static_cast<unsigned>(degree);
    auto gens = trim(rest.substr(colon + 1));
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= gens.size(); ++i) {
      if (i < gens.size()) {
        if (gens[i] == '(') ++depth;
        if (gens[i] == ')') --depth;
      }
      if (i == gens.size() || (gens[i] == ',' && depth == 0)) {
        const auto piece = trim(gens.substr(start, i - start));
        if (!piece.empty()) perm.generators.push_back(parse_permutation(perm.degree, piece));
        start = i + 1;
      }
    }
    spec.variant = std::move(perm);
  } else if (text.starts_with("direct:")) {
    ConcreteGroupSpec::Direct direct;
    for (auto piece : split_factors(text.substr(7))) direct.factors.push_back(parse_body(piece));
    spec.variant = std::move(direct);
  } else {
    throw std::invalid_argument("unknown group spec '" + std::string(text) + "'");
  }
  return spec;
}

std::string cycles_of(const std::vector<unsigned>& images) {
  std::string out;
  std::vector<bool> done(images.size(), false);
  for (unsigned x = 0; x < images.size(); ++x) {
    if (done[x] || images[x] == x) continue;
    out += '(';
    for (unsigned y = x; !done[y]; y = images[y]) {
      if (y != x) out += ' ';
      out += std::to_string(y + 1);
      done[y] = true;
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

std::string body_to_string(const ConcreteGroupSpec& spec) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConcreteGroupSpec::Cyclic>) {
          return "cyclic:" + std::to_string(v.order);
        } else if constexpr (std::is_same_v<T, ConcreteGroupSpec::Permutation>) {
          std::string out = "perm:" + std::to_string(v.degree) + ":";
          for (std::size_t i = 0; i < v.generators.size(); ++i) {
            if (i) out += ',';
            out += cycles_of(v.generators[i]);
          }
          return out;
        } else {
          std::string out = "direct:";
          for (std::size_t i = 0; i < v.factors.size(); ++i) {
            if (i) out += ',';
            const bool nested = std::holds_alternative<ConcreteGroupSpec::Direct>(v.factors[i].variant);
            out += nested ? "[" + body_to_string(v.factors[i]) + "]" : body_to_string(v.factors[i]);
          }
          return out;
        }
      },
      spec.variant);
}

}  // namespace

// ---------------------------------------------------------------------------
// ElementCode

ElementCode::ElementCode(u128 value, unsigned bits)
    : hi_(static_cast<std::uint64_t>(value >> 64)),
      lo_(static_cast<std::uint64_t>(value)),
      bits_(bits) {
  if (bits == 0 || bits > kMaxEncodingBits)
    throw std::invalid_argument("element code length out of range");
  if (value > low_mask(bits)) throw std::invalid_argument("element code value wider than its length");
}

std::string ElementCode::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const unsigned digits = (bits_ + 3) / 4;
  std::string out(digits, '0');
  u128 v = value();
  for (unsigned i = 0; i < digits; ++i) {
    out[digits - 1 - i] = kDigits[static_cast<unsigned>(v & 0xf)];
    v >>= 4;
  }
  return out;
}

ElementCode ElementCode::from_hex(std::string_view hex, unsigned bits) {
  if (bits == 0 || bits > kMaxEncodingBits) throw std::invalid_argument("element code length out of range");
  if (hex.size() != (bits + 3) / 4)
    throw std::invalid_argument("element code '" + std::string(hex) + "' has wrong width");
  u128 v = 0;
  for (char c : hex) {
    unsigned d = 0;
    if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a' + 10);
    else throw std::invalid_argument("element code '" + std::string(hex) + "' is not lowercase hex");
    v = (v << 4) | d;
  }
  if (v > low_mask(bits)) throw std::invalid_argument("element code exceeds its bit length");
  return ElementCode(v, bits);
}

std::size_t ElementCode::hash() const noexcept {
  return static_cast<std::size_t>(mix64(lo_ ^ mix64(hi_ + bits_)));
}

// ---------------------------------------------------------------------------
// GroupOracle

GroupOracle::GroupOracle(std::shared_ptr<const GroupBackend> backend, std::string description)
    : backend_(std::move(backend)),
      counters_(std::make_shared<Counters>()),
      encoding_length_(backend_->encoding_length()),
      identity_(backend_->identity(), encoding_length_),
      description_(std::move(description)) {
  for (u128 g : backend_->generators()) generators_.emplace_back(g, encoding_length_);
}

ElementCode GroupOracle::product(const ElementCode& g, const ElementCode& h) const {
  counters_->product.fetch_add(1, std::memory_order_relaxed);
  return ElementCode(backend_->product(g.value(), h.value()), encoding_length_);
}

ElementCode GroupOracle::inverse(const ElementCode& g) const {
  counters_->inverse.fetch_add(1, std::memory_order_relaxed);
  return ElementCode(backend_->inverse(g.value()), encoding_length_);
}

bool GroupOracle::is_element_code(const ElementCode& g) const {
  return g.bits() == encoding_length_ && backend_->is_valid(g.value());
}

QueryCounts GroupOracle::counts() const noexcept {
  return {counters_->product.load(std::memory_order_relaxed),
          counters_->inverse.load(std::memory_order_relaxed)};
}

GroupOracle GroupOracle::with_fresh_counters() const {
  GroupOracle copy = *this;
  copy.counters_ = std::make_shared<Counters>();
  return copy;
}

// ---------------------------------------------------------------------------
// Derived operations

ElementCode power(const GroupOracle& group, const ElementCode& g, std::uint64_t k) {
  if (k == 0) return group.identity();
  ElementCode result = g;
  for (int bit = std::bit_width(k) - 2; bit >= 0; --bit) {
    result = group.product(result, result);
    if ((k >> bit) & 1u) result = group.product(result, g);
  }
  return result;
}

ElementCode power(const GroupOracle& group, const ElementCode& g, const BigInt& k) {
  if (k < 0) throw std::invalid_argument("negative exponent");
  if (k == 0) return group.identity();
  ElementCode result = g;
  const auto top = static_cast<long>(boost::multiprecision::msb(k));
  for (long bit = top - 1; bit >= 0; --bit) {
    result = group.product(result, result);
    if (boost::multiprecision::bit_test(k, static_cast<unsigned>(bit))) result = group.product(result, g);
  }
  return result;
}

ElementCode eval_word(const GroupOracle& group, std::span<const ElementCode> bases,
                      std::span<const std::uint64_t> exps) {
  if (bases.size() != exps.size())
    throw std::invalid_argument("eval_word: " + std::to_string(bases.size()) + " bases but " +
                                std::to_string(exps.size()) + " exponents");
  std::optional<ElementCode> acc;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (exps[i] == 0) continue;
    ElementCode factor = power(group, bases[i], exps[i]);
    acc = acc ? group.product(*acc, factor) : factor;
  }
  return acc ? *acc : group.identity();
}

ClosureOverflow::ClosureOverflow(std::size_t cap)
    : std::runtime_error("subgroup closure exceeds cap of " + std::to_string(cap) + " elements"),
      cap_(cap) {}

Subgroup::Subgroup(ElementCode identity) { insert(identity); }

std::optional<std::size_t> Subgroup::index_of(const ElementCode& g) const {
  const auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Subgroup::insert(const ElementCode& g) {
  const auto [it, fresh] = index_.emplace(g, elements_.size());
  if (fresh) elements_.push_back(g);
  return fresh;
}

Subgroup extend_closure(const GroupOracle& group, Subgroup base, const ElementCode& g,
                        std::size_t cap) {
  if (base.contains(g)) return base;
  base.generators_.push_back(g);
  const std::size_t old_size = base.size();
  auto add = [&](const ElementCode& y) {
    if (base.insert(y) && base.size() > cap) throw ClosureOverflow(cap);
  };
  // Old elements are already closed under the old generators.
  for (std::size_t i = 0; i < old_size; ++i) add(group.product(base.elements_[i], g));
  for (std::size_t i = old_size; i < base.size(); ++i)
    for (std::size_t k = 0; k < base.generators_.size(); ++k)
      add(group.product(base.elements_[i], base.generators_[k]));
  return base;
}

Subgroup enumerate_closure(const GroupOracle& group, std::span<const ElementCode> gens,
                           std::size_t cap) {
  if (cap < 1) throw std::invalid_argument("closure cap must be >= 1");
  Subgroup sub(group.identity());
  for (const auto& g : gens) sub = extend_closure(group, std::move(sub), g, cap);
  return sub;
}

// ---------------------------------------------------------------------------
// Fixtures

std::vector<unsigned> parse_permutation(unsigned degree, std::string_view cycles) {
  std::vector<unsigned> images(degree);
  for (unsigned x = 0; x < degree; ++x) images[x] = x;
  std::vector<bool> used(degree, false);
  cycles = trim(cycles);
  std::size_t pos = 0;
  while (pos < cycles.size()) {
    if (cycles[pos] == ' ') {
      ++pos;
      continue;
    }
    if (cycles[pos] != '(')
      throw std::invalid_argument("expected '(' in permutation '" + std::string(cycles) + "'");
    const auto close = cycles.find(')', pos);
    if (close == std::string_view::npos)
      throw std::invalid_argument("unbalanced '(' in permutation '" + std::string(cycles) + "'");
    std::vector<unsigned> points;
    std::istringstream in{std::string(cycles.substr(pos + 1, close - pos - 1))};
    std::string token;
    while (in >> token) {
      const auto p = parse_u64(token, "permutation point");
      if (p < 1 || p > degree)
        throw std::invalid_argument("point " + token + " outside {1.." + std::to_string(degree) + "}");
      const auto x = static_cast<unsigned>(p - 1);
      if (used[x]) throw std::invalid_argument("point " + token + " repeated in permutation");
      used[x] = true;
      points.push_back(x);
    }
    for (std::size_t i = 0; i < points.size(); ++i) images[points[i]] = points[(i + 1) % points.size()];
    pos = close + 1;
  }
  return images;
}

ConcreteGroupSpec parse_group_spec(std::string_view text) {
  text = trim(text);
  std::optional<std::uint64_t> seed;
  if (const auto at = text.rfind("@seed="); at != std::string_view::npos) {
    seed = parse_u64(text.substr(at + 6), "relabel seed");
    text = text.substr(0, at);
  }
  ConcreteGroupSpec spec = parse_body(text);
  spec.relabel_seed = seed;
  return spec;
}

std::string to_string(const ConcreteGroupSpec& spec) {
  std::string out = body_to_string(spec);
  if (spec.relabel_seed) out += "@seed=" + std::to_string(*spec.relabel_seed);
  return out;
}

GroupOracle make_group(const ConcreteGroupSpec& spec) {
  std::shared_ptr<const GroupBackend> backend = build_backend(spec);
  return GroupOracle(std::move(backend), to_string(spec));
}

GroupOracle make_group(std::string_view spec_text) { return make_group(parse_group_spec(spec_text)); }

ElementCode cyclic_code(std::uint64_t order, std::uint64_t residue) {
  if (order == 0 || residue >= order) throw std::invalid_argument("residue out of range");
  return ElementCode(residue, bits_for(order));
}

ElementCode permutation_code(unsigned degree, std::span<const unsigned> images) {
  std::vector<unsigned> v(images.begin(), images.end());
  validate_images(degree, v);
  PermutationBackend backend(degree, {});
  return ElementCode(backend.encode(v), backend.encoding_length());
}

}  // namespace solvorder
