#include "solvorder/prover.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>

#include "solvorder/rng.hpp"

namespace solvorder {

namespace {

struct KindInfo {
  ProverKind kind;
  std::string_view name;
  std::string_view description;
};

constexpr std::array<KindInfo, 6> kKinds{{
    {ProverKind::honest, "honest", "exact decomposition and membership stand-ins"},
    {ProverKind::guess_inflate, "guess_inflate",
     "guesses s_i on one trivial round and sends non-decomposing exponents there"},
    {ProverKind::deflate, "deflate", "random exponents and bits on every nontrivial round"},
    {ProverKind::garbage_commitment, "garbage_commitment",
     "tampers one alpha entry of an honest commitment (3msg); honest otherwise"},
    {ProverKind::random_bits, "random_bits", "honest exponents with uniformly random bits"},
    {ProverKind::order_forger, "order_forger",
     "commits over a prime set padded with a foreign prime (3msg) and inflates every trivial round"},
}};

const KindInfo& info(ProverKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k;
  throw std::logic_error("unknown prover kind");
}

struct CommitmentWithTable {
  Commitment commitment;
  NormalFormTable table;
};

CommitmentWithTable build_with_table(const GroupOracle& group, std::span<const std::uint64_t> primes,
                                     std::size_t cap) {
  const auto base = compute_pcgs(group, cap);
  const auto refined = refine_with_primes(group, base, primes, group.encoding_length());
  NormalFormTable table(group, refined.elements, cap);
  const std::size_t t = refined.length();

  Commitment c;
  c.elements = refined.elements;
  c.primes = refined.primes;
  auto must = [](std::optional<Decomposition> d, const char* what) {
    if (!d) throw InvalidPolycyclicSequence(std::string("refined sequence misses ") + what);
    return std::move(*d);
  };
  for (const auto& g : group.generators()) c.alpha.push_back(must(table.decompose(t, g), "a generator"));
  c.beta.resize(t);
  c.gamma.resize(t);
  for (std::size_t i = 1; i < t; ++i) {
    const auto& h = c.elements[i];
    c.beta[i] = must(table.decompose(i, power(group, h, c.primes[i])), "h_i^{r_i}");
    const auto h_inv = group.inverse(h);
    for (std::size_t l = 0; l < i; ++l) {
      const auto conj = group.product(group.product(h, c.elements[l]), h_inv);
      c.gamma[i].push_back(must(table.decompose(i, conj), "a conjugate"));
    }
  }
  return {std::move(c), std::move(table)};
}

std::vector<std::uint64_t> group_primes(const GroupOracle& group, std::size_t cap) {
  return prime_factors(enumerate_closure(group, group.generators(), cap).size());
}

std::uint64_t foreign_prime(std::span<const std::uint64_t> primes) {
  for (std::uint64_t q = 2;; ++q)
    if (is_prime(q) && std::find(primes.begin(), primes.end(), q) == primes.end()) return q;
}

// Exponents over H_{i-1} that provably miss h_i: bump the first coordinate
// with m_j > 1 in h_i's normal form, which yields a different normal form.
std::vector<std::uint64_t> spoiled_exponents(const NormalFormTable& table, std::size_t i) {
  auto exps = table.decompose(i, table.sequence()[i]).value_or(std::vector<std::uint64_t>(i, 0));
  const auto& m = table.quotient_orders();
  for (std::size_t j = 0; j < i; ++j) {
    if (m[j] > 1) {
      exps[j] = (exps[j] + 1) % m[j];
      break;
    }
  }
  return exps;
}

class TableProver final : public Prover {
 public:
  TableProver(ProverSpec spec, std::uint64_t seed, std::size_t cap)
      : spec_(std::move(spec)), seed_(seed), cap_(cap) {}

  ProverKind kind() const override { return spec_.kind; }

  Commitment commit(const GroupOracle& group) override {
    auto primes = group_primes(group, cap_);
    if (spec_.kind == ProverKind::order_forger && !primes.empty()) {
      primes.push_back(foreign_prime(primes));
      std::sort(primes.begin(), primes.end());
    }
    auto built = build_with_table(group, primes, cap_);
    table_.emplace(std::move(built.table));
    Commitment c = std::move(built.commitment);
    if (spec_.kind == ProverKind::garbage_commitment) spoil_commitment(group, c);
    return c;
  }

  Response respond(const GroupOracle& group, std::span<const ElementCode> sequence,
                   std::span<const ElementCode> challenges) override {
    if (!table_ || !std::equal(sequence.begin(), sequence.end(), table_->sequence().begin(),
                               table_->sequence().end()))
      table_.emplace(group, sequence, cap_);
    if (spec_.kind == ProverKind::honest) return honest_respond(*table_, challenges);
    return adversary_respond(AdversaryStrategy{spec_.kind, seed_, spec_.target_round}, *table_, challenges);
  }

 private:
  void spoil_commitment(const GroupOracle& group, Commitment& c) const {
    if (!c.alpha.empty()) {
      for (std::size_t j = 0; j < c.elements.size(); ++j) {
        if (c.elements[j] != group.identity()) {
          ++c.alpha[0][j];
          return;
        }
      }
    }
    c.primes.push_back(2);  // nothing to bump: break the shape instead
  }

  ProverSpec spec_;
  std::uint64_t seed_;
  std::size_t cap_;
  std::optional<NormalFormTable> table_;
};

}  // namespace

ProverKind parse_prover_kind(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  throw std::invalid_argument("unknown prover '" + std::string(name) + "'");
}

std::string_view to_string(ProverKind kind) { return info(kind).name; }
std::string_view describe(ProverKind kind) { return info(kind).description; }

std::vector<ProverKind> adversary_kinds() {
  std::vector<ProverKind> out;
  for (const auto& k : kKinds)
    if (k.kind != ProverKind::honest) out.push_back(k.kind);
  return out;
}

RoundProfile profile_rounds(const NormalFormTable& table) {
  RoundProfile p;
  p.quotient_orders = table.quotient_orders();
  for (std::size_t i = 0; i < table.length(); ++i)
    p.inflatable.push_back(p.quotient_orders[i] == 1 && table.subgroup_order(i) > 1);
  return p;
}

Commitment build_commitment(const GroupOracle& group, std::span<const std::uint64_t> primes,
                            std::size_t cap) {
  return build_with_table(group, primes, cap).commitment;
}

Commitment honest_commit(const GroupOracle& group, std::size_t cap) {
  return build_commitment(group, group_primes(group, cap), cap);
}

Response honest_respond(const NormalFormTable& table, std::span<const ElementCode> challenges) {
  const std::size_t t = table.length();
  if (challenges.size() != t)
    throw std::invalid_argument("expected " + std::to_string(t) + " challenges, got " +
                                std::to_string(challenges.size()));
  Response r;
  r.bits.resize(t);
  r.exponents.resize(t);
  for (std::size_t i = 0; i < t; ++i) {
    if (table.is_member(i, challenges[i])) {
      r.bits[i] = 0;
      r.exponents[i] = table.decompose(i, table.sequence()[i]).value_or(std::vector<std::uint64_t>(i, 0));
    } else {
      r.bits[i] = 1;
      r.exponents[i].assign(i, 0);
    }
  }
  return r;
}

Response honest_respond(const GroupOracle& group, std::span<const ElementCode> sequence,
                        std::span<const ElementCode> challenges, std::size_t cap) {
  return honest_respond(NormalFormTable(group, sequence, cap), challenges);
}

Response adversary_respond(const AdversaryStrategy& strategy, const NormalFormTable& table,
                           std::span<const ElementCode> challenges) {
  Response r = honest_respond(table, challenges);
  Rng rng(strategy.seed);
  const auto profile = profile_rounds(table);
  const std::size_t t = table.length();

  switch (strategy.kind) {
    case ProverKind::honest:
    case ProverKind::garbage_commitment:
      break;
    case ProverKind::guess_inflate: {
      std::optional<std::size_t> target = strategy.target_round;
      if (!target) {
        const auto it = std::find(profile.inflatable.begin(), profile.inflatable.end(), true);
        if (it != profile.inflatable.end()) target = static_cast<std::size_t>(it - profile.inflatable.begin());
      }
      if (target && *target < t) {
        r.bits[*target] = random_bit(rng) ? 1 : 0;
        if (profile.inflatable[*target]) r.exponents[*target] = spoiled_exponents(table, *target);
      }
      break;
    }
    case ProverKind::deflate:
      for (std::size_t i = 0; i < t; ++i) {
        if (profile.quotient_orders[i] == 1) continue;
        for (std::size_t j = 0; j < i; ++j)
          r.exponents[i][j] = uniform_below(rng, std::max<std::uint64_t>(profile.quotient_orders[j], 1));
        r.bits[i] = random_bit(rng) ? 1 : 0;
      }
      break;
    case ProverKind::random_bits:
      for (auto& b : r.bits) b = random_bit(rng) ? 1 : 0;
      break;
    case ProverKind::order_forger:
      for (std::size_t i = 0; i < t; ++i) {
        if (!profile.inflatable[i]) continue;
        r.bits[i] = random_bit(rng) ? 1 : 0;
        r.exponents[i] = spoiled_exponents(table, i);
      }
      break;
  }
  return r;
}

Response adversary_respond(const AdversaryStrategy& strategy, const GroupOracle& group,
                           std::span<const ElementCode> sequence,
                           std::span<const ElementCode> challenges, std::size_t cap) {
  return adversary_respond(strategy, NormalFormTable(group, sequence, cap), challenges);
}

std::unique_ptr<Prover> make_prover(const ProverSpec& spec, std::uint64_t seed, std::size_t cap) {
  return std::make_unique<TableProver>(spec, seed, cap);
}

}  // namespace solvorder
