#include "solvorder/polycyclic.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace solvorder {

namespace {

ElementCode commutator(const GroupOracle& group, const ElementCode& a, const ElementCode& b) {
  const auto ab = group.product(a, b);
  const auto ab_ainv = group.product(ab, group.inverse(a));
  return group.product(ab_ainv, group.inverse(b));
}

ElementCode conjugate(const GroupOracle& group, const ElementCode& by, const ElementCode& x,
                      const ElementCode& by_inverse) {
  return group.product(group.product(by, x), by_inverse);
}

// Normal closure of `seeds` inside the group generated by `ambient`.
Subgroup normal_closure(const GroupOracle& group, std::span<const ElementCode> ambient,
                        std::span<const ElementCode> seeds, std::size_t cap) {
  Subgroup closure = enumerate_closure(group, seeds, cap);
  std::vector<ElementCode> ambient_inv;
  for (const auto& y : ambient) ambient_inv.push_back(group.inverse(y));
  bool changed = true;
  while (changed) {
    changed = false;
    const auto gens = closure.generators();
    for (std::size_t i = 0; i < ambient.size(); ++i) {
      for (const auto& k : gens) {
        const auto c = conjugate(group, ambient[i], k, ambient_inv[i]);
        if (!closure.contains(c)) {
          closure = extend_closure(group, std::move(closure), c, cap);
          changed = true;
        }
      }
    }
  }
  return closure;
}

}  // namespace

PolycyclicSequence compute_pcgs(const GroupOracle& group, std::size_t cap) {
  // Derived series G = D_0 > D_1 > ... > D_k = {e}.
  std::vector<Subgroup> series;
  series.push_back(enumerate_closure(group, group.generators(), cap));
  while (series.back().size() > 1) {
    const auto& top = series.back();
    const auto& gens = top.generators();
    std::vector<ElementCode> commutators;
    for (std::size_t a = 0; a < gens.size(); ++a)
      for (std::size_t b = a + 1; b < gens.size(); ++b) commutators.push_back(commutator(group, gens[a], gens[b]));
    Subgroup next = normal_closure(group, gens, commutators, cap);
    if (next.size() == top.size())
      throw NotSolvable("derived series stalls at a perfect subgroup of order " +
                        std::to_string(top.size()));
    series.push_back(std::move(next));
  }

  // Bottom-up: every subgroup between D_{d+1} and D_d is normal in D_d.
  PolycyclicSequence pcgs;
  Subgroup chain(group.identity());
  for (auto layer = series.rbegin() + 1; layer != series.rend(); ++layer) {
    std::vector<ElementCode> candidates = layer->generators();
    candidates.insert(candidates.end(), layer->elements().begin(), layer->elements().end());
    for (const auto& c : candidates) {
      if (chain.size() == layer->size()) break;
      if (chain.contains(c)) continue;
      const std::size_t before = chain.size();
      chain = extend_closure(group, std::move(chain), c, cap);
      pcgs.elements.push_back(c);
      pcgs.quotient_orders.push_back(chain.size() / before);
    }
  }
  return pcgs;
}

bool is_prime(std::uint64_t value) {
  if (value < 2) return false;
  if (value % 2 == 0) return value == 2;
  for (std::uint64_t d = 3; d <= value / d; d += 2)
    if (value % d == 0) return false;
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t value) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d <= value / d; ++d) {
    if (value % d != 0) continue;
    out.push_back(d);
    while (value % d == 0) value /= d;
  }
  if (value > 1) out.push_back(value);
  return out;
}

std::vector<BigInt> mu_sequence(std::span<const std::uint64_t> primes, unsigned n) {
  if (primes.empty()) throw std::invalid_argument("prime set must be nonempty");
  if (n == 0) throw std::invalid_argument("encoding length must be >= 1");
  std::vector<std::uint64_t> sorted(primes.begin(), primes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("prime set has repeated entries");
  for (auto p : sorted)
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");

  // tail[i] = p_{i+1}^n * ... * p_l^n
  const std::size_t count = sorted.size();
  std::vector<BigInt> tail(count + 1, BigInt(1));
  for (std::size_t i = count; i-- > 0;) tail[i] = tail[i + 1] * boost::multiprecision::pow(BigInt(sorted[i]), n);

  std::vector<BigInt> mu;
  mu.reserve(count * n);
  for (std::size_t i = 0; i < count; ++i)
    for (unsigned a = 1; a <= n; ++a)
      mu.push_back(boost::multiprecision::pow(BigInt(sorted[i]), n - a) * tail[i + 1]);
  return mu;
}

PolycyclicSequence refine_with_primes(const GroupOracle& group, const PolycyclicSequence& base,
                                      std::span<const std::uint64_t> primes, unsigned n) {
  PolycyclicSequence refined;
  if (base.elements.empty()) return refined;
  const auto mu = mu_sequence(primes, n);
  const std::size_t block = mu.size();

  std::vector<std::uint64_t> ratio(block, 0);  // ratio[j] = mu(j-1)/mu(j), j >= 1
  for (std::size_t j = 1; j < block; ++j) ratio[j] = static_cast<std::uint64_t>(mu[j - 1] / mu[j]);
  const std::uint64_t smallest = *std::min_element(primes.begin(), primes.end());

  for (const auto& k : base.elements) {
    // k^{mu(j)} computed from the tail: mu(l*n) = 1 and mu(j-1) = ratio * mu(j).
    std::vector<ElementCode> powers(block, k);
    for (std::size_t j = block - 1; j-- > 0;) powers[j] = power(group, powers[j + 1], ratio[j + 1]);
    for (std::size_t j = 0; j < block; ++j) {
      refined.elements.push_back(powers[j]);
      refined.primes.push_back(j == 0 ? smallest : ratio[j]);
    }
  }
  return refined;
}

// ---------------------------------------------------------------------------
// NormalFormTable

NormalFormTable::NormalFormTable(const GroupOracle& group, std::span<const ElementCode> sequence,
                                 std::size_t cap)
    : sequence_(sequence.begin(), sequence.end()) {
  codes_.push_back(group.identity());
  nodes_.push_back(Node{});
  index_.emplace(group.identity(), 0);
  prefix_orders_.push_back(1);

  for (std::size_t j = 0; j < sequence_.size(); ++j) {
    const auto level = static_cast<std::uint32_t>(j + 1);
    const auto& h = sequence_[j];
    const std::size_t previous = nodes_.size();

    if (!index_.contains(h)) {
      // Normality of H_{j-1} in H_j: conjugates of earlier generators stay put.
      const auto h_inv = group.inverse(h);
      for (std::size_t l = 0; l < j; ++l) {
        const auto c = conjugate(group, h, sequence_[l], h_inv);
        if (!index_.contains(c))
          throw InvalidPolycyclicSequence("H_" + std::to_string(j) + " is not normal in H_" +
                                          std::to_string(j + 1));
      }
    }

    // Coset layers H_{j-1} h^a for a = 1.. until h^a falls back into H_{j-1}.
    std::uint64_t m = 1;
    ElementCode y = h;
    while (!index_.contains(y) || index_.at(y) >= previous) {
      if (index_.contains(y))
        throw InvalidPolycyclicSequence("coset layers of h_" + std::to_string(j + 1) + " overlap");
      for (std::size_t x = 0; x < previous; ++x) {
        const auto z = x == 0 ? y : group.product(codes_[x], y);
        if (!index_.emplace(z, static_cast<std::uint32_t>(codes_.size())).second)
          throw InvalidPolycyclicSequence("coset layers of h_" + std::to_string(j + 1) + " overlap");
        codes_.push_back(z);
        nodes_.push_back(Node{static_cast<std::uint32_t>(x), level, m});
        if (codes_.size() > cap) throw ClosureOverflow(cap);
      }
      ++m;
      y = group.product(y, h);
    }
    quotient_orders_.push_back(m);
    prefix_orders_.push_back(nodes_.size());
  }
}

std::optional<std::size_t> NormalFormTable::level_of(const ElementCode& h) const {
  const auto it = index_.find(h);
  if (it == index_.end()) return std::nullopt;
  return nodes_[it->second].level;
}

std::size_t NormalFormTable::subgroup_order(std::size_t j) const {
  if (j > sequence_.size()) throw std::out_of_range("subgroup index beyond sequence length");
  return prefix_orders_[j];
}

bool NormalFormTable::is_member(std::size_t j, const ElementCode& h) const {
  if (j > sequence_.size()) throw std::out_of_range("subgroup index beyond sequence length");
  const auto level = level_of(h);
  return level && *level <= j;
}

std::optional<Decomposition> NormalFormTable::decompose(std::size_t j, const ElementCode& h) const {
  if (!is_member(j, h)) return std::nullopt;
  Decomposition exps(j, 0);
  for (std::uint32_t at = index_.at(h); at != 0; at = nodes_[at].parent)
    exps[nodes_[at].level - 1] = nodes_[at].exponent;
  return exps;
}

std::vector<std::uint64_t> quotient_orders(const GroupOracle& group, std::span<const ElementCode> sequence,
                                           std::size_t cap) {
  return NormalFormTable(group, sequence, cap).quotient_orders();
}

std::optional<Decomposition> decompose(const GroupOracle& group, const PolycyclicSequence& pcgs,
                                       std::size_t j, const ElementCode& h, std::size_t cap) {
  return NormalFormTable(group, pcgs.elements, cap).decompose(j, h);
}

bool is_member(const GroupOracle& group, const PolycyclicSequence& pcgs, std::size_t j,
               const ElementCode& h, std::size_t cap) {
  return NormalFormTable(group, pcgs.elements, cap).is_member(j, h);
}

}  // namespace solvorder
