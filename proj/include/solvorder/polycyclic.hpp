#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "solvorder/group.hpp"

namespace solvorder {

/**
 * Sequence h_1..h_t with H_j = <h_1..h_j> and H_{j-1} normal in H_j.
 *
 * `primes` (r_j) and `quotient_orders` (m_j = |H_j|/|H_{j-1}|) are either
 * empty or of length t. When both are present, m_j is 1 or r_j.
 */
struct PolycyclicSequence {
  std::vector<ElementCode> elements;
  std::vector<std::uint64_t> primes;
  std::vector<std::uint64_t> quotient_orders;

  std::size_t length() const noexcept { return elements.size(); }
};

/// Exponents (a_1..a_j), a_i in [0, m_i), with h = h_1^{a_1} ... h_j^{a_j}.
using Decomposition = std::vector<std::uint64_t>;

class NotSolvable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPolycyclicSequence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brute-force PCGS of <generators>: derived series computed by enumeration,
/// each abelian layer split into cyclic steps. Quotient orders are filled in.
/// Throws NotSolvable when the derived series stalls above {e}.
PolycyclicSequence compute_pcgs(const GroupOracle& group, std::size_t cap = kDefaultClosureCap);

/// mu(1..l*n): lambda(i,a) = p_i^{n-a} * p_{i+1}^n * ... * p_l^n listed for
/// i = 1..l, a = 1..n, primes taken in ascending order. Strictly decreasing,
/// last entry 1. Throws std::invalid_argument on empty, repeated or
/// non-prime input, or n = 0.
std::vector<BigInt> mu_sequence(std::span<const std::uint64_t> primes, unsigned n);

/// Replaces each k_i by (k_i^{mu(1)}, ..., k_i^{mu(l*n)}) and attaches r:
/// mu(j-1)/mu(j) inside a block and p_1 at the head of every block (the
/// head's quotient order divides p_1 since the p_1-part of |G| is at most
/// p_1^n). Quotient orders are not computed here; see NormalFormTable.
PolycyclicSequence refine_with_primes(const GroupOracle& group, const PolycyclicSequence& base,
                                      std::span<const std::uint64_t> primes, unsigned n);

bool is_prime(std::uint64_t value);

/// Distinct prime factors, ascending, by trial division.
std::vector<std::uint64_t> prime_factors(std::uint64_t value);

/**
 * Normal-form table for a polycyclic sequence: every element of H_t with its
 * level (least j such that h is in H_j) and the tree edge h = parent * h_j^a.
 *
 * Building it enumerates H_t coset by coset, measures each m_j and checks
 * normality (h_j h_l h_j^{-1} in H_{j-1} for l < j). Afterwards decompose
 * and membership are lookups and cost no oracle queries.
 */
class NormalFormTable {
 public:
  NormalFormTable(const GroupOracle& group, std::span<const ElementCode> sequence,
                  std::size_t cap = kDefaultClosureCap);

  std::size_t length() const noexcept { return sequence_.size(); }
  const std::vector<ElementCode>& sequence() const noexcept { return sequence_; }
  std::size_t order() const noexcept { return nodes_.size(); }
  const std::vector<std::uint64_t>& quotient_orders() const noexcept { return quotient_orders_; }
  const std::vector<ElementCode>& elements() const noexcept { return codes_; }

  /// Decomposition over H_j, or nullopt when h is not in H_j. 0 <= j <= t.
  std::optional<Decomposition> decompose(std::size_t j, const ElementCode& h) const;
  bool is_member(std::size_t j, const ElementCode& h) const;
  /// Least j with h in H_j; nullopt outside H_t.
  std::optional<std::size_t> level_of(const ElementCode& h) const;
  /// |H_j|.
  std::size_t subgroup_order(std::size_t j) const;

 private:
  struct Node {
    std::uint32_t parent = 0;
    std::uint32_t level = 0;  // 0 for the identity
    std::uint64_t exponent = 0;
  };

  std::vector<ElementCode> sequence_;
  std::vector<std::uint64_t> quotient_orders_;
  std::vector<std::size_t> prefix_orders_;
  std::vector<ElementCode> codes_;
  std::vector<Node> nodes_;
  std::unordered_map<ElementCode, std::uint32_t, ElementCodeHash> index_;
};

/// Quotient orders m_j; throws InvalidPolycyclicSequence when normality fails.
std::vector<std::uint64_t> quotient_orders(const GroupOracle& group,
                                           std::span<const ElementCode> sequence,
                                           std::size_t cap = kDefaultClosureCap);

std::optional<Decomposition> decompose(const GroupOracle& group, const PolycyclicSequence& pcgs,
                                       std::size_t j, const ElementCode& h,
                                       std::size_t cap = kDefaultClosureCap);

bool is_member(const GroupOracle& group, const PolycyclicSequence& pcgs, std::size_t j,
               const ElementCode& h, std::size_t cap = kDefaultClosureCap);

}  // namespace solvorder
