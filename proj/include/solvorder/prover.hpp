#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solvorder/group.hpp"
#include "solvorder/polycyclic.hpp"

namespace solvorder {

/// First message of the 3-message protocol.
///
/// alpha[i][j]: g_{i+1} = h_1^{alpha[i][0]} ... h_t^{alpha[i][t-1]}      (s rows of t)
/// beta[i][j]:  h_{i+1}^{r_{i+1}} = prod_{j<i} h_{j+1}^{beta[i][j]}       (row i has i entries)
/// gamma[i][l][j]: h_{i+1} h_{l+1} h_{i+1}^{-1} = prod_{j<i} h_{j+1}^{...} (l < i)
/// Row 0 of beta and gamma is empty; h_1^{r_1} = e is checked separately.
struct Commitment {
  std::vector<ElementCode> elements;
  std::vector<std::uint64_t> primes;
  std::vector<std::vector<std::uint64_t>> alpha;
  std::vector<std::vector<std::uint64_t>> beta;
  std::vector<std::vector<std::vector<std::uint64_t>>> gamma;
};

/// Last message of both protocols: bit b_i and exponents a_{i,1..i-1} per
/// round (row i, 0-based, has i entries).
struct Response {
  std::vector<std::uint8_t> bits;
  std::vector<std::vector<std::uint64_t>> exponents;
};

enum class ProverKind {
  honest,
  guess_inflate,       // guesses s_i on one trivial round and claims r_i there
  deflate,             // random exponents and bits on every nontrivial round
  garbage_commitment,  // honest play after tampering one commitment entry
  random_bits,         // honest exponents, uniformly random bits
  order_forger,        // valid commitment over a padded prime set, inflates every trivial round
};

ProverKind parse_prover_kind(std::string_view name);
std::string_view to_string(ProverKind kind);
std::string_view describe(ProverKind kind);
/// Every adversarial kind, in declaration order.
std::vector<ProverKind> adversary_kinds();

/// A prover kind plus its knobs. target_round is 0-based; when unset,
/// guess_inflate picks the first trivial round it can inflate.
struct ProverSpec {
  ProverKind kind = ProverKind::honest;
  std::optional<std::size_t> target_round;
};

/// AdversaryStrategy: deterministic given the seed.
struct AdversaryStrategy {
  ProverKind kind = ProverKind::guess_inflate;
  std::uint64_t seed = 0;
  std::optional<std::size_t> target_round;
};

/// What an unbounded prover knows about each round of a sequence.
struct RoundProfile {
  std::vector<std::uint64_t> quotient_orders;
  /// Trivial round whose H_{i-1} is nontrivial, so some exponent vector
  /// evaluates to something other than h_i.
  std::vector<bool> inflatable;
};
RoundProfile profile_rounds(const NormalFormTable& table);

/// Honest Step 0: order by enumeration, primes by trial division, refined
/// sequence, then alpha/beta/gamma by decomposition. Throws NotSolvable.
Commitment honest_commit(const GroupOracle& group, std::size_t cap = kDefaultClosureCap);

/// Commitment for a caller-chosen prime set (must cover |G|'s factors).
Commitment build_commitment(const GroupOracle& group, std::span<const std::uint64_t> primes,
                            std::size_t cap = kDefaultClosureCap);

/// Member challenge: b_i = 0 with h_i's decomposition over H_{i-1} (zeros when
/// h_i has none). Non-member: b_i = 1 with zeros.
Response honest_respond(const NormalFormTable& table, std::span<const ElementCode> challenges);
Response honest_respond(const GroupOracle& group, std::span<const ElementCode> sequence,
                        std::span<const ElementCode> challenges, std::size_t cap = kDefaultClosureCap);

Response adversary_respond(const AdversaryStrategy& strategy, const NormalFormTable& table,
                           std::span<const ElementCode> challenges);
Response adversary_respond(const AdversaryStrategy& strategy, const GroupOracle& group,
                           std::span<const ElementCode> sequence,
                           std::span<const ElementCode> challenges, std::size_t cap = kDefaultClosureCap);

/// Per-execution prover. Holds its seed and a cached normal-form table.
class Prover {
 public:
  virtual ~Prover() = default;
  virtual ProverKind kind() const = 0;
  virtual Commitment commit(const GroupOracle& group) = 0;
  virtual Response respond(const GroupOracle& group, std::span<const ElementCode> sequence,
                           std::span<const ElementCode> challenges) = 0;
};

std::unique_ptr<Prover> make_prover(const ProverSpec& spec, std::uint64_t seed,
                                    std::size_t cap = kDefaultClosureCap);

}  // namespace solvorder
