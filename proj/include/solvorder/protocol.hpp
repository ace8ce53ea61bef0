#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "solvorder/group.hpp"
#include "solvorder/polycyclic.hpp"
#include "solvorder/prover.hpp"
#include "solvorder/rng.hpp"

namespace solvorder {

enum class ProtocolKind { two_message, three_message };

ProtocolKind parse_protocol_kind(std::string_view name);  // "2msg" | "3msg"
std::string_view to_string(ProtocolKind kind);

/// Verifier's masked elements h_i^{s_i} x_i. The 2-message challenge also
/// carries h_1..h_t; the secrets s_i, x_i never leave the verifier.
struct Challenge {
  std::vector<ElementCode> sequence;
  std::vector<ElementCode> masked;
};

/// Order(v) or Abort (the verifier's ⊥).
struct Outcome {
  std::optional<BigInt> order;
  std::string abort_reason;

  static Outcome accept(BigInt value) { return {std::move(value), {}}; }
  static Outcome abort(std::string reason) { return {std::nullopt, std::move(reason)}; }
  bool aborted() const noexcept { return !order.has_value(); }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct VerifierLimits {
  std::size_t closure_cap = kDefaultClosureCap;
  /// H_{i-1} up to this size is sampled exactly; beyond it the subproduct
  /// sampler runs with epsilon = 2^{-2n}.
  std::size_t exact_sampler_limit = 10'000;
  /// 3-message guardrail: t <= length_factor * n * s * ceil(log2 closure_cap).
  std::size_t length_factor = 4;
};

std::size_t max_sequence_length(const GroupOracle& group, const VerifierLimits& limits);

/// Private verifier state carried from challenge to finalization.
struct VerifierState {
  std::vector<ElementCode> sequence;
  std::vector<std::uint64_t> primes;
  std::vector<std::uint8_t> secret_bits;
  unsigned encoding_length = 0;
};

struct SetupResult {
  VerifierState state;
  Challenge challenge;
  /// Set when the verifier aborts before sending anything.
  std::optional<Outcome> early_outcome;
};

/// h^{bit} * x.
ElementCode mask_element(const GroupOracle& group, const ElementCode& h, bool bit, const ElementCode& x);

/// Steps 2-3 shared by both protocols: s_i uniform, x_i drawn from H_{i-1},
/// masked_i = h_i^{s_i} x_i. With `check_primes`, also Abort unless
/// h_i^{r_i} lies in H_{i-1} (only checkable while H_{i-1} is enumerated).
struct ChallengeDraw {
  std::vector<std::uint8_t> bits;
  std::vector<ElementCode> masked;
  std::optional<std::string> failure;
};
ChallengeDraw draw_challenges(const GroupOracle& group, std::span<const ElementCode> sequence,
                              std::span<const std::uint64_t> primes, Rng& rng, bool check_primes,
                              const VerifierLimits& limits = {});

/// 2-message Steps 1-3: the verifier refines its own PCGS using `primes`.
SetupResult verifier_setup_2msg(const GroupOracle& group, std::span<const std::uint64_t> primes,
                                std::uint64_t seed, const VerifierLimits& limits = {});

struct CommitmentCheck {
  bool passed = false;
  std::string reason;
};

/// 3-message Step 1: shapes, guardrails (t bound, primality, exponent
/// bound 2^n) and equalities (a), (b), (c).
CommitmentCheck verifier_check_commitment(const GroupOracle& group, const Commitment& commitment,
                                          const VerifierLimits& limits = {});

/// Steps 5-6. Exponents at or above 2^n and malformed shapes abort.
Outcome verifier_finalize(const GroupOracle& group, const VerifierState& state, const Response& response);

// ---------------------------------------------------------------------------
// Message codec: JSON text, element codes as fixed-width hex, exponents as
// decimal integers.

class MalformedMessage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_message(const Commitment& commitment);
std::string encode_message(const Challenge& challenge);
std::string encode_message(const Response& response);

/// Decoders validate syntax and that every element code is well formed for
/// the group; shape checks are left to the verifier.
Commitment decode_commitment(std::string_view text, const GroupOracle& group);
Challenge decode_challenge(std::string_view text, const GroupOracle& group);
Response decode_response(std::string_view text);

// ---------------------------------------------------------------------------
// Orchestration

enum class Direction { verifier_to_prover, prover_to_verifier };

struct TranscriptEntry {
  Direction direction = Direction::verifier_to_prover;
  std::string kind;
  std::string payload;
};

struct Transcript {
  ProtocolKind protocol = ProtocolKind::two_message;
  std::string group;
  std::string prover;
  std::uint64_t seed = 0;
  std::vector<TranscriptEntry> messages;
  std::optional<CommitmentCheck> commitment_check;
  QueryCounts verifier_queries;
  QueryCounts prover_queries;
  Outcome outcome;

  std::size_t message_bytes() const;
  std::string to_json() const;
};

struct RunResult {
  Outcome outcome;
  Transcript transcript;
};

/// Seeds: the verifier uses derive_seed(seed, kVerifierStream), a prover
/// built from a ProverSpec uses derive_seed(seed, kProverStream).
inline constexpr std::uint64_t kVerifierStream = 1;
inline constexpr std::uint64_t kProverStream = 2;

RunResult run_protocol_2msg(const GroupOracle& group, std::span<const std::uint64_t> primes,
                            Prover& prover, std::uint64_t seed, const VerifierLimits& limits = {});
RunResult run_protocol_2msg(const GroupOracle& group, std::span<const std::uint64_t> primes,
                            const ProverSpec& prover, std::uint64_t seed,
                            const VerifierLimits& limits = {});

RunResult run_protocol_3msg(const GroupOracle& group, Prover& prover, std::uint64_t seed,
                            const VerifierLimits& limits = {});
RunResult run_protocol_3msg(const GroupOracle& group, const ProverSpec& prover, std::uint64_t seed,
                            const VerifierLimits& limits = {});

struct ProtocolVariant {
  ProtocolKind kind = ProtocolKind::two_message;
  std::vector<std::uint64_t> primes;  // 2-message only
  ProverSpec prover;
};

struct RepeatedResult {
  Outcome outcome;
  std::vector<RunResult> runs;
};

/// Unanimous agreement: Order(v) iff no run aborted and all agree on v.
Outcome combine_unanimous(std::span<const Outcome> outcomes);

/// k independent executions; run r uses derive_seed(seed, r) (k = 1 uses
/// seed itself, so a single repetition equals a plain run).
RepeatedResult run_repeated(const GroupOracle& group, const ProtocolVariant& variant, unsigned k,
                            std::uint64_t seed, const VerifierLimits& limits = {});

RunResult run_protocol(const GroupOracle& group, const ProtocolVariant& variant, std::uint64_t seed,
                       const VerifierLimits& limits = {});

}  // namespace solvorder
