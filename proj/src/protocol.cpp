#include "solvorder/protocol.hpp"

#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "solvorder/sampling.hpp"

namespace solvorder {

using nlohmann::json;

ProtocolKind parse_protocol_kind(std::string_view name) {
  if (name == "2msg") return ProtocolKind::two_message;
  if (name == "3msg") return ProtocolKind::three_message;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "' (expected 2msg or 3msg)");
}

std::string_view to_string(ProtocolKind kind) {
  return kind == ProtocolKind::two_message ? "2msg" : "3msg";
}

std::size_t max_sequence_length(const GroupOracle& group, const VerifierLimits& limits) {
  const auto cap_bits = static_cast<std::size_t>(
      std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(limits.closure_cap, 2)))));
  const std::size_t s = std::max<std::size_t>(group.generators().size(), 1);
  return limits.length_factor * group.encoding_length() * s * cap_bits;
}

namespace {

bool exponent_too_large(std::uint64_t e, unsigned n) { return n < 64 && (e >> n) != 0; }

std::span<const ElementCode> prefix(std::span<const ElementCode> seq, std::size_t count) {
  return seq.subspan(0, count);
}

}  // namespace

ElementCode mask_element(const GroupOracle& group, const ElementCode& h, bool bit, const ElementCode& x) {
  // Same query cost for either bit.
  return group.product(power(group, h, bit ? 1u : 0u), x);
}

ChallengeDraw draw_challenges(const GroupOracle& group, std::span<const ElementCode> sequence,
                              std::span<const std::uint64_t> primes, Rng& rng, bool check_primes,
                              const VerifierLimits& limits) {
  ChallengeDraw out;
  const unsigned n = group.encoding_length();
  const double epsilon = std::ldexp(1.0, -2 * static_cast<int>(n));
  std::optional<Subgroup> enumerated(Subgroup(group.identity()));

  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& h = sequence[i];
    if (check_primes && enumerated && !enumerated->contains(power(group, h, primes[i]))) {
      out.failure = "refinement check failed: h_" + std::to_string(i + 1) + "^" +
                    std::to_string(primes[i]) + " is not in H_" + std::to_string(i);
      return out;
    }
    const bool bit = random_bit(rng);
    ElementCode x;
    if (enumerated) {
      x = enumerated->elements()[uniform_below(rng, enumerated->size())];
    } else {
      Rng sub(rng());
      SubproductSampler sampler(group, prefix(sequence, i), epsilon, sub, limits.closure_cap);
      x = sampler.draw(sub);
    }
    out.bits.push_back(bit ? 1 : 0);
    out.masked.push_back(mask_element(group, h, bit, x));

    if (enumerated && i + 1 < sequence.size()) {
      try {
        enumerated = extend_closure(group, std::move(*enumerated), h, limits.exact_sampler_limit);
      } catch (const ClosureOverflow&) {
        enumerated.reset();
      }
    }
  }
  return out;
}

SetupResult verifier_setup_2msg(const GroupOracle& group, std::span<const std::uint64_t> primes,
                                std::uint64_t seed, const VerifierLimits& limits) {
  SetupResult result;
  result.state.encoding_length = group.encoding_length();
  PolycyclicSequence refined;
  try {
    const auto base = compute_pcgs(group, limits.closure_cap);
    refined = refine_with_primes(group, base, primes, group.encoding_length());
  } catch (const std::exception& e) {
    result.early_outcome = Outcome::abort(std::string("setup failed: ") + e.what());
    return result;
  }

  Rng rng(seed);
  auto draw = draw_challenges(group, refined.elements, refined.primes, rng, true, limits);
  if (draw.failure) {
    result.early_outcome = Outcome::abort(*draw.failure);
    return result;
  }
  result.state.sequence = refined.elements;
  result.state.primes = refined.primes;
  result.state.secret_bits = std::move(draw.bits);
  result.challenge.sequence = refined.elements;
  result.challenge.masked = std::move(draw.masked);
  return result;
}

CommitmentCheck verifier_check_commitment(const GroupOracle& group, const Commitment& c,
                                          const VerifierLimits& limits) {
  auto fail = [](std::string why) { return CommitmentCheck{false, std::move(why)}; };
  const unsigned n = group.encoding_length();
  const auto& gens = group.generators();
  const std::size_t t = c.elements.size();
  const std::span<const ElementCode> seq(c.elements);

  if (t > max_sequence_length(group, limits))
    return fail("sequence length " + std::to_string(t) + " exceeds bound " +
                std::to_string(max_sequence_length(group, limits)));
  if (c.primes.size() != t) return fail("primes list has wrong length");
  if (c.alpha.size() != gens.size()) return fail("alpha has wrong number of rows");
  if (c.beta.size() != t || c.gamma.size() != t) return fail("beta/gamma have wrong number of rows");
  for (const auto& row : c.alpha)
    if (row.size() != t) return fail("alpha row has wrong length");
  for (std::size_t i = 0; i < t; ++i) {
    if (c.beta[i].size() != i) return fail("beta row " + std::to_string(i + 1) + " has wrong length");
    if (c.gamma[i].size() != i) return fail("gamma row " + std::to_string(i + 1) + " has wrong length");
    for (const auto& g : c.gamma[i])
      if (g.size() != i) return fail("gamma entry has wrong length");
  }
  for (const auto& h : c.elements)
    if (!group.is_element_code(h)) return fail("malformed element code");
  for (auto r : c.primes)
    if (!is_prime(r)) return fail(std::to_string(r) + " is not prime");

  auto oversized = [n](const std::vector<std::uint64_t>& row) {
    for (auto e : row)
      if (exponent_too_large(e, n)) return true;
    return false;
  };
  for (const auto& row : c.alpha)
    if (oversized(row)) return fail("alpha exponent exceeds 2^n");
  for (std::size_t i = 0; i < t; ++i) {
    if (oversized(c.beta[i])) return fail("beta exponent exceeds 2^n");
    for (const auto& g : c.gamma[i])
      if (oversized(g)) return fail("gamma exponent exceeds 2^n");
  }

  // (a) every generator lies in H_t.
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (eval_word(group, seq, c.alpha[i]) != gens[i])
      return fail("check (a) failed for g_" + std::to_string(i + 1));
  // (b) h_i^{r_i} lies in H_{i-1}.
  for (std::size_t i = 0; i < t; ++i) {
    const auto lhs = power(group, c.elements[i], c.primes[i]);
    const auto rhs = i == 0 ? group.identity() : eval_word(group, prefix(seq, i), c.beta[i]);
    if (lhs != rhs) return fail("check (b) failed for h_" + std::to_string(i + 1));
  }
  // (c) H_{i-1} is normalised by h_i.
  for (std::size_t i = 1; i < t; ++i) {
    const auto h_inv = group.inverse(c.elements[i]);
    for (std::size_t l = 0; l < i; ++l) {
      const auto conj = group.product(group.product(c.elements[i], c.elements[l]), h_inv);
      if (conj != eval_word(group, prefix(seq, i), c.gamma[i][l]))
        return fail("check (c) failed for h_" + std::to_string(i + 1) + ", h_" + std::to_string(l + 1));
    }
  }
  return {true, {}};
}

Outcome verifier_finalize(const GroupOracle& group, const VerifierState& state, const Response& response) {
  const std::size_t t = state.sequence.size();
  const std::span<const ElementCode> seq(state.sequence);
  if (response.bits.size() != t || response.exponents.size() != t)
    return Outcome::abort("response has wrong number of rounds");
  for (std::size_t i = 0; i < t; ++i) {
    if (response.exponents[i].size() != i)
      return Outcome::abort("exponent row " + std::to_string(i + 1) + " has wrong length");
    if (response.bits[i] > 1) return Outcome::abort("bit " + std::to_string(i + 1) + " is not 0/1");
    for (auto e : response.exponents[i])
      if (exponent_too_large(e, state.encoding_length))
        return Outcome::abort("exponent in row " + std::to_string(i + 1) + " exceeds 2^n");
  }

  BigInt order = 1;
  for (std::size_t i = 0; i < t; ++i) {
    if (eval_word(group, prefix(seq, i), response.exponents[i]) == state.sequence[i]) continue;  // l_i = 1
    if (response.bits[i] == state.secret_bits[i]) {
      order *= state.primes[i];  // l_i = r_i
      continue;
    }
    return Outcome::abort("round " + std::to_string(i + 1) + ": no decomposition and b_i != s_i");
  }
  return Outcome::accept(std::move(order));
}

// ---------------------------------------------------------------------------
// Codec

namespace {

json codes_to_json(const std::vector<ElementCode>& codes) {
  json out = json::array();
  for (const auto& c : codes) out.push_back(c.to_hex());
  return out;
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw MalformedMessage(std::string("missing field '") + key + "'");
  return obj.at(key);
}

void expect_type(const json& obj, const char* type) {
  const auto& t = field(obj, "type");
  if (!t.is_string() || t.get<std::string>() != type)
    throw MalformedMessage(std::string("expected a ") + type + " message");
}

const json& array_of(const json& value, const char* what) {
  if (!value.is_array()) throw MalformedMessage(std::string(what) + " is not a list");
  return value;
}

std::uint64_t natural(const json& value, const char* what) {
  if (!value.is_number_unsigned()) throw MalformedMessage(std::string(what) + " is not a non-negative integer");
  return value.get<std::uint64_t>();
}

std::vector<std::uint64_t> naturals(const json& value, const char* what) {
  std::vector<std::uint64_t> out;
  for (const auto& v : array_of(value, what)) out.push_back(natural(v, what));
  return out;
}

std::vector<std::vector<std::uint64_t>> natural_rows(const json& value, const char* what) {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& row : array_of(value, what)) out.push_back(naturals(row, what));
  return out;
}

std::vector<ElementCode> codes_from_json(const json& value, const GroupOracle& group, const char* what) {
  std::vector<ElementCode> out;
  for (const auto& v : array_of(value, what)) {
    if (!v.is_string()) throw MalformedMessage(std::string(what) + " entry is not a string");
    ElementCode code;
    try {
      code = ElementCode::from_hex(v.get<std::string>(), group.encoding_length());
    } catch (const std::invalid_argument& e) {
      throw MalformedMessage(e.what());
    }
    if (!group.is_element_code(code)) throw MalformedMessage("string " + code.to_hex() + " is not an element code");
    out.push_back(code);
  }
  return out;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedMessage(std::string("unparseable message: ") + e.what());
  }
}

json outcome_json(const Outcome& o) {
  if (o.aborted()) return {{"result", "abort"}, {"reason", o.abort_reason}};
  return {{"result", "order"}, {"order", o.order->str()}};
}

json counts_json(const QueryCounts& q) { return {{"product", q.product}, {"inverse", q.inverse}}; }

}  // namespace

std::string encode_message(const Commitment& c) {
  json gamma = json::array();
  for (const auto& row : c.gamma) gamma.push_back(row);
  return json{{"type", "commitment"}, {"elements", codes_to_json(c.elements)}, {"primes", c.primes},
              {"alpha", c.alpha},      {"beta", c.beta},                       {"gamma", gamma}}
      .dump();
}

std::string encode_message(const Challenge& c) {
  json out{{"type", "challenge"}, {"masked", codes_to_json(c.masked)}};
  if (!c.sequence.empty()) out["sequence"] = codes_to_json(c.sequence);
  return out.dump();
}

std::string encode_message(const Response& r) {
  return json{{"type", "response"}, {"bits", r.bits}, {"exponents", r.exponents}}.dump();
}

Commitment decode_commitment(std::string_view text, const GroupOracle& group) {
  const json obj = parse(text);
  expect_type(obj, "commitment");
  Commitment c;
  c.elements = codes_from_json(field(obj, "elements"), group, "elements");
  c.primes = naturals(field(obj, "primes"), "primes");
  c.alpha = natural_rows(field(obj, "alpha"), "alpha");
  c.beta = natural_rows(field(obj, "beta"), "beta");
  for (const auto& row : array_of(field(obj, "gamma"), "gamma")) c.gamma.push_back(natural_rows(row, "gamma"));
  return c;
}

Challenge decode_challenge(std::string_view text, const GroupOracle& group) {
  const json obj = parse(text);
  expect_type(obj, "challenge");
  Challenge c;
  c.masked = codes_from_json(field(obj, "masked"), group, "masked");
  if (obj.contains("sequence")) c.sequence = codes_from_json(obj.at("sequence"), group, "sequence");
  return c;
}

Response decode_response(std::string_view text) {
  const json obj = parse(text);
  expect_type(obj, "response");
  Response r;
  for (auto b : naturals(field(obj, "bits"), "bits")) {
    if (b > 1) throw MalformedMessage("bit value " + std::to_string(b) + " is not 0/1");
    r.bits.push_back(static_cast<std::uint8_t>(b));
  }
  r.exponents = natural_rows(field(obj, "exponents"), "exponents");
  return r;
}

// ---------------------------------------------------------------------------
// Transcripts and runs

std::size_t Transcript::message_bytes() const {
  std::size_t total = 0;
  for (const auto& m : messages) total += m.payload.size();
  return total;
}

std::string Transcript::to_json() const {
  json msgs = json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"direction", m.direction == Direction::verifier_to_prover ? "V->P" : "P->V"},
                    {"kind", m.kind},
                    {"bytes", m.payload.size()},
                    {"payload", json::parse(m.payload)}});
  }
  json out{{"protocol", to_string(protocol)},
           {"group", group},
           {"prover", prover},
           {"seed", seed},
           {"messages", msgs},
           {"verifier_queries", counts_json(verifier_queries)},
           {"prover_queries", counts_json(prover_queries)},
           {"outcome", outcome_json(outcome)}};
  if (commitment_check)
    out["commitment_check"] = {{"passed", commitment_check->passed}, {"reason", commitment_check->reason}};
  return out.dump();
}

namespace {

struct RunContext {
  GroupOracle verifier;
  GroupOracle prover;
  Transcript transcript;

  RunContext(const GroupOracle& group, ProtocolKind kind, const Prover& p, std::uint64_t seed)
      : verifier(group.with_fresh_counters()), prover(group.with_fresh_counters()) {
    transcript.protocol = kind;
    transcript.group = group.description();
    transcript.prover = std::string(to_string(p.kind()));
    transcript.seed = seed;
  }

  void log(Direction d, std::string kind, std::string payload) {
    transcript.messages.push_back({d, std::move(kind), std::move(payload)});
  }

  RunResult finish(Outcome outcome) {
    transcript.outcome = outcome;
    transcript.verifier_queries = verifier.counts();
    transcript.prover_queries = prover.counts();
    return {std::move(outcome), std::move(transcript)};
  }
};

}  // namespace

RunResult run_protocol_2msg(const GroupOracle& group, std::span<const std::uint64_t> primes,
                            Prover& prover, std::uint64_t seed, const VerifierLimits& limits) {
  RunContext ctx(group, ProtocolKind::two_message, prover, seed);
  auto setup = verifier_setup_2msg(ctx.verifier, primes, derive_seed(seed, kVerifierStream), limits);
  if (setup.early_outcome) return ctx.finish(*setup.early_outcome);

  const auto challenge_text = encode_message(setup.challenge);
  ctx.log(Direction::verifier_to_prover, "challenge", challenge_text);

  std::string response_text;
  try {
    const auto received = decode_challenge(challenge_text, ctx.prover);
    response_text = encode_message(prover.respond(ctx.prover, received.sequence, received.masked));
  } catch (const std::exception& e) {
    return ctx.finish(Outcome::abort(std::string("prover gave no response: ") + e.what()));
  }
  ctx.log(Direction::prover_to_verifier, "response", response_text);

  try {
    return ctx.finish(verifier_finalize(ctx.verifier, setup.state, decode_response(response_text)));
  } catch (const MalformedMessage& e) {
    return ctx.finish(Outcome::abort(std::string("malformed response: ") + e.what()));
  }
}

RunResult run_protocol_3msg(const GroupOracle& group, Prover& prover, std::uint64_t seed,
                            const VerifierLimits& limits) {
  RunContext ctx(group, ProtocolKind::three_message, prover, seed);

  // Step 0
  std::string commitment_text;
  std::vector<ElementCode> prover_sequence;
  try {
    auto c = prover.commit(ctx.prover);
    prover_sequence = c.elements;
    commitment_text = encode_message(c);
  } catch (const std::exception& e) {
    return ctx.finish(Outcome::abort(std::string("prover aborted: ") + e.what()));
  }
  ctx.log(Direction::prover_to_verifier, "commitment", commitment_text);

  // Step 1
  Commitment commitment;
  try {
    commitment = decode_commitment(commitment_text, ctx.verifier);
  } catch (const MalformedMessage& e) {
    ctx.transcript.commitment_check = CommitmentCheck{false, e.what()};
    return ctx.finish(Outcome::abort(std::string("malformed commitment: ") + e.what()));
  }
  const auto check = verifier_check_commitment(ctx.verifier, commitment, limits);
  ctx.transcript.commitment_check = check;
  if (!check.passed) return ctx.finish(Outcome::abort("commitment check failed: " + check.reason));

  // Steps 2-3
  Rng rng(derive_seed(seed, kVerifierStream));
  auto draw = draw_challenges(ctx.verifier, commitment.elements, commitment.primes, rng, false, limits);
  if (draw.failure) return ctx.finish(Outcome::abort(*draw.failure));
  const auto challenge_text = encode_message(Challenge{{}, draw.masked});
  ctx.log(Direction::verifier_to_prover, "challenge", challenge_text);

  // Step 4
  std::string response_text;
  try {
    const auto received = decode_challenge(challenge_text, ctx.prover);
    response_text = encode_message(prover.respond(ctx.prover, prover_sequence, received.masked));
  } catch (const std::exception& e) {
    return ctx.finish(Outcome::abort(std::string("prover gave no response: ") + e.what()));
  }
  ctx.log(Direction::prover_to_verifier, "response", response_text);

  // Steps 5-6
  VerifierState state{commitment.elements, commitment.primes, std::move(draw.bits),
                      ctx.verifier.encoding_length()};
  try {
    return ctx.finish(verifier_finalize(ctx.verifier, state, decode_response(response_text)));
  } catch (const MalformedMessage& e) {
    return ctx.finish(Outcome::abort(std::string("malformed response: ") + e.what()));
  }
}

RunResult run_protocol_2msg(const GroupOracle& group, std::span<const std::uint64_t> primes,
                            const ProverSpec& spec, std::uint64_t seed, const VerifierLimits& limits) {
  auto prover = make_prover(spec, derive_seed(seed, kProverStream), limits.closure_cap);
  return run_protocol_2msg(group, primes, *prover, seed, limits);
}

RunResult run_protocol_3msg(const GroupOracle& group, const ProverSpec& spec, std::uint64_t seed,
                            const VerifierLimits& limits) {
  auto prover = make_prover(spec, derive_seed(seed, kProverStream), limits.closure_cap);
  return run_protocol_3msg(group, *prover, seed, limits);
}

RunResult run_protocol(const GroupOracle& group, const ProtocolVariant& variant, std::uint64_t seed,
                       const VerifierLimits& limits) {
  if (variant.kind == ProtocolKind::two_message)
    return run_protocol_2msg(group, variant.primes, variant.prover, seed, limits);
  return run_protocol_3msg(group, variant.prover, seed, limits);
}

Outcome combine_unanimous(std::span<const Outcome> outcomes) {
  if (outcomes.empty()) return Outcome::abort("no executions");
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].aborted())
      return Outcome::abort("repetition " + std::to_string(r + 1) + " aborted: " + outcomes[r].abort_reason);
    if (outcomes[r].order != outcomes.front().order)
      return Outcome::abort("repetitions disagree on the order");
  }
  return outcomes.front();
}

RepeatedResult run_repeated(const GroupOracle& group, const ProtocolVariant& variant, unsigned k,
                            std::uint64_t seed, const VerifierLimits& limits) {
  if (k == 0) throw std::invalid_argument("repetitions must be >= 1");
  RepeatedResult result;
  std::vector<Outcome> outcomes;
  for (unsigned r = 0; r < k; ++r) {
    const std::uint64_t run_seed = k == 1 ? seed : derive_seed(seed, 0x100 + r);
    result.runs.push_back(run_protocol(group, variant, run_seed, limits));
    outcomes.push_back(result.runs.back().outcome);
  }
  result.outcome = combine_unanimous(outcomes);
  return result;
}

}  // namespace solvorder
