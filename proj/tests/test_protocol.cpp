#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "solvorder/protocol.hpp"

using namespace solvorder;

namespace {

const std::vector<std::uint64_t> k23{2, 3};

ProtocolVariant honest(ProtocolKind kind, std::vector<std::uint64_t> primes = {}) {
  return {kind, std::move(primes), {ProverKind::honest, std::nullopt}};
}

}  // namespace

TEST(ProtocolKind, Names) {
  EXPECT_EQ(parse_protocol_kind("2msg"), ProtocolKind::two_message);
  EXPECT_EQ(parse_protocol_kind("3msg"), ProtocolKind::three_message);
  EXPECT_EQ(to_string(ProtocolKind::three_message), "3msg");
  EXPECT_THROW(parse_protocol_kind("4msg"), std::invalid_argument);
}

TEST(Codec, RoundTrips) {
  const auto g = make_group("cyclic:12");
  const auto c = honest_commit(g);
  const auto c2 = decode_commitment(encode_message(c), g);
  EXPECT_EQ(c2.elements, c.elements);
  EXPECT_EQ(c2.primes, c.primes);
  EXPECT_EQ(c2.alpha, c.alpha);
  EXPECT_EQ(c2.beta, c.beta);
  EXPECT_EQ(c2.gamma, c.gamma);

  const Challenge ch{{cyclic_code(12, 3)}, {cyclic_code(12, 11)}};
  const auto ch2 = decode_challenge(encode_message(ch), g);
  EXPECT_EQ(ch2.sequence, ch.sequence);
  EXPECT_EQ(ch2.masked, ch.masked);

  const Response r{{0, 1, 1}, {{}, {5}, {0, 7}}};
  const auto r2 = decode_response(encode_message(r));
  EXPECT_EQ(r2.bits, r.bits);
  EXPECT_EQ(r2.exponents, r.exponents);
}

TEST(Codec, RejectsMalformedMessages) {
  const auto g = make_group("perm:3:(1 2),(1 2 3)");
  EXPECT_THROW(decode_response("{"), MalformedMessage);
  EXPECT_THROW(decode_response(R"({"type":"challenge"})"), MalformedMessage);
  EXPECT_THROW(decode_response(R"({"type":"response","bits":[2],"exponents":[[]]})"), MalformedMessage);
  EXPECT_THROW(decode_response(R"({"type":"response","bits":[0],"exponents":[[-1]]})"), MalformedMessage);
  EXPECT_THROW(decode_response(R"({"type":"response","bits":[0],"exponents":[[1.5]]})"), MalformedMessage);
  EXPECT_THROW(decode_response(R"({"type":"response","bits":[0]})"), MalformedMessage);
  // Wrong width, then a right-width string that is not a permutation.
  EXPECT_THROW(decode_challenge(R"({"type":"challenge","masked":["1"]})", g), MalformedMessage);
  EXPECT_THROW(decode_challenge(R"({"type":"challenge","masked":["00"]})", g), MalformedMessage);
  EXPECT_THROW(decode_commitment(R"({"type":"commitment","elements":"x"})", g), MalformedMessage);
}

TEST(TwoMessage, HonestCyclic12GivesOrder12) {
  const auto g = make_group("cyclic:12");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = run_protocol_2msg(g, k23, ProverSpec{}, seed);
    ASSERT_FALSE(r.outcome.aborted()) << r.outcome.abort_reason;
    EXPECT_EQ(*r.outcome.order, 12);
    EXPECT_EQ(r.transcript.messages.size(), 2u);
  }
}

TEST(TwoMessage, TrivialGroupHasOrderOne) {
  const auto g = make_group("cyclic:1");
  const std::vector<std::uint64_t> primes{2};
  const auto r = run_protocol_2msg(g, primes, ProverSpec{}, 1);
  ASSERT_FALSE(r.outcome.aborted()) << r.outcome.abort_reason;
  EXPECT_EQ(*r.outcome.order, 1);
}

TEST(TwoMessage, MissingPrimeOrNonSolvableAborts) {
  const std::vector<std::uint64_t> only2{2};
  EXPECT_TRUE(run_protocol_2msg(make_group("cyclic:12"), only2, ProverSpec{}, 1).outcome.aborted());
  const std::vector<std::uint64_t> k235{2, 3, 5};
  const auto r = run_protocol_2msg(make_group("perm:5:(1 2 3),(1 2 3 4 5)"), k235, ProverSpec{}, 1);
  EXPECT_TRUE(r.outcome.aborted());
  EXPECT_TRUE(r.transcript.messages.empty());
}

TEST(TwoMessage, ExtraPrimeStillGivesTheOrder) {
  const std::vector<std::uint64_t> k235{2, 3, 5};
  const auto r = run_protocol_2msg(make_group("cyclic:12"), k235, ProverSpec{}, 4);
  ASSERT_FALSE(r.outcome.aborted()) << r.outcome.abort_reason;
  EXPECT_EQ(*r.outcome.order, 12);
}

TEST(ThreeMessage, HonestS4GivesOrder24) {
  const auto g = make_group("perm:4:(1 2),(1 2 3 4)");
  const auto r = run_protocol_3msg(g, ProverSpec{}, 9);
  ASSERT_FALSE(r.outcome.aborted()) << r.outcome.abort_reason;
  EXPECT_EQ(*r.outcome.order, 24);
  ASSERT_TRUE(r.transcript.commitment_check.has_value());
  EXPECT_TRUE(r.transcript.commitment_check->passed);
  EXPECT_EQ(r.transcript.messages.size(), 3u);
}

TEST(ThreeMessage, NonSolvableHonestProverAborts) {
  const auto r = run_protocol_3msg(make_group("perm:5:(1 2 3),(1 2 3 4 5)"), ProverSpec{}, 1);
  EXPECT_TRUE(r.outcome.aborted());
}

TEST(ThreeMessage, CommitmentGuardrails) {
  const auto g = make_group("cyclic:12");
  const auto good = honest_commit(g);
  ASSERT_TRUE(verifier_check_commitment(g, good).passed);

  auto c = good;
  c.primes[0] = 4;
  EXPECT_FALSE(verifier_check_commitment(g, c).passed);

  c = good;
  c.alpha[0][0] = 16;  // 2^n with n = 4
  EXPECT_FALSE(verifier_check_commitment(g, c).passed);

  c = good;
  c.elements[0] = cyclic_code(12, 1);  // h_1^{r_1} != e
  EXPECT_FALSE(verifier_check_commitment(g, c).passed);

  c = good;
  c.beta[3].pop_back();
  EXPECT_FALSE(verifier_check_commitment(g, c).passed);

  VerifierLimits tight;
  tight.length_factor = 0;
  EXPECT_FALSE(verifier_check_commitment(g, good, tight).passed);
  EXPECT_EQ(max_sequence_length(g, {}), 4u * 4u * 1u * 20u);
}

TEST(Finalize, ScriptedOutcomesAndQueryCounts) {
  const auto g = make_group("cyclic:4").with_fresh_counters();
  const VerifierState state{{cyclic_code(4, 2), cyclic_code(4, 1)}, {2, 2}, {1, 0}, 2};

  // Round 1: empty word is e != h_1, b_1 = s_1 -> r_1. Round 2: h_1^3 = 2 != 1, b_2 = s_2 -> r_2.
  auto o = verifier_finalize(g, state, Response{{1, 0}, {{}, {3}}});
  ASSERT_FALSE(o.aborted());
  EXPECT_EQ(*o.order, 4);
  EXPECT_EQ(g.counts(), (QueryCounts{2, 0}));  // 3 = 0b11: one squaring, one multiply

  o = verifier_finalize(g, state, Response{{0, 0}, {{}, {1}}});
  EXPECT_TRUE(o.aborted());

  EXPECT_TRUE(verifier_finalize(g, state, Response{{1, 0}, {{}, {4}}}).aborted());  // 4 >= 2^2
  EXPECT_TRUE(verifier_finalize(g, state, Response{{1}, {{}}}).aborted());
  EXPECT_TRUE(verifier_finalize(g, state, Response{{1, 0}, {{}, {1, 1}}}).aborted());
}

TEST(Challenges, HandCountedDraw) {
  const auto g = make_group("cyclic:2").with_fresh_counters();
  const std::vector<ElementCode> seq{cyclic_code(2, 1)};
  const std::vector<std::uint64_t> primes{2};
  Rng rng(5);
  const auto draw = draw_challenges(g, seq, primes, rng, true);
  ASSERT_FALSE(draw.failure.has_value());
  // h^2 (one squaring) for the check, then one product for the mask.
  EXPECT_EQ(g.counts(), (QueryCounts{2, 0}));
  EXPECT_EQ(draw.masked[0], draw.bits[0] ? cyclic_code(2, 1) : cyclic_code(2, 0));
}

TEST(Challenges, MaskCostDoesNotDependOnTheBit) {
  const auto g = make_group("cyclic:12").with_fresh_counters();
  mask_element(g, cyclic_code(12, 5), false, cyclic_code(12, 2));
  const auto after_zero = g.counts();
  mask_element(g, cyclic_code(12, 5), true, cyclic_code(12, 2));
  EXPECT_EQ(g.counts() - after_zero, after_zero);
}

TEST(Challenges, SubproductFallbackStaysInSubgroup) {
  const auto g = make_group("perm:4:(1 2),(1 2 3 4)");
  const auto c = honest_commit(g);
  VerifierLimits limits;
  limits.exact_sampler_limit = 2;
  Rng rng(8);
  const auto draw = draw_challenges(g, c.elements, c.primes, rng, false, limits);
  EXPECT_FALSE(draw.failure.has_value());
  ASSERT_EQ(draw.masked.size(), c.elements.size());
  const NormalFormTable table(g, c.elements);
  for (std::size_t i = 0; i < draw.masked.size(); ++i) EXPECT_TRUE(table.is_member(i + 1, draw.masked[i])) << i;
}

TEST(Transcript, ByteIdenticalForFixedSeed) {
  const auto g = make_group("perm:4:(1 2 3 4),(1 3)");
  const std::vector<std::uint64_t> primes{2};
  const auto a = run_protocol_2msg(g, primes, ProverSpec{}, 77).transcript.to_json();
  const auto b = run_protocol_2msg(g, primes, ProverSpec{}, 77).transcript.to_json();
  const auto c = run_protocol_2msg(g, primes, ProverSpec{}, 78).transcript.to_json();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto parsed = nlohmann::json::parse(a);
  EXPECT_EQ(parsed["outcome"]["order"], "8");
  EXPECT_EQ(parsed["messages"].size(), 2u);
}

TEST(Transcript, QueryCountsArePerParty) {
  const auto g = make_group("cyclic:12");
  const auto r = run_protocol_3msg(g, ProverSpec{}, 3);
  EXPECT_GT(r.transcript.verifier_queries.total(), 0u);
  EXPECT_GT(r.transcript.prover_queries.total(), 0u);
  EXPECT_EQ(g.counts().total(), 0u);
}

TEST(Repetition, UnanimousCombiner) {
  const std::vector<Outcome> same{Outcome::accept(12), Outcome::accept(12)};
  EXPECT_EQ(*combine_unanimous(same).order, 12);
  const std::vector<Outcome> split{Outcome::accept(12), Outcome::accept(24)};
  EXPECT_TRUE(combine_unanimous(split).aborted());
  const std::vector<Outcome> one_abort{Outcome::accept(12), Outcome::abort("x")};
  EXPECT_TRUE(combine_unanimous(one_abort).aborted());
  EXPECT_TRUE(combine_unanimous({}).aborted());
}

TEST(Repetition, SingleRepetitionEqualsPlainRun) {
  const auto g = make_group("cyclic:12");
  const auto variant = honest(ProtocolKind::two_message, k23);
  const auto single = run_repeated(g, variant, 1, 31);
  const auto plain = run_protocol(g, variant, 31);
  EXPECT_EQ(single.runs.front().transcript.to_json(), plain.transcript.to_json());
  const auto triple = run_repeated(g, variant, 3, 31);
  EXPECT_EQ(triple.runs.size(), 3u);
  EXPECT_EQ(*triple.outcome.order, 12);
  EXPECT_THROW(run_repeated(g, variant, 0, 31), std::invalid_argument);
}

TEST(Adversaries, NeverProduceASmallerOrder) {
  const auto g = make_group("perm:4:(1 2),(1 2 3 4)");
  for (auto kind : adversary_kinds()) {
    for (auto protocol : {ProtocolKind::two_message, ProtocolKind::three_message}) {
      const ProtocolVariant v{protocol, protocol == ProtocolKind::two_message ? k23 : std::vector<std::uint64_t>{},
                              {kind, std::nullopt}};
      const std::uint64_t runs = protocol == ProtocolKind::two_message ? 40 : 8;
      for (std::uint64_t seed = 0; seed < runs; ++seed) {
        const auto r = run_protocol(g, v, seed);
        if (!r.outcome.aborted()) EXPECT_GE(*r.outcome.order, 24) << to_string(kind);
      }
    }
  }
}
