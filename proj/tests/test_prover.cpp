#include <vector>

#include <gtest/gtest.h>

#include "solvorder/harness.hpp"
#include "solvorder/prover.hpp"
#include "solvorder/protocol.hpp"

using namespace solvorder;

namespace {

std::vector<std::pair<std::string, std::string>> solvable_fixtures() {
  auto all = fixture_specs();
  std::erase_if(all, [](const auto& f) { return f.first == "A5"; });
  return all;
}

NormalFormTable table_for(const GroupOracle& g, const std::vector<std::uint64_t>& primes) {
  return NormalFormTable(g, refine_with_primes(g, compute_pcgs(g), primes, g.encoding_length()).elements);
}

}  // namespace

TEST(ProverKind, NamesRoundTrip) {
  for (auto kind : adversary_kinds()) {
    EXPECT_EQ(parse_prover_kind(to_string(kind)), kind);
    EXPECT_FALSE(describe(kind).empty());
  }
  EXPECT_EQ(adversary_kinds().size(), 5u);
  EXPECT_EQ(parse_prover_kind("honest"), ProverKind::honest);
  EXPECT_THROW(parse_prover_kind("oracle"), std::invalid_argument);
}

TEST(HonestCommit, PassesVerifierChecksOnFixtures) {
  for (const auto& [name, spec] : solvable_fixtures()) {
    const auto g = make_group(spec);
    const auto c = honest_commit(g);
    const auto check = verifier_check_commitment(g, c);
    EXPECT_TRUE(check.passed) << name << ": " << check.reason;
    EXPECT_EQ(c.alpha.size(), g.generators().size());
  }
}

TEST(HonestCommit, Cyclic12Shape) {
  const auto g = make_group("cyclic:12");
  const auto c = honest_commit(g);
  EXPECT_EQ(c.elements.size(), 8u);
  ASSERT_EQ(c.alpha.size(), 1u);
  EXPECT_EQ(eval_word(g, c.elements, c.alpha[0]), g.generators()[0]);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(c.beta[i].size(), i);
    EXPECT_EQ(c.gamma[i].size(), i);
  }
}

TEST(RoundProfile, Cyclic12) {
  const auto g = make_group("cyclic:12");
  const auto profile = profile_rounds(table_for(g, {2, 3}));
  EXPECT_EQ(profile.quotient_orders, (std::vector<std::uint64_t>{1, 1, 2, 2, 1, 1, 1, 3}));
  EXPECT_EQ(profile.inflatable, (std::vector<bool>{false, false, false, false, true, true, true, false}));
}

// No exponent vector over H_{i-1} reaches h_i on a nontrivial round, since
// h_i is not a member of H_{i-1}.
TEST(Deflation, NontrivialRoundsHaveNoDecomposition) {
  for (const auto& [name, spec] : solvable_fixtures()) {
    const auto g = make_group(spec);
    const auto order = enumerate_closure(g, g.generators()).size();
    const auto table = table_for(g, prime_factors(order));
    for (std::size_t i = 0; i < table.length(); ++i) {
      if (table.quotient_orders()[i] == 1) continue;
      EXPECT_FALSE(table.is_member(i, table.sequence()[i])) << name << " i=" << i;
      EXPECT_FALSE(table.decompose(i, table.sequence()[i]).has_value()) << name << " i=" << i;
    }
  }
}

TEST(HonestRespond, RecoversTheSecretBitOnNontrivialRounds) {
  const auto g = make_group("perm:4:(1 2),(1 2 3 4)");
  const auto table = table_for(g, {2, 3});
  Rng rng(3);
  std::vector<std::uint8_t> bits;
  std::vector<ElementCode> challenges;
  for (std::size_t i = 0; i < table.length(); ++i) {
    const bool s = random_bit(rng);
    std::vector<ElementCode> members;
    for (const auto& e : table.elements())
      if (table.is_member(i, e)) members.push_back(e);
    ASSERT_EQ(members.size(), table.subgroup_order(i));
    const auto x = members[uniform_below(rng, members.size())];
    bits.push_back(s);
    challenges.push_back(mask_element(g, table.sequence()[i], s, x));
  }
  const auto r = honest_respond(table, challenges);
  for (std::size_t i = 0; i < table.length(); ++i) {
    if (table.quotient_orders()[i] > 1) {
      EXPECT_EQ(r.bits[i], bits[i]) << i;
    } else {
      EXPECT_EQ(r.bits[i], 0) << i;
      EXPECT_EQ(eval_word(g, std::span(table.sequence()).subspan(0, i), r.exponents[i]), table.sequence()[i]);
    }
  }
  EXPECT_THROW(honest_respond(table, std::span(challenges).subspan(1)), std::invalid_argument);
}

TEST(Adversary, GuessInflateSpoilsTheTargetRound) {
  const auto g = make_group("cyclic:12");
  const auto table = table_for(g, {2, 3});
  const std::vector<ElementCode> challenges(table.length(), g.identity());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = adversary_respond({ProverKind::guess_inflate, seed, std::nullopt}, table, challenges);
    EXPECT_NE(eval_word(g, std::span(table.sequence()).subspan(0, 4), r.exponents[4]), table.sequence()[4]);
  }
}

TEST(Adversary, DeterministicGivenSeed) {
  const auto g = make_group("perm:4:(1 2),(1 2 3 4)");
  const auto table = table_for(g, {2, 3});
  const std::vector<ElementCode> challenges(table.length(), g.identity());
  for (auto kind : adversary_kinds()) {
    const auto a = adversary_respond({kind, 42, std::nullopt}, table, challenges);
    const auto b = adversary_respond({kind, 42, std::nullopt}, table, challenges);
    EXPECT_EQ(a.bits, b.bits) << to_string(kind);
    EXPECT_EQ(a.exponents, b.exponents) << to_string(kind);
  }
}

TEST(Adversary, GarbageCommitmentFailsStepOne) {
  for (const auto& [name, spec] : solvable_fixtures()) {
    const auto g = make_group(spec);
    auto prover = make_prover({ProverKind::garbage_commitment, std::nullopt}, 1);
    EXPECT_FALSE(verifier_check_commitment(g, prover->commit(g)).passed) << name;
  }
}

TEST(Adversary, OrderForgerCommitmentIsWellFormed) {
  const auto g = make_group("cyclic:12");
  auto prover = make_prover({ProverKind::order_forger, std::nullopt}, 1);
  const auto c = prover->commit(g);
  EXPECT_TRUE(verifier_check_commitment(g, c).passed);
  EXPECT_EQ(c.elements.size(), 12u);  // primes {2, 3, 5}
}
