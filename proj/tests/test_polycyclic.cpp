#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "solvorder/harness.hpp"
#include "solvorder/polycyclic.hpp"

using namespace solvorder;

namespace {

// Independent mu: lambda(i,a) built from plain integer powers.
std::vector<BigInt> mu_oracle(std::vector<std::uint64_t> primes, unsigned n) {
  std::sort(primes.begin(), primes.end());
  auto pow = [](std::uint64_t p, unsigned k) {
    BigInt out = 1;
    for (unsigned i = 0; i < k; ++i) out *= p;
    return out;
  };
  std::vector<BigInt> out;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    BigInt tail = 1;
    for (std::size_t j = i + 1; j < primes.size(); ++j) tail *= pow(primes[j], n);
    for (unsigned a = 1; a <= n; ++a) out.push_back(pow(primes[i], n - a) * tail);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> solvable_fixtures() {
  auto all = fixture_specs();
  std::erase_if(all, [](const auto& f) { return f.first == "A5"; });
  return all;
}

PolycyclicSequence refined_for(const GroupOracle& g) {
  const auto order = enumerate_closure(g, g.generators()).size();
  return refine_with_primes(g, compute_pcgs(g), prime_factors(order), g.encoding_length());
}

}  // namespace

TEST(Primes, IsPrimeAndFactors) {
  const std::vector<std::uint64_t> primes{2, 3, 5, 7, 11, 13, 97, 7919};
  for (auto p : primes) EXPECT_TRUE(is_prime(p)) << p;
  for (std::uint64_t c : {0, 1, 4, 9, 91, 7917}) EXPECT_FALSE(is_prime(c)) << c;
  EXPECT_EQ(prime_factors(12), (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(prime_factors(27), (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(prime_factors(60), (std::vector<std::uint64_t>{2, 3, 5}));
  EXPECT_TRUE(prime_factors(1).empty());
}

TEST(MuSequence, MatchesIndependentOracle) {
  const std::vector<std::pair<std::vector<std::uint64_t>, unsigned>> cases{
      {{2, 3}, 4}, {{2, 3, 5}, 3}, {{7}, 5}, {{3, 2}, 6}, {{2}, 1}};
  for (const auto& [primes, n] : cases) EXPECT_EQ(mu_sequence(primes, n), mu_oracle(primes, n));
}

TEST(MuSequence, FrozenValuesForCyclic12) {
  const std::vector<std::uint64_t> primes{2, 3};
  const auto mu = mu_sequence(primes, 4);
  const std::vector<BigInt> expected{648, 324, 162, 81, 27, 9, 3, 1};
  EXPECT_EQ(mu, expected);
}

TEST(MuSequence, StrictlyDecreasingToOne) {
  const std::vector<std::uint64_t> primes{2, 5, 11};
  const auto mu = mu_sequence(primes, 7);
  ASSERT_EQ(mu.size(), 21u);
  for (std::size_t i = 1; i < mu.size(); ++i) EXPECT_GT(mu[i - 1], mu[i]);
  EXPECT_EQ(mu.back(), 1);
}

TEST(MuSequence, RejectsBadInput) {
  EXPECT_THROW(mu_sequence(std::vector<std::uint64_t>{}, 3), std::invalid_argument);
  EXPECT_THROW(mu_sequence(std::vector<std::uint64_t>{2, 2}, 3), std::invalid_argument);
  EXPECT_THROW(mu_sequence(std::vector<std::uint64_t>{4}, 3), std::invalid_argument);
  EXPECT_THROW(mu_sequence(std::vector<std::uint64_t>{2}, 0), std::invalid_argument);
}

TEST(Refinement, Cyclic12WorkedExample) {
  const auto g = make_group("cyclic:12");
  const auto base = compute_pcgs(g);
  ASSERT_EQ(base.length(), 1u);
  const std::vector<std::uint64_t> primes{2, 3};
  const auto refined = refine_with_primes(g, base, primes, 4);
  std::vector<ElementCode> expected;
  for (std::uint64_t r : {0, 0, 6, 9, 3, 9, 3, 1}) expected.push_back(cyclic_code(12, r));
  EXPECT_EQ(refined.elements, expected);
  EXPECT_EQ(refined.primes, (std::vector<std::uint64_t>{2, 2, 2, 2, 3, 3, 3, 3}));
  const NormalFormTable table(g, refined.elements);
  EXPECT_EQ(table.quotient_orders(), (std::vector<std::uint64_t>{1, 1, 2, 2, 1, 1, 1, 3}));
}

TEST(Refinement, EmptyBaseStaysEmpty) {
  const auto g = make_group("cyclic:1");
  const auto base = compute_pcgs(g);
  EXPECT_EQ(base.length(), 0u);
  EXPECT_EQ(refine_with_primes(g, base, std::vector<std::uint64_t>{2}, 1).length(), 0u);
}

TEST(Pcgs, InvariantsOnFixtures) {
  for (const auto& [name, spec] : solvable_fixtures()) {
    const auto g = make_group(spec);
    const auto whole = enumerate_closure(g, g.generators());
    const auto pcgs = compute_pcgs(g);
    const auto generated = enumerate_closure(g, pcgs.elements);
    EXPECT_EQ(generated.size(), whole.size()) << name;
    for (const auto& e : whole.elements()) EXPECT_TRUE(generated.contains(e)) << name;

    // Normality by conjugation membership.
    for (std::size_t j = 1; j < pcgs.length(); ++j) {
      const auto prev = enumerate_closure(g, std::span(pcgs.elements).subspan(0, j));
      const auto inv = g.inverse(pcgs.elements[j]);
      for (const auto& x : prev.elements())
        EXPECT_TRUE(prev.contains(g.product(g.product(pcgs.elements[j], x), inv))) << name << " j=" << j;
    }

    std::uint64_t product = 1;
    for (auto m : pcgs.quotient_orders) product *= m;
    EXPECT_EQ(product, whole.size()) << name;
  }
}

TEST(Pcgs, NonSolvableIsRejected) {
  EXPECT_THROW(compute_pcgs(make_group("perm:5:(1 2 3),(1 2 3 4 5)")), NotSolvable);
}

TEST(Refinement, QuotientOrdersAreOneOrThePrime) {
  for (const auto& [name, spec] : solvable_fixtures()) {
    const auto g = make_group(spec);
    const auto refined = refined_for(g);
    const NormalFormTable table(g, refined.elements);
    std::uint64_t product = 1;
    for (std::size_t i = 0; i < refined.length(); ++i) {
      const auto m = table.quotient_orders()[i];
      EXPECT_TRUE(m == 1 || m == refined.primes[i]) << name << " i=" << i;
      product *= m;
    }
    EXPECT_EQ(product, enumerate_closure(g, g.generators()).size()) << name;
    EXPECT_EQ(refined.length() % g.encoding_length(), 0u) << name;
  }
}

TEST(NormalForm, ExponentMapIsABijection) {
  for (const auto& [name, spec] : solvable_fixtures()) {
    const auto g = make_group(spec);
    const auto refined = refined_for(g);
    const NormalFormTable table(g, refined.elements);
    const auto& m = table.quotient_orders();
    std::set<ElementCode> images;
    std::vector<std::uint64_t> exps(refined.length(), 0);
    std::size_t count = 0;
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
      if (i == exps.size()) {
        images.insert(eval_word(g, refined.elements, exps));
        ++count;
        return;
      }
      for (std::uint64_t a = 0; a < m[i]; ++a) {
        exps[i] = a;
        walk(i + 1);
      }
      exps[i] = 0;
    };
    walk(0);
    const auto whole = enumerate_closure(g, g.generators());
    EXPECT_EQ(count, whole.size()) << name;
    EXPECT_EQ(images.size(), whole.size()) << name;
    for (const auto& e : images) EXPECT_TRUE(whole.contains(e)) << name;
  }
}

TEST(NormalForm, DecomposeRoundTripsOnRandomElements) {
  for (const auto& [name, spec] : solvable_fixtures()) {
    const auto g = make_group(spec);
    const auto refined = refined_for(g);
    const NormalFormTable table(g, refined.elements);
    const auto whole = enumerate_closure(g, g.generators());
    Rng rng(derive_seed(7, whole.size()));
    for (int k = 0; k < 1000; ++k) {
      const auto& h = whole.elements()[uniform_below(rng, whole.size())];
      const auto d = table.decompose(refined.length(), h);
      ASSERT_TRUE(d.has_value()) << name;
      for (std::size_t i = 0; i < d->size(); ++i) EXPECT_LT((*d)[i], std::max<std::uint64_t>(table.quotient_orders()[i], 1));
      EXPECT_EQ(eval_word(g, refined.elements, *d), h) << name;
      const auto level = table.level_of(h);
      ASSERT_TRUE(level.has_value());
      EXPECT_TRUE(table.is_member(*level, h));
      if (*level > 0) EXPECT_FALSE(table.is_member(*level - 1, h));
    }
  }
}

TEST(NormalForm, SubgroupOrdersArePrefixProducts) {
  const auto g = make_group("cyclic:12");
  const auto refined = refined_for(g);
  const NormalFormTable table(g, refined.elements);
  const std::vector<std::size_t> expected{1, 1, 1, 2, 4, 4, 4, 4, 12};
  for (std::size_t j = 0; j <= table.length(); ++j) EXPECT_EQ(table.subgroup_order(j), expected[j]) << j;
  EXPECT_EQ(table.order(), 12u);
}

TEST(NormalForm, RejectsNonNormalSequence) {
  const auto g = make_group("perm:3:(1 2),(1 2 3)");
  // <(1 2)> is not normal in S3.
  EXPECT_THROW(NormalFormTable(g, g.generators()), InvalidPolycyclicSequence);
  const auto swapped = std::vector<ElementCode>{g.generators()[1], g.generators()[0]};
  EXPECT_NO_THROW(NormalFormTable(g, swapped));
}

TEST(NormalForm, FreeFunctionsAgreeWithTable) {
  const auto g = make_group("perm:4:(1 2 3 4),(1 3)");
  const auto refined = refined_for(g);
  const NormalFormTable table(g, refined.elements);
  EXPECT_EQ(quotient_orders(g, refined.elements), table.quotient_orders());
  const auto x = g.generators()[1];
  EXPECT_EQ(decompose(g, refined, refined.length(), x), table.decompose(refined.length(), x));
  EXPECT_TRUE(is_member(g, refined, refined.length(), x));
  EXPECT_FALSE(is_member(g, refined, 0, x));
}
