#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "solvorder/group.hpp"
#include "solvorder/rng.hpp"

namespace solvorder {

enum class SamplerMode { exact, subproduct };

SamplerMode parse_sampler_mode(std::string_view name);
std::string_view to_string(SamplerMode mode);

struct SamplerConfig {
  double epsilon = 1.0 / 256;  // target per-element deviation from 1/|H|
  SamplerMode mode = SamplerMode::exact;
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument unless 0 < epsilon < 1.
  void validate() const;
};

/// Exactly uniform sampling over an enumerated subgroup.
class ExactSampler {
 public:
  ExactSampler(const GroupOracle& group, std::span<const ElementCode> gens,
               std::size_t cap = kDefaultClosureCap);
  explicit ExactSampler(Subgroup subgroup) : subgroup_(std::move(subgroup)) {}

  ElementCode draw(Rng& rng) const;
  const Subgroup& subgroup() const noexcept { return subgroup_; }

 private:
  Subgroup subgroup_;
};

/**
 * Random-subproduct sampler.
 *
 * Construction grows a list from the generators: each round appends a random
 * subproduct of the generators and the most recent `window` appended entries.
 * A draw is one more random subproduct over that same window. With
 * b = min(n, log2 cap) and e = log2(1/epsilon), the window holds 2b+4 entries
 * and construction runs 2b+e rounds, so both setup and per-draw query counts
 * are linear in log(1/epsilon).
 */
class SubproductSampler {
 public:
  SubproductSampler(const GroupOracle& group, std::span<const ElementCode> gens, double epsilon,
                    Rng& rng, std::size_t cap = kDefaultClosureCap);

  ElementCode draw(Rng& rng) const;

  std::size_t window() const noexcept { return window_; }
  std::size_t rounds() const noexcept { return rounds_; }

 private:
  ElementCode subproduct(Rng& rng) const;

  GroupOracle group_;
  std::vector<ElementCode> gens_;
  std::vector<ElementCode> list_;
  std::size_t window_ = 0;
  std::size_t rounds_ = 0;
};

/// One exactly uniform element of <gens>. Throws ClosureOverflow.
ElementCode sample_exact(const GroupOracle& group, std::span<const ElementCode> gens,
                         std::uint64_t seed, std::size_t cap = kDefaultClosureCap);

/// One near-uniform element of <gens>. Throws std::invalid_argument unless
/// 0 < epsilon < 1.
ElementCode sample_near_uniform(const GroupOracle& group, std::span<const ElementCode> gens,
                                double epsilon, std::uint64_t seed,
                                std::size_t cap = kDefaultClosureCap);

using Histogram = std::unordered_map<ElementCode, std::uint64_t, ElementCodeHash>;

/// Raised when a histogram holds an element outside the reference subgroup.
class SamplerEscape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (1/2) * sum_h |count(h)/N - 1/|H||.
double tv_distance_empirical(const Histogram& counts, const Subgroup& subgroup);

/// Pearson statistic against the uniform distribution on the subgroup.
double chi_square_statistic(const Histogram& counts, const Subgroup& subgroup);

/// Upper critical value of chi-square with `dof` degrees of freedom.
double chi_square_critical(std::size_t dof, double significance);

}  // namespace solvorder
