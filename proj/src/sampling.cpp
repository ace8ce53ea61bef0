#include "solvorder/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

namespace solvorder {

SamplerMode parse_sampler_mode(std::string_view name) {
  if (name == "exact") return SamplerMode::exact;
  if (name == "subproduct") return SamplerMode::subproduct;
  throw std::invalid_argument("unknown sampler mode '" + std::string(name) + "'");
}

std::string_view to_string(SamplerMode mode) {
  return mode == SamplerMode::exact ? "exact" : "subproduct";
}

void SamplerConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
}

ExactSampler::ExactSampler(const GroupOracle& group, std::span<const ElementCode> gens, std::size_t cap)
    : subgroup_(enumerate_closure(group, gens, cap)) {}

ElementCode ExactSampler::draw(Rng& rng) const {
  return subgroup_.elements()[uniform_below(rng, subgroup_.size())];
}

SubproductSampler::SubproductSampler(const GroupOracle& group, std::span<const ElementCode> gens,
                                     double epsilon, Rng& rng, std::size_t cap)
    : group_(group), gens_(gens.begin(), gens.end()) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  const auto cap_bits = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(cap, 2)))));
  const std::size_t bits = std::min<std::size_t>(group.encoding_length(), cap_bits);
  const auto precision = static_cast<std::size_t>(std::max(1.0, std::ceil(-std::log2(epsilon))));
  window_ = 2 * bits + 4;
  rounds_ = 2 * bits + precision;
  if (gens_.empty()) return;
  for (std::size_t r = 0; r < rounds_; ++r) list_.push_back(subproduct(rng));
}

ElementCode SubproductSampler::subproduct(Rng& rng) const {
  std::optional<ElementCode> acc;
  auto take = [&](const ElementCode& x) {
    if (!random_bit(rng)) return;
    acc = acc ? group_.product(*acc, x) : x;
  };
  for (const auto& g : gens_) take(g);
  const std::size_t start = list_.size() > window_ ? list_.size() - window_ : 0;
  for (std::size_t i = start; i < list_.size(); ++i) take(list_[i]);
  return acc ? *acc : group_.identity();
}

ElementCode SubproductSampler::draw(Rng& rng) const {
  if (gens_.empty()) return group_.identity();
  return subproduct(rng);
}

ElementCode sample_exact(const GroupOracle& group, std::span<const ElementCode> gens,
                         std::uint64_t seed, std::size_t cap) {
  Rng rng(seed);
  return ExactSampler(group, gens, cap).draw(rng);
}

ElementCode sample_near_uniform(const GroupOracle& group, std::span<const ElementCode> gens,
                                double epsilon, std::uint64_t seed, std::size_t cap) {
  Rng rng(seed);
  SubproductSampler sampler(group, gens, epsilon, rng, cap);
  return sampler.draw(rng);
}

namespace {

std::uint64_t checked_total(const Histogram& counts, const Subgroup& subgroup) {
  std::uint64_t total = 0;
  for (const auto& [code, count] : counts) {
    if (count == 0) continue;
    if (!subgroup.contains(code))
      throw SamplerEscape("sampled element " + code.to_hex() + " lies outside the subgroup");
    total += count;
  }
  if (total == 0) throw std::invalid_argument("histogram is empty");
  return total;
}

std::uint64_t count_of(const Histogram& counts, const ElementCode& code) {
  const auto it = counts.find(code);
  return it == counts.end() ? 0 : it->second;
}

}  // namespace

double tv_distance_empirical(const Histogram& counts, const Subgroup& subgroup) {
  const auto total = static_cast<double>(checked_total(counts, subgroup));
  const double uniform = 1.0 / static_cast<double>(subgroup.size());
  double sum = 0.0;
  for (const auto& h : subgroup.elements())
    sum += std::abs(static_cast<double>(count_of(counts, h)) / total - uniform);
  return 0.5 * sum;
}

double chi_square_statistic(const Histogram& counts, const Subgroup& subgroup) {
  const auto total = static_cast<double>(checked_total(counts, subgroup));
  const double expected = total / static_cast<double>(subgroup.size());
  double stat = 0.0;
  for (const auto& h : subgroup.elements()) {
    const double diff = static_cast<double>(count_of(counts, h)) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

double chi_square_critical(std::size_t dof, double significance) {
  if (dof == 0) return 0.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, significance));
}

}  // namespace solvorder
