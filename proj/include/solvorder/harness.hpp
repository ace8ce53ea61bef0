#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solvorder/protocol.hpp"
#include "solvorder/sampling.hpp"

namespace solvorder {

struct ExperimentConfig {
  std::string group_spec;
  ProtocolKind protocol = ProtocolKind::two_message;
  ProverSpec prover;
  std::vector<std::uint64_t> primes;  // 2msg only
  std::uint64_t trials = 1;
  unsigned repetitions = 1;
  std::uint64_t seed = 0;
  std::string out;          // report path; empty means stdout only
  std::string transcripts;  // NDJSON log path; empty disables it
  unsigned threads = 0;     // 0 picks hardware concurrency
  bool include_timing = false;
  VerifierLimits limits;

  /// Throws std::invalid_argument: trials >= 1, repetitions >= 1, primes
  /// required iff protocol is 2msg.
  void validate() const;
};

struct WilsonInterval {
  double rate = 0;
  double low = 0;
  double high = 0;
};

/// 95% Wilson score interval for successes out of n.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054);

enum class TrialClass { correct_order, wrong_order, abort };
std::string_view to_string(TrialClass c);

struct TrialRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  TrialClass classification = TrialClass::abort;
  RepeatedResult result;
};

struct Report {
  ExperimentConfig config;
  std::string group_order;  // decimal
  bool solvable = true;
  std::uint64_t correct_order = 0;
  std::uint64_t wrong_order = 0;
  std::uint64_t abort = 0;
  double mean_verifier_products = 0;
  double mean_verifier_inverses = 0;
  double mean_prover_products = 0;
  double mean_prover_inverses = 0;
  double mean_message_bytes = 0;
  std::optional<double> wall_clock_seconds;

  std::uint64_t trials() const noexcept { return correct_order + wrong_order + abort; }
  std::string to_json() const;
};

struct CampaignResult {
  Report report;
  std::vector<TrialRecord> trials;
};

/// Runs the campaign without touching the filesystem. Trial i uses
/// derive_seed(config.seed, i); the reduction is ordered by trial index.
CampaignResult run_campaign(const ExperimentConfig& config);

/// One NDJSON line per trial.
std::string transcript_record(const TrialRecord& trial);

/// run_campaign plus the report and transcript files named in the config.
Report cmd_run(const ExperimentConfig& config);

struct FixtureInfo {
  std::string name;
  std::string spec;
  std::uint64_t order = 0;
  bool solvable = false;
  std::vector<std::uint64_t> primes;  // distinct prime factors of the order
};

/// Built-in fixtures: names and specs only (cheap).
std::vector<std::pair<std::string, std::string>> fixture_specs();
/// Catalog with orders and solvability measured by enumeration.
std::vector<FixtureInfo> fixture_catalog();
std::string cmd_fixtures();

struct SamplerTestConfig {
  std::string group_spec;
  SamplerMode mode = SamplerMode::exact;
  double epsilon = 1.0 / 256;
  std::uint64_t draws = 10'000;
  std::uint64_t seed = 0;
};

struct SamplerTestResult {
  double tv_distance = 0;
  QueryCounts queries;
  std::uint64_t draws = 0;
  std::size_t group_order = 0;
  std::string to_json() const;
};

/// Queries cover sampler setup and all draws (reference enumeration excluded).
SamplerTestResult cmd_sampler_test(const SamplerTestConfig& config);

/// Refined sequence, primes and quotient orders as JSON. Without primes the
/// prime factors of the order are used.
std::string cmd_pcgs(std::string_view group_spec, std::span<const std::uint64_t> primes = {});

/// "2,3,5" -> {2, 3, 5}. Throws std::invalid_argument.
std::vector<std::uint64_t> parse_prime_list(std::string_view text);

}  // namespace solvorder
