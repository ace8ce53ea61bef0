// solvorder: experiment runner for the group-order protocols.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "solvorder/harness.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

void list_adversaries() {
  for (auto kind : solvorder::adversary_kinds())
    std::cout << solvorder::to_string(kind) << "\t" << solvorder::describe(kind) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive group-order protocols over black-box solvable groups"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-adversaries", list, "List adversarial prover strategies and exit");

  // run
  auto* run = app.add_subcommand("run", "Run a seeded Monte-Carlo campaign");
  solvorder::ExperimentConfig config;
  std::string protocol = "2msg", prover = "honest", adversary, primes;
  std::optional<std::size_t> target_round;
  run->add_option("--group", config.group_spec, "Group spec, e.g. cyclic:12")->required();
  run->add_option("--protocol", protocol, "2msg or 3msg")->capture_default_str();
  auto* prover_opt = run->add_option("--prover", prover, "honest or an adversary name")->capture_default_str();
  run->add_option("--adversary", adversary, "Adversary name (alias of --prover)")->excludes(prover_opt);
  run->add_option("--target-round", target_round, "0-based round for guess_inflate");
  run->add_option("--primes", primes, "Comma-separated primes covering |G| (2msg)");
  run->add_option("--trials", config.trials, "Number of trials")->capture_default_str();
  run->add_option("--repetitions", config.repetitions, "Parallel repetitions per trial")->capture_default_str();
  run->add_option("--seed", config.seed, "Campaign seed")->capture_default_str();
  run->add_option("--out", config.out, "Report path (also printed to stdout)");
  run->add_option("--transcripts", config.transcripts, "Per-trial NDJSON transcript log");
  run->add_option("--threads", config.threads, "Worker threads (0 = all cores)")->capture_default_str();
  run->add_flag("--timing", config.include_timing, "Add wall-clock seconds to the report");

  // fixtures
  auto* fixtures = app.add_subcommand("fixtures", "Print the built-in fixture catalog");

  // sampler-test
  auto* sampler = app.add_subcommand("sampler-test", "Empirical sampler diagnostics");
  solvorder::SamplerTestConfig sampler_config;
  std::string mode = "exact";
  sampler->add_option("--group", sampler_config.group_spec, "Group spec")->required();
  sampler->add_option("--mode", mode, "exact or subproduct")->capture_default_str();
  sampler->add_option("--epsilon", sampler_config.epsilon, "Subproduct target epsilon")->capture_default_str();
  sampler->add_option("--draws", sampler_config.draws, "Number of draws")->capture_default_str();
  sampler->add_option("--seed", sampler_config.seed, "Seed")->capture_default_str();

  // pcgs
  auto* pcgs = app.add_subcommand("pcgs", "Print the PCGS and its prime refinement");
  std::string pcgs_group, pcgs_primes;
  pcgs->add_option("--group", pcgs_group, "Group spec")->required();
  pcgs->add_option("--primes", pcgs_primes, "Comma-separated primes (default: factors of |G|)");

  CLI11_PARSE(app, argc, argv);

  if (list) {
    list_adversaries();
    return 0;
  }

  try {
    if (*run) {
      try {
        config.protocol = solvorder::parse_protocol_kind(protocol);
        config.prover.kind = solvorder::parse_prover_kind(adversary.empty() ? prover : adversary);
        config.prover.target_round = target_round;
        if (!primes.empty()) config.primes = solvorder::parse_prime_list(primes);
        config.validate();
        solvorder::make_group(config.group_spec);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
      }
      std::cout << solvorder::cmd_run(config).to_json();
    } else if (*fixtures) {
      std::cout << solvorder::cmd_fixtures();
    } else if (*sampler) {
      try {
        sampler_config.mode = solvorder::parse_sampler_mode(mode);
        solvorder::make_group(sampler_config.group_spec);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
      }
      std::cout << solvorder::cmd_sampler_test(sampler_config).to_json();
    } else if (*pcgs) {
      std::vector<std::uint64_t> chosen;
      try {
        if (!pcgs_primes.empty()) chosen = solvorder::parse_prime_list(pcgs_primes);
        solvorder::make_group(pcgs_group);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
      }
      std::cout << solvorder::cmd_pcgs(pcgs_group, chosen);
    } else {
      std::cout << app.help();
      return kUsageError;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
