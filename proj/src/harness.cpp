#include "solvorder/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "solvorder/polycyclic.hpp"

namespace solvorder {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (group_spec.empty()) throw std::invalid_argument("group spec is required");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (protocol == ProtocolKind::two_message && primes.empty())
    throw std::invalid_argument("2msg requires --primes");
  if (protocol == ProtocolKind::three_message && !primes.empty())
    throw std::invalid_argument("--primes applies to 2msg only");
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0, 0, 1};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes == n ? 1.0 : std::min(1.0, center + half);
  return {p, low, high};
}

std::string_view to_string(TrialClass c) {
  switch (c) {
    case TrialClass::correct_order: return "correct_order";
    case TrialClass::wrong_order: return "wrong_order";
    case TrialClass::abort: return "abort";
  }
  return "abort";
}

namespace {

json config_json(const ExperimentConfig& c) {
  json out{{"group", c.group_spec},
           {"protocol", to_string(c.protocol)},
           {"prover", to_string(c.prover.kind)},
           {"trials", c.trials},
           {"repetitions", c.repetitions},
           {"seed", c.seed}};
  if (c.protocol == ProtocolKind::two_message) out["primes"] = c.primes;
  if (c.prover.target_round) out["target_round"] = *c.prover.target_round;
  return out;
}

json rate_json(std::uint64_t count, std::uint64_t n) {
  const auto w = wilson_interval(count, n);
  return {{"count", count}, {"rate", w.rate}, {"wilson95", {w.low, w.high}}};
}

}  // namespace

std::string Report::to_json() const {
  const auto n = trials();
  json out{{"config", config_json(config)},
           {"group_order", group_order},
           {"solvable", solvable},
           {"outcomes",
            {{"correct_order", rate_json(correct_order, n)},
             {"wrong_order", rate_json(wrong_order, n)},
             {"abort", rate_json(abort, n)}}},
           {"mean_verifier_queries", {{"product", mean_verifier_products}, {"inverse", mean_verifier_inverses}}},
           {"mean_prover_queries", {{"product", mean_prover_products}, {"inverse", mean_prover_inverses}}},
           {"mean_message_bytes", mean_message_bytes}};
  if (wall_clock_seconds) out["wall_clock_seconds"] = *wall_clock_seconds;
  return out.dump(2) + "\n";
}

CampaignResult run_campaign(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const GroupOracle group = make_group(config.group_spec);

  CampaignResult result;
  Report& report = result.report;
  report.config = config;
  const auto order = enumerate_closure(group.with_fresh_counters(), group.generators(),
                                       config.limits.closure_cap)
                         .size();
  report.group_order = std::to_string(order);
  try {
    compute_pcgs(group.with_fresh_counters(), config.limits.closure_cap);
  } catch (const NotSolvable&) {
    report.solvable = false;
  }

  const ProtocolVariant variant{config.protocol, config.primes, config.prover};
  result.trials.resize(config.trials);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::uint64_t i = next++; i < config.trials; i = next++) {
      try {
        TrialRecord& rec = result.trials[i];
        rec.index = i;
        rec.seed = derive_seed(config.seed, i);
        rec.result = run_repeated(group, variant, config.repetitions, rec.seed, config.limits);
        const auto& o = rec.result.outcome;
        rec.classification = o.aborted()          ? TrialClass::abort
                             : *o.order == order ? TrialClass::correct_order
                                                 : TrialClass::wrong_order;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto threads = static_cast<unsigned>(
      std::min<std::uint64_t>(config.threads == 0 ? hw : config.threads, config.trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  double vp = 0, vi = 0, pp = 0, pi = 0, bytes = 0;
  for (const auto& rec : result.trials) {
    switch (rec.classification) {
      case TrialClass::correct_order: ++report.correct_order; break;
      case TrialClass::wrong_order: ++report.wrong_order; break;
      case TrialClass::abort: ++report.abort; break;
    }
    for (const auto& run : rec.result.runs) {
      vp += static_cast<double>(run.transcript.verifier_queries.product);
      vi += static_cast<double>(run.transcript.verifier_queries.inverse);
      pp += static_cast<double>(run.transcript.prover_queries.product);
      pi += static_cast<double>(run.transcript.prover_queries.inverse);
      bytes += static_cast<double>(run.transcript.message_bytes());
    }
  }
  const double n = static_cast<double>(config.trials);
  report.mean_verifier_products = vp / n;
  report.mean_verifier_inverses = vi / n;
  report.mean_prover_products = pp / n;
  report.mean_prover_inverses = pi / n;
  report.mean_message_bytes = bytes / n;
  if (config.include_timing)
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::string transcript_record(const TrialRecord& trial) {
  json runs = json::array();
  for (const auto& run : trial.result.runs) runs.push_back(json::parse(run.transcript.to_json()));
  const auto& o = trial.result.outcome;
  json outcome = o.aborted() ? json{{"result", "abort"}, {"reason", o.abort_reason}}
                             : json{{"result", "order"}, {"order", o.order->str()}};
  return json{{"trial", trial.index},
              {"seed", trial.seed},
              {"classification", to_string(trial.classification)},
              {"outcome", outcome},
              {"runs", runs}}
      .dump();
}

Report cmd_run(const ExperimentConfig& config) {
  auto result = run_campaign(config);
  if (!config.out.empty()) {
    std::ofstream out(config.out);
    if (!out) throw std::runtime_error("cannot write " + config.out);
    out << result.report.to_json();
  }
  if (!config.transcripts.empty()) {
    std::ofstream log(config.transcripts);
    if (!log) throw std::runtime_error("cannot write " + config.transcripts);
    for (const auto& trial : result.trials) log << transcript_record(trial) << '\n';
  }
  return result.report;
}

std::vector<std::pair<std::string, std::string>> fixture_specs() {
  return {
      {"trivial", "cyclic:1"},
      {"C12", "cyclic:12"},
      {"C3xC9", "direct:cyclic:3,cyclic:9"},
      {"S3", "perm:3:(1 2),(1 2 3)"},
      {"S4", "perm:4:(1 2),(1 2 3 4)"},
      {"D4", "perm:4:(1 2 3 4),(1 3)"},
      {"C2xS3", "direct:cyclic:2,perm:3:(1 2),(1 2 3)"},
      {"S4-relabeled", "perm:4:(1 2),(1 2 3 4)@seed=2024"},
      {"A5", "perm:5:(1 2 3),(1 2 3 4 5)"},
  };
}

std::vector<FixtureInfo> fixture_catalog() {
  std::vector<FixtureInfo> out;
  for (const auto& [name, spec] : fixture_specs()) {
    const auto group = make_group(spec);
    FixtureInfo info{name, spec, enumerate_closure(group, group.generators()).size(), true, {}};
    info.primes = prime_factors(info.order);
    try {
      compute_pcgs(group);
    } catch (const NotSolvable&) {
      info.solvable = false;
    }
    out.push_back(std::move(info));
  }
  return out;
}

std::string cmd_fixtures() {
  json out = json::array();
  for (const auto& f : fixture_catalog())
    out.push_back({{"name", f.name}, {"spec", f.spec}, {"order", f.order}, {"solvable", f.solvable},
                   {"primes", f.primes}});
  return out.dump(2) + "\n";
}

std::string SamplerTestResult::to_json() const {
  return json{{"tv_distance", tv_distance},
              {"queries", queries.total()},
              {"query_breakdown", {{"product", queries.product}, {"inverse", queries.inverse}}},
              {"draws", draws},
              {"group_order", group_order}}
             .dump(2) +
         "\n";
}

SamplerTestResult cmd_sampler_test(const SamplerTestConfig& config) {
  if (config.draws < 1) throw std::invalid_argument("draws must be >= 1");
  const GroupOracle group = make_group(config.group_spec);
  const auto reference = enumerate_closure(group.with_fresh_counters(), group.generators());
  const GroupOracle counted = group.with_fresh_counters();
  Rng rng(config.seed);
  Histogram hist;

  if (config.mode == SamplerMode::exact) {
    const ExactSampler sampler(counted, counted.generators());
    for (std::uint64_t d = 0; d < config.draws; ++d) ++hist[sampler.draw(rng)];
  } else {
    SamplerConfig{config.epsilon, config.mode, config.seed}.validate();
    const SubproductSampler sampler(counted, counted.generators(), config.epsilon, rng);
    for (std::uint64_t d = 0; d < config.draws; ++d) ++hist[sampler.draw(rng)];
  }

  SamplerTestResult result;
  result.tv_distance = tv_distance_empirical(hist, reference);
  result.queries = counted.counts();
  result.draws = config.draws;
  result.group_order = reference.size();
  return result;
}

std::string cmd_pcgs(std::string_view group_spec, std::span<const std::uint64_t> primes) {
  const GroupOracle group = make_group(group_spec);
  const auto order = enumerate_closure(group, group.generators()).size();
  const auto base = compute_pcgs(group);
  std::vector<std::uint64_t> chosen(primes.begin(), primes.end());
  if (chosen.empty()) chosen = prime_factors(order);

  auto hex = [](const std::vector<ElementCode>& codes) {
    json out = json::array();
    for (const auto& c : codes) out.push_back(c.to_hex());
    return out;
  };
  json out{{"group", group.description()},
           {"order", order},
           {"encoding_length", group.encoding_length()},
           {"pcgs", {{"elements", hex(base.elements)}, {"quotient_orders", base.quotient_orders}}}};
  if (!base.elements.empty()) {
    const auto refined = refine_with_primes(group, base, chosen, group.encoding_length());
    const NormalFormTable table(group, refined.elements);
    out["refined"] = {{"primes_used", chosen},
                      {"elements", hex(refined.elements)},
                      {"primes", refined.primes},
                      {"quotient_orders", table.quotient_orders()}};
  }
  return out.dump(2) + "\n";
}

std::vector<std::uint64_t> parse_prime_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const auto token = text.substr(pos, comma - pos);
    if (token.empty() || token.find_first_not_of("0123456789") != std::string_view::npos)
      throw std::invalid_argument("bad prime list '" + std::string(text) + "'");
    out.push_back(std::stoull(std::string(token)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace solvorder
