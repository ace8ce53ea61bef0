#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "solvorder/harness.hpp"

namespace py = pybind11;
using namespace solvorder;

namespace {

py::object to_python_int(const BigInt& value) {
  return py::reinterpret_steal<py::object>(PyLong_FromString(value.str().c_str(), nullptr, 10));
}

ProverSpec prover_spec(const std::string& name, std::optional<std::size_t> target_round) {
  return {parse_prover_kind(name), target_round};
}

py::dict run_once(const std::string& group_spec, const std::string& protocol, const std::string& prover,
                  const std::vector<std::uint64_t>& primes, std::uint64_t seed, unsigned repetitions,
                  std::optional<std::size_t> target_round) {
  const auto group = make_group(group_spec);
  const ProtocolVariant variant{parse_protocol_kind(protocol), primes, prover_spec(prover, target_round)};
  RepeatedResult result;
  {
    py::gil_scoped_release release;
    result = run_repeated(group, variant, repetitions, seed);
  }
  py::dict out;
  out["order"] = result.outcome.aborted() ? py::none() : to_python_int(*result.outcome.order);
  out["abort_reason"] = result.outcome.abort_reason;
  py::list transcripts;
  for (const auto& run : result.runs) transcripts.append(run.transcript.to_json());
  out["transcripts"] = transcripts;
  return out;
}

std::string run_campaign_json(const std::string& group_spec, const std::string& protocol, const std::string& prover,
                              const std::vector<std::uint64_t>& primes, std::uint64_t trials, unsigned repetitions,
                              std::uint64_t seed, std::optional<std::size_t> target_round, unsigned threads) {
  ExperimentConfig c;
  c.group_spec = group_spec;
  c.protocol = parse_protocol_kind(protocol);
  c.prover = prover_spec(prover, target_round);
  c.primes = primes;
  c.trials = trials;
  c.repetitions = repetitions;
  c.seed = seed;
  c.threads = threads;
  py::gil_scoped_release release;
  return run_campaign(c).report.to_json();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Group-order protocols over black-box solvable groups";

  py::register_exception<MalformedMessage>(m, "MalformedMessage", PyExc_ValueError);
  py::register_exception<NotSolvable>(m, "NotSolvable", PyExc_ValueError);
  py::register_exception<ClosureOverflow>(m, "ClosureOverflow", PyExc_RuntimeError);

  m.def(
      "group_order",
      [](const std::string& spec) { return enumerate_closure(make_group(spec), make_group(spec).generators()).size(); },
      py::arg("spec"), "Order of the group by closure enumeration.");
  m.def(
      "encoding_length", [](const std::string& spec) { return make_group(spec).encoding_length(); },
      py::arg("spec"));
  m.def(
      "mu_sequence",
      [](const std::vector<std::uint64_t>& primes, unsigned n) {
        py::list out;
        for (const auto& v : mu_sequence(primes, n)) out.append(to_python_int(v));
        return out;
      },
      py::arg("primes"), py::arg("n"));
  m.def("prime_factors", &prime_factors, py::arg("value"));
  m.def(
      "pcgs_json", [](const std::string& spec, const std::vector<std::uint64_t>& primes) { return cmd_pcgs(spec, primes); },
      py::arg("spec"), py::arg("primes") = std::vector<std::uint64_t>{});
  m.def("fixtures_json", &cmd_fixtures);
  m.def(
      "adversaries",
      [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto k : adversary_kinds()) out.emplace_back(to_string(k), describe(k));
        return out;
      });
  m.def(
      "sampler_test_json",
      [](const std::string& spec, const std::string& mode, double epsilon, std::uint64_t draws, std::uint64_t seed) {
        return cmd_sampler_test({spec, parse_sampler_mode(mode), epsilon, draws, seed}).to_json();
      },
      py::arg("spec"), py::arg("mode") = "exact", py::arg("epsilon") = 1.0 / 256, py::arg("draws") = 10'000,
      py::arg("seed") = 0);
  m.def(
      "wilson_interval",
      [](std::uint64_t successes, std::uint64_t n) {
        const auto w = wilson_interval(successes, n);
        return py::make_tuple(w.rate, w.low, w.high);
      },
      py::arg("successes"), py::arg("n"));
  m.def("run_protocol", &run_once, py::arg("spec"), py::arg("protocol") = "2msg", py::arg("prover") = "honest",
        py::arg("primes") = std::vector<std::uint64_t>{}, py::arg("seed") = 0, py::arg("repetitions") = 1,
        py::arg("target_round") = py::none());
  m.def("run_campaign_json", &run_campaign_json, py::arg("spec"), py::arg("protocol") = "2msg",
        py::arg("prover") = "honest", py::arg("primes") = std::vector<std::uint64_t>{}, py::arg("trials") = 1,
        py::arg("repetitions") = 1, py::arg("seed") = 0, py::arg("target_round") = py::none(),
        py::arg("threads") = 0);
}
