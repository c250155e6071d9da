#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <setobs/certify.hpp>
#include <setobs/monte_carlo.hpp>
#include <setobs/scenario.hpp>
#include <setobs/trace_io.hpp>

namespace fs = std::filesystem;
using namespace setobs;

namespace {

struct Overrides {
  std::optional<int> plant, quad, hgo;

  void add(CLI::App* app) {
    app->add_option("--substeps", plant, "RK4 plant steps per inner step");
    app->add_option("--quad-substeps", quad, "quadrature intervals per sample period");
    app->add_option("--hgo-substeps", hgo, "inner observer steps per sample period");
  }

  void apply(ScenarioConfig& c) const {
    if (plant) c.substeps.plant = *plant;
    if (quad) c.substeps.quad = *quad;
    if (hgo) c.substeps.hgo = *hgo;
  }
};

ScenarioConfig load_any(const std::string& s) {
  if (fs::exists(s)) return load_scenario(s);
  return builtin_scenario(s);
}

void print_design(const ObserverDesign& d, std::ostream& os) {
  os << "scenario " << d.cfg.name << ": n=" << d.dec.n << " n1=" << d.dec.n1 << " n2=" << d.dec.n2 << " l=" << d.l
     << " steps=" << d.steps << '\n';
  for (const auto& w : d.warnings) os << "warning: " << w << '\n';
}

int run_and_emit(const ScenarioConfig& cfg, const fs::path& out) {
  const ObserverDesign d = prepare_design(cfg);
  print_design(d, std::cerr);
  RunOptions opt;
  opt.check_eps1 = true;
  const RunResult res = run_pipeline(d, opt);
  fs::create_directories(out);
  emit_traces(res.rows, cfg.sys.n(), out / "trace.csv");
  emit_plot_data(res.rows, res.sets, cfg.projection, out);
  const CertificateReport rep = certify(d, res);
  {
    std::ofstream f(out / "certificate.json", std::ios::binary);
    f << to_json(rep).dump(2) << '\n';
  }
  std::cout << "rows " << res.rows.size() << ", violations " << res.violations << ", worst quadratic form "
            << format_double(res.worst_quadratic_form) << ", eps1 worst ratio " << format_double(res.eps1_worst_ratio)
            << ", updates " << res.updates << ", certificate " << rep.case_name
            << (rep.consistent ? " consistent" : " INCONSISTENT") << '\n';
  if (!res.contained_all || res.eps1_worst_ratio > 1.0) return 1;
  return rep.consistent ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"set-membership observer for LTI systems with bounded unknown inputs"};
  app.require_subcommand(1);

  std::string scenario, out = "out", example, name;
  int runs = 200, threads = 1;
  std::optional<std::uint64_t> seed;
  Overrides ov;

  auto* run = app.add_subcommand("run", "run the observer on a scenario and write traces");
  run->add_option("--scenario", scenario, "scenario file or built-in name")->required();
  run->add_option("--out", out, "output directory");
  ov.add(run);

  auto* demo = app.add_subcommand("demo", "run a built-in example");
  demo->add_option("--example", example, "1 or 2")->required()->check(CLI::IsMember({"1", "2"}));
  demo->add_option("--out", out, "output directory");
  ov.add(demo);

  auto* cert = app.add_subcommand("certify", "compute the boundedness certificate and check it against a run");
  cert->add_option("--scenario", scenario, "scenario file or built-in name")->required();
  std::string cert_out;
  cert->add_option("--out", cert_out, "write the report to this file");
  ov.add(cert);

  auto* mc = app.add_subcommand("mc", "Monte Carlo containment test");
  mc->add_option("--scenario", scenario, "scenario file or built-in name")->required();
  mc->add_option("--runs", runs, "number of runs")->check(CLI::NonNegativeNumber);
  mc->add_option("--seed", seed, "seed (defaults to the scenario seed)");
  mc->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  ov.add(mc);

  auto* ws = app.add_subcommand("write-scenario", "write a built-in scenario to a file");
  ws->add_option("--name", name, "built-in scenario name")->required();
  ws->add_option("--out", out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ScenarioConfig cfg = load_any(scenario);
      ov.apply(cfg);
      return run_and_emit(cfg, out);
    }
    if (*demo) {
      ScenarioConfig cfg = builtin_scenario("example" + example);
      ov.apply(cfg);
      return run_and_emit(cfg, out);
    }
    if (*cert) {
      ScenarioConfig cfg = load_any(scenario);
      ov.apply(cfg);
      const ObserverDesign d = prepare_design(cfg);
      print_design(d, std::cerr);
      const RunResult res = run_pipeline(d);
      const CertificateReport rep = certify(d, res);
      const std::string text = to_json(rep).dump(2);
      if (cert_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream f(cert_out, std::ios::binary);
        f << text << '\n';
        std::cout << "certificate " << rep.case_name << (rep.consistent ? " consistent" : " INCONSISTENT") << '\n';
      }
      if (!res.contained_all) return 1;
      return rep.consistent ? 0 : 1;
    }
    if (*mc) {
      ScenarioConfig cfg = load_any(scenario);
      ov.apply(cfg);
      const ObserverDesign d = prepare_design(cfg);
      print_design(d, std::cerr);
      const McSummary s = monte_carlo_containment(d, runs, seed.value_or(cfg.seed), threads);
      std::cout << "runs " << s.runs << " (boundary " << s.boundary_runs << "), contained " << s.contained_runs
                << ", rate " << format_double(s.containment_rate) << ", margin min " << format_double(s.min_margin)
                << " max " << format_double(s.max_margin) << ", eps1 worst ratio " << format_double(s.eps1_worst_ratio)
                << '\n';
      return s.contained_runs == s.runs && s.eps1_worst_ratio <= 1.0 ? 0 : 1;
    }
    if (*ws) {
      save_scenario(builtin_scenario(name), out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
