#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "json_out.hpp"

namespace pinflip::cli {

namespace {

void add_flags(CLI::App& app, RunConfig& cfg) {
  const char* model = "Model";
  app.add_option("--N", cfg.N, "Half-length N; gap also accepts lo:hi:step")->group(model);
  app.add_option("--lambda", cfg.lambda, "Pinning reward; phase accepts lo:hi:step")->group(model);
  app.add_option("--sigma", cfg.sigma, "Area tilt; phase accepts lo:hi:step")->group(model);

  const char* run = "Run";
  app.add_option("--seed", cfg.seed, "Base seed; replica r draws from stream r")->envname("PINFLIP_SEED")->group(run);
  app.add_option("--replicas", cfg.replicas, "Independent replicas or draws")->group(run);
  app.add_option("--horizon", cfg.horizon, "Simulated time")->group(run);
  app.add_option("--cadence", cfg.cadence, "Checkpoint spacing in time units (0: none)")->group(run);
  app.add_option("--epsilon", cfg.epsilon, "Total-variation level for mixing times")->group(run);
  app.add_option("--jobs", cfg.jobs, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber)
      ->group(run);

  const char* output = "Output";
  app.add_option("--out", cfg.out, "Write the main artifact here instead of stdout")->group(output);
  app.add_option("--format", cfg.format, "csv or json (default depends on the command)")
      ->check(CLI::IsMember({"csv", "json"}))
      ->group(output);

  const char* exact = "exact";
  app.add_option("--beta", cfg.beta, "Well threshold fraction; defaults to beta*")->group(exact);
  app.add_flag("--renewal-check", cfg.renewal_check, "Report the renewal-identity defect")->group(exact);
  app.add_flag("--tilted-walk", cfg.tilted_walk, "Report the tilted-walk representation defect")->group(exact);
  app.add_flag("--lmax-law", cfg.lmax_law, "Law of the largest excursion half-length")->group(exact);
  app.add_option("--marginal", cfg.marginal, "Height law at this site")->group(exact);

  app.add_flag("--no-bounds", cfg.no_bounds, "Skip the bound suite")->group("gap");

  app.add_option("--well", cfg.well, "any, E1, E2 or metastable")
      ->check(CLI::IsMember({"any", "E1", "E2", "metastable"}))
      ->group("sample");

  const char* sim = "simulate";
  app.add_option("--init", cfg.init, "tent, zigzag, equilibrium or explicit heights \"0 1 0 ...\"")->group(sim);
  app.add_option("--events", cfg.events, "Binary event log (f64 time, u32 site, u32 height)")->group(sim);
  app.add_flag("--coupling", cfg.coupling, "Coalescence of the extremal pair under the grand coupling")->group(sim);
  app.add_option("--max-time", cfg.max_time, "Per-replica time cap; longer runs are censored")->group(sim);

  const char* meta = "metastable";
  app.add_option("--budget", cfg.budget, "Refuse runs whose predicted mean exit exceeds this")->group(meta);
  app.add_option("--times", cfg.times, "Also write per-replica exit times as CSV here")->group(meta);

  app.add_option("--criterion", cfg.criteria, "Acceptance criteria to run (repeatable)")
      ->check(CLI::Range(1, 12))
      ->group("accept");
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "phase") return run_phase(cfg, out);
  if (cfg.command == "exact") return run_exact(cfg, out);
  if (cfg.command == "gap") return run_gap(cfg, out);
  if (cfg.command == "sample") return run_sample(cfg, out);
  if (cfg.command == "simulate") return run_simulate(cfg, out);
  if (cfg.command == "metastable") return run_metastable(cfg, out);
  return run_accept(cfg, out);
}

int report(std::ostream& err, int code, const char* kind, const std::string& message, json extra = json::object()) {
  json e;
  e["kind"] = kind;
  e["code"] = code;
  e["message"] = message;
  for (auto it = extra.begin(); it != extra.end(); ++it) e[it.key()] = it.value();
  json j;
  j["schema"] = kSchema;
  j["error"] = e;
  write_json(err, j);
  return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Exact, spectral and Monte Carlo tools for the pinned, area-tilted interface."};
  app.set_config("--config", "", "Flat key=value file; keys are the long flag names without dashes");
  app.require_subcommand(1);
  add_flags(app, cfg);

  const std::pair<const char*, const char*> commands[] = {
      {"phase", "Free energies, barrier and regimes over a (lambda, sigma) grid"},
      {"exact", "Partition functions, well weights, l_max law, marginals, identity checks"},
      {"gap", "Spectral gap with the bound suite, or a gap-versus-N sweep"},
      {"sample", "Exact equilibrium draws, optionally conditioned on a well"},
      {"simulate", "Heat-bath trajectories or extremal-pair coalescence"},
      {"metastable", "Exit times from the metastable well"},
      {"accept", "Run acceptance criteria"},
  };
  for (auto [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    return report(err, 2, "validation", e.what());
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (cfg.out.empty()) return dispatch(cfg, out);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw ArgumentError("cannot open '" + cfg.out + "' for writing");
    const int code = dispatch(cfg, file);
    file.close();
    if (!file) throw std::runtime_error("failed writing '" + cfg.out + "'");
    return code;
  } catch (const BudgetRefusal& e) {
    return report(err, 3, "capacity", e.what(), {{"predicted_scale", real(e.predicted)}, {"budget", real(e.budget)}});
  } catch (const CapacityError& e) {
    return report(err, 3, "capacity", e.what());
  } catch (const ConvergenceError& e) {
    return report(err, 4, "convergence", e.what(), {{"residual", real(e.residual())}});
  } catch (const std::invalid_argument& e) {
    return report(err, 2, "validation", e.what());
  } catch (const std::domain_error& e) {
    return report(err, 2, "validation", e.what());
  } catch (const StructuralError& e) {
    return report(err, 2, "validation", e.what());
  } catch (const std::exception& e) {
    return report(err, 1, "runtime", e.what());
  }
}

}  // namespace pinflip::cli
