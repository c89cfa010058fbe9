#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <stdexcept>

#include "../acceptance/criteria.hpp"
#include "json_out.hpp"
#include "pinflip/dynamics.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/format.hpp"
#include "pinflip/metastability.hpp"
#include "pinflip/parallel.hpp"
#include "pinflip/phase.hpp"
#include "pinflip/spectral.hpp"

namespace pinflip::cli {

namespace {

// Largest N for which `gap` runs the full bound suite (dense eigensolves).
constexpr int kBoundSuiteMaxN = 8;
constexpr double kStrictness = 1e-9;

double single_value(const std::string& text, const char* name) {
  if (text.empty()) throw ArgumentError(std::string("--") + name + " is required");
  const auto v = GridAxis::parse(text).values();
  if (v.size() != 1) throw ArgumentError(std::string("--") + name + " takes a single value for this command");
  return v[0];
}

int as_size(double v) {
  if (v != std::floor(v) || v < 1.0 || v > 1e9) throw ArgumentError("--N must be a positive integer");
  return static_cast<int>(v);
}

std::vector<int> size_range(const std::string& text) {
  if (text.empty()) throw ArgumentError("--N is required");
  std::vector<int> out;
  for (double v : GridAxis::parse(text).values()) out.push_back(as_size(v));
  return out;
}

ModelParams params_of(const RunConfig& cfg) {
  ModelParams p{as_size(single_value(cfg.N, "N")), single_value(cfg.lambda, "lambda"), single_value(cfg.sigma, "sigma")};
  p.validate();
  return p;
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ArgumentError("this command is stochastic: pass --seed or set PINFLIP_SEED");
  return *cfg.seed;
}

int replicas_or(const RunConfig& cfg, int fallback) {
  const int r = cfg.replicas.value_or(fallback);
  if (r < 1) throw ArgumentError("--replicas must be >= 1");
  return r;
}

std::string format_or(const RunConfig& cfg, const char* fallback) { return cfg.format.empty() ? fallback : cfg.format; }

json header(const char* command, const ModelParams& p) {
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["N"] = p.N;
  j["lambda"] = p.lambda;
  j["sigma"] = p.sigma;
  return j;
}

std::string csv_real(std::optional<double> v) { return v ? format_real(*v) : ""; }

void write_table(std::ostream& out, const std::vector<double>& values) {
  out << "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << format_real(values[i]) << '\n';
}

std::ofstream open_side_file(const std::string& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw ArgumentError("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace

int run_phase(const RunConfig& cfg, std::ostream& out) {
  if (cfg.lambda.empty() || cfg.sigma.empty()) {
    throw ArgumentError("phase needs --lambda and --sigma (a value or lo:hi:step)");
  }
  const auto points = phase_grid(GridAxis::parse(cfg.lambda), GridAxis::parse(cfg.sigma));
  if (format_or(cfg, "csv") == "csv") {
    out << phase_csv_header() << '\n';
    for (const auto& p : points) out << phase_csv_row(p) << '\n';
    return 0;
  }
  json j;
  j["schema"] = kSchema;
  j["command"] = "phase";
  json rows = json::array();
  for (const auto& p : points) {
    json r;
    r["lambda"] = p.lambda;
    r["sigma"] = p.sigma;
    r["F"] = p.F;
    r["G"] = p.G;
    r["Gprime"] = p.Gprime;
    r["E"] = p.E;
    r["beta_star"] = optional_real(p.beta_star);
    r["sigma0"] = optional_real(p.sigma0);
    r["static_regime"] = to_string(p.static_regime);
    r["dynamic_regime"] = to_string(p.dynamic_regime);
    rows.push_back(r);
  }
  j["points"] = rows;
  write_json(out, j);
  return 0;
}

int run_exact(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = params_of(cfg);
  const std::string fmt = format_or(cfg, "json");
  if (fmt == "csv" && cfg.lmax_law && cfg.marginal) {
    throw ArgumentError("csv output holds one table: pass either --lmax-law or --marginal");
  }
  if (cfg.marginal && (*cfg.marginal < 0 || *cfg.marginal > 2 * p.N)) {
    throw ArgumentError("--marginal site must lie in 0..2N");
  }
  if (fmt == "csv" && cfg.lmax_law) {
    write_table(out, lmax_distribution(p));
    return 0;
  }
  if (fmt == "csv" && cfg.marginal) {
    write_table(out, site_marginal(p, *cfg.marginal));
    return 0;
  }

  const ExactCaps caps;
  const double logZ = partition_function(p, caps);
  std::optional<double> beta = cfg.beta;
  if (beta && !(*beta > 0.0 && *beta < 1.0)) throw ArgumentError("--beta must lie in (0,1)");
  if (!beta) beta = activation_energy(p.lambda, p.sigma).beta_star;
  std::optional<EventWeights> w;
  if (beta) {
    if (p.N > caps.full_table_max_N) {
      if (cfg.beta) throw CapacityError("event weights are capped at N = " + std::to_string(caps.full_table_max_N));
    } else {
      w = event_weights(p, *beta);
    }
  }

  if (fmt == "csv") {
    out << "N,lambda,sigma,logZ,beta,threshold,logZ_E1,logZ_E2,logZ_boundary\n";
    out << p.N << ',' << format_real(p.lambda) << ',' << format_real(p.sigma) << ',' << format_real(logZ) << ','
        << csv_real(w ? beta : std::nullopt) << ',' << (w ? std::to_string(w->threshold) : "") << ','
        << csv_real(w ? std::optional(w->logZ_E1) : std::nullopt) << ','
        << csv_real(w ? std::optional(w->logZ_E2) : std::nullopt) << ','
        << csv_real(w ? std::optional(w->logZ_boundary) : std::nullopt) << '\n';
    return 0;
  }

  json j = header("exact", p);
  j["logZ"] = real(logZ);
  j["beta"] = w ? real(*beta) : json(nullptr);
  j["threshold"] = w ? json(w->threshold) : json(nullptr);
  j["logZ_E1"] = w ? real(w->logZ_E1) : json(nullptr);
  j["logZ_E2"] = w ? real(w->logZ_E2) : json(nullptr);
  j["logZ_boundary"] = w ? real(w->logZ_boundary) : json(nullptr);
  j["degenerate"] = w ? json(w->degenerate) : json(nullptr);
  if (beta && !w) j["events_note"] = "event weights are capped at N = " + std::to_string(caps.full_table_max_N);
  if (cfg.lmax_law) j["lmax_law"] = real_array(lmax_distribution(p));
  if (cfg.marginal) {
    j["marginal"] = {{"site", *cfg.marginal}, {"values", real_array(site_marginal(p, *cfg.marginal))}};
  }
  if (cfg.renewal_check) {
    const double defect = renewal_identity_check(p);
    j["renewal_check"] = {{"defect", real(defect)}, {"tolerance", 1e-10}, {"ok", defect < 1e-10}};
  }
  if (cfg.tilted_walk) {
    const TiltedWalk tw = tilted_walk_positivity(p.N, p.sigma);
    const double unpinned = partition_function({p.N, 0.0, p.sigma}, caps);
    const double defect = std::fabs(tw.log_normalizer + tw.log_event_probability - unpinned);
    j["tilted_walk"] = {{"log_normalizer", real(tw.log_normalizer)},
                        {"log_event_probability", real(tw.log_event_probability)},
                        {"logZ_unpinned", real(unpinned)},
                        {"defect", real(defect)},
                        {"ok", defect < 1e-10}};
  }
  write_json(out, j);
  return 0;
}

namespace {

json bound_suite(const ModelParams& p, const SparseGenerator& g, double gap, double epsilon) {
  json bounds, checks;
  const double t_rel = 1.0 / gap;

  bounds["bottleneck"] = nullptr;
  if (const auto beta = activation_energy(p.lambda, p.sigma).beta_star) {
    const BottleneckBound b = bottleneck_bound(p, *beta);
    if (!b.degenerate) {
      bounds["bottleneck"] = {{"beta", real(*beta)},
                              {"t_rel_lower", real(b.t_rel_lower)},
                              {"holds", b.t_rel_lower <= t_rel * (1 + kStrictness)}};
    }
  }

  bounds["cheeger"] = nullptr;
  const ReducedChain red = reduced_lr_chain(p);
  if (red.keys.size() >= 2) {
    const CheegerResult ch = cheeger_bound(red);
    const double red_gap = spectral_gap(red.as_generator()).gap;
    bounds["cheeger"] = {{"reduced_gap_lower", real(ch.bound)},
                         {"chi", real(ch.chi)},
                         {"reduced_gap", real(red_gap)},
                         {"rigorous", ch.rigorous},
                         {"holds", red_gap >= ch.bound * (1 - kStrictness)}};
  }

  bounds["wilson"] = nullptr;
  if (p.lambda == 0.0) {
    const double w = wilson_bound(p.N);
    bounds["wilson"] = {{"gap_lower", real(w)}, {"holds", gap >= w * (1 - kStrictness)}};
  }

  double best = std::numeric_limits<double>::infinity(), best_a = 0.0;
  for (double a : {-0.5, 0.5, 1.0}) {
    const double q = dirichlet_rayleigh(g, area_test_function(g, a)).quotient;
    if (q < best) {
      best = q;
      best_a = a;
    }
  }
  bounds["fa"] = {{"a", best_a}, {"gap_upper", real(best)}, {"holds", best >= gap * (1 - kStrictness)}};

  const JerrumReport jr = jerrum_check(g, lr_labels(g));
  checks["jerrum"] = {{"holds", jr.holds},
                      {"rhs", real(jr.rhs)},
                      {"reduced_gap", real(jr.reduced_gap)},
                      {"min_restricted_gap", real(jr.min_restricted_gap)},
                      {"gamma_bar", real(jr.gamma_bar)},
                      {"pieces", jr.pieces}};

  checks["sandwich"] = nullptr;
  if (p.N <= kMixingMaxN) {
    const MixingResult m = tv_mixing_exact(p, epsilon);
    checks["sandwich"] = {{"epsilon", epsilon},
                          {"t_mix", real(m.t_mix)},
                          {"lower", real(m.lower)},
                          {"upper", real(m.upper)},
                          {"holds", m.t_mix >= m.lower * (1 - kStrictness) && m.t_mix <= m.upper * (1 + kStrictness)}};
  }

  const double star = star_chain_gap(p);
  checks["star_leq"] = {{"star_gap", real(star)}, {"holds", star <= gap * (1 + kStrictness)}};
  return {{"bounds", bounds}, {"checks", checks}};
}

}  // namespace

int run_gap(const RunConfig& cfg, std::ostream& out) {
  const std::vector<int> Ns = size_range(cfg.N);
  const double lambda = single_value(cfg.lambda, "lambda");
  const double sigma = single_value(cfg.sigma, "sigma");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5)) throw ArgumentError("--epsilon must lie in (0, 1/2)");
  for (int N : Ns) ModelParams{N, lambda, sigma}.validate();
  const std::string fmt = format_or(cfg, Ns.size() == 1 ? "json" : "csv");

  if (fmt == "csv") {
    out << "N,states,gap,t_rel,log_t_rel_over_2N,method\n";
    for (int N : Ns) {
      const auto g = SparseGenerator::build({N, lambda, sigma});
      const GapResult r = spectral_gap(g);
      out << N << ',' << g.size() << ',' << format_real(r.gap) << ',' << format_real(1.0 / r.gap) << ','
          << format_real(std::log(1.0 / r.gap) / (2.0 * N)) << ',' << r.method << '\n';
      out.flush();
    }
    return 0;
  }

  if (Ns.size() > 1) {
    json j;
    j["schema"] = kSchema;
    j["command"] = "gap";
    j["lambda"] = lambda;
    j["sigma"] = sigma;
    json rows = json::array();
    for (int N : Ns) {
      const auto g = SparseGenerator::build({N, lambda, sigma});
      const GapResult r = spectral_gap(g);
      rows.push_back({{"N", N}, {"states", g.size()}, {"gap", real(r.gap)}, {"t_rel", real(1.0 / r.gap)}, {"method", r.method}});
    }
    j["rows"] = rows;
    write_json(out, j);
    return 0;
  }

  const ModelParams p{Ns[0], lambda, sigma};
  const auto g = SparseGenerator::build(p);
  const GapResult r = spectral_gap(g);
  json j = header("gap", p);
  j["states"] = g.size();
  j["gap"] = real(r.gap);
  j["t_rel"] = real(1.0 / r.gap);
  j["method"] = r.method;
  j["residual"] = real(r.residual);
  if (cfg.no_bounds) {
    j["bounds"] = nullptr;
    j["checks"] = nullptr;
  } else if (p.N > kBoundSuiteMaxN || g.size() < 2) {
    j["bounds"] = nullptr;
    j["checks"] = nullptr;
    j["bounds_note"] = g.size() < 2 ? "single state" : "bound suite is capped at N = " + std::to_string(kBoundSuiteMaxN);
  } else {
    const json suite = bound_suite(p, g, r.gap, cfg.epsilon);
    j["bounds"] = suite["bounds"];
    j["checks"] = suite["checks"];
  }
  write_json(out, j);
  return 0;
}

namespace {

Well parse_well(const std::string& name, const ModelParams& p) {
  if (name == "E1") return Well::kE1;
  if (name == "E2") return Well::kE2;
  return metastable_well(phase_point(p.lambda, p.sigma).static_regime);
}

}  // namespace

int run_sample(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = params_of(cfg);
  const std::uint64_t seed = require_seed(cfg);
  const int reps = replicas_or(cfg, 1);
  std::vector<std::vector<int>> draws(static_cast<std::size_t>(reps));
  auto keep = [&](int r, const PathConfig& path) {
    draws[static_cast<std::size_t>(r)].assign(path.heights().begin(), path.heights().end());
  };

  std::optional<double> beta;
  if (cfg.well == "any") {
    const ForwardTable table(p);
    run_strided(reps, cfg.jobs, [&](int first, int stride) {
      for (int r = first; r < reps; r += stride) {
        Philox rng(seed, static_cast<std::uint64_t>(r));
        keep(r, exact_sample(table, rng));
      }
    });
  } else {
    beta = cfg.beta ? cfg.beta : activation_energy(p.lambda, p.sigma).beta_star;
    if (!beta) throw DomainError("no beta* at these parameters (E = 0); pass --beta to choose the well threshold");
    const Well well = parse_well(cfg.well, p);
    run_strided(reps, cfg.jobs, [&](int first, int stride) {
      ConditionedSampler sampler(p, *beta, well);
      for (int r = first; r < reps; r += stride) {
        Philox rng(seed, static_cast<std::uint64_t>(r));
        keep(r, sampler.sample(rng));
      }
    });
  }

  if (format_or(cfg, "csv") == "csv") {
    out << "replica,H,A,l_max,L,R,heights\n";
    for (int r = 0; r < reps; ++r) {
      const PathConfig path(draws[static_cast<std::size_t>(r)]);
      const Landmarks m = landmarks(path);
      out << r << ',' << m.H << ',' << m.A << ',' << m.l_max << ',' << m.L << ',' << m.R << ',' << path.to_string()
          << '\n';
    }
    return 0;
  }
  json j = header("sample", p);
  j["seed"] = seed;
  j["well"] = cfg.well;
  j["beta"] = optional_real(beta);
  json rows = json::array();
  for (int r = 0; r < reps; ++r) {
    const PathConfig path(draws[static_cast<std::size_t>(r)]);
    const Landmarks m = landmarks(path);
    rows.push_back({{"replica", r}, {"H", m.H}, {"A", m.A}, {"l_max", m.l_max}, {"L", m.L}, {"R", m.R}, {"heights", path.to_string()}});
  }
  j["draws"] = rows;
  write_json(out, j);
  return 0;
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = params_of(cfg);
  const std::uint64_t seed = require_seed(cfg);

  if (cfg.coupling) {
    const int reps = replicas_or(cfg, 100);
    const CoalescenceEstimate est = coalescence_mixing_estimate(p, reps, seed, cfg.max_time);
    if (format_or(cfg, "json") == "csv") {
      out << "replica,coalescence_time,censored\n";
      for (std::size_t r = 0; r < est.times.size(); ++r) {
        out << r << ',' << format_real(est.times[r]) << ',' << (est.times[r] >= cfg.max_time ? 1 : 0) << '\n';
      }
    } else {
      json j = header("simulate", p);
      j["mode"] = "coupling";
      j["seed"] = seed;
      j["replicas"] = reps;
      j["max_time"] = cfg.max_time;
      j["mean"] = real(est.mean);
      j["ci_low"] = real(est.ci_low);
      j["ci_high"] = real(est.ci_high);
      j["median"] = real(est.median);
      j["q90"] = real(est.q90);
      j["censored_n"] = est.censored;
      j["order_violations"] = est.order_violations;
      write_json(out, j);
    }
    if (est.order_violations != 0) {
      throw std::runtime_error("grand coupling broke the order " + std::to_string(est.order_violations) + " times");
    }
    return 0;
  }

  Philox rng(seed, 0);
  std::optional<PathConfig> start;
  if (cfg.init == "tent") {
    start = PathConfig::tent(p.N);
  } else if (cfg.init == "zigzag") {
    start = PathConfig::zigzag(p.N);
  } else if (cfg.init == "equilibrium") {
    start = exact_sample(ForwardTable(p), rng);
  } else {
    start = PathConfig::parse(cfg.init);
    if (start->half_length() != p.N) throw ArgumentError("--init path has the wrong length for N");
  }

  SimulateOptions opt;
  opt.cadence = cfg.cadence;
  opt.record_events = !cfg.events.empty();
  if (const auto beta = activation_energy(p.lambda, p.sigma).beta_star) {
    opt.well = WellSpec{*beta, phase_point(p.lambda, p.sigma).static_regime};
  }
  Trajectory traj = simulate(p, *start, cfg.horizon, rng, opt);
  traj.seed = seed;

  if (!cfg.events.empty()) {
    auto f = open_side_file(cfg.events, true);
    write_events_binary(f, traj);
  }
  if (format_or(cfg, "csv") == "csv") {
    write_checkpoints_csv(out, traj);
    return 0;
  }
  json j = header("simulate", p);
  j["mode"] = "trajectory";
  j["seed"] = seed;
  j["horizon"] = cfg.horizon;
  j["cadence"] = cfg.cadence;
  j["initial"] = start->to_string();
  j["final_state"] = traj.final_state.to_string();
  j["well_tracked"] = opt.well.has_value();
  json rows = json::array();
  for (const auto& c : traj.checkpoints) {
    rows.push_back({{"t", c.t}, {"H", c.H}, {"A", c.A}, {"l_max", c.l_max}, {"L", c.L}, {"R", c.R}, {"in_HN", c.in_HN}});
  }
  j["checkpoints"] = rows;
  write_json(out, j);
  return 0;
}

namespace {

void write_exit_csv(std::ostream& out, const ExitExperiment& ex) {
  out << "replica,exit_time,censored\n";
  for (std::size_t r = 0; r < ex.exit_times.size(); ++r) {
    out << r << ',' << format_real(ex.exit_times[r]) << ',' << (ex.censored[r] ? 1 : 0) << '\n';
  }
}

}  // namespace

int run_metastable(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = params_of(cfg);
  const std::uint64_t seed = require_seed(cfg);
  const int reps = replicas_or(cfg, 500);
  if (!(cfg.max_time > 0.0)) throw ArgumentError("--max-time must be > 0");
  if (!(activation_energy(p.lambda, p.sigma).E > 0.0)) {
    throw DomainError("no metastable well: E(lambda, sigma) = 0 so beta* is undefined");
  }
  const double predicted = predicted_exit_scale(p);
  if (predicted > cfg.budget) {
    throw BudgetRefusal("predicted mean exit time exp(2NE) = " + format_real(predicted) + " exceeds --budget " +
                            format_real(cfg.budget),
                        predicted, cfg.budget);
  }
  ExitOptions opt;
  opt.max_time = cfg.max_time;
  opt.jobs = cfg.jobs;
  const ExitExperiment ex = exit_time_experiment(p, reps, seed, opt);

  if (!cfg.times.empty()) {
    auto f = open_side_file(cfg.times, false);
    write_exit_csv(f, ex);
  }
  if (format_or(cfg, "json") == "csv") {
    write_exit_csv(out, ex);
    return 0;
  }
  json j = header("metastable", p);
  j["seed"] = seed;
  j["beta_star"] = real(ex.beta_star);
  j["regime"] = to_string(ex.regime);
  j["well"] = to_string(ex.well);
  j["threshold"] = ex.threshold;
  j["n"] = ex.replicas;
  j["censored_n"] = ex.fit.censored;
  j["rate"] = real(ex.fit.rate);
  j["mean"] = real(ex.fit.mean);
  j["rate_ci_low"] = real(ex.fit.ci_low);
  j["rate_ci_high"] = real(ex.fit.ci_high);
  j["KS"] = real(ex.ks_unit);
  j["KS_fit"] = real(ex.fit.ks);
  j["KS_fit_pvalue"] = real(ex.fit.ks_pvalue);
  j["gap"] = optional_real(ex.gap);
  j["predicted_scale"] = real(ex.predicted_scale);
  j["predicted_from_gap"] = ex.predicted_from_gap;
  j["mean_over_predicted"] = real(ex.fit.mean / ex.predicted_scale);
  write_json(out, j);
  return 0;
}

int run_accept(const RunConfig& cfg, std::ostream& out) {
  std::vector<int> ids = cfg.criteria;
  if (ids.empty()) {
    for (int i = 1; i <= acceptance::kCriterionCount; ++i) ids.push_back(i);
  }
  bool all = true;
  for (int id : ids) {
    const auto o = acceptance::run_criterion(id, cfg.jobs);
    out << acceptance::format_line(o) << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

}  // namespace pinflip::cli
