#pragma once

// Named experiments and their on-disk artifacts. Every command writes the same
// four files into the output directory:
//
//   summary.json     config echo, certificate echo, checks, failed-check list
//   certificate.json landscape certificate (null when the command has none)
//   per_step.csv     k, mean_f_event, se_f, survival_frac, theory_rho_k
//   per_run.csv      one exit summary per trajectory (also per_run.jsonl)
//
// All files are functions of (config, base_seed) only; the worker count does
// not change a byte.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "lojsgd/config.hpp"
#include "lojsgd/constants.hpp"
#include "lojsgd/core.hpp"
#include "lojsgd/io.hpp"
#include "lojsgd/landscapes.hpp"
#include "lojsgd/noise.hpp"
#include "lojsgd/sgd.hpp"
#include "lojsgd/verify.hpp"

namespace lojsgd {

inline constexpr int kExitPass = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;
inline constexpr int kExitRuntimeError = 4;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check-seed", "run-ensemble", "rate-fit",
                                                 "escape",     "chung",        "certify-net"};
  return names;
}

inline std::size_t default_workers() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// What a command produced, before anything touches the disk.
struct CommandResult {
  std::vector<CheckResult> checks;
  std::optional<LandscapeCertificate> certificate;
  std::optional<EnsembleStats> ensemble;
  std::vector<double> theory;  // reference curve for per_step.csv, indexed by k
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

// ---------------------------------------------------------------------------
// JSON and CSV rendering
// ---------------------------------------------------------------------------

namespace detail {

// Non-finite values become null; nlohmann would otherwise do the same silently.
inline nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json source_json(const FieldSource& s) {
  return {{"provenance", s.kind == Provenance::exact ? "exact" : "sampled"},
          {"samples", s.samples},
          {"refine_steps", s.refine_steps},
          {"safety", s.safety}};
}

inline nlohmann::ordered_json check_json(const CheckResult& c) {
  return {{"name", c.name},
          {"passed", c.passed},
          {"measured", number(c.measured)},
          {"bound", number(c.bound)},
          {"detail", c.detail}};
}

inline nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const Field& f : registry()) {
    if (const auto v = f.get(cfg)) out[f.section][f.key] = *v;
  }
  return out;
}

inline std::string optional_step(const std::optional<std::size_t>& k) {
  return k ? std::to_string(*k) : "";
}

}  // namespace detail

inline nlohmann::ordered_json certificate_json(const LandscapeCertificate& c) {
  using detail::number;
  return {{"alpha", number(c.alpha)},
          {"c_lip", number(c.c_lip)},
          {"m_floor", number(c.m_floor)},
          {"rho", number(c.rho)},
          {"eta_star", number(c.eta_star)},
          {"sigma", number(c.sigma)},
          {"seed_ok", c.seed_ok},
          {"assumption3_ok", c.assumption3_ok()},
          {"f0", number(c.f0)},
          {"r", number(c.r)},
          {"R", number(c.R)},
          {"alpha_raw", number(c.alpha_raw)},
          {"c_lip_raw", number(c.c_lip_raw)},
          {"grad_bound", number(c.grad_bound)},
          {"smoothness_radius", number(c.smoothness_radius)},
          {"growth_points", c.growth_points},
          {"growth_violations", c.growth_violations},
          {"alpha_source", detail::source_json(c.alpha_source)},
          {"c_lip_source", detail::source_json(c.c_lip_source)},
          {"floor_source", detail::source_json(c.floor_source)},
          {"seed", c.seed}};
}

inline void write_per_step_csv(std::ostream& os, const CommandResult& res, std::size_t thin) {
  os << "k,mean_f_event,se_f,survival_frac,theory_rho_k\n";
  if (!res.ensemble) return;
  const EnsembleStats& st = *res.ensemble;
  for (std::size_t k = 0; k <= st.horizon; ++k) {
    if (k % thin != 0 && k != st.horizon) continue;
    const double theory =
        k < res.theory.size() ? res.theory[k] : std::numeric_limits<double>::quiet_NaN();
    os << k << ',' << format_number(st.mean_f_event[k]) << ',' << format_number(st.se_f_event[k])
       << ',' << format_number(st.survival[k]) << ',' << format_number(theory) << '\n';
  }
}

inline void write_per_run_csv(std::ostream& os, const CommandResult& res) {
  os << "run_id,exit_step,exit_class,path_length,final_f,steps_taken,noise_weighted_sum,survived,"
        "half_drift\n";
  if (!res.ensemble) return;
  for (const RunSummary& r : res.ensemble->runs) {
    os << r.run_id << ',' << detail::optional_step(r.exit_step) << ',' << to_string(r.exit_class)
       << ',' << format_number(r.path_length) << ',' << format_number(r.final_f) << ','
       << r.steps_taken << ',' << format_number(r.noise_weighted_sum) << ','
       << (r.survived ? 1 : 0) << ',' << format_number(r.half_drift) << '\n';
  }
}

inline void write_per_run_jsonl(std::ostream& os, const CommandResult& res) {
  if (!res.ensemble) return;
  for (const RunSummary& r : res.ensemble->runs) {
    nlohmann::ordered_json j = {
        {"run_id", r.run_id},
        {"exit_step", r.exit_step ? nlohmann::ordered_json(*r.exit_step) : nullptr},
        {"exit_class", to_string(r.exit_class)},
        {"path_length", detail::number(r.path_length)},
        {"final_f", detail::number(r.final_f)},
        {"steps_taken", r.steps_taken},
        {"noise_weighted_sum", detail::number(r.noise_weighted_sum)},
        {"survived", r.survived},
        {"half_drift", detail::number(r.half_drift)}};
    os << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

struct Setup {
  ParamVector theta0;
  std::shared_ptr<const Objective> objective;
  NoiseModel noise = NoiseModel::ml_scaled(0.0);
  LandscapeCertificate cert;
};

inline Setup setup(const ExperimentConfig& cfg) {
  Setup s;
  s.theta0 = initial_point(cfg);
  s.objective = make_objective(cfg, s.theta0);
  s.noise = make_noise(cfg.noise, s.theta0.size());
  s.cert = certify_landscape(*s.objective, s.theta0, cfg.run.ball_radius(), cfg.run.R,
                             s.noise.certificate_sigma(), cfg.certificate.options,
                             cfg.certificate.seed);
  return s;
}

inline EnsembleConfig ensemble_config(const ExperimentConfig& cfg, const Setup& s,
                                      const StepSchedule& schedule, std::size_t workers) {
  EnsembleConfig e;
  e.objective = s.objective;
  e.noise = s.noise;
  e.schedule = schedule;
  e.theta0 = s.theta0;
  e.r = cfg.run.ball_radius();
  e.R = cfg.run.R;
  e.horizon = cfg.run.horizon;
  e.thin = cfg.run.thin;
  e.n_runs = cfg.run.n_runs;
  e.base_seed = cfg.run.base_seed;
  e.workers = workers;
  return e;
}

inline std::vector<CheckResult> certificate_checks(const LandscapeCertificate& c) {
  return {
      {"seed_condition", c.seed_ok, 4.0 * c.f0, c.r * c.r * c.alpha, "4 F(theta0) < r^2 alpha"},
      {"confinement_floor", c.assumption3_ok(), c.m_floor, 0.0,
       "min F on the shell between R - 1 and R must be positive"},
      {"growth_bound", c.growth_violations == 0, static_cast<double>(c.growth_violations), 0.0,
       "violations of |grad F|^2 <= 2 C_L F at " + std::to_string(c.growth_points) +
           " points of the ball"},
  };
}

/// Survival check that reports a vacuous-confinement landscape as a failure
/// rather than an exception.
inline CheckResult survival_check(std::string name, const EnsembleStats& st,
                                  const LandscapeCertificate& cert, double sigma, double n_se) {
  if (!cert.assumption3_ok()) {
    return {std::move(name), false, 1.0 - st.survival.back(), 0.0,
            "shell floor M0 is not positive; the survival bound does not apply"};
  }
  CheckResult c = check_survival(st, survival_bound(cert, st.f0, sigma), n_se);
  c.name = std::move(name);
  return c;
}

inline CommandResult cmd_check_seed(const ExperimentConfig& cfg, std::size_t) {
  const Setup s = setup(cfg);
  CommandResult res;
  res.checks = certificate_checks(s.cert);
  res.certificate = s.cert;
  return res;
}

inline CommandResult cmd_run_ensemble(const ExperimentConfig& cfg, std::size_t workers) {
  if (cfg.schedule.kind != StepSchedule::Kind::constant) {
    throw ConfigError("schedule.kind: run-ensemble requires a constant step");
  }
  const Setup s = setup(cfg);
  const StepSchedule schedule = make_schedule(cfg.schedule, s.cert);
  if (!(schedule.eta() > 0.0) || schedule.eta() > s.cert.eta_star * (1.0 + 1e-12)) {
    throw ConfigError("schedule.eta: must lie in (0, eta*] with eta* = " +
                      format_number(s.cert.eta_star));
  }
  const LandscapeCertificate cert = at_step(s.cert, schedule.eta());
  const double sigma = s.noise.certificate_sigma();
  const ChecksSpec& ck = cfg.checks;

  CommandResult res;
  res.certificate = s.cert;
  res.ensemble = run_ensemble(ensemble_config(cfg, s, schedule, workers));
  const EnsembleStats& st = *res.ensemble;
  res.theory = theory_curve(cert.rho, st.f0, st.horizon);

  res.checks.push_back(
      check_contraction(st, cert.rho, std::min(ck.contraction_k_max.value_or(st.horizon), st.horizon),
                        ck.n_se));
  res.checks.push_back(survival_check("survival", st, cert, sigma, ck.n_se));
  res.checks.push_back(
      check_geometric_decay(st, ck.decay_beta.value_or(0.5 * (1.0 + 1.0 / cert.rho)), cert.rho));
  res.checks.push_back(path_length_quantile(st, cert, ck.path_delta));
  for (CheckResult& c : check_point_convergence(st, cert, ck.drift_factor, ck.final_f_ratio)) {
    res.checks.push_back(std::move(c));
  }

  if (!ck.survival_sweep.empty()) {
    if (cfg.landscape.kind != LandscapeKind::quadratic) {
      throw ConfigError("checks.survival_sweep: supported on quadratic landscapes only");
    }
    nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
    for (double frac : ck.survival_sweep) {
      // F0 = frac M0 with F0 = a s^2 / 2 and M0 = a (R - 1 - s)^2 / 2.
      const double root = std::sqrt(frac);
      ExperimentConfig point = cfg;
      point.landscape.offset = root * (cfg.run.R - 1.0) / (1.0 + root);
      point.run.horizon = ck.survival_horizon.value_or(cfg.run.horizon);
      const Setup ps = setup(point);
      const LandscapeCertificate pc = at_step(ps.cert, schedule.eta());
      const EnsembleStats pst = run_ensemble(ensemble_config(point, ps, schedule, workers));
      res.checks.push_back(
          survival_check("survival_sweep[" + format_number(frac) + "]", pst, pc, sigma, ck.n_se));
      sweep.push_back({{"fraction", frac},
                       {"offset", point.landscape.offset},
                       {"f0", number(pst.f0)},
                       {"m_floor", number(pc.m_floor)},
                       {"horizon", pst.horizon},
                       {"escape_fraction", number(1.0 - pst.survival.back())}});
    }
    res.details["survival_sweep"] = sweep;
  }
  res.details["eta"] = schedule.eta();
  res.details["rho_at_eta"] = cert.rho;
  return res;
}

inline CommandResult cmd_rate_fit(const ExperimentConfig& cfg, std::size_t workers) {
  if (cfg.noise.kind != NoiseKind::bounded_iid) {
    throw ConfigError("noise.kind: rate-fit requires bounded_iid noise");
  }
  if (cfg.schedule.kind != StepSchedule::Kind::robbins_monro) {
    throw ConfigError("schedule.kind: rate-fit requires robbins_monro steps");
  }
  const Setup s = setup(cfg);
  const StepSchedule schedule = make_schedule(cfg.schedule, s.cert);
  try {
    check_rate_hypotheses(schedule, s.cert.alpha, s.cert.c_lip, false);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  if (cfg.checks.burn_in && *cfg.checks.burn_in > cfg.run.horizon) {
    throw ConfigError("checks.burn_in: must not exceed run.horizon");
  }
  const double c_noise = std::sqrt(s.noise.dist()->second_moment());

  CommandResult res;
  res.certificate = s.cert;
  res.ensemble = run_ensemble(ensemble_config(cfg, s, schedule, workers));
  const EnsembleStats& st = *res.ensemble;
  const RateFit fit = fit_algebraic_rate(st, schedule, s.cert.alpha, s.cert.c_lip, c_noise,
                                         cfg.checks.burn_in, cfg.checks.rate_slack);
  res.theory.assign(st.horizon + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k <= st.horizon; ++k) {
    res.theory[k] = fit.constant / std::pow(static_cast<double>(k), schedule.q());
  }
  res.checks.push_back({"rate_constant", fit.passed, fit.fitted, fit.slack * fit.constant,
                        "mean of k^q mean(F 1{E_k}) over k >= " + std::to_string(fit.burn_in) +
                            " vs slack times the leading constant"});
  res.details["n0"] = schedule.n0();
  res.details["c_noise"] = c_noise;
  res.details["burn_in"] = fit.burn_in;
  res.details["fitted"] = fit.fitted;
  res.details["constant"] = fit.constant;
  return res;
}

inline CommandResult cmd_escape(const ExperimentConfig& cfg, std::size_t workers) {
  if (cfg.noise.kind != NoiseKind::adversarial_rotated) {
    throw ConfigError("noise.kind: escape requires adversarial_rotated noise");
  }
  if (cfg.schedule.kind != StepSchedule::Kind::robbins_monro) {
    throw ConfigError("schedule.kind: escape requires robbins_monro steps");
  }
  const Setup s = setup(cfg);
  const StepSchedule schedule = make_schedule(cfg.schedule, s.cert);
  try {
    check_escape_preconditions(s.noise, schedule, s.cert.alpha, s.cert.c_lip);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  const double m_bar = s.noise.dist()->first_abs_moment();

  CommandResult res;
  res.certificate = s.cert;
  res.ensemble = run_ensemble(ensemble_config(cfg, s, schedule, workers));
  const EscapeReport rep = escape_experiment(*res.ensemble, m_bar);
  const double rel = std::abs(rep.mean_noise_sum - rep.expected_noise_sum) / rep.expected_noise_sum;
  res.checks.push_back({"escape_fraction", rep.fractions.back() >= cfg.checks.escape_min_fraction,
                        rep.fractions.back(), cfg.checks.escape_min_fraction,
                        "fraction of runs that left B(theta0, r) by the horizon"});
  res.checks.push_back({"noise_diagnostic", rep.runs_at_horizon > 0 && rel <= cfg.checks.escape_tolerance,
                        rel, cfg.checks.escape_tolerance,
                        "relative gap between mean sum |Z_k| / k and m_bar ln K over " +
                            std::to_string(rep.runs_at_horizon) + " runs reaching the horizon"});
  res.checks.push_back({"escape_monotone", rep.monotone, rep.monotone ? 1.0 : 0.0, 1.0,
                        "escape fraction non-decreasing across horizons"});
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
    curve.push_back({{"horizon", rep.horizons[i]}, {"fraction", rep.fractions[i]}});
  }
  res.details["escape_curve"] = curve;
  res.details["m_bar"] = m_bar;
  res.details["mean_noise_sum"] = number(rep.mean_noise_sum);
  res.details["expected_noise_sum"] = rep.expected_noise_sum;
  res.details["n0"] = schedule.n0();
  return res;
}

inline CommandResult cmd_chung(const ExperimentConfig& cfg, std::size_t) {
  const ChungSpec& g = cfg.chung;
  const ChungResult r = chung_recursion(g.c1, g.c2, g.q, g.p, g.n0, g.b1, g.k_max);
  CommandResult res;
  res.checks.push_back({"chung_limit", r.relative_error <= cfg.checks.chung_tolerance,
                        r.relative_error, cfg.checks.chung_tolerance,
                        "relative error of the extrapolated k^p b_k limit"});
  res.details["fitted"] = r.fitted;
  res.details["expected"] = r.expected;
  return res;
}

inline CommandResult cmd_certify_net(const ExperimentConfig& cfg, std::size_t) {
  if (!cfg.landscape.kind || !is_network(*cfg.landscape.kind)) {
    throw ConfigError("landscape.kind: certify-net requires a network landscape");
  }
  if (!cfg.init.chatterjee_R) {
    throw ConfigError("init.chatterjee_R: certify-net needs chatterjee_R and chatterjee_A");
  }
  const double R = *cfg.init.chatterjee_R;
  const double A = *cfg.init.chatterjee_A;
  const NetSpec net = net_spec(cfg.landscape);
  const Dataset data = dataset(cfg.landscape);
  const Setup s = setup(cfg);
  const NetCertificateSpec& nc = cfg.net_certificate;

  CommandResult res;
  res.certificate = s.cert;
  const double msq = data.mean_square_target();
  res.checks.push_back({"f0_identity", std::abs(s.cert.f0 - msq) <= nc.f0_tolerance,
                        std::abs(s.cert.f0 - msq), nc.f0_tolerance,
                        "|F(theta0) - mean(y^2)| at the chatterjee initialization"});
  const ThetaSubspace sub{net, data, s.theta0, nc.alpha_tilde};
  RngStream rng(nc.seed, 0);
  const A1Report rep = certify_a1_bound(net, data, s.theta0, sub, A, R, nc.points, rng);
  res.checks.push_back({"lower_bound", rep.violations == 0 && rep.points == nc.points,
                        static_cast<double>(rep.violations), 0.0,
                        "points of B(theta0, R/2) in the subspace where F falls below the bound, "
                        "out of " + std::to_string(rep.points)});
  for (CheckResult& c : certificate_checks(s.cert)) res.checks.push_back(std::move(c));
  res.details["lambda0"] = data.lambda0();
  res.details["mean_square_target"] = msq;
  res.details["target_scale"] = cfg.landscape.data_target_scale;
  res.details["min_margin"] = number(rep.min_margin);
  res.details["anchor_margin"] = rep.anchor_margin;
  res.details["acceptance_rate"] = rep.acceptance_rate;
  return res;
}

}  // namespace detail

/// Runs a named command without touching the disk. Throws ConfigError for
/// unknown names and for configs the command cannot use.
inline CommandResult execute_command(const std::string& name, const ExperimentConfig& cfg,
                                     std::size_t workers) {
  using Fn = CommandResult (*)(const ExperimentConfig&, std::size_t);
  static const std::map<std::string, Fn> table = {
      {"check-seed", detail::cmd_check_seed}, {"run-ensemble", detail::cmd_run_ensemble},
      {"rate-fit", detail::cmd_rate_fit},     {"escape", detail::cmd_escape},
      {"chung", detail::cmd_chung},           {"certify-net", detail::cmd_certify_net}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("command: unknown command '" + name + "'");
  return it->second(cfg, std::max<std::size_t>(1, workers));
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  body(out);
  out.flush();
  if (!out) throw IoError(path.string() + ": write failed");
}

inline nlohmann::ordered_json summary_json(const std::string& name, const ExperimentConfig& cfg,
                                           const CommandResult* res, const std::string& status,
                                           const std::string& error) {
  nlohmann::ordered_json j;
  j["command"] = name;
  j["status"] = status;
  j["config"] = config_json(cfg);
  j["certificate"] = res && res->certificate ? certificate_json(*res->certificate)
                                             : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  nlohmann::ordered_json failed = nlohmann::ordered_json::array();
  if (res) {
    for (const CheckResult& c : res->checks) {
      checks.push_back(check_json(c));
      if (!c.passed) failed.push_back(c.name);
    }
  }
  j["checks"] = checks;
  j["failed"] = failed;
  if (res) j["details"] = res->details;
  if (!error.empty()) j["error"] = error;
  return j;
}

}  // namespace detail

/// Writes summary.json, certificate.json, per_step.csv, per_run.csv and
/// per_run.jsonl into out_dir.
inline void write_artifacts(const std::filesystem::path& out_dir, const std::string& name,
                            const ExperimentConfig& cfg, const CommandResult& res) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": cannot create directory (" + ec.message() + ")");
  const std::string status = res.passed() ? "pass" : "fail";
  detail::write_file(out_dir / "summary.json", [&](std::ostream& os) {
    os << detail::summary_json(name, cfg, &res, status, "").dump(2) << '\n';
  });
  detail::write_file(out_dir / "certificate.json", [&](std::ostream& os) {
    os << (res.certificate ? certificate_json(*res.certificate) : nlohmann::ordered_json(nullptr)).dump(2)
       << '\n';
  });
  detail::write_file(out_dir / "per_step.csv",
                     [&](std::ostream& os) { write_per_step_csv(os, res, cfg.run.thin); });
  detail::write_file(out_dir / "per_run.csv", [&](std::ostream& os) { write_per_run_csv(os, res); });
  detail::write_file(out_dir / "per_run.jsonl", [&](std::ostream& os) { write_per_run_jsonl(os, res); });
}

/// Executes and writes artifacts; returns the process exit status. Errors
/// are reported on `err` and, when the directory is writable, in summary.json.
inline int run_command(const std::string& name, const ExperimentConfig& cfg,
                       const std::filesystem::path& out_dir, std::size_t workers,
                       std::ostream& err) {
  auto fail = [&](int status, const std::string& kind, const std::string& what) {
    err << "error: " << what << '\n';
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
      try {
        detail::write_file(out_dir / "summary.json", [&](std::ostream& os) {
          os << detail::summary_json(name, cfg, nullptr, kind, what).dump(2) << '\n';
        });
      } catch (const IoError&) {
        // the original error is the one worth reporting
      }
    }
    return status;
  };
  CommandResult res;
  try {
    res = execute_command(name, cfg, workers);
  } catch (const ConfigError& e) {
    return fail(kExitConfigError, "config_error", e.what());
  } catch (const PreconditionError& e) {
    return fail(kExitConfigError, "config_error", e.what());
  } catch (const IoError& e) {
    return fail(kExitIoError, "io_error", e.what());
  } catch (const std::exception& e) {
    return fail(kExitRuntimeError, "runtime_error", e.what());
  }
  try {
    write_artifacts(out_dir, name, cfg, res);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoError;
  }
  for (const CheckResult& c : res.checks) {
    if (!c.passed) err << "FAILED " << c.name << ": measured " << format_number(c.measured)
                       << ", bound " << format_number(c.bound) << '\n';
  }
  return res.passed() ? kExitPass : kExitChecksFailed;
}

}  // namespace lojsgd
