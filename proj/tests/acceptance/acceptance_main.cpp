// Acceptance gate: one PASS/FAIL line per criterion, each at its stated
// tolerance and runtime budget. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lojsgd/config.hpp"
#include "lojsgd/constants.hpp"
#include "lojsgd/core.hpp"
#include "lojsgd/experiments.hpp"
#include "lojsgd/landscapes.hpp"
#include "lojsgd/noise.hpp"
#include "lojsgd/sgd.hpp"
#include "lojsgd/verify.hpp"

using namespace lojsgd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) { return format_number(v); }

constexpr double kUlp = std::numeric_limits<double>::epsilon();

std::size_t workers() { return default_workers(); }

// Quadratic fixture: d = 10, a = 1, theta0 = 0, theta* = s e_1, r = 2, R = 3.
constexpr std::size_t kDim = 10;

EnsembleConfig quadratic_fixture(double s, double a, NoiseModel noise, StepSchedule schedule,
                                 double r, double R, std::size_t horizon, std::size_t n_runs,
                                 std::uint64_t seed) {
  EnsembleConfig cfg;
  cfg.objective = std::make_shared<QuadraticWell>(ParamVector::unit(kDim, 0, s), a);
  cfg.noise = std::move(noise);
  cfg.schedule = schedule;
  cfg.theta0 = ParamVector(kDim);
  cfg.r = r;
  cfg.R = R;
  cfg.horizon = horizon;
  cfg.n_runs = n_runs;
  cfg.base_seed = seed;
  cfg.workers = workers();
  return cfg;
}

LandscapeCertificate certify(const EnsembleConfig& cfg, double sigma) {
  return certify_landscape(*cfg.objective, cfg.theta0, cfg.r, cfg.R, sigma, CertifyOptions{}, 1);
}

// Network fixture shared by criteria 1 and 9.
struct NetFixture {
  NetSpec net = NetSpec::make({4, 3, 2, 1}, Activation::shifted_tanh);
  Dataset data;
  ParamVector theta0;
  static constexpr double kR = 4.0;
  static constexpr double kA = 3.0;
  static constexpr double kTargetScale = 0.05;  // keeps 4 F(theta0) < r^2 alpha at r = 1

  NetFixture() {
    RngStream drng(11, 0);
    data = make_certification_dataset(3, 4, 1.0, 0.05, kTargetScale, drng);
    RngStream irng(3, 0);
    theta0 = chatterjee_init(net, kR, kA, irng);
  }
};

// ---------------------------------------------------------------------------

Outcome gradient_oracle() {
  const NetFixture fx;
  struct Case {
    std::string name;
    std::shared_ptr<const Objective> obj;
    ParamVector center;
    double radius;
  };
  const NetSpec linear = NetSpec::make({4, 3, 2, 1}, Activation::identity);
  RngStream lrng(5, 0);
  std::vector<double> linear_center(linear.param_count());
  for (double& x : linear_center) x = lrng.uniform(-1.0, 1.0);
  const std::vector<Case> cases = {
      {"quadratic", std::make_shared<QuadraticWell>(ParamVector::unit(kDim, 0, 0.5), 1.0),
       ParamVector(kDim), 2.0},
      {"chatterjee_net", std::make_shared<NetObjective>(fx.net, fx.data), fx.theta0, 2.0},
      {"deep_linear", std::make_shared<NetObjective>(linear, fx.data),
       ParamVector(linear_center), 1.0},
  };
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    RngStream rng(17, 0);
    std::vector<double> theta(c.center.size());
    double worst = 0.0;
    double worst_coord = 0.0;  // reported only: dominated by difference roundoff on tiny entries
    for (int i = 0; i < 100; ++i) {
      sample_in_ball(rng, c.center, c.radius, theta);
      const ParamVector g = c.obj->gradient(theta);
      const ParamVector fd = fd_gradient(*c.obj, theta);
      worst = std::max(worst, gradient_relative_error(g, fd));
      worst_coord = std::max(worst_coord, gradient_mismatch(g, fd));
    }
    ok = ok && worst <= 1e-6;
    detail += c.name + " " + fmt(worst) + " (per-coordinate " + fmt(worst_coord) + "); ";
  }
  return {ok, "max relative error |g - g_fd| / |g|: " + detail + "tolerance 1e-6"};
}

Outcome exact_constants() {
  bool ok = true;
  std::string detail;
  for (double a : {0.5, 1.0, 3.0}) {
    const QuadraticWell q(ParamVector(kDim), a);
    const ParamVector theta0 = ParamVector(kDim);
    RngStream arng(1, 0);
    // Ball around a point away from the minimizer so the ratio is defined everywhere sampled.
    const double alpha = estimate_alpha(q, ParamVector::unit(kDim, 0, 0.5), 1.0, 500, 50, arng);
    RngStream crng(2, 0);
    const double clip = estimate_clip(q, theta0, 2.0, 500, crng);
    const double R = 3.0;
    const double closed = 0.5 * a * (R - 1.0) * (R - 1.0);
    RngStream frng(3, 0);
    const double floor = estimate_floor(q, theta0, R, 500, frng);
    // "Exact" up to the rounding of |grad F|^2 / F: a few ulps of 2a.
    const bool pass = std::abs(alpha - 2.0 * a) <= 8.0 * kUlp * 2.0 * a && clip <= a &&
                      clip >= a - 1e-9 * a && floor == closed;
    ok = ok && pass;
    detail += "a=" + fmt(a) + ": alpha " + fmt(alpha) + ", C_L " + fmt(clip) + ", M0 " + fmt(floor) +
              " (closed form " + fmt(closed) + "); ";
  }
  return {ok, detail};
}

Outcome contraction() {
  const Rates rates = derive_rates(2.0, 1.0, 1.0);
  const bool rates_ok = std::abs(rates.eta_star - 1.0 / 6.0) <= 1e-15 &&
                        std::abs(rates.rho - 17.0 / 24.0) <= 1e-15;
  const auto cfg = quadratic_fixture(0.5, 1.0, NoiseModel::ml_scaled(1.0),
                                     StepSchedule::constant(rates.eta_star), 2.0, 3.0, 50, 2000, 1);
  const LandscapeCertificate cert = certify(cfg, 1.0);
  const EnsembleStats st = run_ensemble(cfg);
  const CheckResult c = check_contraction(st, cert.rho, 50, 3.0);
  return {rates_ok && cert.rho == rates.rho && c.passed,
          "eta* " + fmt(cert.eta_star) + ", rho " + fmt(cert.rho) + "; worst excess " + fmt(c.measured) +
              " (must be <= 0) over 2000 runs, k <= 50"};
}

Outcome survival_sweep() {
  const double R = 3.0;
  bool ok = true;
  std::string detail;
  for (double frac : {0.001, 0.01, 0.1}) {
    // F0 = (s^2 / 2) and M0 = (R - 1 - s)^2 / 2, so F0 = frac M0 at this offset.
    const double root = std::sqrt(frac);
    const double s = root * (R - 1.0) / (1.0 + root);
    const auto cfg = quadratic_fixture(s, 1.0, NoiseModel::ml_scaled(1.0),
                                       StepSchedule::constant(1.0 / 6.0), 2.0, R, 10'000, 1000, 2);
    const LandscapeCertificate cert = certify(cfg, 1.0);
    const EnsembleStats st = run_ensemble(cfg);
    const double delta = survival_bound(cert, st.f0, 1.0);
    const CheckResult c = check_survival(st, delta, 3.0);
    ok = ok && c.passed && std::abs(st.f0 - frac * cert.m_floor) <= 1e-12 * st.f0;
    detail += "F0/M0=" + fmt(frac) + ": escaped " + fmt(c.measured) + " vs delta " + fmt(delta) +
              " + 3 SE; ";
  }
  return {ok, detail + "1000 runs, K = 10^4"};
}

Outcome point_convergence() {
  const auto cfg = quadratic_fixture(0.5, 1.0, NoiseModel::ml_scaled(1.0),
                                     StepSchedule::constant(1.0 / 6.0), 2.0, 3.0, 200, 2000, 1);
  const LandscapeCertificate cert = certify(cfg, 1.0);
  const EnsembleStats st = run_ensemble(cfg);
  const auto checks = check_point_convergence(st, cert, 10.0, 1e-8);
  bool ok = true;
  std::string detail;
  for (const CheckResult& c : checks) {
    ok = ok && c.passed;
    detail += c.name + " " + fmt(c.measured) + " <= " + fmt(c.bound) + "; ";
  }
  std::size_t survivors = 0;
  for (const RunSummary& r : st.runs) survivors += r.survived ? 1 : 0;
  return {ok, detail + std::to_string(survivors) + " of 2000 runs survived to K = 200"};
}

Outcome chung_oracle() {
  const ChungResult one = chung_recursion(2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1'000'000);
  const ChungResult frac = chung_recursion(1.0, 1.0, 0.75, 0.75, 1.0, 1.0, 1'000'000);
  return {one.relative_error <= 0.02 && frac.relative_error <= 0.02,
          "q=1: fitted " + fmt(one.fitted) + " vs " + fmt(one.expected) + "; q=0.75: fitted " +
              fmt(frac.fitted) + " vs " + fmt(frac.expected) + "; tolerance 2%"};
}

Outcome algebraic_rates() {
  const double c = 0.1;
  bool ok = true;
  std::string detail;
  for (double q : {1.0, 0.75}) {
    const double n0 = q == 1.0 ? 2.0 : rm_parameters(2.0, 1.0, 2.0, q);
    const StepSchedule s = StepSchedule::robbins_monro(2.0, n0, q);
    const auto cfg = quadratic_fixture(0.5, 1.0, NoiseModel::bounded_iid(ZDist(ZKind::sphere, kDim, c)),
                                       s, 2.0, 3.0, 100'000, 500, 7);
    const LandscapeCertificate cert = certify(cfg, 0.0);
    const EnsembleStats st = run_ensemble(cfg);
    const RateFit fit = fit_algebraic_rate(st, s, cert.alpha, cert.c_lip, c, std::nullopt, 1.5);
    const double expected = q == 1.0 ? 0.02 : 0.01;
    ok = ok && fit.passed && std::abs(fit.constant - expected) <= 1e-15;
    detail += "q=" + fmt(q) + " (n0 " + fmt(n0) + "): fitted " + fmt(fit.fitted) + " <= 1.5 x " +
              fmt(fit.constant) + "; ";
  }
  return {ok, detail + "500 runs, K = 10^5"};
}

Outcome escape() {
  // a = 1/2 gives alpha = 1 and C_L = 1/2; gamma = 4 > 2/alpha and n0 = 20 is admissible.
  const StepSchedule s = StepSchedule::robbins_monro(4.0, 20.0, 1.0);
  const NoiseModel noise = NoiseModel::adversarial_rotated(ZDist(ZKind::sphere, kDim, 1.0));
  const auto cfg = quadratic_fixture(0.5, 0.5, noise, s, 1.0, 10.0, 100'000, 500, 3);
  const LandscapeCertificate cert = certify(cfg, 0.0);
  check_escape_preconditions(noise, s, cert.alpha, cert.c_lip);
  const EscapeReport rep = escape_experiment(run_ensemble(cfg), 1.0);
  const double rel = std::abs(rep.mean_noise_sum - rep.expected_noise_sum) / rep.expected_noise_sum;
  std::string curve;
  for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
    curve += std::to_string(rep.horizons[i]) + ":" + fmt(rep.fractions[i]) + " ";
  }
  return {rep.fractions.back() >= 0.99 && rel <= 0.1 && rep.monotone && rep.runs_at_horizon > 0,
          "escape fraction " + fmt(rep.fractions.back()) + " (>= 0.99); diagnostic " +
              fmt(rep.mean_noise_sum) + " vs m ln K = " + fmt(rep.expected_noise_sum) + " (rel " +
              fmt(rel) + " <= 0.1); curve " + curve};
}

Outcome network_certificate() {
  const NetFixture fx;
  const NetObjective obj(fx.net, fx.data);
  const double f0 = obj.value(fx.theta0);
  const double msq = fx.data.mean_square_target();
  const bool identity_ok = std::abs(f0 - msq) <= 1e-12;

  const ThetaSubspace sub{fx.net, fx.data, fx.theta0, 0.01};
  RngStream rng(5, 0);
  const A1Report rep = certify_a1_bound(fx.net, fx.data, fx.theta0, sub, NetFixture::kA,
                                        NetFixture::kR, 10'000, rng);
  const bool bound_ok = rep.points == 10'000 && rep.violations == 0;

  const LandscapeCertificate cert =
      certify_landscape(obj, fx.theta0, 1.0, NetFixture::kR / 2.0, 0.0, CertifyOptions{}, 21);
  return {identity_ok && bound_ok && cert.seed_ok,
          "(a) |F(theta0) - mean y^2| = " + fmt(std::abs(f0 - msq)) + "; (b) " +
              std::to_string(rep.violations) + " violations at " + std::to_string(rep.points) +
              " points, min margin " + fmt(rep.min_margin) + "; (c) 4 F0 = " + fmt(4.0 * f0) +
              " < r^2 alpha = " + fmt(cert.alpha) + " at r = 1, targets scaled by " +
              fmt(NetFixture::kTargetScale)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  struct Job {
    std::string command;
    std::string file;
    std::function<void(ExperimentConfig&)> shrink;
  };
  const std::vector<Job> jobs = {
      {"check-seed", "check_seed.ini", [](ExperimentConfig&) {}},
      {"run-ensemble", "run_ensemble.ini",
       [](ExperimentConfig& c) {
         c.run.n_runs = 300;
         c.checks.survival_horizon = 1000;
         c.checks.survival_sweep = {0.1};
       }},
      {"rate-fit", "rate_fit.ini",
       [](ExperimentConfig& c) {
         c.run.horizon = 2000;
         c.run.n_runs = 50;
       }},
      {"escape", "escape.ini",
       [](ExperimentConfig& c) {
         c.run.horizon = 2000;
         c.run.n_runs = 50;
       }},
      {"chung", "chung.ini", [](ExperimentConfig& c) { c.chung.k_max = 10'000; }},
      {"certify-net", "certify_net.ini", [](ExperimentConfig& c) { c.net_certificate.points = 500; }},
  };
  const fs::path root = fs::temp_directory_path() / "lojsgd_acceptance_determinism";
  fs::remove_all(root);
  bool ok = true;
  std::size_t files = 0;
  std::string detail;
  for (const Job& job : jobs) {
    ExperimentConfig cfg = parse_config_file(std::string(LOJSGD_CONFIG_DIR) + "/" + job.file);
    job.shrink(cfg);
    std::ostringstream err;
    const fs::path a = root / (job.command + "_a");
    const fs::path b = root / (job.command + "_b");
    const int sa = run_command(job.command, cfg, a, 1, err);
    const int sb = run_command(job.command, cfg, b, 3, err);
    bool same = sa == sb && sa != kExitConfigError && sa != kExitRuntimeError;
    for (const char* f : {"summary.json", "certificate.json", "per_step.csv", "per_run.csv",
                          "per_run.jsonl"}) {
      same = same && fs::exists(a / f) && slurp(a / f) == slurp(b / f);
      ++files;
    }
    if (!same) detail += job.command + " differs; ";
    ok = ok && same;
  }
  // One trajectory, replayed from the same stream.
  const QuadraticWell q(ParamVector::unit(kDim, 0, 0.5), 1.0);
  std::string csv[2];
  for (std::string& out : csv) {
    RngStream rng(42, 7);
    const auto rec = run_trajectory(q, NoiseModel::ml_scaled(1.0), StepSchedule::constant(1.0 / 6.0),
                                    ParamVector(kDim), 2.0, 3.0, 500, rng);
    std::ostringstream os;
    write_trajectory_csv_header(os);
    write_trajectory_csv(os, rec);
    out = os.str();
  }
  ok = ok && csv[0] == csv[1];
  fs::remove_all(root);
  return {ok, detail + std::to_string(files) +
                  " artifacts identical across reruns with 1 and 3 workers; trajectory CSV replay " +
                  (csv[0] == csv[1] ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "gradient oracle", 10, gradient_oracle},
      {2, "exact constants on the quadratic well", 5, exact_constants},
      {3, "expected-loss contraction", 60, contraction},
      {4, "survival bound sweep", 300, survival_sweep},
      {5, "convergence to a point", 60, point_convergence},
      {6, "Chung recursion limits", 10, chung_oracle},
      {7, "algebraic rates under Robbins-Monro steps", 600, algebraic_rates},
      {8, "escape under rotated noise", 600, escape},
      {9, "network lower bound certificate", 300, network_certificate},
      {10, "bitwise determinism", 600, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_s;
    const bool passed = out.passed && in_budget;
    failures += passed ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.1fs, budget %.0fs%s]\n", passed ? "PASS" : "FAIL", c.id,
                c.name.c_str(), out.detail.c_str(), secs, c.budget_s, in_budget ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
