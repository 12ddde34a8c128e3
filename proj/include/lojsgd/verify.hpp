#pragma once

// Monte Carlo ensembles and the checks run against them: expected-loss
// contraction, survival of the confinement event, geometric decay, path
// length, convergence to a point, algebraic rates under Robbins-Monro steps,
// escape under rotated noise, the Chung recursion, and the network lower bound.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lojsgd/constants.hpp"
#include "lojsgd/core.hpp"
#include "lojsgd/landscapes.hpp"
#include "lojsgd/noise.hpp"
#include "lojsgd/sgd.hpp"

namespace lojsgd {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

struct EnsembleConfig {
  std::shared_ptr<const Objective> objective;
  NoiseModel noise = NoiseModel::ml_scaled(0.0);
  StepSchedule schedule = StepSchedule::constant(0.0);
  ParamVector theta0;
  double r = 0.0;
  double R = 0.0;
  std::size_t horizon = 1;
  std::size_t thin = 1;
  std::size_t n_runs = 1;
  std::uint64_t base_seed = 0;
  std::size_t workers = 1;
  std::size_t keep_trajectories = 0;  // full records kept for the first N runs
};

inline constexpr std::size_t kCheckpoints = 4;

struct RunSummary {
  std::uint64_t run_id = 0;
  std::optional<std::size_t> exit_step;
  ExitClass exit_class = ExitClass::none;
  double path_length = 0.0;
  double final_f = 0.0;
  std::size_t steps_taken = 0;
  double noise_weighted_sum = 0.0;
  bool survived = false;  // event held through the horizon
  std::array<double, kCheckpoints> checkpoint_f{};  // F at K/4, K/2, 3K/4, K; NaN if not reached
  double half_drift = std::numeric_limits<double>::quiet_NaN();  // |theta_K - theta_{K/2}|
};

/// Per-step arrays have horizon + 1 entries (k = 0 .. K).
struct EnsembleStats {
  std::size_t n_runs = 0;
  std::size_t horizon = 0;
  double f0 = 0.0;
  std::vector<double> mean_f_event;  // mean of F(theta_k) 1{E_k}
  std::vector<double> se_f_event;
  std::vector<double> survival;         // fraction of runs with E_k
  std::vector<double> mean_dist_alive;  // mean |theta_k - theta0| over runs with E_k; NaN if none
  std::vector<double> eta;
  std::vector<RunSummary> runs;
  std::vector<TrajectoryRecord> trajectories;

  std::array<std::size_t, kCheckpoints> checkpoint_steps() const {
    return {horizon / 4, horizon / 2, 3 * horizon / 4, horizon};
  }
};

namespace detail {

inline constexpr std::size_t kBlockSize = 16;

struct BlockResult {
  std::size_t n = 0;
  std::vector<double> mean, m2, dist_sum;
  std::vector<std::size_t> alive;
  std::vector<RunSummary> runs;
  std::vector<TrajectoryRecord> kept;
};

inline RunSummary summarize(const TrajectoryRecord& rec, std::size_t horizon) {
  RunSummary s;
  s.run_id = rec.run_id;
  s.exit_step = rec.event_alive_until;
  s.exit_class = rec.exit_class;
  s.path_length = rec.path_length;
  s.final_f = rec.f_values.back();
  s.steps_taken = rec.steps_taken;
  s.noise_weighted_sum = rec.noise_weighted_sum;
  s.survived = rec.reached_horizon(horizon) && rec.event_alive(horizon);
  const std::array<std::size_t, kCheckpoints> cps{horizon / 4, horizon / 2, 3 * horizon / 4,
                                                  horizon};
  for (std::size_t i = 0; i < kCheckpoints; ++i) {
    s.checkpoint_f[i] = cps[i] < rec.f_values.size() ? rec.f_values[cps[i]]
                                                     : std::numeric_limits<double>::quiet_NaN();
  }
  if (rec.snapshot && rec.reached_horizon(horizon)) {
    s.half_drift = distance(rec.final_theta, *rec.snapshot);
  }
  return s;
}

inline BlockResult run_block(const EnsembleConfig& cfg, std::size_t block) {
  const std::size_t K = cfg.horizon;
  BlockResult out;
  out.mean.assign(K + 1, 0.0);
  out.m2.assign(K + 1, 0.0);
  out.dist_sum.assign(K + 1, 0.0);
  out.alive.assign(K + 1, 0);
  const std::size_t first = block * kBlockSize;
  const std::size_t last = std::min(cfg.n_runs, first + kBlockSize);
  TrajectoryOptions opts{cfg.r, cfg.R, K, cfg.thin, false, K / 2};
  for (std::size_t run = first; run < last; ++run) {
    RngStream rng(cfg.base_seed, run);
    opts.record_thetas = run < cfg.keep_trajectories;
    TrajectoryRecord rec;
    try {
      rec = run_trajectory(*cfg.objective, cfg.noise, cfg.schedule, cfg.theta0, opts, rng);
    } catch (const NumericalError& e) {
      throw NumericalError("run_id " + std::to_string(run) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("run_id " + std::to_string(run) + ": " + e.what());
    }
    ++out.n;
    const double nn = static_cast<double>(out.n);
    for (std::size_t k = 0; k <= K; ++k) {
      const bool alive = k < rec.f_values.size() && rec.event_alive(k);
      const double x = alive ? rec.f_values[k] : 0.0;
      const double delta = x - out.mean[k];
      out.mean[k] += delta / nn;
      out.m2[k] += delta * (x - out.mean[k]);
      if (alive) {
        ++out.alive[k];
        out.dist_sum[k] += rec.dist_values[k];
      }
    }
    out.runs.push_back(summarize(rec, K));
    if (run < cfg.keep_trajectories) out.kept.push_back(std::move(rec));
  }
  return out;
}

/// Chan et al. pairwise merge of (n, mean, M2); deterministic for a fixed order.
inline void merge_block(BlockResult& acc, BlockResult&& b) {
  if (acc.n == 0) {
    acc = std::move(b);
    return;
  }
  const double na = static_cast<double>(acc.n);
  const double nb = static_cast<double>(b.n);
  const double n = na + nb;
  for (std::size_t k = 0; k < acc.mean.size(); ++k) {
    const double delta = b.mean[k] - acc.mean[k];
    acc.mean[k] += delta * nb / n;
    acc.m2[k] += b.m2[k] + delta * delta * na * nb / n;
    acc.alive[k] += b.alive[k];
    acc.dist_sum[k] += b.dist_sum[k];
  }
  acc.n += b.n;
  for (auto& r : b.runs) acc.runs.push_back(r);
  for (auto& t : b.kept) acc.kept.push_back(std::move(t));
}

}  // namespace detail

/// Runs n_runs trajectories on streams (base_seed, 0 .. n_runs - 1).
///
/// Runs are grouped in fixed blocks of 16 and blocks are merged in index
/// order, so every statistic is bitwise independent of the worker count.
inline EnsembleStats run_ensemble(const EnsembleConfig& cfg) {
  require(cfg.objective != nullptr, "run_ensemble: objective missing");
  require(cfg.n_runs >= 1, "run_ensemble: n_runs must be at least 1");
  require(cfg.horizon >= 1, "run_ensemble: horizon must be at least 1");
  const std::size_t n_blocks = (cfg.n_runs + detail::kBlockSize - 1) / detail::kBlockSize;
  const std::size_t workers = std::max<std::size_t>(1, cfg.workers);

  detail::BlockResult acc;
  for (std::size_t wave = 0; wave < n_blocks; wave += workers) {
    const std::size_t count = std::min(workers, n_blocks - wave);
    std::vector<detail::BlockResult> results(count);
    std::vector<std::exception_ptr> errors(count);
    auto work = [&](std::size_t i) {
      try {
        results[i] = detail::run_block(cfg, wave + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t i = 1; i < count; ++i) threads.emplace_back(work, i);
    work(0);
    for (auto& t : threads) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (auto& r : results) detail::merge_block(acc, std::move(r));
  }

  EnsembleStats st;
  st.n_runs = acc.n;
  st.horizon = cfg.horizon;
  st.f0 = cfg.objective->value(cfg.theta0);
  const double n = static_cast<double>(acc.n);
  const std::size_t K = cfg.horizon;
  st.mean_f_event = std::move(acc.mean);
  st.se_f_event.resize(K + 1);
  st.survival.resize(K + 1);
  st.mean_dist_alive.resize(K + 1);
  st.eta.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    st.se_f_event[k] = acc.n > 1 ? std::sqrt(acc.m2[k] / (n - 1.0) / n) : 0.0;
    st.survival[k] = static_cast<double>(acc.alive[k]) / n;
    st.mean_dist_alive[k] = acc.alive[k] > 0
                                ? acc.dist_sum[k] / static_cast<double>(acc.alive[k])
                                : std::numeric_limits<double>::quiet_NaN();
    st.eta[k] = cfg.schedule.at(k);
  }
  st.runs = std::move(acc.runs);
  st.trajectories = std::move(acc.kept);
  return st;
}

// ---------------------------------------------------------------------------
// Constant-step theory
// ---------------------------------------------------------------------------

inline double sqrt_gain(double c_lip, double sigma) {
  return std::sqrt(2.0 * c_lip) + std::sqrt(sigma);
}

/// Probability bound delta for leaving B(theta0, R - 1), clamped to [0, 1]
/// (values of 1 mean the bound is vacuous at this F0).
inline double survival_bound_unclamped(const LandscapeCertificate& cert, double f0, double sigma) {
  require(cert.rho > 0.0 && cert.rho < 1.0, "survival_bound: rho must lie in (0, 1)");
  if (!(cert.m_floor > 0.0)) {
    throw PreconditionError("survival_bound: shell floor M0 is zero; confinement fails");
  }
  const double sr = std::sqrt(cert.rho);
  return f0 * (sqrt_gain(cert.c_lip, sigma) * cert.eta_star * sr / (1.0 - sr) +
               cert.rho * cert.rho / (cert.m_floor * (1.0 - cert.rho)));
}

inline double survival_bound(const LandscapeCertificate& cert, double f0, double sigma) {
  return std::clamp(survival_bound_unclamped(cert, f0, sigma), 0.0, 1.0);
}

/// Mean path-length bound divided by delta_tilde (Markov).
inline double path_length_bound(const LandscapeCertificate& cert, double f0, double delta_tilde) {
  return sqrt_gain(cert.c_lip, cert.sigma) * cert.eta_star * f0 /
         ((1.0 - std::sqrt(cert.rho)) * delta_tilde);
}

/// Bound on the mean remaining path after step j.
inline double cauchy_tail_bound(const LandscapeCertificate& cert, double f0, std::size_t j) {
  return sqrt_gain(cert.c_lip, cert.sigma) * cert.eta_star * f0 *
         std::pow(cert.rho, 0.5 * static_cast<double>(j)) / (1.0 - std::sqrt(cert.rho));
}

/// Certificate with eta* and rho replaced by those of a smaller step eta.
inline LandscapeCertificate at_step(LandscapeCertificate cert, double eta) {
  require(eta > 0.0, "at_step: step must be positive");
  if (eta > cert.eta_star * (1.0 + 1e-12)) {
    throw PreconditionError("at_step: step " + format_number(eta) + " exceeds eta* = " +
                            format_number(cert.eta_star));
  }
  cert.eta_star = std::min(eta, cert.eta_star);
  cert.rho = contraction_factor(cert.eta_star, cert.alpha, cert.c_lip, cert.sigma);
  return cert;
}

inline std::vector<double> theory_curve(double rho, double f0, std::size_t horizon) {
  std::vector<double> out(horizon + 1);
  for (std::size_t k = 0; k <= horizon; ++k) out[k] = f0 * std::pow(rho, static_cast<double>(k));
  return out;
}

/// mean(F 1{E_k}) <= rho^k F0 + n_se * SE_k for every k <= k_max. A relative
/// allowance of 1e-12 absorbs rounding in the reference curve.
inline CheckResult check_contraction(const EnsembleStats& st, double rho, std::size_t k_max,
                                     double n_se = 3.0) {
  CheckResult c{"contraction", true, -std::numeric_limits<double>::infinity(), 0.0, ""};
  const std::size_t last = std::min(k_max, st.horizon);
  std::size_t worst_k = 0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double ref = st.f0 * std::pow(rho, static_cast<double>(k));
    const double excess = st.mean_f_event[k] - n_se * st.se_f_event[k] - ref;
    if (excess > c.measured) {
      c.measured = excess;
      worst_k = k;
    }
    if (excess > 1e-12 * ref) c.passed = false;
  }
  c.detail = "largest excess of mean(F 1{E_k}) - " + format_number(n_se) +
             " SE over rho^k F0 at k = " + std::to_string(worst_k) + " (k <= " +
             std::to_string(last) + ")";
  return c;
}

/// Empirical probability of leaving B(theta0, r) by the horizon against delta
/// plus n_se binomial standard errors (evaluated at delta).
inline CheckResult check_survival(const EnsembleStats& st, double delta, double n_se = 3.0) {
  const double escape = 1.0 - st.survival.back();
  const double p = std::clamp(delta, 0.0, 1.0);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(st.n_runs));
  CheckResult c{"survival", escape <= p + n_se * se, escape, p + n_se * se, ""};
  c.detail = "escape fraction at k = " + std::to_string(st.horizon) + " vs delta = " +
             format_number(delta) + " + " + format_number(n_se) + " binomial SE";
  return c;
}

/// Maxima of beta^k F(theta_k) over surviving runs at k = K/4, K/2, 3K/4, K
/// must strictly decrease; a pair of exact zeros counts as decreasing.
inline CheckResult check_geometric_decay(const EnsembleStats& st, double beta, double rho) {
  require(beta >= 1.0, "check_geometric_decay: beta must be >= 1");
  if (!(beta < 1.0 / rho)) {
    throw PreconditionError("check_geometric_decay: beta must be below 1/rho = " +
                            format_number(1.0 / rho));
  }
  const auto cps = st.checkpoint_steps();
  std::array<double, kCheckpoints> maxima{};
  std::size_t survivors = 0;
  for (const RunSummary& r : st.runs) {
    if (!r.survived) continue;
    ++survivors;
    for (std::size_t i = 0; i < kCheckpoints; ++i) {
      const double v = std::pow(beta, static_cast<double>(cps[i])) * r.checkpoint_f[i];
      maxima[i] = std::max(maxima[i], v);
    }
  }
  CheckResult c{"geometric_decay", survivors > 0, maxima.back(), maxima.front(), ""};
  for (std::size_t i = 1; i < kCheckpoints; ++i) {
    const bool both_zero = maxima[i] == 0.0 && maxima[i - 1] == 0.0;
    if (!(maxima[i] < maxima[i - 1]) && !both_zero) c.passed = false;
  }
  c.detail = "checkpoint maxima of beta^k F over " + std::to_string(survivors) +
             " surviving runs, beta = " + format_number(beta) + ":";
  for (double m : maxima) c.detail += " " + format_number(m);
  return c;
}

/// Empirical (1 - delta_tilde) quantile (nearest rank) of the event-restricted
/// path length against the Markov bound.
inline CheckResult path_length_quantile(const EnsembleStats& st, const LandscapeCertificate& cert,
                                        double delta_tilde) {
  require(delta_tilde > 0.0 && delta_tilde <= 1.0, "path_length_quantile: delta_tilde in (0, 1]");
  std::vector<double> lengths;
  lengths.reserve(st.runs.size());
  for (const RunSummary& r : st.runs) lengths.push_back(r.path_length);
  std::sort(lengths.begin(), lengths.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - delta_tilde) * static_cast<double>(lengths.size())));
  const double q = lengths[rank == 0 ? 0 : rank - 1];
  const double bound = path_length_bound(cert, st.f0, delta_tilde);
  return {"path_length", q <= bound, q, bound,
          "(1 - " + format_number(delta_tilde) + ") quantile of path length over the event"};
}

/// On surviving runs: |theta_K - theta_{K/2}| within `factor` times the tail
/// bound at j = K/2, and F(theta_K) <= f_ratio F0.
inline std::vector<CheckResult> check_point_convergence(const EnsembleStats& st,
                                                        const LandscapeCertificate& cert,
                                                        double factor = 10.0,
                                                        double f_ratio = 1e-8) {
  double worst_drift = 0.0;
  double worst_f = 0.0;
  std::size_t survivors = 0;
  for (const RunSummary& r : st.runs) {
    if (!r.survived) continue;
    ++survivors;
    worst_drift = std::max(worst_drift, r.half_drift);
    worst_f = std::max(worst_f, r.final_f);
  }
  const double tail = factor * cauchy_tail_bound(cert, st.f0, st.horizon / 2);
  const std::string who = " over " + std::to_string(survivors) + " surviving runs";
  return {
      {"point_convergence.drift", survivors > 0 && worst_drift <= tail, worst_drift, tail,
       "max |theta_K - theta_{K/2}|" + who},
      {"point_convergence.final_f", survivors > 0 && worst_f <= f_ratio * st.f0, worst_f,
       f_ratio * st.f0, "max F(theta_K)" + who},
  };
}

// ---------------------------------------------------------------------------
// Chung recursion
// ---------------------------------------------------------------------------

struct ChungResult {
  std::vector<double> b;  // b[i] = b_{i+1}
  double fitted = 0.0;
  double expected = 0.0;
  double relative_error = 0.0;
};

/// Least-squares fit y = L + c1 x + c2 x^2 over the given samples; returns L.
inline double extrapolate_limit(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0;
    a(r, 1) = x[i];
    a(r, 2) = x[i] * x[i];
    rhs(r) = y[i];
  }
  return a.colPivHouseholderQr().solve(rhs)(0);
}

/// Iterates b_{k+1} = (1 - C1/(k+n0)^q) b_k + C2/(k+n0)^(q+p) with equality
/// from b_1 and fits the limit of k^p b_k.
///
/// The limit is extrapolated: k^p b_k is fitted as a quadratic in the leading
/// correction variable x = k^(q-1) (x = 1/k when q = 1) over 200 geometrically
/// spaced k in [k_max/100, k_max], and the intercept is reported.
inline ChungResult chung_recursion(double c1, double c2, double q, double p, double n0, double b1,
                                   std::size_t k_max) {
  require(q > 0.0 && q <= 1.0, "chung_recursion: q must lie in (0, 1]");
  require(p > 0.0, "chung_recursion: p must be positive");
  require(c1 > 0.0 && c2 >= 0.0, "chung_recursion: need C1 > 0 and C2 >= 0");
  require(n0 > 0.0 && b1 >= 0.0, "chung_recursion: need n0 > 0 and b1 >= 0");
  require(k_max >= 200, "chung_recursion: k_max must be at least 200");
  if (q == 1.0 && !(c1 > p)) {
    throw PreconditionError("chung_recursion: q = 1 requires C1 > p");
  }
  ChungResult res;
  res.b.resize(k_max);
  res.b[0] = b1;
  for (std::size_t k = 1; k < k_max; ++k) {
    const double base = static_cast<double>(k) + n0;
    res.b[k] = (1.0 - c1 / std::pow(base, q)) * res.b[k - 1] + c2 / std::pow(base, q + p);
  }
  std::vector<double> xs, ys;
  const double lo = std::log(static_cast<double>(k_max) / 100.0);
  const double hi = std::log(static_cast<double>(k_max));
  std::size_t prev = 0;
  for (int i = 0; i < 200; ++i) {
    const auto k = static_cast<std::size_t>(std::llround(std::exp(lo + (hi - lo) * i / 199.0)));
    if (k == prev || k < 1 || k > k_max) continue;
    prev = k;
    const double kd = static_cast<double>(k);
    xs.push_back(q == 1.0 ? 1.0 / kd : std::pow(kd, q - 1.0));
    ys.push_back(std::pow(kd, p) * res.b[k - 1]);
  }
  res.fitted = extrapolate_limit(xs, ys);
  res.expected = q == 1.0 ? c2 / (c1 - p) : c2 / c1;
  res.relative_error = res.expected == 0.0 ? std::abs(res.fitted)
                                           : std::abs(res.fitted - res.expected) / res.expected;
  return res;
}

// ---------------------------------------------------------------------------
// Robbins-Monro rates and escape
// ---------------------------------------------------------------------------

/// Leading constant of the expected-loss rate under Robbins-Monro steps with
/// noise second moment c^2.
inline double algebraic_rate_constant(double gamma, double c, double c_lip, double alpha,
                                      double q) {
  const double num = gamma * gamma * c * c * c_lip;
  return q == 1.0 ? num / (alpha * gamma - 2.0) : num / (alpha * gamma);
}

/// Throws a PreconditionError naming the first violated hypothesis.
inline void check_rate_hypotheses(const StepSchedule& s, double alpha, double c_lip,
                                  bool require_gamma_for_all_q) {
  if (s.kind() != StepSchedule::Kind::robbins_monro) {
    throw PreconditionError("schedule must be robbins_monro");
  }
  const double n0_min = rm_parameters(alpha, c_lip, s.gamma(), s.q());
  if (s.n0() < n0_min * (1.0 - 1e-12)) {
    throw PreconditionError("n0 >= (2 C_L^2 gamma / alpha)^(1/q) = " + format_number(n0_min) +
                            " violated (n0 = " + format_number(s.n0()) + ")");
  }
  if ((s.q() == 1.0 || require_gamma_for_all_q) && !(s.gamma() > 2.0 / alpha)) {
    throw PreconditionError("gamma > 2/alpha = " + format_number(2.0 / alpha) +
                            " violated (gamma = " + format_number(s.gamma()) + ")");
  }
}

struct RateFit {
  double fitted = 0.0;    // mean over k in [burn_in, K] of k^q mean(F 1{E_k})
  double constant = 0.0;  // theoretical leading constant
  std::size_t burn_in = 0;
  double slack = 1.5;
  bool passed = false;
};

inline std::size_t default_burn_in(double n0, std::size_t horizon) {
  return std::max(static_cast<std::size_t>(std::ceil(10.0 * n0)), horizon / 10);
}

inline RateFit fit_algebraic_rate(const EnsembleStats& st, const StepSchedule& s, double alpha,
                                  double c_lip, double c_noise,
                                  std::optional<std::size_t> burn_in = std::nullopt,
                                  double slack = 1.5) {
  check_rate_hypotheses(s, alpha, c_lip, false);
  RateFit fit;
  fit.burn_in = burn_in.value_or(default_burn_in(s.n0(), st.horizon));
  require(fit.burn_in >= 1 && fit.burn_in <= st.horizon,
          "fit_algebraic_rate: burn-in must lie in [1, horizon]");
  double sum = 0.0;
  for (std::size_t k = fit.burn_in; k <= st.horizon; ++k) {
    sum += std::pow(static_cast<double>(k), s.q()) * st.mean_f_event[k];
  }
  fit.fitted = sum / static_cast<double>(st.horizon - fit.burn_in + 1);
  fit.constant = algebraic_rate_constant(s.gamma(), c_noise, c_lip, alpha, s.q());
  fit.slack = slack;
  fit.passed = fit.fitted <= slack * fit.constant;
  return fit;
}

struct EscapeReport {
  std::vector<std::size_t> horizons;  // checkpoint horizons, increasing, last = K
  std::vector<double> fractions;      // escape fraction at each checkpoint
  std::vector<std::size_t> exit_steps;
  std::size_t runs_at_horizon = 0;
  double mean_noise_sum = 0.0;  // over runs that reached the horizon
  double expected_noise_sum = 0.0;  // m_bar ln K
  bool monotone = true;
};

inline void check_escape_preconditions(const NoiseModel& noise, const StepSchedule& s,
                                       double alpha, double c_lip) {
  if (noise.kind() != NoiseKind::adversarial_rotated) {
    throw PreconditionError("escape requires adversarial_rotated noise");
  }
  check_rate_hypotheses(s, alpha, c_lip, true);
}

/// Escape statistics at horizons K, K/10, K/100, ... (down to 10).
inline EscapeReport escape_experiment(const EnsembleStats& st, double m_bar) {
  EscapeReport rep;
  for (std::size_t h = st.horizon; h >= 10; h /= 10) rep.horizons.insert(rep.horizons.begin(), h);
  if (rep.horizons.empty()) rep.horizons.push_back(st.horizon);
  double noise_sum = 0.0;
  for (const RunSummary& r : st.runs) {
    if (r.exit_step) rep.exit_steps.push_back(*r.exit_step);
    if (r.steps_taken == st.horizon) {
      ++rep.runs_at_horizon;
      noise_sum += r.noise_weighted_sum;
    }
  }
  for (std::size_t h : rep.horizons) {
    std::size_t escaped = 0;
    for (const RunSummary& r : st.runs) escaped += (r.exit_step && *r.exit_step <= h) ? 1 : 0;
    rep.fractions.push_back(static_cast<double>(escaped) / static_cast<double>(st.n_runs));
  }
  for (std::size_t i = 1; i < rep.fractions.size(); ++i) {
    if (rep.fractions[i] < rep.fractions[i - 1]) rep.monotone = false;
  }
  rep.mean_noise_sum = rep.runs_at_horizon > 0
                           ? noise_sum / static_cast<double>(rep.runs_at_horizon)
                           : std::numeric_limits<double>::quiet_NaN();
  rep.expected_noise_sum = m_bar * std::log(static_cast<double>(st.horizon));
  return rep;
}

// ---------------------------------------------------------------------------
// Network lower bound
// ---------------------------------------------------------------------------

struct A1Report {
  std::size_t points = 0;
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double acceptance_rate = 0.0;
  double anchor_margin = 0.0;  // F(theta0) - bound(0) = 2 mean(y^2)
};

/// Evaluates F(theta') - lower_bound(|theta' - theta0|) at points sampled from
/// B(theta0, R/2) intersected with the subspace.
inline A1Report certify_a1_bound(const NetSpec& net, const Dataset& data,
                                 const ParamVector& theta0, const ThetaSubspace& sub, double A,
                                 double R, std::size_t n_points, RngStream& rng) {
  require(sub.anchor == theta0, "certify_a1_bound: subspace anchor must be theta0");
  require(A > R / 2.0 && R > 0.0, "certify_a1_bound: need A > R/2 > 0");
  const NetObjective obj(net, data);
  const double msq = data.mean_square_target();
  A1Report rep;
  rep.anchor_margin = obj.value(theta0) - net_lower_bound(net, sub.alpha_tilde, R, A, 0.0, msq);
  const ThetaSample sample = sample_in_theta(sub, R / 2.0, n_points, rng);
  rep.acceptance_rate = sample.acceptance_rate;
  rep.points = sample.points.size();
  for (const ParamVector& p : sample.points) {
    const double margin =
        obj.value(p) - net_lower_bound(net, sub.alpha_tilde, R, A, distance(p, theta0), msq);
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin < 0.0) ++rep.violations;
  }
  return rep;
}

}  // namespace lojsgd
