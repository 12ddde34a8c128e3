#pragma once

// Estimators for the landscape constants consumed by the convergence results:
// the Lojasiewicz ratio alpha(theta0, r), the gradient Lipschitz constant C_L,
// the growth bound |grad F|^2 <= 2 C_L F, the shell floor M0, and the step
// bound / contraction factor derived from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lojsgd/core.hpp"

namespace lojsgd {

/// Values of F at or below this are treated as zero loss.
inline constexpr double kZeroLoss = 1e-14;

namespace detail {

inline void project_to_ball(std::span<double> theta, std::span<const double> center,
                            double radius) {
  const double d = distance(theta, center);
  if (d <= radius) return;
  const double shrink = radius / d;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = center[i] + shrink * (theta[i] - center[i]);
  }
}

inline double ratio_or_throw(double grad_sq, double f) {
  const double q = grad_sq / f;
  if (!std::isfinite(q)) throw NumericalError("estimate_alpha: non-finite ratio |grad F|^2 / F");
  return q;
}

/// Backtracking descent on q(theta) = |grad F|^2 / F inside the ball. The
/// gradient of q needs a Hessian-vector product, taken by central differences
/// of grad F along grad F.
inline double refine_ratio_minimum(const Objective& obj, std::vector<double> theta,
                                   std::span<const double> center, double radius,
                                   std::size_t steps) {
  const std::size_t p = theta.size();
  std::vector<double> g(p), g_plus(p), g_minus(p), probe(p), dq(p), cand(p), g_cand(p);
  double f = obj.value_and_gradient(theta, g);
  double q = ratio_or_throw(dot(g, g), f);
  double step = radius / 10.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double gn = norm(g);
    if (gn == 0.0) break;
    const double eps = 1e-6 * std::max(1.0, norm(theta));
    for (std::size_t i = 0; i < p; ++i) probe[i] = theta[i] + eps * g[i] / gn;
    obj.gradient_into(probe, g_plus);
    for (std::size_t i = 0; i < p; ++i) probe[i] = theta[i] - eps * g[i] / gn;
    obj.gradient_into(probe, g_minus);
    for (std::size_t i = 0; i < p; ++i) {
      const double hg = gn * (g_plus[i] - g_minus[i]) / (2.0 * eps);
      dq[i] = (2.0 * hg - q * g[i]) / f;
    }
    const double dn = norm(dq);
    if (!(dn > 0.0) || !std::isfinite(dn)) break;
    for (std::size_t i = 0; i < p; ++i) cand[i] = theta[i] - step * dq[i] / dn;
    project_to_ball(cand, center, radius);
    const double fc = obj.value_and_gradient(cand, g_cand);
    if (fc > kZeroLoss) {
      const double qc = ratio_or_throw(dot(g_cand, g_cand), fc);
      if (qc < q) {
        theta.swap(cand);
        g.swap(g_cand);
        f = fc;
        q = qc;
        step *= 1.5;
        continue;
      }
    }
    step *= 0.5;
  }
  return q;
}

}  // namespace detail

/// Sampled estimate of alpha(theta0, r) = inf over the ball (F != 0) of
/// |grad F|^2 / F.
///
/// Every time a sample sets a new running minimum it is refined by
/// `refine_steps` descent steps on the ratio; the result is the smallest
/// refined value. Because refinement only ever starts from running-minimum
/// candidates, the estimate is non-increasing in `n_samples` on a fixed stream.
/// Returns +infinity when every sample has F <= kZeroLoss.
inline double estimate_alpha(const Objective& obj, std::span<const double> theta0, double r,
                             std::size_t n_samples, std::size_t refine_steps, RngStream& rng) {
  require(r > 0.0, "estimate_alpha: r must be positive");
  require(n_samples >= 1, "estimate_alpha: need at least one sample");
  check_same_dim(theta0.size(), obj.dim(), "estimate_alpha");
  std::vector<double> theta(theta0.size()), g(theta0.size());
  double running = std::numeric_limits<double>::infinity();
  double best = running;
  for (std::size_t i = 0; i < n_samples; ++i) {
    sample_in_ball(rng, theta0, r, theta);
    const double f = obj.value_and_gradient(theta, g);
    if (f <= kZeroLoss) continue;
    const double q = detail::ratio_or_throw(dot(g, g), f);
    if (q < running) {
      running = q;
      const double refined =
          refine_steps == 0 ? q
                            : detail::refine_ratio_minimum(obj, theta, theta0, r, refine_steps);
      best = std::min(best, refined);
    }
  }
  return best;
}

inline constexpr std::size_t kClipPowerSteps = 3;

/// Lower estimate of the gradient Lipschitz constant on B(center, radius):
/// the largest quotient |grad F(a) - grad F(b)| / |a - b| over random pairs
/// and over short segments of length 1e-4 * radius. Short segments start at a
/// uniformly distributed radius and follow a few power-iteration steps on the
/// local Hessian, so the segment lines up with the stiffest direction.
///
/// Each quotient is reduced by a floating-point rounding allowance so the
/// result stays a lower estimate even when the quotient is constant.
inline double estimate_clip(const Objective& obj, std::span<const double> center, double radius,
                            std::size_t n_pairs, RngStream& rng) {
  require(radius > 0.0, "estimate_clip: radius must be positive");
  require(n_pairs >= 1, "estimate_clip: need at least one pair");
  check_same_dim(center.size(), obj.dim(), "estimate_clip");
  const std::size_t p = center.size();
  const double eps = std::numeric_limits<double>::epsilon();
  const double rel = (static_cast<double>(p) + 4.0) * eps;
  std::vector<double> a(p), b(p), u(p), ga(p), gb(p), diff(p);
  double best = 0.0;
  std::size_t counted = 0;

  auto quotient = [&](std::span<const double> x, std::span<const double> y) {
    const double d = distance(x, y);
    if (d < 1e-14) return;
    obj.gradient_into(x, ga);
    obj.gradient_into(y, gb);
    for (std::size_t i = 0; i < p; ++i) diff[i] = ga[i] - gb[i];
    const double num = norm(diff) * (1.0 - rel) - 4.0 * eps * (norm(ga) + norm(gb));
    best = std::max(best, std::max(0.0, num) / (d * (1.0 + rel)));
    ++counted;
  };

  const double short_len = 1e-4 * radius;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    sample_in_ball(rng, center, radius, a);
    sample_in_ball(rng, center, radius, b);
    quotient(a, b);
    // Base point at a uniform radius, so the core of the ball is probed as
    // often as its surface.
    sample_unit_sphere(rng, u);
    const double rad = radius * rng.uniform();
    for (std::size_t i = 0; i < p; ++i) a[i] = center[i] + rad * u[i];
    sample_unit_sphere(rng, u);
    for (std::size_t it = 0; it <= kClipPowerSteps; ++it) {
      for (std::size_t i = 0; i < p; ++i) b[i] = a[i] + short_len * u[i];
      quotient(a, b);
      const double dn = norm(diff);
      if (!(dn > 0.0)) break;
      for (std::size_t i = 0; i < p; ++i) u[i] = diff[i] / dn;
    }
  }
  if (counted == 0) throw NumericalError("estimate_clip: every sampled pair was degenerate");
  return best;
}

struct GrowthReport {
  std::vector<double> margins;  // 2 C_L F - |grad F|^2 per point
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
};

/// Relative rounding allowance when deciding whether a margin is negative.
inline constexpr double kGrowthRoundoff = 1e-12;

inline GrowthReport check_growth_bound(const Objective& obj,
                                       std::span<const ParamVector> points, double c_lip) {
  GrowthReport report;
  report.margins.reserve(points.size());
  std::vector<double> g(obj.dim());
  for (const ParamVector& theta : points) {
    const double f = obj.value_and_gradient(theta, g);
    const double lhs = dot(g, g);
    const double rhs = 2.0 * c_lip * f;
    const double margin = rhs - lhs;
    report.margins.push_back(margin);
    report.min_margin = std::min(report.min_margin, margin);
    if (margin < -kGrowthRoundoff * (std::abs(lhs) + std::abs(rhs))) ++report.violations;
  }
  return report;
}

/// Floor of F on the shell R-1 <= |theta - theta0| <= R. Uses the objective's
/// closed form when it declares one; otherwise the minimum over uniform shell
/// samples, which over-estimates the true floor.
inline double estimate_floor(const Objective& obj, std::span<const double> theta0, double R,
                             std::size_t n_samples, RngStream& rng) {
  require(R > 1.0, "estimate_floor: R must exceed 1");
  check_same_dim(theta0.size(), obj.dim(), "estimate_floor");
  if (auto known = obj.known_shell_floor(theta0, R)) return *known;
  require(n_samples >= 1, "estimate_floor: need at least one sample");
  std::vector<double> theta(theta0.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_samples; ++i) {
    sample_in_shell(rng, theta0, R - 1.0, R, theta);
    best = std::min(best, obj.value(theta));
  }
  return best;
}

struct Rates {
  double eta_star;
  double rho;
};

inline double contraction_factor(double eta, double alpha, double c_lip, double sigma) {
  return 1.0 - eta * alpha + 0.5 * eta * eta * c_lip * (2.0 * c_lip + sigma);
}

/// eta* = min(1/alpha, alpha / (4 C_L (2 C_L + sigma))) and the matching
/// contraction factor rho. Throws when rho leaves (0, 1) or exceeds
/// 1 - alpha eta*/2, which signals inconsistent constants.
inline Rates derive_rates(double alpha, double c_lip, double sigma) {
  require(alpha > 0.0 && std::isfinite(alpha), "derive_rates: alpha must be positive and finite");
  require(c_lip > 0.0 && std::isfinite(c_lip), "derive_rates: C_L must be positive and finite");
  require(sigma >= 0.0 && std::isfinite(sigma), "derive_rates: sigma must be >= 0");
  const double eta = std::min(1.0 / alpha, alpha / (4.0 * c_lip * (2.0 * c_lip + sigma)));
  const double rho = contraction_factor(eta, alpha, c_lip, sigma);
  if (!(rho > 0.0 && rho < 1.0)) {
    throw NumericalError("derive_rates: contraction factor " + std::to_string(rho) +
                         " outside (0, 1)");
  }
  if (rho > 1.0 - 0.5 * alpha * eta) {
    throw NumericalError("derive_rates: contraction factor exceeds 1 - alpha*eta/2");
  }
  return {eta, rho};
}

/// Local Lojasiewicz seed condition 4 F(theta0) < r^2 alpha (strict).
inline bool check_seed(double f0, double r, double alpha) {
  require(r > 0.0, "check_seed: r must be positive");
  require(alpha > 0.0, "check_seed: alpha must be positive");
  require(f0 >= 0.0, "check_seed: F(theta0) must be non-negative");
  return 4.0 * f0 < r * r * alpha;
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

enum class Provenance { exact, sampled };

struct FieldSource {
  Provenance kind = Provenance::exact;
  std::size_t samples = 0;
  std::size_t refine_steps = 0;
  double safety = 1.0;

  bool operator==(const FieldSource&) const = default;
};

struct LandscapeCertificate {
  double alpha = 0.0;  // after safety factor
  double c_lip = 0.0;  // after safety factor
  double m_floor = 0.0;
  double rho = 0.0;
  double eta_star = 0.0;
  double sigma = 0.0;
  bool seed_ok = false;

  double f0 = 0.0;
  double r = 0.0;
  double R = 0.0;
  double alpha_raw = 0.0;
  double c_lip_raw = 0.0;
  double grad_bound = 0.0;         // max sampled |grad F| on B(theta0, r)
  double smoothness_radius = 0.0;  // r + grad_bound / C_L
  std::size_t growth_points = 0;
  std::size_t growth_violations = 0;
  FieldSource alpha_source;
  FieldSource c_lip_source;
  FieldSource floor_source;
  std::uint64_t seed = 0;

  bool assumption3_ok() const { return m_floor > 0.0; }
};

struct CertifyOptions {
  std::size_t alpha_samples = 2000;
  std::size_t refine_steps = 50;
  std::size_t clip_pairs = 2000;
  std::size_t floor_samples = 2000;
  std::size_t growth_points = 1000;
  double safety = 1.1;
};

/// Measures (or reads off, when the objective declares them) every constant
/// for the ball B(theta0, r) inside B(theta0, R), applies the safety factor to
/// sampled values (alpha / safety, C_L * safety), and derives eta* and rho.
///
/// C_L is measured on the enclosing ball of radius r + Cbar / C_L, where Cbar
/// is the largest gradient norm seen on B(theta0, r); the growth bound is then
/// checked on B(theta0, r).
inline LandscapeCertificate certify_landscape(const Objective& obj, const ParamVector& theta0,
                                              double r, double R, double sigma,
                                              const CertifyOptions& opts, std::uint64_t seed) {
  require(r > 0.0 && r <= R, "certify_landscape: need 0 < r <= R");
  require(opts.safety >= 1.0, "certify_landscape: safety factor must be >= 1");
  check_same_dim(theta0.size(), obj.dim(), "certify_landscape");

  LandscapeCertificate cert;
  cert.seed = seed;
  cert.r = r;
  cert.R = R;
  cert.sigma = sigma;
  cert.f0 = obj.value(theta0);
  const auto known = obj.known_constants();

  if (known) {
    cert.alpha_raw = cert.alpha = known->alpha;
  } else {
    RngStream rng(seed, 1);
    cert.alpha_raw = estimate_alpha(obj, theta0, r, opts.alpha_samples, opts.refine_steps, rng);
    cert.alpha = cert.alpha_raw / opts.safety;
    cert.alpha_source = {Provenance::sampled, opts.alpha_samples, opts.refine_steps, opts.safety};
  }
  if (!std::isfinite(cert.alpha)) {
    throw PreconditionError("certify_landscape: F vanishes on the whole ball; alpha is infinite");
  }

  // Growth-check points double as the sample for Cbar.
  std::vector<ParamVector> points;
  points.reserve(opts.growth_points);
  {
    RngStream rng(seed, 2);
    std::vector<double> theta(theta0.size()), g(theta0.size());
    for (std::size_t i = 0; i < opts.growth_points; ++i) {
      sample_in_ball(rng, theta0, r, theta);
      obj.gradient_into(theta, g);
      cert.grad_bound = std::max(cert.grad_bound, norm(g));
      points.emplace_back(std::span<const double>(theta));
    }
  }

  if (known) {
    cert.c_lip_raw = cert.c_lip = known->c_lip;
    cert.smoothness_radius = r + cert.grad_bound / cert.c_lip;
  } else {
    RngStream rng(seed, 3);
    const double inner = estimate_clip(obj, theta0, r, opts.clip_pairs, rng);
    cert.smoothness_radius = inner > 0.0 ? r + cert.grad_bound / inner : r;
    cert.c_lip_raw = estimate_clip(obj, theta0, cert.smoothness_radius, opts.clip_pairs, rng);
    cert.c_lip = cert.c_lip_raw * opts.safety;
    cert.c_lip_source = {Provenance::sampled, opts.clip_pairs, 0, opts.safety};
  }

  {
    RngStream rng(seed, 4);
    cert.m_floor = estimate_floor(obj, theta0, R, opts.floor_samples, rng);
    if (!obj.known_shell_floor(theta0, R)) {
      cert.floor_source = {Provenance::sampled, opts.floor_samples, 0, 1.0};
    }
  }

  const GrowthReport growth = check_growth_bound(obj, points, cert.c_lip);
  cert.growth_points = points.size();
  cert.growth_violations = growth.violations;

  const Rates rates = derive_rates(cert.alpha, cert.c_lip, sigma);
  cert.eta_star = rates.eta_star;
  cert.rho = rates.rho;
  cert.seed_ok = check_seed(cert.f0, r, cert.alpha);
  return cert;
}

}  // namespace lojsgd
