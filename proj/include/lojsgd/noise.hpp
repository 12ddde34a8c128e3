#pragma once

// Stochastic gradient constructions g = grad F(theta) + noise: value-scaled
// noise sqrt(sigma F) Z, bounded-moment i.i.d. noise, and i.i.d. noise whose
// draws are all rotated onto one fixed direction.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lojsgd/core.hpp"

namespace lojsgd {

enum class ZKind { sphere, gaussian };

inline std::string_view to_string(ZKind k) { return k == ZKind::sphere ? "sphere" : "gaussian"; }

inline std::optional<ZKind> parse_zkind(std::string_view name) {
  if (name == "sphere") return ZKind::sphere;
  if (name == "gaussian") return ZKind::gaussian;
  return std::nullopt;
}

/// Zero-mean noise on R^d with declared moments E|Z| = m_bar and
/// E|Z|^2 = c^2.
///
/// sphere: uniform on the sphere of radius `scale` (m_bar = c = scale).
/// gaussian: i.i.d. N(0, scale^2 / d) coordinates, so E|Z|^2 = scale^2.
/// The declared moments are checked against 1e5 draws at construction.
class ZDist {
 public:
  static constexpr std::size_t kVerifyDraws = 100'000;

  ZDist(ZKind kind, std::size_t dim, double scale) : kind_(kind), dim_(dim), scale_(scale) {
    require(dim > 0, "ZDist: dimension must be positive");
    require(scale > 0.0 && std::isfinite(scale), "ZDist: scale must be positive");
    verify();
  }

  ZKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  double scale() const noexcept { return scale_; }

  double second_moment() const noexcept { return scale_ * scale_; }

  double first_abs_moment() const {
    if (kind_ == ZKind::sphere) return scale_;
    // E|N(0, I_d)| = sqrt(2) Gamma((d+1)/2) / Gamma(d/2)
    const double d = static_cast<double>(dim_);
    const double chi_mean =
        std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5 * d));
    return scale_ * chi_mean / std::sqrt(d);
  }

  void sample(RngStream& rng, std::span<double> out) const {
    check_same_dim(out.size(), dim_, "ZDist::sample");
    if (kind_ == ZKind::sphere) {
      sample_unit_sphere(rng, out);
      for (double& v : out) v *= scale_;
    } else {
      const double sd = scale_ / std::sqrt(static_cast<double>(dim_));
      for (double& v : out) v = sd * rng.normal();
    }
  }

  bool operator==(const ZDist& o) const {
    return kind_ == o.kind_ && dim_ == o.dim_ && scale_ == o.scale_;
  }

 private:
  void verify() const {
    RngStream rng(0x5eed, dim_);
    std::vector<double> z(dim_), sum(dim_, 0.0);
    double s1 = 0, s1sq = 0, s2 = 0, s2sq = 0;
    const double n = static_cast<double>(kVerifyDraws);
    for (std::size_t i = 0; i < kVerifyDraws; ++i) {
      sample(rng, z);
      const double sq = dot(z, z);
      const double a = std::sqrt(sq);
      for (std::size_t j = 0; j < dim_; ++j) sum[j] += z[j];
      s1 += a;
      s1sq += a * a;
      s2 += sq;
      s2sq += sq * sq;
    }
    auto within = [&](double mean, double sumsq, double declared) {
      const double var = std::max(0.0, sumsq / n - mean * mean);
      return std::abs(mean - declared) <= 3.0 * std::sqrt(var / n) + 1e-9 * declared;  // summation rounding
    };
    for (double& v : sum) v /= n;
    if (norm(sum) > 3.0 * std::sqrt(second_moment() / n) ||
        !within(s1 / n, s1sq, first_abs_moment()) || !within(s2 / n, s2sq, second_moment())) {
      throw NumericalError("ZDist: empirical moments disagree with the declared ones");
    }
  }

  ZKind kind_;
  std::size_t dim_;
  double scale_;
};

enum class NoiseKind { ml_scaled, bounded_iid, adversarial_rotated };

inline std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::ml_scaled:
      return "ml_scaled";
    case NoiseKind::bounded_iid:
      return "bounded_iid";
    case NoiseKind::adversarial_rotated:
      return "adversarial_rotated";
  }
  return "ml_scaled";
}

inline std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  if (name == "ml_scaled") return NoiseKind::ml_scaled;
  if (name == "bounded_iid") return NoiseKind::bounded_iid;
  if (name == "adversarial_rotated") return NoiseKind::adversarial_rotated;
  return std::nullopt;
}

/// Noise generator. The value-scaled and i.i.d. kinds are stateless. The
/// rotated kind stores the unit direction of its first draw and emits every
/// later draw as |Z_k| times that direction; it belongs to one trajectory at
/// a time and is cleared with reset().
class NoiseModel {
 public:
  /// sqrt(sigma F(theta)) Z with Z uniform on the unit sphere.
  static NoiseModel ml_scaled(double sigma) {
    require(sigma >= 0.0 && std::isfinite(sigma), "NoiseModel: sigma must be >= 0");
    NoiseModel m(NoiseKind::ml_scaled);
    m.sigma_ = sigma;
    return m;
  }

  static NoiseModel bounded_iid(ZDist dist) {
    NoiseModel m(NoiseKind::bounded_iid);
    m.dist_ = std::move(dist);
    return m;
  }

  static NoiseModel adversarial_rotated(ZDist dist) {
    NoiseModel m(NoiseKind::adversarial_rotated);
    m.dist_ = std::move(dist);
    return m;
  }

  NoiseKind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }
  const std::optional<ZDist>& dist() const noexcept { return dist_; }
  const std::vector<double>& direction() const noexcept { return direction_; }

  void reset() { direction_.clear(); }

  /// Writes the noise component for a point with loss `f` into `out` and
  /// returns its norm.
  double sample(double f, RngStream& rng, std::span<double> out) {
    if (f < 0.0) throw PreconditionError("NoiseModel: objective returned a negative value");
    switch (kind_) {
      case NoiseKind::ml_scaled: {
        const double amp = std::sqrt(sigma_ * f);
        if (amp == 0.0) {
          std::fill(out.begin(), out.end(), 0.0);
          return 0.0;
        }
        sample_unit_sphere(rng, out);
        for (double& v : out) v *= amp;
        return amp;
      }
      case NoiseKind::bounded_iid:
        dist_->sample(rng, out);
        return norm(out);
      case NoiseKind::adversarial_rotated: {
        dist_->sample(rng, out);
        const double len = norm(out);
        if (direction_.empty()) {
          if (len == 0.0) return 0.0;  // no direction yet; the draw is zero anyway
          direction_.assign(out.begin(), out.end());
          for (double& v : direction_) v /= len;
        }
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = len * direction_[i];
        return len;
      }
    }
    return 0.0;
  }

  /// Bound on E|noise|^2 / F (sigma) for the value-scaled kind, 0 otherwise;
  /// this is the sigma the contraction factor uses.
  double certificate_sigma() const noexcept {
    return kind_ == NoiseKind::ml_scaled ? sigma_ : 0.0;
  }

 private:
  explicit NoiseModel(NoiseKind kind) : kind_(kind) {}

  NoiseKind kind_;
  double sigma_ = 0.0;
  std::optional<ZDist> dist_;
  std::vector<double> direction_;
};

/// grad F(theta) plus one noise draw.
inline ParamVector stochastic_gradient(NoiseModel& model, const Objective& obj,
                                       const ParamVector& theta, RngStream& rng) {
  std::vector<double> g(obj.dim()), z(obj.dim());
  const double f = obj.value_and_gradient(theta, g);
  model.sample(f, rng, z);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += z[i];
  return ParamVector(std::move(g));
}

struct NoiseMoments {
  double mean_norm = 0.0;  // |empirical mean of the noise vector|
  double second_moment = 0.0;
  double first_abs_moment = 0.0;
  double max_misalignment = 0.0;  // largest |noise| - noise . u over draws (rotated kind)
};

/// Monte Carlo moments of the noise component g - grad F(theta) over n draws.
inline NoiseMoments empirical_moments(NoiseModel& model, const Objective& obj,
                                      const ParamVector& theta, std::size_t n, RngStream& rng) {
  require(n >= 1, "empirical_moments: need at least one draw");
  const std::size_t d = obj.dim();
  std::vector<double> grad(d), z(d), sum(d, 0.0);
  const double f = obj.value_and_gradient(theta, grad);
  NoiseMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    // Same draw stochastic_gradient adds to grad F, read off before the sum.
    const double len = model.sample(f, rng, z);
    for (std::size_t j = 0; j < d; ++j) sum[j] += z[j];
    m.second_moment += len * len;
    m.first_abs_moment += len;
    if (!model.direction().empty()) {
      m.max_misalignment = std::max(m.max_misalignment, std::abs(len - dot(z, model.direction())));
    }
  }
  const double dn = static_cast<double>(n);
  for (double& v : sum) v /= dn;
  m.mean_norm = norm(sum);
  m.second_moment /= dn;
  m.first_abs_moment /= dn;
  return m;
}

}  // namespace lojsgd
