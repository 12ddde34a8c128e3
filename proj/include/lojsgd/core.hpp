#pragma once

// Parameter vectors, the objective contract, reproducible random streams and
// the central-difference gradient oracle. Everything else builds on this.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lojsgd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw PreconditionError(what);
}

inline void check_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw DimensionMismatch(std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  }
}

/// A point in parameter space. The length is fixed at construction and every
/// coordinate is finite; constructors reject NaN and infinities.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim) : coords_(dim, 0.0) {}
  ParamVector(std::initializer_list<double> init) : coords_(init) { check_finite(); }
  explicit ParamVector(std::vector<double> coords) : coords_(std::move(coords)) { check_finite(); }
  explicit ParamVector(std::span<const double> coords) : coords_(coords.begin(), coords.end()) {
    check_finite();
  }

  static ParamVector unit(std::size_t dim, std::size_t axis, double scale = 1.0) {
    ParamVector v(dim);
    v.coords_.at(axis) = scale;
    v.check_finite();
    return v;
  }

  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  std::span<const double> span() const noexcept { return coords_; }
  operator std::span<const double>() const noexcept { return coords_; }

  bool operator==(const ParamVector&) const = default;

 private:
  void check_finite() const {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (!std::isfinite(coords_[i])) {
        throw NumericalError("ParamVector: non-finite coordinate at index " + std::to_string(i));
      }
    }
  }

  std::vector<double> coords_;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
  check_same_dim(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double distance(std::span<const double> x, std::span<const double> y) {
  check_same_dim(x.size(), y.size(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// a*x + y, componentwise.
inline ParamVector axpy(double a, const ParamVector& x, const ParamVector& y) {
  check_same_dim(x.size(), y.size(), "axpy");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + y[i];
  return ParamVector(std::move(out));
}

/// Reproducible random stream identified by (seed, stream_id). Each Monte
/// Carlo trajectory owns one stream; streams are never shared between workers.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }

  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Uniform direction on the unit sphere written into `out`.
inline void sample_unit_sphere(RngStream& rng, std::span<double> out) {
  double s = 0.0;
  do {
    s = 0.0;
    for (double& v : out) {
      v = rng.normal();
      s += v * v;
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (double& v : out) v *= inv;
}

/// Uniform point in the closed ball B(center, radius).
inline void sample_in_ball(RngStream& rng, std::span<const double> center, double radius,
                           std::span<double> out) {
  check_same_dim(center.size(), out.size(), "sample_in_ball");
  sample_unit_sphere(rng, out);
  const double rho = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = center[i] + rho * out[i];
}

/// Uniform point in the shell inner <= |x - center| <= outer.
inline void sample_in_shell(RngStream& rng, std::span<const double> center, double inner,
                            double outer, std::span<double> out) {
  check_same_dim(center.size(), out.size(), "sample_in_shell");
  const double p = static_cast<double>(out.size());
  sample_unit_sphere(rng, out);
  const double lo = std::pow(inner, p);
  const double hi = std::pow(outer, p);
  const double rho = std::pow(lo + rng.uniform() * (hi - lo), 1.0 / p);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = center[i] + rho * out[i];
}

/// Non-negative objective with an analytic gradient.
///
/// Implementations override the private hooks; the public entry points check
/// dimensions. Objectives are immutable after construction and safe to
/// evaluate concurrently.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;

  double value(std::span<const double> theta) const {
    check_same_dim(theta.size(), dim(), "Objective::value");
    return eval_value(theta);
  }

  void gradient_into(std::span<const double> theta, std::span<double> out) const {
    check_same_dim(theta.size(), dim(), "Objective::gradient");
    check_same_dim(out.size(), dim(), "Objective::gradient");
    eval_gradient(theta, out);
  }

  ParamVector gradient(std::span<const double> theta) const {
    std::vector<double> g(dim());
    gradient_into(theta, g);
    return ParamVector(std::move(g));
  }

  /// Evaluates both in one pass where the objective can share work.
  double value_and_gradient(std::span<const double> theta, std::span<double> out) const {
    check_same_dim(theta.size(), dim(), "Objective::value_and_gradient");
    check_same_dim(out.size(), dim(), "Objective::value_and_gradient");
    return eval_value_and_gradient(theta, out);
  }

  /// Closed-form minimum of F over the shell R-1 <= |theta - theta0| <= R, when known.
  virtual std::optional<double> known_shell_floor(std::span<const double> /*theta0*/,
                                                  double /*R*/) const {
    return std::nullopt;
  }

  /// Exact landscape constants (alpha on any ball, C_L), when known.
  struct KnownConstants {
    double alpha;
    double c_lip;
  };
  virtual std::optional<KnownConstants> known_constants() const { return std::nullopt; }

 private:
  virtual double eval_value(std::span<const double> theta) const = 0;
  virtual void eval_gradient(std::span<const double> theta, std::span<double> out) const = 0;
  virtual double eval_value_and_gradient(std::span<const double> theta,
                                         std::span<double> out) const {
    eval_gradient(theta, out);
    return eval_value(theta);
  }
};

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference gradient, component i = (F(theta + h e_i) - F(theta - h e_i)) / 2h.
inline ParamVector fd_gradient(const Objective& obj, std::span<const double> theta,
                               double h = kDefaultFdStep) {
  require(h > 0.0, "fd_gradient: step h must be positive");
  check_same_dim(theta.size(), obj.dim(), "fd_gradient");
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = obj.value(probe);
    probe[i] = saved - h;
    const double down = obj.value(probe);
    probe[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericalError("fd_gradient: non-finite objective value when perturbing coordinate " +
                           std::to_string(i));
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return ParamVector(std::move(g));
}

/// Componentwise relative error between two gradients; components whose
/// magnitude is below `abs_floor` in both are compared absolutely.
inline double gradient_mismatch(std::span<const double> analytic, std::span<const double> numeric,
                                double abs_floor = 1e-10) {
  check_same_dim(analytic.size(), numeric.size(), "gradient_mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double diff = std::abs(analytic[i] - numeric[i]);
    const double scale = std::max(std::abs(analytic[i]), std::abs(numeric[i]));
    const double err = scale < abs_floor ? diff : diff / scale;
    worst = std::max(worst, err);
  }
  return worst;
}

/// |analytic - numeric| / max(|analytic|, |numeric|), or the plain distance
/// when both norms fall below abs_floor.
inline double gradient_relative_error(std::span<const double> analytic,
                                      std::span<const double> numeric, double abs_floor = 1e-10) {
  check_same_dim(analytic.size(), numeric.size(), "gradient_relative_error");
  const double scale = std::max(norm(analytic), norm(numeric));
  const double diff = distance(analytic, numeric);
  return scale < abs_floor ? diff : diff / scale;
}

}  // namespace lojsgd
