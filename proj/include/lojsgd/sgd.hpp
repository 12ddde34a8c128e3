#pragma once

// The SGD iteration theta_{k+1} = theta_k - eta_k g_k with constant or
// Robbins-Monro steps, tracking the event that every iterate so far stays in
// B(theta0, r) and classifying the first exit from it.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lojsgd/core.hpp"
#include "lojsgd/io.hpp"
#include "lojsgd/noise.hpp"

namespace lojsgd {

/// q must lie in (1/2, 1] for Robbins-Monro steps.
inline bool rm_exponent_ok(double q) { return q > 0.5 && q <= 1.0; }

class StepSchedule {
 public:
  enum class Kind { constant, robbins_monro };

  /// eta = 0 is allowed and freezes the iterate.
  static StepSchedule constant(double eta) {
    require(eta >= 0.0 && std::isfinite(eta), "StepSchedule: eta must be >= 0 and finite");
    StepSchedule s(Kind::constant);
    s.eta_ = eta;
    return s;
  }

  /// eta_k = gamma / (k + n0)^q.
  static StepSchedule robbins_monro(double gamma, double n0, double q) {
    require(gamma > 0.0, "StepSchedule: gamma must be positive");
    require(n0 > 0.0, "StepSchedule: n0 must be positive");
    require(rm_exponent_ok(q), "StepSchedule: q must lie in (1/2, 1]");
    StepSchedule s(Kind::robbins_monro);
    s.gamma_ = gamma;
    s.n0_ = n0;
    s.q_ = q;
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  double eta() const noexcept { return eta_; }
  double gamma() const noexcept { return gamma_; }
  double n0() const noexcept { return n0_; }
  double q() const noexcept { return q_; }

  double at(std::size_t k) const {
    if (kind_ == Kind::constant) return eta_;
    return gamma_ / std::pow(static_cast<double>(k) + n0_, q_);
  }

  bool operator==(const StepSchedule&) const = default;

 private:
  explicit StepSchedule(Kind kind) : kind_(kind) {}

  Kind kind_;
  double eta_ = 0.0;
  double gamma_ = 0.0;
  double n0_ = 0.0;
  double q_ = 1.0;
};

/// eta_0 .. eta_{k_max - 1}.
inline std::vector<double> step_sizes(const StepSchedule& schedule, std::size_t k_max) {
  require(k_max >= 1, "step_sizes: k_max must be at least 1");
  if (schedule.kind() == StepSchedule::Kind::robbins_monro) {
    require(rm_exponent_ok(schedule.q()), "step_sizes: q must lie in (1/2, 1]");
  }
  std::vector<double> out(k_max);
  for (std::size_t k = 0; k < k_max; ++k) out[k] = schedule.at(k);
  return out;
}

/// Smallest admissible offset n0 = (2 C_L^2 gamma / alpha)^(1/q) for the
/// algebraic-rate result.
inline double rm_parameters(double alpha, double c_lip, double gamma, double q) {
  require(alpha > 0.0 && c_lip > 0.0 && gamma > 0.0, "rm_parameters: inputs must be positive");
  require(rm_exponent_ok(q), "rm_parameters: q must lie in (1/2, 1]");
  return std::pow(2.0 * c_lip * c_lip * gamma / alpha, 1.0 / q);
}

enum class ExitClass { none, jump_beyond_R, annulus_entry };

inline std::string_view to_string(ExitClass c) {
  switch (c) {
    case ExitClass::none:
      return "none";
    case ExitClass::jump_beyond_R:
      return "jump_beyond_R";
    case ExitClass::annulus_entry:
      return "annulus_entry";
  }
  return "none";
}

struct TrajectoryOptions {
  double r = 0.0;
  double R = 0.0;
  std::size_t horizon = 1;
  std::size_t thin = 1;
  bool record_thetas = true;
  std::optional<std::size_t> snapshot_at;  // also keep theta at this step
};

/// Per-step arrays hold k = 0 .. steps_taken (one entry more than the number
/// of updates). The run stops early only when an iterate leaves B(theta0, R).
struct TrajectoryRecord {
  std::uint64_t run_id = 0;
  std::vector<ParamVector> thetas;  // theta_k for k = 0, thin, 2 thin, ...
  std::vector<double> f_values;
  std::vector<double> dist_values;
  std::vector<double> etas;
  std::optional<std::size_t> event_alive_until;  // first k with |theta_k - theta0| > r
  ExitClass exit_class = ExitClass::none;
  double path_length = 0.0;  // sum of step lengths taken while the event held
  double noise_weighted_sum = 0.0;  // sum_k |Z_k| / (k + 1)
  std::size_t steps_taken = 0;
  ParamVector final_theta;
  std::optional<ParamVector> snapshot;

  bool event_alive(std::size_t k) const { return !event_alive_until || k < *event_alive_until; }
  bool reached_horizon(std::size_t horizon) const { return steps_taken == horizon; }
};

/// Runs one trajectory. `model` is copied and reset, so alignment state never
/// leaks between trajectories.
inline TrajectoryRecord run_trajectory(const Objective& obj, const NoiseModel& model,
                                       const StepSchedule& schedule, const ParamVector& theta0,
                                       const TrajectoryOptions& opts, RngStream& rng) {
  require(opts.r > 0.0 && opts.r <= opts.R, "run_trajectory: need 0 < r <= R");
  require(opts.horizon >= 1, "run_trajectory: horizon must be at least 1");
  require(opts.thin >= 1, "run_trajectory: thin must be at least 1");
  check_same_dim(theta0.size(), obj.dim(), "run_trajectory");

  NoiseModel noise = model;
  noise.reset();
  const std::size_t p = theta0.size();
  std::vector<double> theta(theta0.coords()), g(p), z(p);

  TrajectoryRecord rec;
  rec.run_id = rng.stream_id();
  rec.f_values.reserve(opts.horizon + 1);
  rec.dist_values.reserve(opts.horizon + 1);
  rec.etas.reserve(opts.horizon + 1);

  double f = obj.value_and_gradient(theta, g);
  for (std::size_t k = 0;; ++k) {
    const double dist = distance(theta, theta0);
    rec.f_values.push_back(f);
    rec.dist_values.push_back(dist);
    rec.etas.push_back(schedule.at(k));
    if (opts.record_thetas && k % opts.thin == 0) rec.thetas.emplace_back(std::span<const double>(theta));
    if (opts.snapshot_at == k) rec.snapshot.emplace(std::span<const double>(theta));
    if (!rec.event_alive_until && dist > opts.r) {
      rec.event_alive_until = k;
      rec.exit_class = dist > opts.R ? ExitClass::jump_beyond_R : ExitClass::annulus_entry;
    }
    if (k == opts.horizon || dist > opts.R) break;

    const double eta = rec.etas.back();
    const double zlen = noise.sample(f, rng, z);
    rec.noise_weighted_sum += zlen / static_cast<double>(k + 1);
    double step_sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double step = eta * (g[i] + z[i]);
      theta[i] -= step;
      step_sq += step * step;
    }
    if (rec.event_alive(k)) rec.path_length += std::sqrt(step_sq);
    for (std::size_t i = 0; i < p; ++i) {
      if (!std::isfinite(theta[i])) {
        throw NumericalError("run_trajectory: non-finite iterate at step " + std::to_string(k + 1) +
                             " (step size too large for the landscape?)");
      }
    }
    f = obj.value_and_gradient(theta, g);
    if (!std::isfinite(f)) {
      throw NumericalError("run_trajectory: non-finite loss at step " + std::to_string(k + 1));
    }
    rec.steps_taken = k + 1;
  }
  rec.final_theta = ParamVector(std::move(theta));
  return rec;
}

inline TrajectoryRecord run_trajectory(const Objective& obj, const NoiseModel& model,
                                       const StepSchedule& schedule, const ParamVector& theta0,
                                       double r, double R, std::size_t horizon, RngStream& rng,
                                       std::size_t thin = 1) {
  return run_trajectory(obj, model, schedule, theta0, TrajectoryOptions{r, R, horizon, thin, true, std::nullopt},
                        rng);
}

inline void write_trajectory_csv_header(std::ostream& os) {
  os << "run_id,k,f_value,dist,eta_k,event_alive\n";
}

inline void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
  for (std::size_t k = 0; k < rec.f_values.size(); ++k) {
    os << rec.run_id << ',' << k << ',' << format_number(rec.f_values[k]) << ','
       << format_number(rec.dist_values[k]) << ',' << format_number(rec.etas[k]) << ','
       << (rec.event_alive(k) ? 1 : 0) << '\n';
  }
}

}  // namespace lojsgd
