#pragma once

// Concrete objectives: the quadratic well with closed-form constants, and the
// feedforward regression network of the landscape certificate together with
// its restricted parameter subspace.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lojsgd/core.hpp"

namespace lojsgd {

/// F(theta) = (a/2)|theta - center|^2. Every landscape constant is known:
/// alpha = 2a on any ball, C_L = a, and the shell floor is a distance to a set.
class QuadraticWell final : public Objective {
 public:
  QuadraticWell(ParamVector center, double scale) : center_(std::move(center)), scale_(scale) {
    require(scale > 0.0, "QuadraticWell: curvature must be positive");
    require(center_.size() > 0, "QuadraticWell: dimension must be positive");
  }

  std::size_t dim() const override { return center_.size(); }
  const ParamVector& center() const noexcept { return center_; }
  double scale() const noexcept { return scale_; }

  std::optional<KnownConstants> known_constants() const override {
    return KnownConstants{2.0 * scale_, scale_};
  }

  std::optional<double> known_shell_floor(std::span<const double> theta0,
                                          double R) const override {
    const double s = distance(center_, theta0);
    double gap = 0.0;
    if (s < R - 1.0) {
      gap = R - 1.0 - s;
    } else if (s > R) {
      gap = s - R;
    }
    return 0.5 * scale_ * gap * gap;
  }

 private:
  double eval_value(std::span<const double> theta) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double d = theta[i] - center_[i];
      s += d * d;
    }
    return 0.5 * scale_ * s;
  }

  void eval_gradient(std::span<const double> theta, std::span<double> out) const override {
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = scale_ * (theta[i] - center_[i]);
  }

  ParamVector center_;
  double scale_;
};

// ---------------------------------------------------------------------------
// Feedforward network
// ---------------------------------------------------------------------------

enum class Activation {
  shifted_tanh,  // x + tanh(x)/2: zero at zero, slope in (1, 1.5]
  identity,
};

inline double activate(Activation act, double x) {
  switch (act) {
    case Activation::shifted_tanh:
      return x + 0.5 * std::tanh(x);
    case Activation::identity:
      return x;
  }
  return x;
}

inline double activate_slope(Activation act, double x) {
  switch (act) {
    case Activation::shifted_tanh: {
      const double t = std::tanh(x);
      return 1.0 + 0.5 * (1.0 - t * t);
    }
    case Activation::identity:
      return 1.0;
  }
  return 1.0;
}

/// Infimum of the slope over the real line (c_l in the lower bound).
inline double slope_infimum(Activation act) {
  switch (act) {
    case Activation::shifted_tanh:
    case Activation::identity:
      return 1.0;
  }
  return 1.0;
}

inline std::string_view to_string(Activation act) {
  return act == Activation::identity ? "identity" : "shifted_tanh";
}

inline std::optional<Activation> parse_activation(std::string_view name) {
  if (name == "shifted_tanh") return Activation::shifted_tanh;
  if (name == "identity") return Activation::identity;
  return std::nullopt;
}

/// Layer widths d_0..d_L (d_L = 1) and one activation per hidden layer; the
/// output layer is linear.
///
/// Parameters are flattened layer by layer, W_l before b_l, and W_l row-major
/// (d_l rows, d_{l-1} columns).
struct NetSpec {
  std::vector<std::size_t> widths;
  std::vector<Activation> hidden;

  static NetSpec make(std::vector<std::size_t> widths, Activation act) {
    NetSpec net;
    net.widths = std::move(widths);
    if (net.widths.size() >= 2) net.hidden.assign(net.widths.size() - 2, act);
    net.validate();
    return net;
  }

  std::size_t depth() const noexcept { return widths.size() - 1; }
  std::size_t input_dim() const noexcept { return widths.front(); }

  std::size_t param_count() const {
    std::size_t p = 0;
    for (std::size_t l = 1; l < widths.size(); ++l) p += widths[l] * (widths[l - 1] + 1);
    return p;
  }

  /// Offset of W_l (1-based layer index).
  std::size_t weight_offset(std::size_t l) const {
    std::size_t off = 0;
    for (std::size_t m = 1; m < l; ++m) off += widths[m] * (widths[m - 1] + 1);
    return off;
  }

  std::size_t bias_offset(std::size_t l) const {
    return weight_offset(l) + widths[l] * widths[l - 1];
  }

  void validate() const {
    require(widths.size() >= 3, "NetSpec: depth L must be at least 2");
    for (std::size_t w : widths) require(w > 0, "NetSpec: widths must be positive");
    require(widths.back() == 1, "NetSpec: output width d_L must be 1");
    require(hidden.size() == widths.size() - 2,
            "NetSpec: need one activation per hidden layer");
  }

  bool operator==(const NetSpec&) const = default;
};

/// Regression data with linearly independent inputs (so d >= n).
struct Dataset {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;

  std::size_t size() const noexcept { return targets.size(); }
  std::size_t input_dim() const noexcept { return inputs.empty() ? 0 : inputs.front().size(); }

  /// Smallest eigenvalue of the Gram matrix X^T X / n.
  double lambda0() const {
    const auto n = static_cast<Eigen::Index>(size());
    const auto d = static_cast<Eigen::Index>(input_dim());
    Eigen::MatrixXd x(d, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) x(k, i) = inputs[i][k];
    }
    const Eigen::MatrixXd gram = (x.transpose() * x) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  double mean_square_target() const {
    double s = 0.0;
    for (double y : targets) s += y * y;
    return s / static_cast<double>(size());
  }

  void validate() const {
    require(!targets.empty(), "Dataset: need at least one sample");
    require(inputs.size() == targets.size(), "Dataset: inputs and targets differ in length");
    for (const auto& x : inputs) {
      require(x.size() == input_dim(), "Dataset: ragged inputs");
      for (double v : x) require(std::isfinite(v), "Dataset: non-finite input");
    }
    require(input_dim() >= size(), "Dataset: input dimension must be at least the sample count");
    require(lambda0() > 1e-12, "Dataset: inputs are not linearly independent");
  }
};

/// n samples in R^d: x_i = s*e_i plus a small strictly positive perturbation,
/// targets uniform in [0, target_scale].
inline Dataset make_certification_dataset(std::size_t n, std::size_t d, double input_scale,
                                          double perturbation, double target_scale,
                                          RngStream& rng) {
  require(d >= n && n > 0, "make_certification_dataset: need d >= n > 0");
  require(input_scale > 0.0, "make_certification_dataset: input_scale must be positive");
  require(perturbation >= 0.0, "make_certification_dataset: perturbation must be >= 0");
  Dataset data;
  data.inputs.assign(n, std::vector<double>(d, 0.0));
  data.targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      // (0, 1] so the perturbation is strictly positive whenever requested
      const double u = 1.0 - rng.uniform();
      data.inputs[i][k] = perturbation * u + (k == i ? input_scale : 0.0);
    }
  }
  for (std::size_t i = 0; i < n; ++i) data.targets[i] = target_scale * rng.uniform();
  data.validate();
  return data;
}

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMatrix> weights(const NetSpec& net, std::span<const double> theta,
                                           std::size_t l) {
  return {theta.data() + net.weight_offset(l), static_cast<Eigen::Index>(net.widths[l]),
          static_cast<Eigen::Index>(net.widths[l - 1])};
}

inline Eigen::Map<const Eigen::VectorXd> biases(const NetSpec& net,
                                                std::span<const double> theta, std::size_t l) {
  return {theta.data() + net.bias_offset(l), static_cast<Eigen::Index>(net.widths[l])};
}

}  // namespace detail

/// phi(x, theta): alternating affine maps and activations, linear output.
inline double net_output(const NetSpec& net, std::span<const double> theta,
                         std::span<const double> x) {
  check_same_dim(theta.size(), net.param_count(), "net_output");
  check_same_dim(x.size(), net.input_dim(), "net_output");
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const std::size_t L = net.depth();
  for (std::size_t l = 1; l <= L; ++l) {
    Eigen::VectorXd z = detail::weights(net, theta, l) * a + detail::biases(net, theta, l);
    if (l < L) {
      const Activation act = net.hidden[l - 1];
      a = z.unaryExpr([act](double v) { return activate(act, v); });
    } else {
      a = std::move(z);
    }
  }
  return a(0);
}

/// Mean squared error of the network over a dataset, with reverse-mode gradient.
class NetObjective final : public Objective {
 public:
  NetObjective(NetSpec net, Dataset data) : net_(std::move(net)), data_(std::move(data)) {
    net_.validate();
    data_.validate();
    check_same_dim(data_.input_dim(), net_.input_dim(), "NetObjective");
  }

  std::size_t dim() const override { return net_.param_count(); }
  const NetSpec& net() const noexcept { return net_; }
  const Dataset& data() const noexcept { return data_; }

 private:
  double eval_value(std::span<const double> theta) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double r = data_.targets[i] - net_output(net_, theta, data_.inputs[i]);
      s += r * r;
    }
    return s / static_cast<double>(data_.size());
  }

  void eval_gradient(std::span<const double> theta, std::span<double> out) const override {
    eval_value_and_gradient(theta, out);
  }

  double eval_value_and_gradient(std::span<const double> theta,
                                 std::span<double> out) const override {
    const std::size_t L = net_.depth();
    const double n = static_cast<double>(data_.size());
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<Eigen::VectorXd> pre(L + 1);
    std::vector<Eigen::VectorXd> act(L + 1);
    double loss = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto& x = data_.inputs[i];
      act[0] = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
      for (std::size_t l = 1; l <= L; ++l) {
        pre[l] = detail::weights(net_, theta, l) * act[l - 1] + detail::biases(net_, theta, l);
        if (l < L) {
          const Activation a = net_.hidden[l - 1];
          act[l] = pre[l].unaryExpr([a](double v) { return activate(a, v); });
        } else {
          act[l] = pre[l];
        }
      }
      const double residual = act[L](0) - data_.targets[i];
      loss += residual * residual;

      Eigen::VectorXd delta = Eigen::VectorXd::Constant(1, 2.0 * residual / n);
      for (std::size_t l = L; l >= 1; --l) {
        Eigen::Map<detail::RowMatrix> gw(out.data() + net_.weight_offset(l),
                                         static_cast<Eigen::Index>(net_.widths[l]),
                                         static_cast<Eigen::Index>(net_.widths[l - 1]));
        Eigen::Map<Eigen::VectorXd> gb(out.data() + net_.bias_offset(l),
                                       static_cast<Eigen::Index>(net_.widths[l]));
        gw.noalias() += delta * act[l - 1].transpose();
        gb += delta;
        if (l > 1) {
          const Activation a = net_.hidden[l - 2];
          Eigen::VectorXd back = detail::weights(net_, theta, l).transpose() * delta;
          delta = back.cwiseProduct(
              pre[l - 1].unaryExpr([a](double v) { return activate_slope(a, v); }));
        }
      }
    }
    return loss / n;
  }

  NetSpec net_;
  Dataset data_;
};

inline double net_loss(const NetSpec& net, const Dataset& data, std::span<const double> theta) {
  check_same_dim(theta.size(), net.param_count(), "net_loss");
  return NetObjective(net, data).value(theta);
}

inline ParamVector net_gradient(const NetSpec& net, const Dataset& data,
                                std::span<const double> theta) {
  check_same_dim(theta.size(), net.param_count(), "net_gradient");
  return NetObjective(net, data).gradient(theta);
}

/// Initialization with zero first layer and zero biases, so phi(x, theta0) = 0
/// for every input. Middle weights are uniform in [R, 2R], output weights in
/// [A, 2A].
inline ParamVector chatterjee_init(const NetSpec& net, double R, double A, RngStream& rng) {
  net.validate();
  require(R > 0.0 && A > R / 2.0, "chatterjee_init: need A > R/2 > 0");
  std::vector<double> theta(net.param_count(), 0.0);
  const std::size_t L = net.depth();
  for (std::size_t l = 2; l <= L; ++l) {
    const double lo = (l == L) ? A : R;
    const std::size_t off = net.weight_offset(l);
    const std::size_t count = net.widths[l] * net.widths[l - 1];
    for (std::size_t k = 0; k < count; ++k) theta[off + k] = rng.uniform(lo, 2.0 * lo);
  }
  return ParamVector(std::move(theta));
}

/// Right side of the network lower bound at distance `dist` from the anchor:
/// (at^2/2)(A-R/2)^2 (R/2)^(2L-4) (c_{L-1}..c_1 d_{L-1}..d_1)^2 dist^2 - mean(y^2).
inline double net_lower_bound(const NetSpec& net, double alpha_tilde, double R, double A,
                              double dist, double mean_square_target) {
  const std::size_t L = net.depth();
  double chain = 1.0;
  for (std::size_t l = 1; l < L; ++l) {
    chain *= slope_infimum(net.hidden[l - 1]) * static_cast<double>(net.widths[l]);
  }
  const double half_r = R / 2.0;
  const double coeff = 0.5 * alpha_tilde * alpha_tilde * (A - half_r) * (A - half_r) *
                       std::pow(half_r, 2.0 * static_cast<double>(L) - 4.0) * chain * chain;
  return coeff * dist * dist - mean_square_target;
}

/// Parameters whose first-layer pre-activations stay above alpha_tilde times
/// the distance to the anchor, with non-negative biases beyond layer 1.
struct ThetaSubspace {
  NetSpec net;
  Dataset data;
  ParamVector anchor;
  double alpha_tilde = 0.01;
};

inline bool theta_membership(const ThetaSubspace& sub, std::span<const double> theta) {
  const NetSpec& net = sub.net;
  check_same_dim(theta.size(), net.param_count(), "theta_membership");
  const double threshold = sub.alpha_tilde * distance(theta, sub.anchor);
  const auto w1 = detail::weights(net, theta, 1);
  const auto b1 = detail::biases(net, theta, 1);
  for (const auto& x : sub.data.inputs) {
    const Eigen::VectorXd z =
        w1 * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) + b1;
    if ((z.array() < threshold).any()) return false;
  }
  for (std::size_t l = 2; l <= net.depth(); ++l) {
    if ((detail::biases(net, theta, l).array() < 0.0).any()) return false;
  }
  return true;
}

struct ThetaSample {
  std::vector<ParamVector> points;
  std::size_t proposals = 0;
  double acceptance_rate = 0.0;
};

inline constexpr std::size_t kThetaProbeProposals = 1'000'000;
inline constexpr double kThetaMinAcceptance = 1e-4;

/// Rejection sampling from the uniform distribution on B(anchor, radius),
/// keeping proposals that lie in the subspace.
inline ThetaSample sample_in_theta(const ThetaSubspace& sub, double radius, std::size_t count,
                                   RngStream& rng) {
  require(radius > 0.0, "sample_in_theta: radius must be positive");
  ThetaSample out;
  std::vector<double> proposal(sub.anchor.size());
  while (out.points.size() < count) {
    sample_in_ball(rng, sub.anchor, radius, proposal);
    ++out.proposals;
    if (theta_membership(sub, proposal)) out.points.emplace_back(std::span<const double>(proposal));
    if (out.proposals >= kThetaProbeProposals &&
        static_cast<double>(out.points.size()) <
            kThetaMinAcceptance * static_cast<double>(out.proposals)) {
      throw NumericalError("sample_in_theta: acceptance rate below 1e-4 after " +
                           std::to_string(out.proposals) +
                           " proposals; use a smaller alpha_tilde");
    }
  }
  out.acceptance_rate = out.proposals == 0 ? 0.0
                                           : static_cast<double>(out.points.size()) /
                                                 static_cast<double>(out.proposals);
  return out;
}

}  // namespace lojsgd
