#pragma once

// Experiment configuration: a flat "key = value" document with sections.
// One field registry drives both parsing and serialization, so
// parse_config(serialize_config(c)) == c holds for every valid config.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lojsgd/constants.hpp"
#include "lojsgd/core.hpp"
#include "lojsgd/io.hpp"
#include "lojsgd/landscapes.hpp"
#include "lojsgd/noise.hpp"
#include "lojsgd/sgd.hpp"

namespace lojsgd {

/// Invalid configuration. The message starts with the offending "section.key".
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class LandscapeKind { quadratic, chatterjee_net, deep_linear };

inline std::string_view to_string(LandscapeKind k) {
  switch (k) {
    case LandscapeKind::quadratic:
      return "quadratic";
    case LandscapeKind::chatterjee_net:
      return "chatterjee_net";
    case LandscapeKind::deep_linear:
      return "deep_linear";
  }
  return "quadratic";
}

inline std::optional<LandscapeKind> parse_landscape_kind(std::string_view s) {
  if (s == "quadratic") return LandscapeKind::quadratic;
  if (s == "chatterjee_net") return LandscapeKind::chatterjee_net;
  if (s == "deep_linear") return LandscapeKind::deep_linear;
  return std::nullopt;
}

inline std::string_view to_string(StepSchedule::Kind k) {
  return k == StepSchedule::Kind::constant ? "constant" : "robbins_monro";
}

inline std::optional<StepSchedule::Kind> parse_schedule_kind(std::string_view s) {
  if (s == "constant") return StepSchedule::Kind::constant;
  if (s == "robbins_monro") return StepSchedule::Kind::robbins_monro;
  return std::nullopt;
}

/// Quadratic: F = (a/2)|theta - theta*|^2 in `dim` dimensions with
/// theta* = theta0 + offset e_1. Networks: `widths` from input to the scalar
/// output, trained on make_certification_dataset(data_*).
struct LandscapeSpec {
  std::optional<LandscapeKind> kind;  // required by every command except chung
  std::size_t dim = 10;
  double scale = 1.0;
  double offset = 0.5;
  std::vector<std::size_t> widths{4, 3, 2, 1};
  std::size_t data_n = 3;
  double data_input_scale = 1.0;
  double data_perturbation = 0.05;
  double data_target_scale = 0.05;
  std::uint64_t data_seed = 11;

  bool operator==(const LandscapeSpec&) const = default;
};

/// theta0 is either listed explicitly or drawn by chatterjee_init; quadratic
/// landscapes default to the origin.
struct InitSpec {
  std::optional<std::vector<double>> theta0;
  std::optional<double> chatterjee_R;
  std::optional<double> chatterjee_A;
  std::uint64_t seed = 3;

  bool operator==(const InitSpec&) const = default;
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::ml_scaled;
  double sigma = 1.0;  // ml_scaled only
  ZKind z_kind = ZKind::sphere;
  double z_scale = 1.0;

  bool operator==(const NoiseSpec&) const = default;
};

/// Unset eta means eta*; unset n0 means the smallest admissible offset.
struct ScheduleSpec {
  StepSchedule::Kind kind = StepSchedule::Kind::constant;
  std::optional<double> eta;
  double gamma = 2.0;
  std::optional<double> n0;
  double q = 1.0;

  bool operator==(const ScheduleSpec&) const = default;
};

struct RunSpec {
  std::optional<double> r;  // unset: R - 1
  double R = 3.0;
  std::size_t horizon = 200;
  std::size_t n_runs = 100;
  std::uint64_t base_seed = 1;
  std::size_t thin = 1;
  std::string out_dir;

  double ball_radius() const { return r.value_or(R - 1.0); }
  bool operator==(const RunSpec&) const = default;
};

struct CertificateSpec {
  CertifyOptions options;
  std::uint64_t seed = 1;

  bool operator==(const CertificateSpec& o) const {
    const CertifyOptions& a = options;
    const CertifyOptions& b = o.options;
    return seed == o.seed && a.alpha_samples == b.alpha_samples &&
           a.refine_steps == b.refine_steps && a.clip_pairs == b.clip_pairs &&
           a.floor_samples == b.floor_samples && a.growth_points == b.growth_points &&
           a.safety == b.safety;
  }
};

struct ChecksSpec {
  double n_se = 3.0;
  std::optional<std::size_t> contraction_k_max;  // unset: horizon
  double path_delta = 0.1;
  double drift_factor = 10.0;
  double final_f_ratio = 1e-8;
  std::optional<double> decay_beta;  // unset: midpoint of (1, 1/rho)
  std::vector<double> survival_sweep;  // F(theta0) / M0 values, quadratic only
  std::optional<std::size_t> survival_horizon;  // unset: horizon
  double rate_slack = 1.5;
  std::optional<std::size_t> burn_in;  // unset: max(10 n0, K/10)
  double escape_min_fraction = 0.99;
  double escape_tolerance = 0.1;
  double chung_tolerance = 0.02;

  bool operator==(const ChecksSpec&) const = default;
};

struct ChungSpec {
  double c1 = 2.0;
  double c2 = 1.0;
  double q = 1.0;
  double p = 1.0;
  double n0 = 1.0;
  double b1 = 1.0;
  std::size_t k_max = 1'000'000;

  bool operator==(const ChungSpec&) const = default;
};

struct NetCertificateSpec {
  double alpha_tilde = 0.01;
  std::size_t points = 10'000;
  std::uint64_t seed = 5;
  double f0_tolerance = 1e-12;

  bool operator==(const NetCertificateSpec&) const = default;
};

struct ExperimentConfig {
  LandscapeSpec landscape;
  InitSpec init;
  NoiseSpec noise;
  ScheduleSpec schedule;
  RunSpec run;
  CertificateSpec certificate;
  ChecksSpec checks;
  ChungSpec chung;
  NetCertificateSpec net_certificate;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

[[noreturn]] inline void bad_value(const std::string& path, const std::string& expected,
                                   const std::string& got) {
  throw ConfigError(path + ": expected " + expected + ", got '" + got + "'");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

// Text conversions, one overload pair per field type.

inline std::string to_text(double v) { return format_number(v); }
inline void from_text(const std::string& path, const std::string& s, double& v) {
  const auto x = parse_number(s);
  if (!x || !std::isfinite(*x)) bad_value(path, "a finite number", s);
  v = *x;
}

inline std::string to_text(std::size_t v) { return std::to_string(v); }
inline void from_text(const std::string& path, const std::string& s, std::size_t& v) {
  const auto x = parse_unsigned(s);
  if (!x) bad_value(path, "a non-negative integer", s);
  v = static_cast<std::size_t>(*x);
}

inline std::string to_text(const std::string& v) { return v; }
inline void from_text(const std::string&, const std::string& s, std::string& v) { v = s; }

template <class T>
std::string to_text(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + to_text(v[i]);
  return out;
}
template <class T>
void from_text(const std::string& path, const std::string& s, std::vector<T>& v) {
  v.clear();
  if (s.empty()) return;
  for (const std::string& item : split_list(s)) {
    T x{};
    from_text(path, item, x);
    v.push_back(x);
  }
}

/// "auto" stands for an unset value that the command derives.
template <class T>
std::string to_text(const std::optional<T>& v) {
  return v ? to_text(*v) : "auto";
}
template <class T>
void from_text(const std::string& path, const std::string& s, std::optional<T>& v) {
  if (s == "auto") {
    v.reset();
    return;
  }
  T x{};
  from_text(path, s, x);
  v = x;
}

template <class E, class Parse>
void enum_from_text(const std::string& path, const std::string& s, E& v, Parse parse,
                    const char* choices) {
  const auto x = parse(s);
  if (!x) bad_value(path, std::string("one of ") + choices, s);
  v = *x;
}

inline std::string to_text(LandscapeKind v) { return std::string(to_string(v)); }
inline void from_text(const std::string& p, const std::string& s, LandscapeKind& v) {
  enum_from_text(p, s, v, parse_landscape_kind, "quadratic, chatterjee_net, deep_linear");
}
inline std::string to_text(NoiseKind v) { return std::string(to_string(v)); }
inline void from_text(const std::string& p, const std::string& s, NoiseKind& v) {
  enum_from_text(p, s, v, parse_noise_kind, "ml_scaled, bounded_iid, adversarial_rotated");
}
inline std::string to_text(ZKind v) { return std::string(to_string(v)); }
inline void from_text(const std::string& p, const std::string& s, ZKind& v) {
  enum_from_text(p, s, v, parse_zkind, "sphere, gaussian");
}
inline std::string to_text(StepSchedule::Kind v) { return std::string(to_string(v)); }
inline void from_text(const std::string& p, const std::string& s, StepSchedule::Kind& v) {
  enum_from_text(p, s, v, parse_schedule_kind, "constant, robbins_monro");
}

struct Field {
  std::string section;
  std::string key;
  // nullopt: the key is omitted from serialized output.
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;

  std::string path() const { return section + "." + key; }
};

// `access` is a generic lambda returning a reference to the member, so one
// accessor serves both the const getter and the mutating setter.
template <class Access>
Field field(std::string section, std::string key, Access access) {
  const std::string path = section + "." + key;
  return Field{std::move(section), std::move(key),
               [access](const ExperimentConfig& c) -> std::optional<std::string> {
                 return to_text(access(const_cast<ExperimentConfig&>(c)));
               },
               [access, path](ExperimentConfig& c, const std::string& s) {
                 from_text(path, s, access(c));
               }};
}

// For optional members whose absence means "not given" rather than "auto".
template <class Access>
Field present_field(std::string section, std::string key, Access access) {
  const std::string path = section + "." + key;
  return Field{std::move(section), std::move(key),
               [access](const ExperimentConfig& c) -> std::optional<std::string> {
                 const auto& v = access(const_cast<ExperimentConfig&>(c));
                 if (!v) return std::nullopt;
                 return to_text(*v);
               },
               [access, path](ExperimentConfig& c, const std::string& s) {
                 auto& v = access(c);
                 v.emplace();
                 from_text(path, s, *v);
               }};
}

#define LOJSGD_FIELD(sec, key, member) \
  field(sec, key, [](ExperimentConfig& c) -> auto& { return c.member; })
#define LOJSGD_PRESENT_FIELD(sec, key, member) \
  present_field(sec, key, [](ExperimentConfig& c) -> auto& { return c.member; })

inline const std::vector<Field>& registry() {
  static const std::vector<Field> fields = {
      LOJSGD_PRESENT_FIELD("landscape", "kind", landscape.kind),
      LOJSGD_FIELD("landscape", "dim", landscape.dim),
      LOJSGD_FIELD("landscape", "scale", landscape.scale),
      LOJSGD_FIELD("landscape", "offset", landscape.offset),
      LOJSGD_FIELD("landscape", "widths", landscape.widths),
      LOJSGD_FIELD("landscape", "data_n", landscape.data_n),
      LOJSGD_FIELD("landscape", "data_input_scale", landscape.data_input_scale),
      LOJSGD_FIELD("landscape", "data_perturbation", landscape.data_perturbation),
      LOJSGD_FIELD("landscape", "data_target_scale", landscape.data_target_scale),
      LOJSGD_FIELD("landscape", "data_seed", landscape.data_seed),

      LOJSGD_PRESENT_FIELD("init", "theta0", init.theta0),
      LOJSGD_PRESENT_FIELD("init", "chatterjee_R", init.chatterjee_R),
      LOJSGD_PRESENT_FIELD("init", "chatterjee_A", init.chatterjee_A),
      LOJSGD_FIELD("init", "seed", init.seed),

      LOJSGD_FIELD("noise", "kind", noise.kind),
      LOJSGD_FIELD("noise", "sigma", noise.sigma),
      LOJSGD_FIELD("noise", "z_kind", noise.z_kind),
      LOJSGD_FIELD("noise", "z_scale", noise.z_scale),

      LOJSGD_FIELD("schedule", "kind", schedule.kind),
      LOJSGD_FIELD("schedule", "eta", schedule.eta),
      LOJSGD_FIELD("schedule", "gamma", schedule.gamma),
      LOJSGD_FIELD("schedule", "n0", schedule.n0),
      LOJSGD_FIELD("schedule", "q", schedule.q),

      LOJSGD_FIELD("run", "r", run.r),
      LOJSGD_FIELD("run", "R", run.R),
      LOJSGD_FIELD("run", "horizon", run.horizon),
      LOJSGD_FIELD("run", "n_runs", run.n_runs),
      LOJSGD_FIELD("run", "base_seed", run.base_seed),
      LOJSGD_FIELD("run", "thin", run.thin),
      LOJSGD_FIELD("run", "out_dir", run.out_dir),

      LOJSGD_FIELD("certificate", "alpha_samples", certificate.options.alpha_samples),
      LOJSGD_FIELD("certificate", "refine_steps", certificate.options.refine_steps),
      LOJSGD_FIELD("certificate", "clip_pairs", certificate.options.clip_pairs),
      LOJSGD_FIELD("certificate", "floor_samples", certificate.options.floor_samples),
      LOJSGD_FIELD("certificate", "growth_points", certificate.options.growth_points),
      LOJSGD_FIELD("certificate", "safety", certificate.options.safety),
      LOJSGD_FIELD("certificate", "seed", certificate.seed),

      LOJSGD_FIELD("checks", "n_se", checks.n_se),
      LOJSGD_FIELD("checks", "contraction_k_max", checks.contraction_k_max),
      LOJSGD_FIELD("checks", "path_delta", checks.path_delta),
      LOJSGD_FIELD("checks", "drift_factor", checks.drift_factor),
      LOJSGD_FIELD("checks", "final_f_ratio", checks.final_f_ratio),
      LOJSGD_FIELD("checks", "decay_beta", checks.decay_beta),
      LOJSGD_FIELD("checks", "survival_sweep", checks.survival_sweep),
      LOJSGD_FIELD("checks", "survival_horizon", checks.survival_horizon),
      LOJSGD_FIELD("checks", "rate_slack", checks.rate_slack),
      LOJSGD_FIELD("checks", "burn_in", checks.burn_in),
      LOJSGD_FIELD("checks", "escape_min_fraction", checks.escape_min_fraction),
      LOJSGD_FIELD("checks", "escape_tolerance", checks.escape_tolerance),
      LOJSGD_FIELD("checks", "chung_tolerance", checks.chung_tolerance),

      LOJSGD_FIELD("chung", "c1", chung.c1),
      LOJSGD_FIELD("chung", "c2", chung.c2),
      LOJSGD_FIELD("chung", "q", chung.q),
      LOJSGD_FIELD("chung", "p", chung.p),
      LOJSGD_FIELD("chung", "n0", chung.n0),
      LOJSGD_FIELD("chung", "b1", chung.b1),
      LOJSGD_FIELD("chung", "k_max", chung.k_max),

      LOJSGD_FIELD("net_certificate", "alpha_tilde", net_certificate.alpha_tilde),
      LOJSGD_FIELD("net_certificate", "points", net_certificate.points),
      LOJSGD_FIELD("net_certificate", "seed", net_certificate.seed),
      LOJSGD_FIELD("net_certificate", "f0_tolerance", net_certificate.f0_tolerance),
  };
  return fields;
}

#undef LOJSGD_FIELD
#undef LOJSGD_PRESENT_FIELD

inline void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path + ": " + what);
}

}  // namespace detail

inline bool is_network(LandscapeKind k) { return k != LandscapeKind::quadratic; }

/// Parameter count of the configured landscape.
inline std::size_t landscape_dim(const LandscapeSpec& l) {
  if (!l.kind || *l.kind == LandscapeKind::quadratic) return l.dim;
  std::size_t p = 0;
  for (std::size_t i = 1; i < l.widths.size(); ++i) p += l.widths[i] * (l.widths[i - 1] + 1);
  return p;
}

/// Every cross-field rule. Each error names the key it blames.
inline void validate_config(const ExperimentConfig& c) {
  using detail::check;
  const LandscapeSpec& l = c.landscape;
  check(l.dim >= 1, "landscape.dim", "must be at least 1");
  check(l.scale > 0.0, "landscape.scale", "must be positive");
  check(l.widths.size() >= 3, "landscape.widths", "need at least input, one hidden and output width");
  for (std::size_t w : l.widths) check(w >= 1, "landscape.widths", "widths must be positive");
  check(l.widths.back() == 1, "landscape.widths", "the output width must be 1");
  check(l.data_n >= 1, "landscape.data_n", "must be at least 1");
  check(l.data_n <= l.widths.front(), "landscape.data_n", "must not exceed the input width");
  check(l.data_input_scale > 0.0, "landscape.data_input_scale", "must be positive");
  check(l.data_perturbation >= 0.0, "landscape.data_perturbation", "must be >= 0");

  const InitSpec& i = c.init;
  const bool chatterjee = i.chatterjee_R || i.chatterjee_A;
  check(!(i.theta0 && chatterjee), "init.theta0",
        "explicit theta0 and chatterjee_R/chatterjee_A are mutually exclusive");
  if (chatterjee) {
    check(i.chatterjee_R.has_value(), "init.chatterjee_R", "required together with chatterjee_A");
    check(i.chatterjee_A.has_value(), "init.chatterjee_A", "required together with chatterjee_R");
    check(*i.chatterjee_R > 0.0, "init.chatterjee_R", "must be positive");
    check(*i.chatterjee_A > *i.chatterjee_R / 2.0, "init.chatterjee_A", "must exceed chatterjee_R / 2");
  }
  if (l.kind) {
    if (*l.kind == LandscapeKind::quadratic) {
      check(!chatterjee, "init.chatterjee_R", "chatterjee_init applies to network landscapes only");
    } else {
      check(i.theta0 || chatterjee, "init.theta0",
            "network landscapes need theta0 or chatterjee_R/chatterjee_A");
    }
    if (i.theta0) {
      check(i.theta0->size() == landscape_dim(l), "init.theta0",
            "expected " + std::to_string(landscape_dim(l)) + " coordinates, got " +
                std::to_string(i.theta0->size()));
    }
  }

  const NoiseSpec& n = c.noise;
  check(n.sigma >= 0.0, "noise.sigma", "must be >= 0");
  check(n.z_scale > 0.0, "noise.z_scale", "must be positive");

  const ScheduleSpec& s = c.schedule;
  check(!s.eta || *s.eta >= 0.0, "schedule.eta", "must be >= 0");
  check(s.gamma > 0.0, "schedule.gamma", "must be positive");
  check(!s.n0 || *s.n0 > 0.0, "schedule.n0", "must be positive");
  check(rm_exponent_ok(s.q), "schedule.q", "q must lie in (1/2, 1]");

  const RunSpec& r = c.run;
  check(r.R > 0.0, "run.R", "must be positive");
  check(r.ball_radius() > 0.0 && r.ball_radius() <= r.R, "run.r",
        "need 0 < r <= R (r defaults to R - 1)");
  check(r.horizon >= 1, "run.horizon", "must be at least 1");
  check(r.n_runs >= 1, "run.n_runs", "must be at least 1");
  check(r.thin >= 1, "run.thin", "must be at least 1");

  const CertifyOptions& o = c.certificate.options;
  check(o.alpha_samples >= 1, "certificate.alpha_samples", "must be at least 1");
  check(o.clip_pairs >= 1, "certificate.clip_pairs", "must be at least 1");
  check(o.floor_samples >= 1, "certificate.floor_samples", "must be at least 1");
  check(o.safety >= 1.0, "certificate.safety", "must be >= 1");

  const ChecksSpec& k = c.checks;
  check(k.n_se >= 0.0, "checks.n_se", "must be >= 0");
  check(k.path_delta > 0.0 && k.path_delta <= 1.0, "checks.path_delta", "must lie in (0, 1]");
  check(k.drift_factor > 0.0, "checks.drift_factor", "must be positive");
  check(k.final_f_ratio > 0.0, "checks.final_f_ratio", "must be positive");
  for (double f : k.survival_sweep) {
    check(f > 0.0 && f < 1.0, "checks.survival_sweep", "entries must lie in (0, 1)");
  }
  check(!k.survival_horizon || *k.survival_horizon >= 1, "checks.survival_horizon",
        "must be at least 1");
  check(k.rate_slack > 0.0, "checks.rate_slack", "must be positive");
  check(!k.burn_in || *k.burn_in >= 1, "checks.burn_in", "must be at least 1");
  check(k.escape_min_fraction >= 0.0 && k.escape_min_fraction <= 1.0,
        "checks.escape_min_fraction", "must lie in [0, 1]");
  check(k.escape_tolerance > 0.0, "checks.escape_tolerance", "must be positive");
  check(k.chung_tolerance > 0.0, "checks.chung_tolerance", "must be positive");

  const ChungSpec& g = c.chung;
  check(g.c1 > 0.0, "chung.c1", "must be positive");
  check(g.c2 >= 0.0, "chung.c2", "must be >= 0");
  check(g.q > 0.0 && g.q <= 1.0, "chung.q", "must lie in (0, 1]");
  check(g.p > 0.0, "chung.p", "must be positive");
  check(g.q != 1.0 || g.c1 > g.p, "chung.c1", "q = 1 requires c1 > p");
  check(g.n0 > 0.0, "chung.n0", "must be positive");
  check(g.b1 >= 0.0, "chung.b1", "must be >= 0");
  check(g.k_max >= 200, "chung.k_max", "must be at least 200");

  const NetCertificateSpec& a = c.net_certificate;
  check(a.alpha_tilde > 0.0, "net_certificate.alpha_tilde", "must be positive");
  check(a.points >= 1, "net_certificate.points", "must be at least 1");
  check(a.f0_tolerance > 0.0, "net_certificate.f0_tolerance", "must be positive");
}

/// Parses and validates. Unknown sections or keys, duplicate keys and
/// malformed values are errors; absent keys take the documented defaults.
inline ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  const auto& fields = detail::registry();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section + ": key outside of any section");
    bool known_section = false;
    for (const detail::Field& f : fields) known_section = known_section || f.section == section;
    if (!known_section) throw ConfigError(section + ": unknown section");
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      const detail::Field* match = nullptr;
      for (const detail::Field& f : fields) {
        if (f.section == section && f.key == key) match = &f;
      }
      if (!match) throw ConfigError(path + ": unknown key");
      match->set(cfg, value.data());
    }
  }
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Every field, defaults included, in registry order.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string current;
  for (const detail::Field& f : detail::registry()) {
    const auto value = f.get(cfg);
    if (!value) continue;
    if (f.section != current) {
      out += (out.empty() ? "[" : "\n[") + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + *value + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Building the configured objects
// ---------------------------------------------------------------------------

inline NetSpec net_spec(const LandscapeSpec& l) {
  const Activation act =
      l.kind == LandscapeKind::deep_linear ? Activation::identity : Activation::shifted_tanh;
  return NetSpec::make(l.widths, act);
}

inline Dataset dataset(const LandscapeSpec& l) {
  RngStream rng(l.data_seed, 0);
  return make_certification_dataset(l.data_n, l.widths.front(), l.data_input_scale,
                                    l.data_perturbation, l.data_target_scale, rng);
}

inline ParamVector initial_point(const ExperimentConfig& c) {
  if (c.init.theta0) return ParamVector(*c.init.theta0);
  if (c.init.chatterjee_R) {
    RngStream rng(c.init.seed, 0);
    return chatterjee_init(net_spec(c.landscape), *c.init.chatterjee_R, *c.init.chatterjee_A, rng);
  }
  return ParamVector(landscape_dim(c.landscape));
}

/// Requires landscape.kind to be set.
inline std::shared_ptr<const Objective> make_objective(const ExperimentConfig& c,
                                                       const ParamVector& theta0) {
  if (!c.landscape.kind) throw ConfigError("landscape.kind: required for this command");
  if (*c.landscape.kind == LandscapeKind::quadratic) {
    std::vector<double> center(theta0.coords());
    center[0] += c.landscape.offset;
    return std::make_shared<QuadraticWell>(ParamVector(std::move(center)), c.landscape.scale);
  }
  return std::make_shared<NetObjective>(net_spec(c.landscape), dataset(c.landscape));
}

inline NoiseModel make_noise(const NoiseSpec& n, std::size_t dim) {
  switch (n.kind) {
    case NoiseKind::ml_scaled:
      return NoiseModel::ml_scaled(n.sigma);
    case NoiseKind::bounded_iid:
      return NoiseModel::bounded_iid(ZDist(n.z_kind, dim, n.z_scale));
    case NoiseKind::adversarial_rotated:
      return NoiseModel::adversarial_rotated(ZDist(n.z_kind, dim, n.z_scale));
  }
  return NoiseModel::ml_scaled(n.sigma);
}

/// Resolves "auto" from the certified constants.
inline StepSchedule make_schedule(const ScheduleSpec& s, const LandscapeCertificate& cert) {
  if (s.kind == StepSchedule::Kind::constant) return StepSchedule::constant(s.eta.value_or(cert.eta_star));
  const double n0 = s.n0.value_or(rm_parameters(cert.alpha, cert.c_lip, s.gamma, s.q));
  return StepSchedule::robbins_monro(s.gamma, n0, s.q);
}

}  // namespace lojsgd
