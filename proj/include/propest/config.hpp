#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

namespace propest {

/// A tunable constant. An empty value asks for the population-optimal choice.
using Coefficient = std::optional<double>;

inline constexpr Coefficient kOptimal = std::nullopt;

/// The usual sample proportion p.
struct UsualConfig {
  friend bool operator==(const UsualConfig&, const UsualConfig&) = default;
};

/// p * Xbar / xbar.
struct RatioConfig {
  friend bool operator==(const RatioConfig&, const RatioConfig&) = default;
};

/// p + h1 * (xbar / Xbar - 1); h1 defaults to the minimum-MSE slope.
struct RegressionConfig {
  Coefficient h1;
  friend bool operator==(const RegressionConfig&, const RegressionConfig&) = default;
};

/// [q1 p + q2 (Xbar - xbar)] * [(a Xbar + b) / (a xbar + b)]^alpha * exp(beta * contrast).
struct TcConfig {
  double a = 1.0;
  double b = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  Coefficient q1;
  Coefficient q2;
  friend bool operator==(const TcConfig&, const TcConfig&) = default;
};

/// p * (Xbar / xbar)^alpha * (Sx2 / sx2)^beta.
struct T1Config {
  Coefficient alpha;
  Coefficient beta;
  friend bool operator==(const T1Config&, const T1Config&) = default;
};

/// p + h1 (u - 1) + h2 (v - 1), u = xbar / Xbar, v = sx2 / Sx2.
struct T2Config {
  Coefficient h1;
  Coefficient h2;
  friend bool operator==(const T2Config&, const T2Config&) = default;
};

/// m1 p [Xbar / (gamma xbar + (1 - gamma) Xbar)]^g + m2 p exp(delta (Sx2 - sx2) / (Sx2 + sx2)).
struct T3Config {
  double gamma = 1.0;
  double g = 1.0;
  double delta = 1.0;
  Coefficient m1;
  Coefficient m2;
  friend bool operator==(const T3Config&, const T3Config&) = default;
};

using EstimatorConfig =
    std::variant<UsualConfig, RatioConfig, RegressionConfig, TcConfig, T1Config, T2Config, T3Config>;

namespace detail {

inline std::string fmt_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

/// Short identifier for reports and table headers.
inline std::string label(const EstimatorConfig& config) {
  struct Visitor {
    std::string operator()(const UsualConfig&) const { return "p"; }
    std::string operator()(const RatioConfig&) const { return "t_a"; }
    std::string operator()(const RegressionConfig&) const { return "t_b"; }
    std::string operator()(const TcConfig&) const { return "t_c"; }
    std::string operator()(const T1Config&) const { return "t1"; }
    std::string operator()(const T2Config&) const { return "t2"; }
    std::string operator()(const T3Config& c) const {
      return "t3(g=" + detail::fmt_number(c.g) + ",delta=" + detail::fmt_number(c.delta) + ")";
    }
  };
  return std::visit(Visitor{}, config);
}

/// True when every tunable in the configuration holds a number.
inline bool is_resolved(const EstimatorConfig& config) {
  struct Visitor {
    bool operator()(const UsualConfig&) const { return true; }
    bool operator()(const RatioConfig&) const { return true; }
    bool operator()(const RegressionConfig& c) const { return c.h1.has_value(); }
    bool operator()(const TcConfig& c) const { return c.q1 && c.q2; }
    bool operator()(const T1Config& c) const { return c.alpha && c.beta; }
    bool operator()(const T2Config& c) const { return c.h1 && c.h2; }
    bool operator()(const T3Config& c) const { return c.m1 && c.m2; }
  };
  return std::visit(Visitor{}, config);
}

}  // namespace propest
