#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "propest/config.hpp"
#include "propest/error.hpp"
#include "propest/population.hpp"

namespace propest {

// First-order (Taylor) bias and MSE of every estimator, the constants that
// minimise the MSE quadratics, and percent relative efficiency. All MSEs
// are in squared proportion units; f is the design factor 1/n - 1/N.

namespace detail {

inline void require_f(double f) {
  if (!(f >= 0.0) || !std::isfinite(f)) {
    throw Error(Errc::InvalidDesign, "design factor f must be finite and >= 0");
  }
}

inline void require_cx(const PopulationParams& pop) {
  if (!(pop.cx > 0.0)) throw Error(Errc::DegenerateAuxiliary, "C_x must be positive");
}

/// lambda04 - 1 - lambda03^2, non-negative for any real distribution.
inline double pearson_gap(const PopulationParams& pop) {
  return pop.lambda04 - 1.0 - pop.lambda03 * pop.lambda03;
}

inline double require_pearson_gap(const PopulationParams& pop) {
  const double gap = pearson_gap(pop);
  if (!(gap > 0.0)) {
    throw Error(Errc::DegenerateMoments,
                "lambda04 - 1 - lambda03^2 = " + std::to_string(gap) + " must be positive");
  }
  return gap;
}

/// Rejects negative MSEs beyond rounding; clamps rounding-level negatives to 0.
inline double checked_mse(double mse, double scale, const char* what) {
  if (!std::isfinite(mse)) throw Error(Errc::NegativeMse, std::string(what) + " is not finite");
  if (mse < -1e-12 * scale) {
    throw Error(Errc::NegativeMse, std::string(what) + " evaluates to " + std::to_string(mse));
  }
  return mse < 0.0 ? 0.0 : mse;
}

inline bool near_singular(double det, double scale) { return !(std::abs(det) > 1e-12 * scale); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Usual estimator and ratio estimator

inline double var_usual(const PopulationParams& pop, double f) {
  detail::require_f(f);
  return f * pop.P * pop.P * pop.cp * pop.cp;
}

inline double mse_ta(const PopulationParams& pop, double f) {
  detail::require_f(f);
  return f * pop.P * pop.P *
         (pop.cp * pop.cp + pop.cx * pop.cx - 2.0 * pop.rho_pb * pop.cp * pop.cx);
}

/// Classical ratio-estimator bias, f P (C_x^2 - rho C_p C_x).
inline double bias_ta(const PopulationParams& pop, double f) {
  detail::require_f(f);
  return f * pop.P * (pop.cx * pop.cx - pop.rho_pb * pop.cp * pop.cx);
}

// ---------------------------------------------------------------------------
// Regression class: linear member p + h1 (u - 1)

inline double tb_optimal_h1(const PopulationParams& pop) {
  detail::require_cx(pop);
  return -pop.P * pop.rho_pb * pop.cp / pop.cx;
}

inline double tb_mse(const PopulationParams& pop, double f, double h1) {
  detail::require_f(f);
  return f * (pop.P * pop.P * pop.cp * pop.cp + h1 * h1 * pop.cx * pop.cx +
              2.0 * pop.P * h1 * pop.rho_pb * pop.cp * pop.cx);
}

inline double min_mse_tb(const PopulationParams& pop, double f) {
  detail::require_cx(pop);
  return var_usual(pop, f) * (1.0 - pop.rho_pb * pop.rho_pb);
}

/// Class bias as a function of the second-order derivatives of H at (P, 1).
inline double class_bias_tb(const PopulationParams& pop, double f, double h2, double h3, double h4) {
  detail::require_f(f);
  return f * (pop.P * pop.rho_pb * pop.cp * pop.cx * h3 + pop.cx * pop.cx * h2 +
              pop.P * pop.P * pop.cp * pop.cp * h4);
}

// ---------------------------------------------------------------------------
// Family t_c

/// Expansion coefficients of t_c.
///
/// The transform factor expands as 1 - slope e1 + curvature e1^2 with
/// slope = theta (alpha + beta/2) and
/// curvature = theta^2 [alpha(alpha+1)/2 + alpha beta/2 + beta^2/8 + beta/4],
/// theta = a Xbar / (a Xbar + b). The MSE is the quadratic
/// P^2 + q1^2 d1 + q2^2 d3 + 2 q1 q2 d2 - 2 q1 d4 - 2 q2 d5.
struct TcConstants {
  double theta = 0.0;
  double slope = 0.0;      // first-order transform coefficient
  double curvature = 0.0;  // second-order transform coefficient
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0, m5 = 0.0;
  double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0, delta4 = 0.0, delta5 = 0.0;

  double determinant() const { return delta1 * delta3 - delta2 * delta2; }
};

inline TcConstants tc_constants(const PopulationParams& pop, double f, double a, double b,
                                double alpha, double beta) {
  detail::require_f(f);
  const double shifted = a * pop.xbar + b;
  if (!(shifted > 0.0)) {
    throw Error(Errc::NonpositiveTransform, "a * Xbar + b must be positive");
  }
  TcConstants c;
  c.theta = a * pop.xbar / shifted;
  c.slope = c.theta * (alpha + beta / 2.0);
  c.curvature = c.theta * c.theta *
                (alpha * (alpha + 1.0) / 2.0 + alpha * beta / 2.0 + beta * beta / 8.0 + beta / 4.0);

  const double P = pop.P, X = pop.xbar, cp = pop.cp, cx = pop.cx, rho = pop.rho_pb;
  const double B = c.slope, A = c.curvature;
  c.m1 = P * P * f * (cp * cp + B * B * cx * cx - 2.0 * B * rho * cp * cx);
  c.m2 = X * X * f * cx * cx;
  c.m3 = P * P * f * (A * cx * cx - B * rho * cp * cx);
  c.m4 = P * X * f * (-B * cx * cx + rho * cp * cx);
  c.m5 = X * P * f * (-B * cx * cx);

  c.delta1 = P * P + c.m1 + 2.0 * c.m3;
  c.delta2 = -c.m4 - c.m5;
  c.delta3 = c.m2;
  c.delta4 = P * P + c.m3;
  c.delta5 = -c.m5;
  return c;
}

inline double tc_mse(const TcConstants& tc, const PopulationParams& pop, double q1, double q2) {
  return pop.P * pop.P + q1 * q1 * tc.delta1 + q2 * q2 * tc.delta3 + 2.0 * q1 * q2 * tc.delta2 -
         2.0 * q1 * tc.delta4 - 2.0 * q2 * tc.delta5;
}

/// Stationary point of the (q1, q2) quadratic.
inline std::pair<double, double> tc_optimal_q(const TcConstants& tc) {
  const double det = tc.determinant();
  if (detail::near_singular(det, std::abs(tc.delta1 * tc.delta3) + tc.delta2 * tc.delta2)) {
    throw Error(Errc::SingularSystem, "t_c normal equations are singular");
  }
  return {(tc.delta3 * tc.delta4 - tc.delta2 * tc.delta5) / det,
          (tc.delta1 * tc.delta5 - tc.delta2 * tc.delta4) / det};
}

inline double tc_min_mse(const TcConstants& tc, const PopulationParams& pop) {
  const double det = tc.determinant();
  if (detail::near_singular(det, std::abs(tc.delta1 * tc.delta3) + tc.delta2 * tc.delta2)) {
    throw Error(Errc::SingularSystem, "t_c normal equations are singular");
  }
  const double reduction = (tc.delta1 * tc.delta5 * tc.delta5 + tc.delta3 * tc.delta4 * tc.delta4 -
                            2.0 * tc.delta2 * tc.delta4 * tc.delta5) /
                           det;
  return detail::checked_mse(pop.P * pop.P - reduction, pop.P * pop.P, "minimum MSE of t_c");
}

inline double tc_bias(const PopulationParams& pop, double f, const TcConstants& tc, double q1,
                      double q2) {
  detail::require_f(f);
  const double cx2 = pop.cx * pop.cx;
  return pop.P * (q1 - 1.0) +
         f * ((q2 * pop.xbar * tc.slope + q1 * pop.P * tc.curvature) * cx2 -
              q1 * pop.P * tc.slope * pop.rho_pb * pop.cp * pop.cx);
}

// ---------------------------------------------------------------------------
// t1 = p (Xbar/xbar)^alpha (Sx2/sx2)^beta

inline std::pair<double, double> t1_optimal(const PopulationParams& pop) {
  const double gap = detail::require_pearson_gap(pop);
  detail::require_cx(pop);
  const double alpha =
      pop.cp * (pop.rho_pb * (pop.lambda04 - 1.0) - pop.lambda03 * pop.lambda12) / (pop.cx * gap);
  const double beta = pop.cp * (pop.lambda12 - pop.rho_pb * pop.lambda03) / gap;
  return {alpha, beta};
}

inline double t1_mse(const PopulationParams& pop, double f, double alpha, double beta) {
  detail::require_f(f);
  const double cp = pop.cp, cx = pop.cx;
  return f * pop.P * pop.P *
         (cp * cp + alpha * alpha * cx * cx + beta * beta * (pop.lambda04 - 1.0) -
          2.0 * alpha * pop.rho_pb * cp * cx - 2.0 * beta * cp * pop.lambda12 +
          2.0 * alpha * beta * cx * pop.lambda03);
}

inline double t1_min_mse(const PopulationParams& pop, double f) {
  const double gap = detail::require_pearson_gap(pop);
  const double lin = pop.lambda03 * pop.rho_pb - pop.lambda12;
  const double mse = var_usual(pop, f) * (1.0 - pop.rho_pb * pop.rho_pb - lin * lin / gap);
  return detail::checked_mse(mse, var_usual(pop, f) + 1e-300, "minimum MSE of t1");
}

inline double t1_bias(const PopulationParams& pop, double f, double alpha, double beta) {
  detail::require_f(f);
  const double cp = pop.cp, cx = pop.cx;
  return f * pop.P *
         (alpha * (alpha + 1.0) / 2.0 * cx * cx + beta * (beta + 1.0) / 2.0 * (pop.lambda04 - 1.0) +
          alpha * beta * cx * pop.lambda03 - alpha * pop.rho_pb * cp * cx -
          beta * cp * pop.lambda12);
}

// ---------------------------------------------------------------------------
// t2 linear member p + h1 (u - 1) + h2 (v - 1); h's are absolute offsets.

inline std::pair<double, double> t2_optimal(const PopulationParams& pop) {
  const double gap = detail::require_pearson_gap(pop);
  detail::require_cx(pop);
  const double h1 = pop.P * pop.cp *
                    (pop.lambda03 * pop.lambda12 - pop.rho_pb * (pop.lambda04 - 1.0)) /
                    (pop.cx * gap);
  const double h2 = pop.P * pop.cp * (pop.rho_pb * pop.lambda03 - pop.lambda12) / gap;
  return {h1, h2};
}

inline double t2_mse(const PopulationParams& pop, double f, double h1, double h2) {
  detail::require_f(f);
  const double P = pop.P, cp = pop.cp, cx = pop.cx;
  return f * (P * P * cp * cp + h1 * h1 * cx * cx + h2 * h2 * (pop.lambda04 - 1.0) +
              2.0 * P * h1 * pop.rho_pb * cp * cx + 2.0 * P * h2 * cp * pop.lambda12 +
              2.0 * h1 * h2 * cx * pop.lambda03);
}

/// Minimum of the t2 quadratic, evaluated by substituting the optimal offsets.
inline double t2_min_mse(const PopulationParams& pop, double f) {
  const auto [h1, h2] = t2_optimal(pop);
  return detail::checked_mse(t2_mse(pop, f, h1, h2), var_usual(pop, f) + 1e-300,
                             "minimum MSE of t2");
}

/// Second-order derivatives of H(p, u, v) at (P, 1, 1), halved where the
/// Taylor expansion halves them.
struct T2Curvatures {
  double h3 = 0.0;  // d2/dp2
  double h4 = 0.0;  // d2/du2
  double h5 = 0.0;  // d2/dv2
  double h6 = 0.0;  // d2/dp du
  double h7 = 0.0;  // d2/du dv
  double h8 = 0.0;  // d2/dp dv
};

inline double class_bias_t2(const PopulationParams& pop, double f, const T2Curvatures& h) {
  detail::require_f(f);
  const double P = pop.P, cp = pop.cp, cx = pop.cx;
  return f * (P * cp * cp * h.h3 + cx * cx * h.h4 + (pop.lambda04 - 1.0) * h.h5 +
              P * pop.rho_pb * cp * cx * h.h6 + cx * pop.lambda03 * h.h7 +
              P * cp * pop.lambda12 * h.h8);
}

// ---------------------------------------------------------------------------
// t3 = m1 T_ratio + m2 T_exp

/// Scaled first and second moments of the two t3 components:
/// T_ratio = p [Xbar / (gamma xbar + (1-gamma) Xbar)]^g and
/// T_exp = p exp(delta (Sx2 - sx2) / (Sx2 + sx2)), each divided by P or P^2.
struct T3Constants {
  double ratio_second = 0.0;  // E[T_ratio^2] / P^2
  double ratio_mean = 0.0;    // E[T_ratio] / P
  double exp_second = 0.0;    // E[T_exp^2] / P^2
  double cross = 0.0;         // E[T_ratio T_exp] / P^2
  double exp_mean = 0.0;      // E[T_exp] / P

  double determinant() const { return ratio_second * exp_second - cross * cross; }
  /// B^2 C - 2 B D E + A E^2
  double reduction_numerator() const {
    return ratio_mean * ratio_mean * exp_second - 2.0 * ratio_mean * cross * exp_mean +
           ratio_second * exp_mean * exp_mean;
  }
};

inline T3Constants t3_constants(const PopulationParams& pop, double f, double gamma, double g,
                                double delta) {
  detail::require_f(f);
  const double cp = pop.cp, cx = pop.cx, rho = pop.rho_pb;
  const double kurt = pop.lambda04 - 1.0;
  T3Constants c;
  c.ratio_second =
      1.0 + f * (cp * cp - 4.0 * gamma * g * rho * cp * cx + gamma * gamma * g * (2.0 * g + 1.0) * cx * cx);
  c.ratio_mean =
      1.0 - gamma * g * f * rho * cp * cx + g * (g + 1.0) / 2.0 * gamma * gamma * f * cx * cx;
  c.exp_second = 1.0 + f * (cp * cp - 2.0 * delta * cp * pop.lambda12 +
                            (delta * delta + delta * (delta + 2.0)) * kurt / 4.0);
  c.cross = 1.0 + f * (cp * cp - delta * cp * pop.lambda12 + delta * (delta + 2.0) / 8.0 * kurt -
                       2.0 * gamma * g * rho * cp * cx + gamma * delta * g / 2.0 * cx * pop.lambda03 +
                       g * (g + 1.0) / 2.0 * gamma * gamma * cx * cx);
  c.exp_mean = 1.0 - delta / 2.0 * f * cp * pop.lambda12 + delta * (delta + 2.0) / 8.0 * f * kurt;
  return c;
}

/// The exponential-component mean in the form 1 - (gamma/2) f rho C_p C_x +
/// (delta(delta+1)/8) f C_x^2. It does not follow from expanding the
/// exponential term and is kept only to diagnose tables computed with it.
inline double t3_exp_mean_uncorrected(const PopulationParams& pop, double f, double gamma,
                                      double delta) {
  detail::require_f(f);
  return 1.0 - gamma / 2.0 * f * pop.rho_pb * pop.cp * pop.cx +
         delta * (delta + 1.0) / 8.0 * f * pop.cx * pop.cx;
}

inline double t3_mse(const T3Constants& c, const PopulationParams& pop, double m1, double m2) {
  return pop.P * pop.P *
         (1.0 + m1 * m1 * c.ratio_second + m2 * m2 * c.exp_second + 2.0 * m1 * m2 * c.cross -
          2.0 * m1 * c.ratio_mean - 2.0 * m2 * c.exp_mean);
}

inline double t3_bias(const T3Constants& c, const PopulationParams& pop, double m1, double m2) {
  return -pop.P * (1.0 - m1 * c.ratio_mean - m2 * c.exp_mean);
}

inline std::pair<double, double> t3_optimal_m(const T3Constants& c) {
  const double det = c.determinant();
  if (detail::near_singular(det, std::abs(c.ratio_second * c.exp_second) + c.cross * c.cross)) {
    throw Error(Errc::SingularSystem, "t3 normal equations are singular (AC - D^2 ~ 0)");
  }
  return {(c.ratio_mean * c.exp_second - c.cross * c.exp_mean) / det,
          (c.ratio_second * c.exp_mean - c.ratio_mean * c.cross) / det};
}

namespace detail {

inline double t3_min_bracket(const T3Constants& c) {
  const double det = c.determinant();
  if (!(det > 0.0) ||
      near_singular(det, std::abs(c.ratio_second * c.exp_second) + c.cross * c.cross)) {
    throw Error(Errc::SingularSystem,
                "t3 minimum requires AC - D^2 > 0, got " + std::to_string(det));
  }
  return 1.0 - c.reduction_numerator() / det;
}

}  // namespace detail

inline double t3_min_mse(const T3Constants& c, const PopulationParams& pop) {
  return detail::checked_mse(pop.P * pop.P * detail::t3_min_bracket(c), pop.P * pop.P,
                             "minimum MSE of t3");
}

/// Bias at the optimal weights. Equals t3_bias at (m1*, m2*), hence -MSE/P.
inline double t3_bias_min(const T3Constants& c, const PopulationParams& pop) {
  return -pop.P * detail::t3_min_bracket(c);
}

// ---------------------------------------------------------------------------

inline double pre(double mse_baseline, double mse) {
  if (!(mse > 0.0)) throw Error(Errc::NonpositiveMse, "PRE needs a positive candidate MSE");
  return 100.0 * mse_baseline / mse;
}

// ---------------------------------------------------------------------------
// Resolution of population-optimal constants

/// Replaces every kOptimal tunable with its population-optimal value. When
/// one constant of a pair is fixed, the other is optimised conditionally.
/// In the census limit (f = 0) the quadratics for t_c and t3 are rank
/// deficient; the minimum-norm minimiser is used there.
inline EstimatorConfig resolve(const EstimatorConfig& config, const PopulationParams& pop, double f) {
  detail::require_f(f);
  struct Visitor {
    const PopulationParams& pop;
    double f;

    EstimatorConfig operator()(const UsualConfig& c) const { return c; }
    EstimatorConfig operator()(const RatioConfig& c) const { return c; }
    EstimatorConfig operator()(RegressionConfig c) const {
      if (!c.h1) c.h1 = tb_optimal_h1(pop);
      return c;
    }
    EstimatorConfig operator()(TcConfig c) const {
      if (c.q1 && c.q2) return c;
      const TcConstants tc = tc_constants(pop, f, c.a, c.b, c.alpha, c.beta);
      if (!c.q1 && !c.q2) {
        if (f == 0.0) {
          c.q1 = tc.delta4 / tc.delta1;
          c.q2 = 0.0;
        } else {
          std::tie(c.q1, c.q2) = tc_optimal_q(tc);
        }
      } else if (!c.q1) {
        c.q1 = (tc.delta4 - tc.delta2 * *c.q2) / tc.delta1;
      } else {
        c.q2 = tc.delta3 == 0.0 ? 0.0 : (tc.delta5 - tc.delta2 * *c.q1) / tc.delta3;
      }
      return c;
    }
    EstimatorConfig operator()(T1Config c) const {
      if (c.alpha && c.beta) return c;
      if (!c.alpha && !c.beta) {
        std::tie(c.alpha, c.beta) = t1_optimal(pop);
      } else if (!c.alpha) {
        detail::require_cx(pop);
        c.alpha = (pop.rho_pb * pop.cp - *c.beta * pop.lambda03) / pop.cx;
      } else {
        if (!(pop.lambda04 > 1.0)) throw Error(Errc::DegenerateMoments, "lambda04 must exceed 1");
        c.beta = (pop.cp * pop.lambda12 - *c.alpha * pop.cx * pop.lambda03) / (pop.lambda04 - 1.0);
      }
      return c;
    }
    EstimatorConfig operator()(T2Config c) const {
      if (c.h1 && c.h2) return c;
      if (!c.h1 && !c.h2) {
        std::tie(c.h1, c.h2) = t2_optimal(pop);
      } else if (!c.h1) {
        detail::require_cx(pop);
        c.h1 = -(pop.P * pop.rho_pb * pop.cp + *c.h2 * pop.lambda03) / pop.cx;
      } else {
        if (!(pop.lambda04 > 1.0)) throw Error(Errc::DegenerateMoments, "lambda04 must exceed 1");
        c.h2 = -(pop.P * pop.cp * pop.lambda12 + *c.h1 * pop.cx * pop.lambda03) /
               (pop.lambda04 - 1.0);
      }
      return c;
    }
    EstimatorConfig operator()(T3Config c) const {
      if (c.m1 && c.m2) return c;
      const T3Constants k = t3_constants(pop, f, c.gamma, c.g, c.delta);
      if (!c.m1 && !c.m2) {
        if (f == 0.0) {
          // every constant is exactly 1: minimise (m1 + m2 - 1)^2 with least norm
          c.m1 = 0.5;
          c.m2 = 0.5;
        } else {
          std::tie(c.m1, c.m2) = t3_optimal_m(k);
        }
      } else if (!c.m1) {
        c.m1 = (k.ratio_mean - k.cross * *c.m2) / k.ratio_second;
      } else {
        c.m2 = (k.exp_mean - k.cross * *c.m1) / k.exp_second;
      }
      return c;
    }
  };
  return std::visit(Visitor{pop, f}, config);
}

namespace detail {

inline bool all_optimal(const EstimatorConfig& config) {
  struct Visitor {
    bool operator()(const UsualConfig&) const { return false; }
    bool operator()(const RatioConfig&) const { return false; }
    bool operator()(const RegressionConfig& c) const { return !c.h1; }
    bool operator()(const TcConfig& c) const { return !c.q1 && !c.q2; }
    bool operator()(const T1Config& c) const { return !c.alpha && !c.beta; }
    bool operator()(const T2Config& c) const { return !c.h1 && !c.h2; }
    bool operator()(const T3Config& c) const { return !c.m1 && !c.m2; }
  };
  return std::visit(Visitor{}, config);
}

}  // namespace detail

/// First-order MSE at the (resolved) constants of `config`.
inline double first_order_mse(const PopulationParams& pop, double f, const EstimatorConfig& config) {
  const EstimatorConfig r = resolve(config, pop, f);
  struct Visitor {
    const PopulationParams& pop;
    double f;
    double operator()(const UsualConfig&) const { return var_usual(pop, f); }
    double operator()(const RatioConfig&) const { return mse_ta(pop, f); }
    double operator()(const RegressionConfig& c) const { return tb_mse(pop, f, *c.h1); }
    double operator()(const TcConfig& c) const {
      const TcConstants tc = tc_constants(pop, f, c.a, c.b, c.alpha, c.beta);
      return detail::checked_mse(tc_mse(tc, pop, *c.q1, *c.q2), pop.P * pop.P, "MSE of t_c");
    }
    double operator()(const T1Config& c) const { return t1_mse(pop, f, *c.alpha, *c.beta); }
    double operator()(const T2Config& c) const { return t2_mse(pop, f, *c.h1, *c.h2); }
    double operator()(const T3Config& c) const {
      const T3Constants k = t3_constants(pop, f, c.gamma, c.g, c.delta);
      return detail::checked_mse(t3_mse(k, pop, *c.m1, *c.m2), pop.P * pop.P, "MSE of t3");
    }
  };
  return std::visit(Visitor{pop, f}, r);
}

/// First-order bias at the (resolved) constants of `config`. The linear
/// members of the t_b and t2 classes are exactly unbiased.
inline double first_order_bias(const PopulationParams& pop, double f, const EstimatorConfig& config) {
  const EstimatorConfig r = resolve(config, pop, f);
  struct Visitor {
    const PopulationParams& pop;
    double f;
    double operator()(const UsualConfig&) const { return 0.0; }
    double operator()(const RatioConfig&) const { return bias_ta(pop, f); }
    double operator()(const RegressionConfig&) const { return 0.0; }
    double operator()(const TcConfig& c) const {
      return tc_bias(pop, f, tc_constants(pop, f, c.a, c.b, c.alpha, c.beta), *c.q1, *c.q2);
    }
    double operator()(const T1Config& c) const { return t1_bias(pop, f, *c.alpha, *c.beta); }
    double operator()(const T2Config&) const { return 0.0; }
    double operator()(const T3Config& c) const {
      return t3_bias(t3_constants(pop, f, c.gamma, c.g, c.delta), pop, *c.m1, *c.m2);
    }
  };
  return std::visit(Visitor{pop, f}, r);
}

/// Closed-form minimum MSE of the family `config` belongs to; only defined
/// for families with tunable constants.
inline std::optional<double> closed_form_min_mse(const PopulationParams& pop, double f,
                                                 const EstimatorConfig& config) {
  struct Visitor {
    const PopulationParams& pop;
    double f;
    std::optional<double> operator()(const UsualConfig&) const { return std::nullopt; }
    std::optional<double> operator()(const RatioConfig&) const { return std::nullopt; }
    std::optional<double> operator()(const RegressionConfig&) const { return min_mse_tb(pop, f); }
    std::optional<double> operator()(const TcConfig& c) const {
      if (f == 0.0) return 0.0;
      return tc_min_mse(tc_constants(pop, f, c.a, c.b, c.alpha, c.beta), pop);
    }
    std::optional<double> operator()(const T1Config&) const { return t1_min_mse(pop, f); }
    std::optional<double> operator()(const T2Config&) const { return t2_min_mse(pop, f); }
    std::optional<double> operator()(const T3Config& c) const {
      if (f == 0.0) return 0.0;
      return t3_min_mse(t3_constants(pop, f, c.gamma, c.g, c.delta), pop);
    }
  };
  return std::visit(Visitor{pop, f}, config);
}

/// Human-readable formula for the MSE reported for `config`.
inline std::string mse_formula(const EstimatorConfig& config, bool minimum) {
  struct Visitor {
    bool minimum;
    std::string operator()(const UsualConfig&) const { return "f*P^2*Cp^2"; }
    std::string operator()(const RatioConfig&) const {
      return "f*P^2*(Cp^2 + Cx^2 - 2*rho*Cp*Cx)";
    }
    std::string operator()(const RegressionConfig&) const {
      return minimum ? "f*P^2*Cp^2*(1 - rho^2)" : "f*(P^2*Cp^2 + h1^2*Cx^2 + 2*P*h1*rho*Cp*Cx)";
    }
    std::string operator()(const TcConfig&) const {
      return minimum ? "P^2 - (D1*D5^2 + D3*D4^2 - 2*D2*D4*D5)/(D1*D3 - D2^2)"
                     : "P^2 + q1^2*D1 + q2^2*D3 + 2*q1*q2*D2 - 2*q1*D4 - 2*q2*D5";
    }
    std::string operator()(const T1Config&) const {
      return minimum ? "f*P^2*Cp^2*(1 - rho^2 - (l03*rho - l12)^2/(l04 - 1 - l03^2))"
                     : "f*P^2*(Cp^2 + a^2*Cx^2 + b^2*(l04-1) - 2*a*rho*Cp*Cx - 2*b*Cp*l12 + "
                       "2*a*b*Cx*l03)";
    }
    std::string operator()(const T2Config&) const {
      return minimum ? "f*(P^2*Cp^2 + h1^2*Cx^2 + h2^2*(l04-1) + 2*P*h1*rho*Cp*Cx + 2*P*h2*Cp*l12 "
                       "+ 2*h1*h2*Cx*l03) at optimal (h1, h2)"
                     : "f*(P^2*Cp^2 + h1^2*Cx^2 + h2^2*(l04-1) + 2*P*h1*rho*Cp*Cx + "
                       "2*P*h2*Cp*l12 + 2*h1*h2*Cx*l03)";
    }
    std::string operator()(const T3Config&) const {
      return minimum ? "P^2*(1 - (B^2*C - 2*B*D*E + A*E^2)/(A*C - D^2))"
                     : "P^2*(1 + m1^2*A + m2^2*C + 2*m1*m2*D - 2*m1*B - 2*m2*E)";
    }
  };
  return std::visit(Visitor{minimum}, config);
}

// ---------------------------------------------------------------------------
// Reports

struct TheoryRow {
  std::string label;
  EstimatorConfig config;  // resolved when `error` is empty
  std::optional<double> bias;
  std::optional<double> mse;
  std::optional<double> pre;  // empty when the MSE is 0 or unavailable
  std::string mse_formula;
  std::string error;

  friend bool operator==(const TheoryRow&, const TheoryRow&) = default;
};

struct Condition {
  std::string name;
  std::string statement;
  std::optional<double> lhs;
  std::optional<double> rhs;
  std::optional<bool> holds;
  std::optional<double> slack;  // rhs - lhs
  std::string error;

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct ComparisonReport {
  std::vector<Condition> conditions;
  /// rho^2 + (l03 rho - l12)^2 / (l04 - 1 - l03^2), the t1 reduction below V(p).
  std::optional<double> t1_reduction;
  bool t1_reduction_nonnegative = false;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

inline ComparisonReport comparison_conditions(const PopulationParams& pop, double f,
                                              const TcConfig& tc, const T3Config& t3) {
  ComparisonReport out;
  const double v = var_usual(pop, f);
  auto attempt = [](auto&& fn) -> std::pair<std::optional<double>, std::string> {
    try {
      return {fn(), {}};
    } catch (const Error& e) {
      return {std::nullopt, e.what()};
    }
  };
  auto [t1_min, t1_err] = attempt([&] { return t1_min_mse(pop, f); });
  auto [tc_min, tc_err] = attempt([&] { return *closed_form_min_mse(pop, f, tc); });
  T3Config t3_opt = t3;
  t3_opt.m1 = t3_opt.m2 = kOptimal;
  auto [t3_min, t3_err] = attempt([&] { return *closed_form_min_mse(pop, f, t3_opt); });

  auto make = [&](std::string name, std::string statement, std::optional<double> lhs,
                  std::optional<double> rhs, std::string err) {
    Condition c{std::move(name), std::move(statement), lhs, rhs, {}, {}, std::move(err)};
    if (lhs && rhs) {
      c.slack = *rhs - *lhs;
      c.holds = *lhs <= *rhs + 1e-12 * std::abs(*rhs);
    }
    return c;
  };
  const std::string both_err = t3_err.empty() ? t1_err : t3_err;
  out.conditions.push_back(make("t1_vs_usual", "min MSE(t1) = min MSE(t2) <= V(p)", t1_min, v, t1_err));
  out.conditions.push_back(make("t3_vs_usual", "min MSE(t3) <= V(p)", t3_min, v, t3_err));
  out.conditions.push_back(
      make("t3_vs_t2", "min MSE(t3) <= min MSE(t2)", t3_min, t1_min, both_err));
  out.conditions.push_back(make("t3_vs_tc", "min MSE(t3) <= min MSE(t_c)", t3_min, tc_min,
                                t3_err.empty() ? tc_err : t3_err));

  const double gap = detail::pearson_gap(pop);
  if (gap > 0.0) {
    const double lin = pop.lambda03 * pop.rho_pb - pop.lambda12;
    out.t1_reduction = pop.rho_pb * pop.rho_pb + lin * lin / gap;
    out.t1_reduction_nonnegative = *out.t1_reduction >= 0.0;
  }
  return out;
}

struct TheoryReport {
  Design design;
  double var_usual = 0.0;
  std::vector<TheoryRow> rows;
  ComparisonReport comparisons;

  friend bool operator==(const TheoryReport&, const TheoryReport&) = default;
};

/// The estimator set of the standard efficiency table: p, t_a, t_b, t_c, t1,
/// t2 and t3 for (g, delta) in {(1,1), (1,-1), (0,1)}; all tunables optimal.
inline std::vector<EstimatorConfig> standard_configs(const TcConfig& tc = {}, double gamma = 1.0) {
  TcConfig tc_opt = tc;
  tc_opt.q1 = tc_opt.q2 = kOptimal;
  std::vector<EstimatorConfig> out{UsualConfig{}, RatioConfig{}, RegressionConfig{}, tc_opt,
                                   T1Config{},    T2Config{}};
  for (auto [g, delta] : {std::pair{1.0, 1.0}, std::pair{1.0, -1.0}, std::pair{0.0, 1.0}}) {
    out.push_back(T3Config{gamma, g, delta, kOptimal, kOptimal});
  }
  return out;
}

inline TheoryRow theory_row(const PopulationParams& pop, double f, const EstimatorConfig& config,
                            double baseline) {
  TheoryRow row;
  row.label = label(config);
  row.config = config;
  const bool minimum = detail::all_optimal(config);
  row.mse_formula = mse_formula(config, minimum);
  try {
    row.config = resolve(config, pop, f);
    row.bias = first_order_bias(pop, f, row.config);
    if (minimum) row.mse = closed_form_min_mse(pop, f, config);
    if (!row.mse) row.mse = first_order_mse(pop, f, row.config);
    if (*row.mse > 0.0) row.pre = pre(baseline, *row.mse);
  } catch (const Error& e) {
    row.error = e.what();
    row.mse.reset();
    row.pre.reset();
  }
  return row;
}

inline TheoryReport theory_report(const PopulationParams& pop, const Design& design,
                                  const std::vector<EstimatorConfig>& configs,
                                  const TcConfig& tc = {}, const T3Config& t3 = {}) {
  TheoryReport out;
  out.design = design;
  out.var_usual = var_usual(pop, design.f);
  for (const auto& c : configs) out.rows.push_back(theory_row(pop, design.f, c, out.var_usual));
  out.comparisons = comparison_conditions(pop, design.f, tc, t3);
  return out;
}

}  // namespace propest
