#pragma once

#include <cmath>
#include <variant>

#include "propest/config.hpp"
#include "propest/error.hpp"
#include "propest/population.hpp"
#include "propest/theory.hpp"

namespace propest {

// Point estimates of P from one sample. Every estimator takes the sample
// statistics and the known auxiliary population parameters (Xbar, Sx2).
// Unset tunables are replaced by population-optimal values.

struct Estimate {
  double value = 0.0;
  EstimatorConfig config_used;
};

namespace detail {

inline double design_factor(const SampleStats& s, const PopulationParams& pop) {
  return sampling_fraction(s.n, pop.N);
}

inline double checked_value(double v) {
  if (!std::isfinite(v)) throw Error(Errc::NonpositiveBase, "estimate is not finite");
  return v;
}

/// Value of an estimator whose constants are already resolved.
struct ValueVisitor {
  const SampleStats& s;
  const PopulationParams& pop;

  double operator()(const UsualConfig&) const { return s.p; }

  double operator()(const RatioConfig&) const {
    if (s.xbar == 0.0) throw Error(Errc::ZeroSampleMean, "sample mean of x is 0");
    return s.p * (pop.xbar / s.xbar);
  }

  double operator()(const RegressionConfig& c) const {
    return s.p + *c.h1 * (s.xbar / pop.xbar - 1.0);
  }

  double operator()(const TcConfig& c) const {
    const double pop_shift = c.a * pop.xbar + c.b;
    const double sample_shift = c.a * s.xbar + c.b;
    if (!(pop_shift > 0.0) || !(sample_shift > 0.0)) {
      throw Error(Errc::NonpositiveTransform, "a * xbar + b must be positive");
    }
    const double linear = *c.q1 * s.p + *c.q2 * (pop.xbar - s.xbar);
    const double ratio = c.alpha == 0.0 ? 1.0 : std::pow(pop_shift / sample_shift, c.alpha);
    const double tilt = c.beta * (pop_shift - sample_shift) / (pop_shift + sample_shift);
    return checked_value(linear * ratio * std::exp(tilt));
  }

  double operator()(const T1Config& c) const {
    double value = s.p;
    if (*c.alpha != 0.0) {
      if (!(s.xbar > 0.0)) throw Error(Errc::NonpositiveBase, "t1 needs a positive sample mean");
      value *= std::pow(pop.xbar / s.xbar, *c.alpha);
    }
    if (*c.beta != 0.0) {
      if (!(s.sx2 > 0.0)) throw Error(Errc::NonpositiveBase, "t1 needs a positive sample variance");
      value *= std::pow(pop.sx2 / s.sx2, *c.beta);
    }
    return checked_value(value);
  }

  double operator()(const T2Config& c) const {
    if (!(pop.sx2 > 0.0)) throw Error(Errc::DegenerateAuxiliary, "S_x^2 must be positive");
    return s.p + *c.h1 * (s.xbar / pop.xbar - 1.0) + *c.h2 * (s.sx2 / pop.sx2 - 1.0);
  }

  double operator()(const T3Config& c) const {
    const double mixed = c.gamma * s.xbar + (1.0 - c.gamma) * pop.xbar;
    if (!(mixed > 0.0)) {
      throw Error(Errc::NonpositiveBase, "gamma * xbar + (1 - gamma) * Xbar must be positive");
    }
    const double spread = pop.sx2 + s.sx2;
    if (!(spread > 0.0)) throw Error(Errc::NonpositiveBase, "Sx2 + sx2 must be positive");
    const double ratio_part = s.p * std::pow(pop.xbar / mixed, c.g);
    const double exp_part = s.p * std::exp(c.delta * (pop.sx2 - s.sx2) / spread);
    return checked_value(*c.m1 * ratio_part + *c.m2 * exp_part);
  }
};

}  // namespace detail

/// Value of an estimator; `config` must already be resolved.
inline double estimate_value(const SampleStats& s, const PopulationParams& pop,
                             const EstimatorConfig& config) {
  return std::visit(detail::ValueVisitor{s, pop}, config);
}

inline Estimate estimate(const SampleStats& s, const PopulationParams& pop,
                         const EstimatorConfig& config) {
  EstimatorConfig resolved =
      is_resolved(config) ? config : resolve(config, pop, detail::design_factor(s, pop));
  const double v = estimate_value(s, pop, resolved);
  return Estimate{v, std::move(resolved)};
}

inline Estimate estimate_usual(const SampleStats& s) { return Estimate{s.p, UsualConfig{}}; }

inline Estimate estimate_ratio_ta(const SampleStats& s, const PopulationParams& pop) {
  return estimate(s, pop, RatioConfig{});
}

inline Estimate estimate_regression_tb(const SampleStats& s, const PopulationParams& pop,
                                       const RegressionConfig& cfg = {}) {
  return estimate(s, pop, cfg);
}

inline Estimate estimate_tc(const SampleStats& s, const PopulationParams& pop, const TcConfig& cfg) {
  return estimate(s, pop, cfg);
}

inline Estimate estimate_t1(const SampleStats& s, const PopulationParams& pop, const T1Config& cfg) {
  return estimate(s, pop, cfg);
}

inline Estimate estimate_t2(const SampleStats& s, const PopulationParams& pop, const T2Config& cfg) {
  return estimate(s, pop, cfg);
}

inline Estimate estimate_t3(const SampleStats& s, const PopulationParams& pop, const T3Config& cfg) {
  return estimate(s, pop, cfg);
}

}  // namespace propest
