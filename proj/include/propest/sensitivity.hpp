#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "propest/config.hpp"
#include "propest/error.hpp"
#include "propest/population.hpp"
#include "propest/theory.hpp"

namespace propest {

// Rounding sensitivity of PRE values: a summary statistic reported to d digits is
// only known to +-0.5 in its last digit. The scan re-evaluates each
// estimator's PRE (optimal constants re-derived) over the 3^6 grid of
// {-h, 0, +h} shifts of (Cp, Cx, rho, l03, l04, l12). The grid contains the
// 2^6 corners, the centre and every axis and edge midpoint.

struct PerturbedInput {
  std::string name;
  double value = 0.0;
  double half_width = 0.0;

  friend bool operator==(const PerturbedInput&, const PerturbedInput&) = default;
};

struct SensitivityInterval {
  std::string label;
  EstimatorConfig config;
  std::optional<double> point_pre;
  std::optional<double> min_pre;
  std::optional<double> max_pre;
  std::size_t evaluated = 0;
  std::size_t unstable = 0;  // scan points with a numerical failure or invalid inputs

  std::optional<double> width() const {
    if (!min_pre || !max_pre) return std::nullopt;
    return *max_pre - *min_pre;
  }

  friend bool operator==(const SensitivityInterval&, const SensitivityInterval&) = default;
};

struct SensitivityReport {
  int digits = 0;
  std::size_t scan_points = 0;
  std::vector<PerturbedInput> inputs;
  std::vector<SensitivityInterval> intervals;

  friend bool operator==(const SensitivityReport&, const SensitivityReport&) = default;
};

/// Half a unit in the last of `digits` significant digits of `v`.
inline double rounding_half_width(double v, int digits) {
  if (digits < 1) throw Error(Errc::InvalidParams, "digits must be >= 1");
  if (v == 0.0) return 0.5 * std::pow(10.0, -digits);
  const double exponent = std::floor(std::log10(std::abs(v)));
  return 0.5 * std::pow(10.0, exponent - digits + 1);
}

namespace detail {

inline std::optional<double> pre_at(const PopulationParams& pop, double f,
                                    const EstimatorConfig& config) {
  if (!(pop.cp > 0.0) || !(pop.cx > 0.0) || std::abs(pop.rho_pb) > 1.0 || pop.lambda04 < 1.0) {
    return std::nullopt;
  }
  try {
    const double base = var_usual(pop, f);
    double mse = 0.0;
    if (auto closed = closed_form_min_mse(pop, f, config); closed && all_optimal(config)) {
      mse = *closed;
    } else {
      mse = first_order_mse(pop, f, config);
    }
    return pre(base, mse);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline SensitivityReport sensitivity(const PopulationParams& pop, double f,
                                     const std::vector<EstimatorConfig>& configs, int digits) {
  detail::require_f(f);
  SensitivityReport out;
  out.digits = digits;
  const std::array<std::pair<const char*, double PopulationParams::*>, 6> fields{{
      {"cp", &PopulationParams::cp},
      {"cx", &PopulationParams::cx},
      {"rho_pb", &PopulationParams::rho_pb},
      {"lambda03", &PopulationParams::lambda03},
      {"lambda04", &PopulationParams::lambda04},
      {"lambda12", &PopulationParams::lambda12},
  }};
  for (const auto& [name, member] : fields) {
    out.inputs.push_back({name, pop.*member, rounding_half_width(pop.*member, digits)});
  }

  for (const auto& c : configs) {
    SensitivityInterval iv;
    iv.label = label(c);
    iv.config = c;
    iv.point_pre = detail::pre_at(pop, f, c);
    out.intervals.push_back(std::move(iv));
  }

  constexpr std::size_t kPoints = 729;  // 3^6
  out.scan_points = kPoints;
  for (std::size_t code = 0; code < kPoints; ++code) {
    PopulationParams shifted = pop;
    std::size_t rest = code;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const int step = static_cast<int>(rest % 3) - 1;
      rest /= 3;
      shifted.*(fields[k].second) += step * out.inputs[k].half_width;
    }
    shifted.sp2 = shifted.cp * shifted.P * shifted.cp * shifted.P;
    shifted.sx2 = shifted.cx * shifted.xbar * shifted.cx * shifted.xbar;

    for (std::size_t i = 0; i < configs.size(); ++i) {
      auto& iv = out.intervals[i];
      const auto value = detail::pre_at(shifted, f, configs[i]);
      if (!value) {
        ++iv.unstable;
        continue;
      }
      ++iv.evaluated;
      iv.min_pre = iv.min_pre ? std::min(*iv.min_pre, *value) : *value;
      iv.max_pre = iv.max_pre ? std::max(*iv.max_pre, *value) : *value;
    }
  }
  return out;
}

}  // namespace propest
