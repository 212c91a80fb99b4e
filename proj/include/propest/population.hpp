#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "propest/error.hpp"

namespace propest {

/// One population unit: the study attribute (0/1) and the auxiliary value.
struct Unit {
  std::uint8_t phi = 0;
  double x = 0.0;

  friend bool operator==(const Unit&, const Unit&) = default;
};

/// The full finite population, validated on construction.
class PopulationFrame {
 public:
  PopulationFrame() = default;

  explicit PopulationFrame(std::vector<Unit> units) : units_(std::move(units)) {
    if (units_.size() < 2) {
      throw Error(Errc::InvalidFrame, "population needs at least 2 units, got " +
                                          std::to_string(units_.size()));
    }
    for (std::size_t i = 0; i < units_.size(); ++i) {
      if (units_[i].phi > 1) {
        throw Error(Errc::InvalidFrame, "unit " + std::to_string(i) + ": phi must be 0 or 1");
      }
      if (!std::isfinite(units_[i].x)) {
        throw Error(Errc::InvalidFrame, "unit " + std::to_string(i) + ": x is not finite");
      }
    }
  }

  std::size_t size() const noexcept { return units_.size(); }
  std::span<const Unit> units() const noexcept { return units_; }
  const Unit& operator[](std::size_t i) const { return units_[i]; }

  std::size_t attribute_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(units_.begin(), units_.end(), [](const Unit& u) { return u.phi == 1; }));
  }

  friend bool operator==(const PopulationFrame&, const PopulationFrame&) = default;

 private:
  std::vector<Unit> units_;
};

/// Summary statistics every closed-form formula consumes.
///
/// `sx2` and `sp2` use divisor N-1; the lambda ratios are built from
/// divisor-N central moments. `cx` is S_x / X-bar with X-bar > 0.
struct PopulationParams {
  std::size_t N = 0;
  double P = 0.0;
  double xbar = 0.0;
  double sx2 = 0.0;
  double sp2 = 0.0;
  double cp = 0.0;
  double cx = 0.0;
  double rho_pb = 0.0;
  double lambda03 = 0.0;
  double lambda04 = 0.0;
  double lambda12 = 0.0;

  friend bool operator==(const PopulationParams&, const PopulationParams&) = default;
};

inline double sampling_fraction(std::size_t n, std::size_t N) {
  if (n < 2 || n > N) {
    throw Error(Errc::InvalidDesign, "need 2 <= n <= N, got n=" + std::to_string(n) +
                                         " N=" + std::to_string(N));
  }
  if (n == N) return 0.0;
  return 1.0 / static_cast<double>(n) - 1.0 / static_cast<double>(N);
}

struct Design {
  std::size_t n = 0;
  std::size_t N = 0;
  double f = 0.0;

  static Design make(std::size_t n, std::size_t N) { return Design{n, N, sampling_fraction(n, N)}; }

  friend bool operator==(const Design&, const Design&) = default;
};

/// Sufficient statistics of one SRSWOR draw.
struct SampleStats {
  std::size_t n = 0;
  std::size_t a = 0;  // units with the attribute
  double p = 0.0;
  double xbar = 0.0;
  double sx2 = 0.0;  // divisor n-1
};

/// Relative deviations of a sample from the population (e_p, e_1, e_3).
struct Deviations {
  double e_p = 0.0;
  double e1 = 0.0;
  double e3 = 0.0;
};

inline Deviations deviations(const SampleStats& s, const PopulationParams& pop) {
  return Deviations{(s.p - pop.P) / pop.P, (s.xbar - pop.xbar) / pop.xbar,
                    (s.sx2 - pop.sx2) / pop.sx2};
}

namespace detail {

inline double proportion(const PopulationFrame& frame) {
  return static_cast<double>(frame.attribute_count()) / static_cast<double>(frame.size());
}

inline double mean_x(const PopulationFrame& frame) {
  double sum = 0.0;
  for (const auto& u : frame.units()) sum += u.x;
  return sum / static_cast<double>(frame.size());
}

inline double ipow(double v, unsigned k) {
  double out = 1.0;
  for (unsigned i = 0; i < k; ++i) out *= v;
  return out;
}

}  // namespace detail

/// mu_rs = (1/N) sum (phi_i - P)^r (x_i - X-bar)^s, for r + s <= 4.
inline double central_moment(const PopulationFrame& frame, unsigned r, unsigned s) {
  if (r + s > 4) {
    throw Error(Errc::InvalidParams, "central_moment supports r + s <= 4");
  }
  if (frame.size() == 0) throw Error(Errc::InvalidFrame, "empty frame");
  const double P = detail::proportion(frame);
  const double xbar = detail::mean_x(frame);
  double sum = 0.0;
  for (const auto& u : frame.units()) {
    sum += detail::ipow(u.phi - P, r) * detail::ipow(u.x - xbar, s);
  }
  return sum / static_cast<double>(frame.size());
}

inline PopulationParams compute_population_params(const PopulationFrame& frame) {
  const std::size_t N = frame.size();
  if (N < 2) throw Error(Errc::InvalidFrame, "population needs at least 2 units");
  const double P = detail::proportion(frame);
  if (P <= 0.0 || P >= 1.0) {
    throw Error(Errc::DegenerateAttribute, "attribute proportion is " + std::to_string(P));
  }
  const double xbar = detail::mean_x(frame);

  double m20 = 0, m11 = 0, m02 = 0, m03 = 0, m04 = 0, m12 = 0;
  for (const auto& u : frame.units()) {
    const double dp = u.phi - P;
    const double dx = u.x - xbar;
    const double dx2 = dx * dx;
    m20 += dp * dp;
    m11 += dp * dx;
    m02 += dx2;
    m03 += dx2 * dx;
    m04 += dx2 * dx2;
    m12 += dp * dx2;
  }
  if (m02 <= 0.0) throw Error(Errc::DegenerateAuxiliary, "auxiliary variable is constant");
  if (xbar <= 0.0) {
    throw Error(Errc::ZeroMean, "auxiliary mean must be positive, got " + std::to_string(xbar));
  }

  PopulationParams out;
  out.N = N;
  out.P = P;
  out.xbar = xbar;
  out.sx2 = m02 / static_cast<double>(N - 1);
  out.sp2 = m20 / static_cast<double>(N - 1);

  const double inv_n = 1.0 / static_cast<double>(N);
  m20 *= inv_n;
  m11 *= inv_n;
  m02 *= inv_n;
  m03 *= inv_n;
  m04 *= inv_n;
  m12 *= inv_n;

  out.cp = std::sqrt(out.sp2) / P;
  out.cx = std::sqrt(out.sx2) / xbar;
  out.rho_pb = m11 / std::sqrt(m20 * m02);
  out.lambda03 = m03 / std::pow(m02, 1.5);
  out.lambda04 = m04 / (m02 * m02);
  out.lambda12 = m12 / (std::sqrt(m20) * m02);
  return out;
}

inline SampleStats sample_stats(const PopulationFrame& frame, std::span<const std::size_t> indices) {
  const std::size_t n = indices.size();
  if (n < 2) throw Error(Errc::InvalidDesign, "sample needs at least 2 units");
  std::vector<bool> seen(frame.size(), false);
  std::size_t a = 0;
  double sum = 0.0;
  for (std::size_t idx : indices) {
    if (idx >= frame.size()) {
      throw Error(Errc::IndexOutOfRange, "index " + std::to_string(idx) + " >= N=" +
                                             std::to_string(frame.size()));
    }
    if (seen[idx]) throw Error(Errc::DuplicateIndex, "index " + std::to_string(idx) + " repeated");
    seen[idx] = true;
    a += frame[idx].phi;
    sum += frame[idx].x;
  }
  const double xbar = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t idx : indices) {
    const double d = frame[idx].x - xbar;
    ss += d * d;
  }
  return SampleStats{n, a, static_cast<double>(a) / static_cast<double>(n), xbar,
                     ss / static_cast<double>(n - 1)};
}

}  // namespace propest
