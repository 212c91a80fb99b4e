#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's closed forms; everything is rebuilt from definitions, in long
// double where it matters.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "propest/population.hpp"

namespace oracle {

using propest::PopulationFrame;
using propest::PopulationParams;
using propest::Unit;
using ld = long double;

/// Statistics straight from their definitions with naive loops.
struct Direct {
  ld P, xbar, sx2, sp2, cp, cx, rho, l03, l04, l12;
};

inline Direct direct_stats(const PopulationFrame& frame) {
  const ld N = frame.size();
  ld sum_phi = 0, sum_x = 0;
  for (const auto& u : frame.units()) {
    sum_phi += u.phi;
    sum_x += u.x;
  }
  Direct d{};
  d.P = sum_phi / N;
  d.xbar = sum_x / N;
  ld spp = 0, sxx = 0, spx = 0, sx3 = 0, sx4 = 0, sp_x2 = 0;
  for (const auto& u : frame.units()) {
    const ld a = u.phi - d.P, b = u.x - d.xbar;
    spp += a * a;
    sxx += b * b;
    spx += a * b;
    sx3 += b * b * b;
    sx4 += b * b * b * b;
    sp_x2 += a * b * b;
  }
  d.sx2 = sxx / (N - 1);
  d.sp2 = spp / (N - 1);
  d.cp = std::sqrt(d.sp2) / d.P;
  d.cx = std::sqrt(d.sx2) / d.xbar;
  // Pearson correlation; the divisor cancels
  d.rho = spx / std::sqrt(spp * sxx);
  const ld m02 = sxx / N, m20 = spp / N;
  d.l03 = (sx3 / N) / std::pow(m02, 1.5L);
  d.l04 = (sx4 / N) / (m02 * m02);
  d.l12 = (sp_x2 / N) / (std::sqrt(m20) * m02);
  return d;
}

inline ld rel_err(ld a, ld b) {
  const ld scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0 : std::abs(a - b) / scale;
}

/// Random frame with both attribute values present and x > 0.
inline PopulationFrame random_frame(std::mt19937_64& rng, std::size_t N) {
  std::uniform_real_distribution<double> shape(0.5, 4.0), slope(-3.0, 3.0), u01(0.0, 1.0);
  std::gamma_distribution<double> gamma(shape(rng), 1.0);
  const double k = slope(rng);
  for (;;) {
    std::vector<Unit> units(N);
    std::size_t ones = 0;
    for (auto& u : units) {
      u.x = 0.1 + gamma(rng);
      const double prob = 1.0 / (1.0 + std::exp(-k * (u.x - 1.5)));
      u.phi = u01(rng) < prob ? 1 : 0;
      ones += u.phi;
    }
    if (ones > 0 && ones < N) return PopulationFrame(std::move(units));
  }
}

/// Random parameter vector whose (e_p, e1, e3) covariance is positive
/// definite, which is what makes it realisable by some population.
inline PopulationParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    PopulationParams p;
    p.N = 20 + static_cast<std::size_t>(u(rng) * 2000);
    p.P = 0.05 + 0.9 * u(rng);
    p.xbar = 1.0 + 50.0 * u(rng);
    p.sp2 = p.P * (1.0 - p.P) * p.N / (p.N - 1.0);
    p.cp = std::sqrt(p.sp2) / p.P;
    p.cx = 0.05 + 1.2 * u(rng);
    p.sx2 = (p.cx * p.xbar) * (p.cx * p.xbar);
    p.rho_pb = -0.95 + 1.9 * u(rng);
    p.lambda03 = -2.0 + 4.0 * u(rng);
    p.lambda04 = 1.0 + p.lambda03 * p.lambda03 + 0.05 + 5.0 * u(rng);
    p.lambda12 = (-1.0 + 2.0 * u(rng)) * std::sqrt(p.lambda04 - 1.0);
    // Cholesky-style positive-definiteness test on the correlation form
    const ld r01 = p.rho_pb;
    const ld r02 = p.lambda12 / std::sqrt(p.lambda04 - 1.0);
    const ld r12 = p.lambda03 / std::sqrt(p.lambda04 - 1.0);
    const ld det = 1 - r01 * r01 - r02 * r02 - r12 * r12 + 2 * r01 * r02 * r12;
    if (det > 1e-6) return p;
  }
}

inline double random_f(std::mt19937_64& rng, std::size_t N) {
  std::uniform_int_distribution<std::size_t> pick(2, N - 1);
  const std::size_t n = pick(rng);
  return 1.0 / n - 1.0 / static_cast<double>(N);
}

/// Covariance of (e_p, e1, e3) per unit f.
inline std::array<std::array<ld, 3>, 3> deviation_cov(const PopulationParams& p) {
  const ld cp = p.cp, cx = p.cx, r = p.rho_pb, k = p.lambda04 - 1.0L;
  return {{{cp * cp, r * cp * cx, cp * p.lambda12},
           {r * cp * cx, cx * cx, cx * p.lambda03},
           {cp * p.lambda12, cx * p.lambda03, k}}};
}

/// Minimum over weights w of Var(e_p - w . e_S) for the channel subset S
/// (indices into {1, 2}), times P^2 f: the linear-regression bound a
/// first-order estimator using those channels can reach.
inline ld regression_bound(const PopulationParams& p, double f, const std::vector<int>& channels) {
  const auto S = deviation_cov(p);
  ld reduction = 0;
  if (channels.size() == 1) {
    const int a = channels[0];
    reduction = S[0][a] * S[0][a] / S[a][a];
  } else {
    const ld det = S[1][1] * S[2][2] - S[1][2] * S[1][2];
    const ld w1 = (S[2][2] * S[0][1] - S[1][2] * S[0][2]) / det;
    const ld w2 = (S[1][1] * S[0][2] - S[1][2] * S[0][1]) / det;
    reduction = w1 * S[0][1] + w2 * S[0][2];
  }
  return static_cast<ld>(p.P) * p.P * f * (S[0][0] - reduction);
}

/// A bivariate quadratic recovered from six evaluations, then minimised
/// with Cramer's rule. Used to cross-check the library's optimal pairs.
struct Quadratic {
  ld c0, cx, cy, cxx, cyy, cxy;  // c0 + cx x + cy y + cxx x^2 + cyy y^2 + cxy x y

  static Quadratic fit(const std::function<ld(ld, ld)>& q) {
    Quadratic r{};
    const ld f00 = q(0, 0), f10 = q(1, 0), fm0 = q(-1, 0), f01 = q(0, 1), f0m = q(0, -1),
             f11 = q(1, 1);
    r.c0 = f00;
    r.cx = (f10 - fm0) / 2;
    r.cxx = (f10 + fm0) / 2 - f00;
    r.cy = (f01 - f0m) / 2;
    r.cyy = (f01 + f0m) / 2 - f00;
    r.cxy = f11 - f00 - r.cx - r.cy - r.cxx - r.cyy;
    return r;
  }

  std::pair<ld, ld> argmin() const {
    // gradient: [2cxx cxy; cxy 2cyy] [x y]' = -[cx cy]'
    const ld det = 4 * cxx * cyy - cxy * cxy;
    return {(-cx * 2 * cyy + cy * cxy) / det, (-cy * 2 * cxx + cx * cxy) / det};
  }

  ld operator()(ld x, ld y) const { return c0 + cx * x + cy * y + cxx * x * x + cyy * y * y + cxy * x * y; }
};

/// Central-difference gradient norm relative to the curvature scale.
inline double relative_gradient(const std::function<double(double, double)>& q, double x, double y) {
  const double hx = 1e-4 * std::max(1.0, std::abs(x));
  const double hy = 1e-4 * std::max(1.0, std::abs(y));
  const double gx = (q(x + hx, y) - q(x - hx, y)) / (2 * hx);
  const double gy = (q(x, y + hy) - q(x, y - hy)) / (2 * hy);
  const double c0 = q(x, y);
  const double hxx = (q(x + hx, y) - 2 * c0 + q(x - hx, y)) / (hx * hx);
  const double hyy = (q(x, y + hy) - 2 * c0 + q(x, y - hy)) / (hy * hy);
  // gradient / (curvature * step length) is dimensionless
  const double scale = std::max({std::abs(hxx) * std::max(1.0, std::abs(x)),
                                 std::abs(hyy) * std::max(1.0, std::abs(y)), 1e-300});
  return std::hypot(gx, gy) / scale;
}

/// Every n-subset of {0..N-1} in lexicographic order.
inline void for_each_subset(std::size_t N, std::size_t n,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<bool> mask(N, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  std::vector<std::size_t> idx;
  do {
    idx.clear();
    for (std::size_t i = 0; i < N; ++i) {
      if (mask[i]) idx.push_back(i);
    }
    fn(idx);
  } while (std::prev_permutation(mask.begin(), mask.end()));
}

/// Second-order (delta-method) expectation of h(e_p, e1, e3):
/// h(0) + (f/2) sum_ij H_ij S_ij with the Hessian H from central differences
/// in long double. This is the "first-order approximation" of every MSE and
/// bias, rebuilt without any of the library's algebra.
template <class H>
ld delta_mean(H h, const PopulationParams& p, double f) {
  const auto S = deviation_cov(p);
  auto at = [&](int i, ld si, int j, ld sj) {
    std::array<ld, 3> e{0, 0, 0};
    if (i >= 0) e[i] += si;
    if (j >= 0) e[j] += sj;
    return static_cast<ld>(h(e[0], e[1], e[2]));
  };
  const ld h0 = at(-1, 0, -1, 0);
  auto curvature = [&](ld step) {
    ld acc = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ld hij;
        if (i == j) {
          hij = (at(i, step, -1, 0) - 2 * h0 + at(i, -step, -1, 0)) / (step * step);
        } else {
          hij = (at(i, step, j, step) - at(i, step, j, -step) - at(i, -step, j, step) +
                 at(i, -step, j, -step)) /
                (4 * step * step);
        }
        acc += hij * S[i][j];
      }
    }
    return acc;
  };
  // Richardson extrapolation removes the O(step^2) truncation term
  const ld coarse = curvature(4e-5L), fine = curvature(2e-5L);
  return h0 + 0.5L * f * (4 * fine - coarse) / 3;
}

/// The estimator as a function of the relative deviations.
struct Expander {
  PopulationParams p;
  ld pp(ld e0) const { return p.P * (1 + e0); }
  ld xbar(ld e1) const { return p.xbar * (1 + e1); }
  ld sx2(ld e3) const { return p.sx2 * (1 + e3); }
};

/// First-order MSE and bias of any estimator t(e_p, e1, e3).
template <class T>
std::pair<ld, ld> delta_mse_bias(T t, const PopulationParams& p, double f) {
  const ld P = p.P;
  const ld mse = delta_mean([&](ld a, ld b, ld c) { const ld d = t(a, b, c) - P; return d * d; }, p, f);
  const ld bias = delta_mean([&](ld a, ld b, ld c) { return t(a, b, c); }, p, f) - P;
  return {mse, bias};
}

/// Summary statistics of the home-ownership example (n = 11 of N = 40).
inline PopulationParams home_ownership_stats() {
  PopulationParams p;
  p.N = 40;
  p.P = 0.525;
  p.xbar = 14.4;
  p.cp = 0.963;
  p.cx = 0.308;
  p.rho_pb = 0.897;
  p.lambda03 = -0.153;
  p.lambda04 = 1.75;
  p.lambda12 = -0.118;
  p.sp2 = (p.cp * p.P) * (p.cp * p.P);
  p.sx2 = (p.cx * p.xbar) * (p.cx * p.xbar);
  return p;
}

inline constexpr double kHomeOwnershipF = 1.0 / 11.0 - 1.0 / 40.0;

}  // namespace oracle
