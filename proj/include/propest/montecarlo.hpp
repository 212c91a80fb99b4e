#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "propest/config.hpp"
#include "propest/error.hpp"
#include "propest/estimators.hpp"
#include "propest/population.hpp"
#include "propest/rng.hpp"
#include "propest/theory.hpp"

namespace propest {

// Ground-truth oracles for the first-order theory: exact enumeration of all
// SRSWOR samples for small populations and seeded Monte Carlo for large ones.

struct EstimatorSummary {
  std::string label;
  EstimatorConfig config;  // resolved at population-optimal values
  std::size_t evaluated = 0;
  std::size_t failures = 0;  // samples where a precondition failed
  std::optional<double> mean;
  std::optional<double> bias;
  std::optional<double> mse;
  std::optional<double> mse_std_error;
  std::optional<double> theoretical_mse;
  std::optional<double> ratio;  // empirical / theoretical MSE
  std::string error;

  friend bool operator==(const EstimatorSummary&, const EstimatorSummary&) = default;
};

struct SimulationReport {
  bool exact = false;
  std::string stream;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  Design design;
  double true_value = 0.0;
  std::vector<EstimatorSummary> estimators;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

namespace detail {

/// Partial Fisher-Yates over a persistent permutation; every draw is undone
/// afterwards so the output depends only on the engine state. Indices are
/// returned in ascending order.
class SrsworSampler {
 public:
  explicit SrsworSampler(std::size_t N) : perm_(N) { std::iota(perm_.begin(), perm_.end(), 0); }

  void draw(std::size_t n, Engine& engine, std::vector<std::size_t>& out) {
    const std::size_t N = perm_.size();
    swaps_.clear();
    out.clear();
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, N - 1);
      const std::size_t j = pick(engine);
      std::swap(perm_[i], perm_[j]);
      swaps_.push_back(j);
      out.push_back(perm_[i]);
    }
    for (std::size_t i = n; i-- > 0;) std::swap(perm_[i], perm_[swaps_[i]]);
    // ascending order keeps sample sums independent of the draw order
    std::sort(out.begin(), out.end());
  }

 private:
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> swaps_;
};

struct Moments {
  std::size_t ok = 0;
  std::size_t failures = 0;
  double sum = 0.0;
  double sum_d2 = 0.0;
  double sum_d4 = 0.0;

  void add(double value, double truth) {
    const double d = value - truth;
    const double d2 = d * d;
    ++ok;
    sum += value;
    sum_d2 += d2;
    sum_d4 += d2 * d2;
  }

  void merge(const Moments& o) {
    ok += o.ok;
    failures += o.failures;
    sum += o.sum;
    sum_d2 += o.sum_d2;
    sum_d4 += o.sum_d4;
  }
};

struct Prepared {
  std::vector<EstimatorSummary> rows;
  std::vector<bool> usable;
};

inline Prepared prepare(const PopulationParams& pop, double f,
                        const std::vector<EstimatorConfig>& configs) {
  Prepared out;
  for (const auto& c : configs) {
    EstimatorSummary row;
    row.label = label(c);
    row.config = c;
    bool usable = true;
    try {
      row.config = resolve(c, pop, f);
    } catch (const Error& e) {
      row.error = e.what();
      usable = false;
    }
    if (usable) {
      try {
        row.theoretical_mse = first_order_mse(pop, f, row.config);
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
    out.rows.push_back(std::move(row));
    out.usable.push_back(usable);
  }
  return out;
}

inline void evaluate_all(const SampleStats& s, const PopulationParams& pop, const Prepared& prep,
                         std::vector<Moments>& acc) {
  for (std::size_t k = 0; k < prep.rows.size(); ++k) {
    if (!prep.usable[k]) {
      ++acc[k].failures;
      continue;
    }
    try {
      acc[k].add(estimate_value(s, pop, prep.rows[k].config), pop.P);
    } catch (const Error&) {
      ++acc[k].failures;
    }
  }
}

inline void finish(Prepared& prep, const std::vector<Moments>& acc, double truth, bool exact) {
  for (std::size_t k = 0; k < prep.rows.size(); ++k) {
    auto& row = prep.rows[k];
    const Moments& m = acc[k];
    row.evaluated = m.ok;
    row.failures = m.failures;
    if (m.ok == 0) continue;
    const double count = static_cast<double>(m.ok);
    row.mean = m.sum / count;
    row.bias = *row.mean - truth;
    row.mse = m.sum_d2 / count;
    if (exact || m.ok < 2) {
      row.mse_std_error = 0.0;
    } else {
      const double var = std::max(0.0, (m.sum_d4 - count * *row.mse * *row.mse) / (count - 1.0));
      row.mse_std_error = std::sqrt(var / count);
    }
    if (row.theoretical_mse && *row.theoretical_mse > 0.0) {
      row.ratio = *row.mse / *row.theoretical_mse;
    }
  }
}

inline double binomial(std::size_t N, std::size_t n) {
  double out = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    out = out * static_cast<double>(N - n + i) / static_cast<double>(i);
  }
  return out;
}

}  // namespace detail

/// Uniform n-subset of {0, ..., N-1}.
inline std::vector<std::size_t> draw_srswor(std::size_t N, std::size_t n, Engine& engine) {
  sampling_fraction(n, N);
  detail::SrsworSampler sampler(N);
  std::vector<std::size_t> out;
  out.reserve(n);
  sampler.draw(n, engine, out);
  return out;
}

inline std::vector<std::size_t> draw_srswor(const PopulationFrame& frame, std::size_t n,
                                            Engine& engine) {
  return draw_srswor(frame.size(), n, engine);
}

inline constexpr double kMaxEnumeration = 1e7;

/// Exact moments of every estimator over all C(N, n) samples.
inline SimulationReport enumerate_exact(const PopulationFrame& frame, std::size_t n,
                                        const std::vector<EstimatorConfig>& configs) {
  const std::size_t N = frame.size();
  const Design design = Design::make(n, N);
  const double count = detail::binomial(N, n);
  if (count > kMaxEnumeration) {
    throw Error(Errc::TooLarge, "C(N, n) = " + std::to_string(count) + " exceeds 1e7 samples");
  }
  const PopulationParams pop = compute_population_params(frame);
  detail::Prepared prep = detail::prepare(pop, design.f, configs);
  std::vector<detail::Moments> acc(configs.size());

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t visited = 0;
  while (true) {
    detail::evaluate_all(sample_stats(frame, idx), pop, prep, acc);
    ++visited;
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == N - n + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }

  detail::finish(prep, acc, pop.P, true);
  SimulationReport out;
  out.exact = true;
  out.stream = "exhaustive enumeration";
  out.replicates = visited;
  out.design = design;
  out.true_value = pop.P;
  out.estimators = std::move(prep.rows);
  return out;
}

inline constexpr std::size_t kReplicateBlock = 256;

/// R seeded SRSWOR replicates. Replicate r uses derive_stream(seed, r) and
/// sums are folded per fixed block in block order, so the report does not
/// depend on `workers`.
inline SimulationReport run_experiment(const PopulationFrame& frame, std::size_t n,
                                       const std::vector<EstimatorConfig>& configs,
                                       std::size_t replicates, std::uint64_t seed,
                                       unsigned workers = 0) {
  if (replicates < 100) throw Error(Errc::InvalidParams, "need at least 100 replicates");
  const std::size_t N = frame.size();
  const Design design = Design::make(n, N);
  const PopulationParams pop = compute_population_params(frame);
  detail::Prepared prep = detail::prepare(pop, design.f, configs);

  const std::size_t blocks = (replicates + kReplicateBlock - 1) / kReplicateBlock;
  std::vector<std::vector<detail::Moments>> block_acc(
      blocks, std::vector<detail::Moments>(configs.size()));
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    detail::SrsworSampler sampler(N);
    std::vector<std::size_t> idx;
    idx.reserve(n);
    for (std::size_t b = next++; b < blocks; b = next++) {
      const std::size_t end = std::min(replicates, (b + 1) * kReplicateBlock);
      for (std::size_t r = b * kReplicateBlock; r < end; ++r) {
        Engine engine = derive_stream(seed, r);
        sampler.draw(n, engine, idx);
        detail::evaluate_all(sample_stats(frame, idx), pop, prep, block_acc[b]);
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<detail::Moments> acc(configs.size());
  for (const auto& block : block_acc) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k].merge(block[k]);
  }
  detail::finish(prep, acc, pop.P, false);

  SimulationReport out;
  out.exact = false;
  out.stream = std::string(kStreamName);
  out.seed = seed;
  out.replicates = replicates;
  out.design = design;
  out.true_value = pop.P;
  out.estimators = std::move(prep.rows);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic populations

enum class AuxShape { SkewedPositive, Symmetric };

/// Auxiliary x is location + Gamma(shape, scale) (skewed) or
/// Normal(location, scale) (symmetric). The attribute is 1 with probability
/// logistic(link_intercept + link_slope * z), z the standardised x.
struct SyntheticSpec {
  std::size_t N = 2000;
  AuxShape aux_shape = AuxShape::SkewedPositive;
  double shape = 6.0;
  double scale = 2.0;
  double location = 0.0;
  double link_intercept = 0.0;
  double link_slope = 1.5;
  std::optional<double> target_rho;  // when set, link_slope is tuned to reach it
  std::size_t max_attempts = 16;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

struct GeneratedPopulation {
  PopulationFrame frame;
  PopulationParams params;
  std::size_t attempts = 0;
  double link_slope = 0.0;
};

namespace detail {

inline std::vector<Unit> threshold_units(const std::vector<double>& x, const std::vector<double>& z,
                                         const std::vector<double>& u, double intercept,
                                         double slope) {
  std::vector<Unit> units(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-(intercept + slope * z[i])));
    units[i] = Unit{static_cast<std::uint8_t>(u[i] < prob ? 1 : 0), x[i]};
  }
  return units;
}

inline std::optional<PopulationParams> try_params(const std::vector<Unit>& units) {
  try {
    return compute_population_params(PopulationFrame(units));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline GeneratedPopulation generate_population(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.N < 10) throw Error(Errc::InvalidParams, "synthetic populations need N >= 10");
  if (!(spec.scale > 0.0) || (spec.aux_shape == AuxShape::SkewedPositive && !(spec.shape > 0.0))) {
    throw Error(Errc::InvalidParams, "shape and scale must be positive");
  }
  for (std::size_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
    Engine engine = derive_stream(seed, attempt);
    std::vector<double> x(spec.N), u(spec.N), z(spec.N);
    if (spec.aux_shape == AuxShape::SkewedPositive) {
      std::gamma_distribution<double> dist(spec.shape, spec.scale);
      for (auto& v : x) v = spec.location + dist(engine);
    } else {
      std::normal_distribution<double> dist(spec.location, spec.scale);
      for (auto& v : x) v = dist(engine);
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& v : u) v = unif(engine);

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(spec.N);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(spec.N));
    if (!(sd > 0.0)) continue;
    for (std::size_t i = 0; i < spec.N; ++i) z[i] = (x[i] - mean) / sd;

    double slope = spec.link_slope;
    if (spec.target_rho) {
      // achieved rho grows with the slope; bisect on common random numbers
      double lo = 0.0, hi = 20.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto p = detail::try_params(detail::threshold_units(x, z, u, spec.link_intercept, mid));
        if (p && p->rho_pb < *spec.target_rho) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      slope = 0.5 * (lo + hi);
    }
    auto units = detail::threshold_units(x, z, u, spec.link_intercept, slope);
    if (auto params = detail::try_params(units)) {
      return GeneratedPopulation{PopulationFrame(std::move(units)), *params, attempt + 1, slope};
    }
  }
  throw Error(Errc::DegenerateGeneration,
              "no valid population after " + std::to_string(spec.max_attempts) + " attempts");
}

}  // namespace propest
