#include <catch_amalgamated.hpp>

#include <numeric>

#include "propest/estimators.hpp"
#include "support/oracles.hpp"

using namespace propest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PopulationParams toy_pop() {
  PopulationParams pop = oracle::home_ownership_stats();
  pop.N = 200;
  pop.xbar = 10.0;
  pop.sx2 = (pop.cx * pop.xbar) * (pop.cx * pop.xbar);
  return pop;
}

SampleStats sample(double p, double xbar, double sx2, std::size_t n = 20) {
  return SampleStats{n, static_cast<std::size_t>(std::lround(p * n)), p, xbar, sx2};
}

}  // namespace

TEST_CASE("usual estimator is the sample proportion", "[estimators]") {
  CHECK(estimate_usual(sample(0.525, 3, 1)).value == 0.525);
  std::mt19937_64 rng(3);
  const auto frame = oracle::random_frame(rng, 30);
  const auto pop = compute_population_params(frame);
  std::vector<std::size_t> all(30);
  std::iota(all.begin(), all.end(), 0);
  CHECK(estimate_usual(sample_stats(frame, all)).value == pop.P);
}

TEST_CASE("ratio estimator", "[estimators]") {
  const auto pop = toy_pop();
  CHECK(estimate_ratio_ta(sample(0.5, 8.0, 4.0), pop).value == 0.625);
  CHECK(estimate_ratio_ta(sample(0.4, pop.xbar, 4.0), pop).value == 0.4);
  CHECK_THROWS_AS(estimate_ratio_ta(sample(0.4, 0.0, 4.0), pop), Error);
}

TEST_CASE("regression estimator", "[estimators]") {
  auto pop = toy_pop();
  CHECK(estimate_regression_tb(sample(0.45, pop.xbar, 4.0), pop).value == 0.45);
  const auto est = estimate_regression_tb(sample(0.45, 12.0, 4.0), pop);
  const double h1 = -pop.P * pop.rho_pb * pop.cp / pop.cx;
  CHECK(*std::get<RegressionConfig>(est.config_used).h1 == h1);
  CHECK_THAT(est.value, WithinRel(0.45 + h1 * 0.2, 1e-14));
  pop.rho_pb = 0.0;
  CHECK(estimate_regression_tb(sample(0.45, 12.0, 4.0), pop).value == 0.45);
}

TEST_CASE("t_c reduces to p, t_a and q1 p", "[estimators]") {
  const auto pop = toy_pop();
  const auto s = sample(0.55, 9.2, 5.0);
  const TcConfig ratio{1, 0, 1, 0, 1.0, 0.0};
  CHECK(estimate_tc(s, pop, ratio).value == estimate_ratio_ta(s, pop).value);
  const TcConfig inert{1, 0, 0, 0, 1.0, 0.0};
  CHECK(estimate_tc(s, pop, inert).value == s.p);
  const TcConfig general{2.0, 1.5, 0.7, -0.4, 0.9, 0.03};
  CHECK_THAT(estimate_tc(sample(0.55, pop.xbar, 5.0), pop, general).value, WithinRel(0.9 * 0.55, 1e-14));
  const TcConfig negative{1.0, -20.0, 1.0, 0.0, 1.0, 0.0};
  CHECK_THROWS_AS(estimate_tc(s, pop, negative), Error);
}

TEST_CASE("t1 reductions", "[estimators]") {
  const auto pop = toy_pop();
  const auto s = sample(0.55, 9.2, 5.0);
  CHECK(estimate_t1(s, pop, T1Config{0.0, 0.0}).value == s.p);
  CHECK(estimate_t1(s, pop, T1Config{1.0, 0.0}).value == estimate_ratio_ta(s, pop).value);
  CHECK_THAT(estimate_t1(sample(0.55, pop.xbar, pop.sx2), pop, T1Config{1.7, -0.3}).value,
             WithinRel(0.55, 1e-14));
  CHECK_THROWS_AS(estimate_t1(sample(0.55, 9.2, 0.0), pop, T1Config{1.0, 1.0}), Error);
  // beta == 0 never touches the sample variance
  CHECK_NOTHROW(estimate_t1(sample(0.55, 9.2, 0.0), pop, T1Config{1.0, 0.0}));
}

TEST_CASE("t2 nests t_b", "[estimators]") {
  const auto pop = toy_pop();
  CHECK(estimate_t2(sample(0.55, pop.xbar, pop.sx2), pop, T2Config{}).value == 0.55);
  const auto s = sample(0.55, 9.2, 5.0);
  const double h1 = -pop.P * pop.rho_pb * pop.cp / pop.cx;
  CHECK(estimate_t2(s, pop, T2Config{h1, 0.0}).value == estimate_regression_tb(s, pop).value);
}

TEST_CASE("t3 reductions", "[estimators]") {
  const auto pop = toy_pop();
  const auto s = sample(0.55, 9.2, 5.0);
  CHECK(estimate_t3(s, pop, T3Config{1.0, 0.0, 0.0, 0.5, 0.5}).value == s.p);
  CHECK_THAT(estimate_t3(sample(0.55, pop.xbar, pop.sx2), pop, T3Config{0.4, 2.0, -1.0, 0.3, 0.6}).value,
             WithinRel(0.9 * 0.55, 1e-14));
  // hand evaluation of both components
  const T3Config cfg{0.5, 1.0, 1.0, 0.6, 0.3};
  const double mixed = 0.5 * 9.2 + 0.5 * pop.xbar;
  const double expected = 0.6 * 0.55 * (pop.xbar / mixed) +
                          0.3 * 0.55 * std::exp((pop.sx2 - 5.0) / (pop.sx2 + 5.0));
  CHECK_THAT(estimate_t3(s, pop, cfg).value, WithinRel(expected, 1e-14));
}

TEST_CASE("optimal constants are filled in and recorded", "[estimators]") {
  const auto pop = toy_pop();
  const auto s = sample(0.55, 9.2, 5.0, 20);
  const double f = sampling_fraction(20, pop.N);
  const auto est = estimate_t1(s, pop, T1Config{});
  const auto [a, b] = t1_optimal(pop);
  CHECK(std::get<T1Config>(est.config_used).alpha == a);
  CHECK(std::get<T1Config>(est.config_used).beta == b);
  const auto t3 = estimate_t3(s, pop, T3Config{});
  const auto [m1, m2] = t3_optimal_m(t3_constants(pop, f, 1, 1, 1));
  CHECK(std::get<T3Config>(t3.config_used).m1 == m1);
  CHECK(std::get<T3Config>(t3.config_used).m2 == m2);
  CHECK(is_resolved(est.config_used));
  CHECK_FALSE(is_resolved(T1Config{}));
}

TEST_CASE("resolved optimum beats +-10% perturbations of each constant", "[estimators]") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pop = oracle::random_params(rng);
    const double f = oracle::random_f(rng, pop.N);
    const std::vector<EstimatorConfig> configs{RegressionConfig{}, TcConfig{}, T1Config{}, T2Config{},
                                               T3Config{}};
    for (const auto& c : configs) {
      EstimatorConfig opt;
      try {
        opt = resolve(c, pop, f);
      } catch (const Error&) {
        continue;  // singular t3 systems are tested elsewhere
      }
      const double best = first_order_mse(pop, f, opt);
      auto perturbed = [&](double scale1, double scale2) {
        EstimatorConfig p = opt;
        std::visit(
            [&](auto& cfg) {
              using T = std::decay_t<decltype(cfg)>;
              if constexpr (std::is_same_v<T, RegressionConfig>) {
                *cfg.h1 *= scale1;
              } else if constexpr (std::is_same_v<T, TcConfig>) {
                *cfg.q1 *= scale1;
                *cfg.q2 *= scale2;
              } else if constexpr (std::is_same_v<T, T1Config>) {
                *cfg.alpha *= scale1;
                *cfg.beta *= scale2;
              } else if constexpr (std::is_same_v<T, T2Config>) {
                *cfg.h1 *= scale1;
                *cfg.h2 *= scale2;
              } else if constexpr (std::is_same_v<T, T3Config>) {
                *cfg.m1 *= scale1;
                *cfg.m2 *= scale2;
              }
            },
            p);
        return first_order_mse(pop, f, p);
      };
      for (double s1 : {0.9, 1.0, 1.1}) {
        for (double s2 : {0.9, 1.0, 1.1}) {
          CHECK(perturbed(s1, s2) >= best * (1 - 1e-12) - 1e-15);
        }
      }
    }
  }
}
