#include <catch_amalgamated.hpp>

#include <numeric>

#include "propest/population.hpp"
#include "support/oracles.hpp"

using namespace propest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PopulationFrame frame_of(std::initializer_list<int> phi, std::initializer_list<double> x) {
  std::vector<Unit> units;
  auto xi = x.begin();
  for (int p : phi) units.push_back(Unit{static_cast<std::uint8_t>(p), *xi++});
  return PopulationFrame(std::move(units));
}

PopulationFrame hand_frame_8() {
  return frame_of({1, 0, 1, 1, 0, 0, 1, 0}, {3.5, 1.2, 7.9, 4.4, 2.0, 0.7, 12.3, 2.6});
}

}  // namespace

TEST_CASE("frame validation", "[population]") {
  CHECK_THROWS_AS(PopulationFrame(std::vector<Unit>{{1, 1.0}}), Error);
  CHECK_THROWS_MATCHES(frame_of({1, 2}, {1.0, 2.0}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::InvalidFrame;
                       }));
  CHECK_THROWS_AS(frame_of({1, 0}, {1.0, std::nan("")}), Error);
  const auto f = frame_of({1, 0, 1}, {1.0, 2.0, 3.0});
  CHECK(f.size() == 3);
  CHECK(f.attribute_count() == 2);
}

TEST_CASE("central moments", "[population]") {
  const auto aligned = frame_of({1, 1, 0, 0}, {2, 2, 1, 1});
  CHECK(central_moment(aligned, 1, 1) == 0.25);
  CHECK(central_moment(aligned, 0, 0) == 1.0);
  CHECK_THROWS_AS(central_moment(aligned, 3, 2), Error);

  std::mt19937_64 rng(5);
  const auto frame = oracle::random_frame(rng, 5);
  long double P = 0, X = 0;
  for (const auto& u : frame.units()) {
    P += u.phi;
    X += u.x;
  }
  P /= 5;
  X /= 5;
  long double loop = 0;
  for (const auto& u : frame.units()) loop += (u.phi - P) * (u.x - X) * (u.x - X);
  loop /= 5;
  CHECK(oracle::rel_err(central_moment(frame, 1, 2), loop) < 1e-12);
}

TEST_CASE("population parameters on hand frames", "[population]") {
  const auto p = compute_population_params(frame_of({1, 1, 0, 0}, {2, 2, 1, 1}));
  CHECK(p.P == 0.5);
  CHECK(p.xbar == 1.5);
  CHECK_THAT(p.rho_pb, WithinAbs(1.0, 1e-15));
  CHECK(p.lambda03 == 0.0);
  CHECK_THAT(p.lambda04, WithinAbs(1.0, 1e-15));

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  CHECK(code_of([&] { compute_population_params(frame_of({1, 1, 1}, {1, 2, 3})); }) ==
        Errc::DegenerateAttribute);
  CHECK(code_of([&] { compute_population_params(frame_of({1, 0, 1}, {2, 2, 2})); }) ==
        Errc::DegenerateAuxiliary);
  CHECK(code_of([&] { compute_population_params(frame_of({1, 0}, {-1, 1})); }) == Errc::ZeroMean);
}

TEST_CASE("population parameters match the direct-definition oracle", "[population]") {
  auto check = [](const PopulationFrame& frame) {
    const auto p = compute_population_params(frame);
    const auto d = oracle::direct_stats(frame);
    CHECK(oracle::rel_err(p.P, d.P) < 1e-12);
    CHECK(oracle::rel_err(p.xbar, d.xbar) < 1e-12);
    CHECK(oracle::rel_err(p.sx2, d.sx2) < 1e-12);
    CHECK(oracle::rel_err(p.sp2, d.sp2) < 1e-12);
    CHECK(oracle::rel_err(p.cp, d.cp) < 1e-12);
    CHECK(oracle::rel_err(p.cx, d.cx) < 1e-12);
    CHECK(oracle::rel_err(p.rho_pb, d.rho) < 1e-12);
    CHECK(oracle::rel_err(p.lambda03, d.l03) < 1e-10);
    CHECK(oracle::rel_err(p.lambda04, d.l04) < 1e-12);
    CHECK(oracle::rel_err(p.lambda12, d.l12) < 1e-10);
  };
  check(hand_frame_8());
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) check(oracle::random_frame(rng, 8 + i * 7));
}

TEST_CASE("sampling fraction", "[population]") {
  CHECK_THAT(sampling_fraction(11, 40), WithinRel(29.0 / 440.0, 1e-15));
  CHECK(sampling_fraction(40, 40) == 0.0);
  CHECK(sampling_fraction(2, 4) == 0.25);
  CHECK_THROWS_AS(sampling_fraction(1, 4), Error);
  CHECK_THROWS_AS(sampling_fraction(5, 4), Error);
}

TEST_CASE("sample statistics", "[population]") {
  const auto frame = frame_of({1, 0, 1, 0}, {4, 2, 6, 0});
  const std::vector<std::size_t> two{0, 1};
  const auto s = sample_stats(frame, two);
  CHECK(s.p == 0.5);
  CHECK(s.xbar == 3.0);
  CHECK(s.sx2 == 2.0);

  const auto big = hand_frame_8();
  std::vector<std::size_t> all(big.size());
  std::iota(all.begin(), all.end(), 0);
  const auto census = sample_stats(big, all);
  const auto pop = compute_population_params(big);
  CHECK(census.p == pop.P);
  CHECK(census.xbar == pop.xbar);
  CHECK(census.sx2 == pop.sx2);

  const std::vector<std::size_t> subset{6, 1, 3, 4};
  const auto ss = sample_stats(big, subset);
  long double sum = 0, a = 0;
  for (auto i : subset) {
    sum += big[i].x;
    a += big[i].phi;
  }
  const long double mean = sum / 4;
  long double ssq = 0;
  for (auto i : subset) ssq += (big[i].x - mean) * (big[i].x - mean);
  CHECK(oracle::rel_err(ss.p, a / 4) < 1e-15);
  CHECK(oracle::rel_err(ss.xbar, mean) < 1e-14);
  CHECK(oracle::rel_err(ss.sx2, ssq / 3) < 1e-13);

  const std::vector<std::size_t> dup{1, 1}, oob{0, 9};
  CHECK_THROWS_AS(sample_stats(big, dup), Error);
  CHECK_THROWS_AS(sample_stats(big, oob), Error);
}

TEST_CASE("deviations are relative to population values", "[population]") {
  PopulationParams pop;
  pop.P = 0.5;
  pop.xbar = 10;
  pop.sx2 = 4;
  const auto d = deviations(SampleStats{5, 3, 0.6, 12, 5}, pop);
  CHECK_THAT(d.e_p, WithinRel(0.2, 1e-14));
  CHECK_THAT(d.e1, WithinRel(0.2, 1e-14));
  CHECK_THAT(d.e3, WithinRel(0.25, 1e-14));
}
