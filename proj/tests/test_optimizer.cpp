#include "doctest.h"

#include <cmath>

#include "photonstore/optimizer.hpp"

using namespace photonstore;

namespace {
SpinWave phased(const SpinWave& s) { return SpinWave(fix_global_phase(s.renormalized().samples())); }

double centroid(const SpinWave& s) {
  double m = 0.0, n = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double wi = (i == 0 || i + 1 == s.size()) ? 0.5 : 1.0;
    m += wi * s.z(i) * std::norm(s[i]);
    n += wi * std::norm(s[i]);
  }
  return m / n;
}
}  // namespace

TEST_CASE("backward optimum: limits") {
  const auto big = optimal_backward_mode(1000.0);
  const auto lin = SpinWave::from_function(big.mode.size(), [](double z) { return std::sqrt(3.0) * z; });
  CHECK(l2_distance(phased(big.mode), lin) < 0.1);
  CHECK(big.efficiency < 1.0);

  const auto small = optimal_backward_mode(0.01);
  const auto flat = SpinWave::from_function(small.mode.size(), [](double) { return 1.0; });
  CHECK(l2_distance(phased(small.mode), flat) < 0.05);

  const auto mid = optimal_backward_mode(100.0);
  const double err = 1.0 - mid.efficiency;
  CHECK(err > 0.85 * 2.9 / 100.0);
  CHECK(err < 1.15 * 2.9 / 100.0);
}

TEST_CASE("backward optimum: efficiency is the quadratic form of the mode") {
  for (double d : {1.0, 10.0, 100.0}) {
    const auto r = optimal_backward_mode(d);
    // the continuum shape has unit quadrature norm, so its kernel form is the eigenvalue
    CHECK(retrieval_efficiency(r.shape, d) == doctest::Approx(r.efficiency).epsilon(1e-10));
    // flat wave is never better than the optimum
    const auto flat = SpinWave::from_function(201, [](double) { return 1.0; });
    CHECK(retrieval_efficiency(flat, d) <= r.efficiency + 1e-12);
  }
}

TEST_CASE("forward optimum") {
  const auto f = optimal_forward_mode(1000.0);
  const double err = 1000.0 * (1.0 - f.efficiency);
  CHECK(err > 15.0);
  CHECK(err < 23.0);
  const auto par = SpinWave::from_function(
      f.mode.size(), [](double z) { return std::sqrt(15.0 / 8.0) * (1.0 - 4.0 * (z - 0.5) * (z - 0.5)); });
  CHECK(l2_distance(phased(f.mode), par) < 0.1);

  for (double d : {0.01, 1.0, 10.0, 100.0}) {
    const double b = optimal_backward_mode(d).efficiency;
    const double fw = optimal_forward_mode(d).efficiency;
    CHECK(fw <= b * b + 1e-10);
  }
  const double b = optimal_backward_mode(0.01).efficiency;
  CHECK(std::abs(optimal_forward_mode(0.01).efficiency - b * b) < 1e-3);
}

TEST_CASE("power iteration: Rayleigh quotient climbs to the optimum") {
  const double d = 10.0;
  const auto seed = SpinWave::from_function(201, [](double z) { return 1.0 + std::cos(7.0 * z); });
  const auto r = kernel_power_iteration(d, seed);
  REQUIRE(r.history.size() >= 2);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1] - 1e-12);
  CHECK(r.efficiency == doctest::Approx(optimal_backward_mode(d).efficiency).epsilon(1e-8));
}

TEST_CASE("nondegenerate optimum") {
  const double d = 20.0;
  const double b = optimal_backward_mode(d).efficiency;
  CHECK(optimal_nondegenerate_mode(d, 0.0).efficiency == doctest::Approx(b * b).epsilon(1e-8));

  double prev_eff = 2.0, prev_c = 2.0;
  for (double dk : {0.0, 2.0, 4.0, 6.0, 8.0}) {
    const auto r = optimal_nondegenerate_mode(d, dk);
    CHECK(r.efficiency < prev_eff);
    const double c = centroid(r.mode);
    CHECK(c < prev_c);  // excitation is pushed toward the exit face z = 0
    prev_eff = r.efficiency;
    prev_c = c;
  }
}

TEST_CASE("nondegenerate halfwidth scales as sqrt(d)") {
  for (double d : {100.0, 400.0}) {
    const auto flat = SpinWave::from_function(401, [](double) { return 1.0; });
    const auto lin = SpinWave::from_function(401, [](double z) { return std::sqrt(3.0) * z; });
    CHECK(halfwidth_dk(flat, d) / std::sqrt(d) == doctest::Approx(0.46).epsilon(0.05 / 0.46));
    CHECK(halfwidth_dk(lin, d) / std::sqrt(d) == doctest::Approx(0.67).epsilon(0.05 / 0.67));
  }
}

TEST_CASE("reoptimized half-efficiency momentum grows linearly") {
  RVec xs, ys;
  for (double d : {10.0, 40.0, 80.0, 120.0, 160.0, 200.0}) {
    xs.push_back(d);
    ys.push_back(half_efficiency_dk(d));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  CHECK(sxy > 0.0);
  CHECK(sxy * sxy / (sxx * syy) > 0.98);
}

TEST_CASE("optimizer validation") {
  CHECK_THROWS_AS(optimal_backward_mode(-1.0), ValidationError);
  CHECK_THROWS_AS(optimal_backward_mode(0.0), ValidationError);
}
