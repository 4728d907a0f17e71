#include "doctest.h"

#include <cmath>
#include <numbers>

#include "photonstore/model.hpp"

using namespace photonstore;

TEST_CASE("params and grid validation") {
  CHECK_THROWS_AS((Params{0.0, 0, 0, 0}).validate(), ValidationError);
  CHECK_THROWS_AS((Params{1.0, 0, -1, 0}).validate(), ValidationError);
  CHECK_THROWS_AS((Params{1.0, NAN, 0, 0}).validate(), ValidationError);
  CHECK_NOTHROW((Params{10.0, -3.0, 0.1, 2.0}).validate());
  CHECK_THROWS_AS((Grid{1, 10, 1.0}).validate(), ValidationError);
  CHECK_THROWS_AS((Grid{10, 10, 0.0}).validate(), ValidationError);
}

TEST_CASE("gaussian-like input") {
  Grid g{101, 2001, 1.0};
  const FieldMode e = gaussian_like_input(1.0, g);
  CHECK(e[0] == cplx(0.0));
  CHECK(e[e.size() - 1] == cplx(0.0));
  CHECK(std::abs(e.norm2() - 1.0) < 1e-10);
  CHECK(e.normalized());
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == e[e.size() - 1 - i]);
  // continuum normalization constant: A = 1/sqrt(int_0^1 (exp(-30(x-1/2)^2) - exp(-7.5))^2 dx)
  const double peak = std::abs(e[(e.size() - 1) / 2]);
  const double A = peak / (1.0 - std::exp(-7.5));
  CHECK(A == doctest::Approx(2.09).epsilon(0.005));
  CHECK_THROWS_AS(gaussian_like_input(-1.0, g), ValidationError);
  // window scaling: amplitude ~ 1/sqrt(T)
  const FieldMode e4 = gaussian_like_input(4.0, g);
  CHECK(std::abs(e4.norm2() - 1.0) < 1e-10);
  CHECK(std::abs(e4[1000]) == doctest::Approx(peak / 2.0).epsilon(1e-12));
}

TEST_CASE("time reversal") {
  const std::size_t n = 501;
  const double T = 2.0, w = 3.0;
  CVec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(1.0, w * T * i / (n - 1));
  const FieldMode ramp(v, T);
  const FieldMode r = time_reverse(ramp);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = T * i / (n - 1);
    CHECK(std::abs(r[i] - std::polar(1.0, w * (t - T))) < 1e-12);
  }
  const FieldMode rr = time_reverse(r);
  for (std::size_t i = 0; i < n; ++i) CHECK(rr[i] == ramp[i]);
  CHECK(r.norm2() == ramp.norm2());
  const FieldMode gl = gaussian_like_input(1.0, Grid{11, 301, 1.0});
  const FieldMode glr = time_reverse(gl);
  for (std::size_t i = 0; i < gl.size(); ++i) CHECK(glr[i] == gl[i]);
}

TEST_CASE("spin-wave flip") {
  const auto lin = SpinWave::from_function(201, [](double z) { return std::sqrt(3.0) * z; }, false);
  const SpinWave f = flip_spin_wave(lin, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] - std::sqrt(3.0) * (1.0 - f.z(i))) < 1e-14);
  const SpinWave ff = flip_spin_wave(f, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(ff[i] == lin[i]);

  const auto flat = SpinWave::from_function(101, [](double) { return 1.0; });
  const SpinWave ff0 = flip_spin_wave(flat, 0.0);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(ff0[i] == flat[i]);
  const SpinWave fpi = flip_spin_wave(flat, std::numbers::pi);
  for (std::size_t i = 0; i < flat.size(); ++i)
    CHECK(std::abs(fpi[i] - std::polar(1.0, -2.0 * std::numbers::pi * flat.z(i))) < 1e-13);
}

TEST_CASE("normalization and overlaps") {
  const auto s = SpinWave::from_function(301, [](double z) { return std::sqrt(3.0) * z; });
  CHECK(std::abs(s.norm2() - 1.0) < 1e-10);
  const auto s2 = s.resampled(151);
  CHECK(std::abs(s2.at(0.37) - s.at(0.37)) < 1e-12);
  CHECK(l2_distance(s, s2) < 1e-12);
  CHECK(overlap(s, s) == doctest::Approx(1.0));
  CHECK_THROWS_AS(SpinWave(CVec(5, 0.0)).renormalized(), ValidationError);
  CVec v{cplx(0, 1), cplx(0, -3), cplx(1, 0)};
  v = fix_global_phase(v);
  CHECK(v[1].real() == doctest::Approx(3.0));
  CHECK(std::abs(v[1].imag()) < 1e-15);
}

TEST_CASE("control field bookkeeping") {
  const auto c = ControlField::constant(cplx(0.0, 2.0), 3.0, 301);
  CHECK(c.h_cum()[0] == 0.0);
  CHECK(c.h_total() == doctest::Approx(12.0));
  CHECK(c.h_between(1.0, 2.0) == doctest::Approx(4.0));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.h_cum()[i] >= c.h_cum()[i - 1]);
  const auto r = c.time_reversed();
  CHECK(r[0] == cplx(0.0, -2.0));
  CHECK(c.clipped(1.0)[5] == cplx(0.0, 1.0));
  CHECK(c.rescaled_to(6.0).h_total() == doctest::Approx(12.0));
}

TEST_CASE("field window truncation") {
  CVec v(101);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const FieldMode f(v, 10.0);
  const FieldMode l = f.last(2.0);
  CHECK(l.t_win() == doctest::Approx(2.0));
  CHECK(l.size() == 21);
  CHECK(l[0] == cplx(80.0));
  CHECK(f.at(10.5) == cplx(0.0));
  CHECK(f.at(0.05) == cplx(0.5));
}

TEST_CASE("decayless mode tail") {
  CVec v(401, 1.0);
  const DecaylessMode m(v, 4.0);
  CHECK(m.norm2() == doctest::Approx(4.0));
  CHECK(m.tail_mass(3.0) == doctest::Approx(1.0));
  CHECK(m.tail_mass(2.995) == doctest::Approx(1.005));
  CHECK_THROWS_AS(DecaylessMode(v, 0.5), ValidationError);
}
