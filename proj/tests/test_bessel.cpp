#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "photonstore/bessel.hpp"

namespace b = photonstore::bessel;
using cplx = std::complex<double>;

namespace {
double rel(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-300); }
double rel(cplx a, cplx ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-300); }

// Direct quadrature of (1/pi) int_0^pi exp(z cos t) dt at high node count, as
// an independent oracle for complex I0 (scaled by e^{-|Re z|}).
cplx i0e_reference(cplx z) {
  const int n = 20000;
  cplx s = 0.0;
  const double shift = std::abs(z.real());
  for (int k = 0; k <= n; ++k) {
    const double t = std::numbers::pi * k / n;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    s += w * std::exp(z * std::cos(t) - shift);
  }
  return s / static_cast<double>(n);
}
}  // namespace

TEST_CASE("bessel values at the origin") {
  CHECK(b::i0(0.0) == 1.0);
  CHECK(b::i1(0.0) == 0.0);
  CHECK(b::j0(0.0) == 1.0);
  CHECK(b::i0(cplx(0.0)) == cplx(1.0));
}

TEST_CASE("real I0, I1 against the standard library") {
  for (double x : {1e-3, 0.1, 0.5, 1.0, 3.7, 8.0, 12.5, 24.9, 25.1, 30.0, 55.0, 100.0, 250.0, 699.0}) {
    CAPTURE(x);
    CHECK(rel(b::i0(x), std::cyl_bessel_i(0.0, x)) < 1e-12);
    CHECK(rel(b::i1(x), std::cyl_bessel_i(1.0, x)) < 1e-12);
    CHECK(rel(b::i0e(x), std::exp(-x) * std::cyl_bessel_i(0.0, x)) < 1e-12);
  }
  CHECK(b::i1(-2.0) == doctest::Approx(-b::i1(2.0)));
  CHECK(b::i0(-2.0) == b::i0(2.0));
}

TEST_CASE("scaled I0, I1 far past overflow") {
  // e^{-x}(I0+I1) -> sqrt(2/pi)/sqrt(x) (1 + 1/(8x) ...) ; compare to asymptote at 1e4
  const double x = 1e4;
  const double lead = std::sqrt(2.0 / (std::numbers::pi * x));
  CHECK(rel(b::i0e(x) + b::i1e(x), lead * (1.0 - 1.0 / (8.0 * x))) < 1e-6);
  // frozen high-precision value: e^{-100}(I0(100)+I1(100))
  CHECK(rel(b::i0e(100.0) + b::i1e(100.0), 0.07968853232422694) < 1e-12);
}

TEST_CASE("real J0 against the standard library") {
  for (double x : {0.3, 2.0, 7.9, 8.1, 15.0, 29.9, 30.1, 64.0, 150.0, 600.0}) {
    CAPTURE(x);
    CHECK(std::abs(b::j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-13);
  }
}

TEST_CASE("J0(x) = I0(ix)") {
  for (double x : {0.5, 2.0, 10.0}) {
    const cplx v = b::i0(cplx(0.0, x));
    CHECK(std::abs(v - b::j0(x)) < 1e-10);
    CHECK(std::abs(b::bessel(b::Kind::J0, cplx(x)) - b::j0(x)) < 1e-10);
  }
}

TEST_CASE("complex I0 across bands") {
  for (double r : {0.5, 5.0, 7.99, 8.01, 15.0, 29.0, 31.0, 80.0, 200.0}) {
    for (double ang : {0.0, 0.3, 0.785, 1.2, 1.5, 1.5707963267948966, 2.0, 2.9}) {
      const cplx z = std::polar(r, ang);
      CAPTURE(z);
      CHECK(rel(b::i0e(z), i0e_reference(z)) < 1e-10);
    }
  }
}

TEST_CASE("exp_i0 avoids overflow") {
  const cplx z(2000.0, 150.0);
  const cplx v = b::exp_i0(-z, z);
  CHECK(std::isfinite(v.real()));
  CHECK(std::abs(v) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * std::abs(z))).epsilon(1e-3));
}

TEST_CASE("scaled and naive paths agree where representable") {
  for (double x : {0.7, 20.0, 300.0}) {
    CHECK(rel(b::i0e(x) * std::exp(x), b::i0(x)) < 1e-13);
    const cplx z(x, 0.4 * x);
    CHECK(rel(b::i0e(z) * std::exp(x), b::i0(z)) < 1e-12);
  }
}

TEST_CASE("complex I1 is rejected") {
  CHECK_THROWS_AS(b::bessel(b::Kind::I1, cplx(1.0, 1.0)), std::invalid_argument);
}
