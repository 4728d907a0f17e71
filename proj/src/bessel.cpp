#include "photonstore/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace photonstore::bessel {

using cplx = std::complex<double>;

namespace {

constexpr double kSeriesMaxReal = 25.0;  // all-positive series, no cancellation
constexpr double kSeriesMaxComplex = 8.0;
constexpr double kAsymptoticMin = 30.0;

// sum_k (x^2/4)^k / (k! (k+nu)!), times (x/2)^nu
double real_series(double x, int nu) {
  const double q = 0.25 * x * x;
  double term = (nu == 0) ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + nu));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// e^{-x} I_nu(x) for large positive x
double real_asymptotic_scaled(double x, int nu) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (-(mu - odd * odd)) / (8.0 * k * x);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double scaled_real(double x, int nu) {
  const double ax = std::abs(x);
  double v;
  if (ax <= kSeriesMaxReal)
    v = real_series(ax, nu) * std::exp(-ax);
  else
    v = real_asymptotic_scaled(ax, nu);
  return (nu == 1 && x < 0) ? -v : v;
}

// Complex helpers assume Re z >= 0 and return e^{-Re z} I0(z).
cplx series_scaled(cplx z) {
  const cplx q = 0.25 * z * z;
  cplx term = 1.0;
  cplx sum = 1.0;
  for (int k = 1; k < 300; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > 2) break;
  }
  return sum * std::exp(-z.real());
}

// Trapezoid rule on the periodic integral (1/2pi) int_0^{2pi} exp(z cos t) dt;
// converges geometrically once the node count exceeds |z| by a margin.
cplx periodic_scaled(cplx z) {
  const double r = std::abs(z);
  const int quarter = static_cast<int>(std::ceil((r + 12.0 * std::cbrt(r) + 30.0) / 4.0));
  const int n = 4 * quarter;
  // exp(z cos t) at t and 2pi - t coincide; pair them.
  cplx sum = std::exp(z - z.real()) + std::exp(-z - z.real());
  for (int k = 1; k < n / 2; ++k) {
    const double c = std::cos(2.0 * std::numbers::pi * k / n);
    sum += 2.0 * std::exp(z * c - z.real());
  }
  return sum / static_cast<double>(n);
}

cplx hankel_scaled(cplx z) {
  // I0(z) ~ e^z/sqrt(2 pi z) sum c_k z^-k  +/- i e^{-z}/sqrt(2 pi z) sum (-1)^k c_k z^-k
  cplx term = 1.0, sum_plus = 1.0, sum_minus = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const cplx next = term * (odd * odd) / (8.0 * k * z);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum_plus += term;
    sum_minus += (k % 2 ? -1.0 : 1.0) * term;
    if (std::abs(term) < 1e-17) break;
  }
  const cplx root = std::sqrt(2.0 * std::numbers::pi * z);
  const cplx i(0.0, 1.0);
  const double sign = z.imag() >= 0.0 ? 1.0 : -1.0;
  const cplx growing = std::exp(cplx(0.0, z.imag())) * sum_plus;
  const cplx decaying = sign * i * std::exp(-2.0 * z.real() - cplx(0.0, z.imag())) * sum_minus;
  return (growing + decaying) / root;
}

double j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17) break;
  }
  return sum;
}

double j0_periodic(double x) {
  // J0(x) = (1/2pi) int_0^{2pi} cos(x sin t) dt, quarter-period symmetry
  const int quarter = static_cast<int>(std::ceil((x + 12.0 * std::cbrt(x) + 30.0) / 4.0));
  const int n = 4 * quarter;
  double sum = 1.0 + std::cos(x);  // t = 0 and t = pi/2 contributions per quarter
  for (int k = 1; k < quarter; ++k) sum += 2.0 * std::cos(x * std::sin(2.0 * std::numbers::pi * k / n));
  return 4.0 * sum / (2.0 * n) * 1.0;
}

double j0_hankel(double x) {
  double term = 1.0, p = 1.0, q = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (odd * odd) / (8.0 * k * x);
    if (next > term) break;
    term = next;
    // c_k / x^k: even k -> P with sign (-1)^{k/2}, odd k -> Q with sign (-1)^{(k-1)/2}
    const double sgn = ((k / 2) % 2) ? -1.0 : 1.0;
    if (k % 2 == 0)
      p += sgn * term;
    else
      q += sgn * term;
    if (term < 1e-17) break;
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (std::cos(chi) * p + std::sin(chi) * q);
}

}  // namespace

double i0e(double x) { return scaled_real(x, 0); }
double i1e(double x) { return scaled_real(x, 1); }
double i0(double x) {
  const double ax = std::abs(x);
  if (ax <= kSeriesMaxReal) return real_series(ax, 0);
  return real_asymptotic_scaled(ax, 0) * std::exp(ax);
}
double i1(double x) {
  const double ax = std::abs(x);
  const double v = ax <= kSeriesMaxReal ? real_series(ax, 1) : real_asymptotic_scaled(ax, 1) * std::exp(ax);
  return x < 0 ? -v : v;
}

double j0(double x) {
  const double ax = std::abs(x);
  if (ax <= kSeriesMaxComplex) return j0_series(ax);
  if (ax < kAsymptoticMin) return j0_periodic(ax);
  return j0_hankel(ax);
}

cplx i0e(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::domain_error("bessel::i0e: non-finite argument");
  if (z.real() < 0.0) z = -z;
  if (z.imag() == 0.0) return i0e(z.real());
  const double r = std::abs(z);
  if (r <= kSeriesMaxComplex) return series_scaled(z);
  if (r < kAsymptoticMin) return periodic_scaled(z);
  return hankel_scaled(z);
}

cplx i0(cplx z) {
  const cplx s = i0e(z);
  return s * std::exp(std::abs(z.real()));
}

cplx exp_i0(cplx a, cplx z) { return std::exp(a + std::abs(z.real())) * i0e(z); }

double bessel(Kind kind, double x) {
  switch (kind) {
    case Kind::I0: return i0(x);
    case Kind::I1: return i1(x);
    case Kind::J0: return j0(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

cplx bessel(Kind kind, cplx z) {
  switch (kind) {
    case Kind::I0: return i0(z);
    case Kind::J0: return i0(cplx(-z.imag(), z.real()));
    case Kind::I1: break;
  }
  throw std::invalid_argument("bessel: I1 of complex argument is not provided");
}

}  // namespace photonstore::bessel
