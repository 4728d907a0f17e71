#pragma once

#include <complex>

namespace photonstore::bessel {

enum class Kind { I0, I1, J0 };

// Real-argument Bessel functions. i0/i1 overflow (return inf) beyond |x| ~ 713;
// use the exponentially scaled forms i0e(x) = e^{-|x|} I0(x), i1e(x) = e^{-|x|} I1(x).
double i0(double x);
double i1(double x);
double i0e(double x);
double i1e(double x);
double j0(double x);

/// I0 of complex argument.
std::complex<double> i0(std::complex<double> z);
/// e^{-|Re z|} I0(z); finite for any representable z.
std::complex<double> i0e(std::complex<double> z);
/// e^{a} I0(z) evaluated without intermediate overflow.
std::complex<double> exp_i0(std::complex<double> a, std::complex<double> z);

double bessel(Kind kind, double x);
/// Complex dispatch; I1 is not provided for complex argument.
std::complex<double> bessel(Kind kind, std::complex<double> z);

}  // namespace photonstore::bessel
