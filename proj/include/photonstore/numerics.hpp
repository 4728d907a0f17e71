#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace photonstore::numerics {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(std::size_t order);

/// Composite Gauss-Legendre nodes on [a, b] with equal panels.
struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};
Nodes composite_gauss(double a, double b, std::size_t panels, std::size_t order = 8);

/// Nodes on [0, z_max] placed uniformly in u = sqrt(z); suited to integrands
/// carrying sqrt(z) structure near the origin and Gaussian ridges in sqrt(z).
Nodes sqrt_graded_gauss(double z_max, std::size_t panels, std::size_t order = 8);

/// Natural cubic spline through uniform samples of a complex function.
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(std::span<const std::complex<double>> y, double x0, double x1);
  std::complex<double> operator()(double x) const;

 private:
  std::vector<std::complex<double>> y_;
  std::vector<std::complex<double>> m_;  // second derivatives
  double x0_ = 0.0;
  double h_ = 1.0;
};

/// Cumulative trapezoid integral of uniformly spaced samples (first entry 0).
std::vector<double> cumulative_trapezoid(std::span<const double> f, double h);

/// Bisection for a root of a monotone function on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo);
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace photonstore::numerics
