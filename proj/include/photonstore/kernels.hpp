#pragma once

#include <functional>
#include <span>

#include <Eigen/Dense>

#include "photonstore/model.hpp"

namespace photonstore {

/// Retrieval kernel (d/2) e^{-d(z+z')/2} I0(d sqrt(z z')), evaluated in scaled form.
double kr(double z, double zp, double d);

/// e^{-d}(I0(d) + I1(d)): the exact error of retrieving a flat spin wave.
double flat_wave_error(double d);

/// Large-d error l^2 sqrt(2/pi) sqrt(1-z)/sqrt(d) of an amplitude step of height l at z.
double step_error_estimate(double height, double z, double d);

/// Quadrature nodes on [0,1] for kernel integrals: composite Gauss-Legendre in
/// u = sqrt(x), split at the given breakpoints so that discontinuous integrands
/// are integrated panel-wise.
struct QuadNodes {
  RVec x;
  RVec w;
  std::size_t size() const { return x.size(); }
};
QuadNodes kernel_quadrature(double d, std::span<const double> breaks = {}, std::size_t refine = 1);

/// Nodes symmetric under x -> 1 - x (sqrt-graded towards both ends); needed when
/// the kernel is composed with a reflection.
QuadNodes symmetric_kernel_quadrature(double d, std::size_t refine = 1);

/// Weighted Nystrom matrix sqrt(w_i) k_r(x_i, x_j) sqrt(w_j) on symmetric nodes.
class KernelMatrix {
 public:
  explicit KernelMatrix(double d, std::size_t refine = 1);

  double d() const { return d_; }
  std::size_t size() const { return nodes_.size(); }
  const RVec& x() const { return nodes_.x; }
  const RVec& w() const { return nodes_.w; }
  const Eigen::MatrixXd& matrix() const { return a_; }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
  /// Index of the node at 1 - x_i.
  std::size_t mirror(std::size_t i) const { return size() - 1 - i; }

  /// Nystrom extension of sum_j k_r(y, x_j) w_j f_j at arbitrary points y.
  CVec extend(std::span<const double> y, std::span<const cplx> f_nodes) const;

 private:
  double d_;
  QuadNodes nodes_;
  Eigen::MatrixXd a_;
};

/// Quadratic form int int S(1-z) S*(1-z') k_r(z,z'); for an unnormalized S this is
/// the total (product) efficiency.
double retrieval_efficiency(const SpinWave& s, double d);
/// Same, for a spin wave given as a function of z; `breaks` lists z positions of
/// discontinuities.
double retrieval_efficiency(const std::function<cplx(double)>& s, double d,
                            std::span<const double> breaks = {}, std::size_t refine = 1);

/// Position-dependent loss per unit length during complete retrieval, sampled on
/// the grid of s.  int_0^1 l = |s|^2 - retrieval_efficiency(s, d).
RVec loss_density(const SpinWave& s, double d);

}  // namespace photonstore
