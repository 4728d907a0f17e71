#include "photonstore/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "photonstore/bessel.hpp"
#include "photonstore/numerics.hpp"

namespace photonstore {

namespace {

constexpr std::size_t kOrder = 10;

std::size_t base_panels(double d) {
  return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(std::sqrt(d))));
}

// Gauss panels uniform in u = sqrt(x) between sqrt(a) and sqrt(b).
void append_graded(QuadNodes& q, double a, double b, double panels_per_unit_u) {
  const double ua = std::sqrt(a), ub = std::sqrt(b);
  const auto panels = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(panels_per_unit_u * (ub - ua))));
  const auto n = numerics::composite_gauss(ua, ub, panels, kOrder);
  for (std::size_t i = 0; i < n.size(); ++i) {
    q.x.push_back(n.x[i] * n.x[i]);
    q.w.push_back(2.0 * n.x[i] * n.w[i]);
  }
}

// e^{-d(a+b)/2} times [2 I0(d sqrt(ab)) - (a+b)/sqrt(ab) I1(d sqrt(ab))]
double loss_kernel(double a, double b, double d) {
  const double g = std::sqrt(a * b);
  const double x = d * g;
  const double ridge = std::exp(-0.5 * d * (std::sqrt(a) - std::sqrt(b)) * (std::sqrt(a) - std::sqrt(b)));
  if (x < 1e-8) return std::exp(-0.5 * d * (a + b)) * (2.0 - 0.5 * d * (a + b));
  return ridge * (2.0 * bessel::i0e(x) - (a + b) / g * bessel::i1e(x));
}

}  // namespace

double kr(double z, double zp, double d) {
  const double x = d * std::sqrt(z * zp);
  const double r = std::sqrt(z) - std::sqrt(zp);
  return 0.5 * d * std::exp(-0.5 * d * r * r) * bessel::i0e(x);
}

double flat_wave_error(double d) {
  if (d < 0.0) throw ValidationError("flat_wave_error: d must be non-negative");
  return bessel::i0e(d) + bessel::i1e(d);
}

double step_error_estimate(double height, double z, double d) {
  if (!(d > 0.0)) throw ValidationError("step_error_estimate: d must be positive");
  return height * height * std::sqrt(2.0 / std::numbers::pi) * std::sqrt(std::max(0.0, 1.0 - z)) / std::sqrt(d);
}

QuadNodes kernel_quadrature(double d, std::span<const double> breaks, std::size_t refine) {
  const double p = static_cast<double>(base_panels(d) * std::max<std::size_t>(1, refine));
  RVec cuts{0.0, 1.0};
  for (double b : breaks)
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  QuadNodes q;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) append_graded(q, cuts[i], cuts[i + 1], p);
  return q;
}

QuadNodes symmetric_kernel_quadrature(double d, std::size_t refine) {
  const double p = static_cast<double>(base_panels(d) * std::max<std::size_t>(1, refine));
  QuadNodes lo;
  append_graded(lo, 0.0, 0.5, p);
  QuadNodes q;
  q.x = lo.x;
  q.w = lo.w;
  for (std::size_t i = lo.size(); i-- > 0;) {
    q.x.push_back(1.0 - lo.x[i]);
    q.w.push_back(lo.w[i]);
  }
  return q;
}

KernelMatrix::KernelMatrix(double d, std::size_t refine) : d_(d), nodes_(symmetric_kernel_quadrature(d, refine)) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("KernelMatrix: d must be positive");
  const std::size_t n = nodes_.size();
  a_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = std::sqrt(nodes_.w[i] * nodes_.w[j]) * kr(nodes_.x[i], nodes_.x[j], d);
      a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      a_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
}

CVec KernelMatrix::extend(std::span<const double> y, std::span<const cplx> f_nodes) const {
  CVec out(y.size(), 0.0);
  for (std::size_t k = 0; k < y.size(); ++k) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += kr(y[k], nodes_.x[j], d_) * nodes_.w[j] * f_nodes[j];
    out[k] = s;
  }
  return out;
}

double retrieval_efficiency(const std::function<cplx(double)>& s, double d, std::span<const double> breaks,
                            std::size_t refine) {
  if (!(d > 0.0)) throw ValidationError("retrieval_efficiency: d must be positive");
  RVec xb;
  for (double b : breaks) xb.push_back(1.0 - b);
  const QuadNodes q = kernel_quadrature(d, xb, refine);
  const std::size_t n = q.size();
  CVec f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = q.w[i] * s(1.0 - q.x[i]);
  double eta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    eta += kr(q.x[i], q.x[i], d) * std::norm(f[i]);
    for (std::size_t j = 0; j < i; ++j) eta += 2.0 * kr(q.x[i], q.x[j], d) * std::real(std::conj(f[i]) * f[j]);
  }
  return eta;
}

double retrieval_efficiency(const SpinWave& s, double d) {
  const numerics::UniformSpline sp(s.samples(), 0.0, 1.0);
  return retrieval_efficiency([&](double z) { return sp(z); }, d);
}

RVec loss_density(const SpinWave& s, double d) {
  if (!(d > 0.0)) throw ValidationError("loss_density: d must be positive");
  const numerics::UniformSpline sp(s.samples(), 0.0, 1.0);
  const double p = static_cast<double>(base_panels(d));
  RVec l(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double z = s.z(k);
    const cplx sz = s[k];
    double v = std::norm(sz);
    if (z > 0.0) {
      QuadNodes q;
      append_graded(q, 0.0, z, p);
      const std::size_t n = q.size();
      CVec g(n);
      cplx single = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const cplx si = sp(z - q.x[i]);
        g[i] = q.w[i] * si;
        single += q.w[i] * std::conj(si) * std::exp(-0.5 * d * q.x[i]);
      }
      v -= std::real(sz * d * single);
      double dbl = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dbl += loss_kernel(q.x[i], q.x[i], d) * std::norm(g[i]);
        for (std::size_t j = 0; j < i; ++j)
          dbl += 2.0 * loss_kernel(q.x[i], q.x[j], d) * std::real(g[i] * std::conj(g[j]));
      }
      v += 0.25 * d * d * dbl;
    }
    l[k] = v;
  }
  return l;
}

}  // namespace photonstore
