#include "photonstore/numerics.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace photonstore::numerics {

namespace {

GaussRule build_rule(std::size_t n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 =
            ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
            static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at converged node
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 =
          ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
          static_cast<double>(k);
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t order) {
  if (order < 2) throw std::invalid_argument("gauss_legendre: order must be >= 2");
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(order));
  return *slot;
}

Nodes composite_gauss(double a, double b, std::size_t panels, std::size_t order) {
  const auto& g = gauss_legendre(order);
  Nodes n;
  n.x.reserve(panels * order);
  n.w.reserve(panels * order);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    for (std::size_t k = 0; k < order; ++k) {
      n.x.push_back(lo + 0.5 * h * (g.x[k] + 1.0));
      n.w.push_back(0.5 * h * g.w[k]);
    }
  }
  return n;
}

Nodes sqrt_graded_gauss(double z_max, std::size_t panels, std::size_t order) {
  Nodes u = composite_gauss(0.0, std::sqrt(z_max), panels, order);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u.w[i] *= 2.0 * u.x[i];
    u.x[i] *= u.x[i];
  }
  return u;
}

UniformSpline::UniformSpline(std::span<const std::complex<double>> y, double x0, double x1)
    : y_(y.begin(), y.end()), m_(y.size()), x0_(x0) {
  const std::size_t n = y_.size();
  if (n < 2) throw std::invalid_argument("UniformSpline: need at least two samples");
  h_ = (x1 - x0) / static_cast<double>(n - 1);
  if (n < 3) return;
  // natural spline: tridiagonal system with diag 4, off-diag 1 (scaled by h^2/6)
  std::vector<std::complex<double>> d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h_ * h_);
  // Thomas algorithm on interior unknowns
  std::vector<double> cp(n, 0.0);
  std::vector<std::complex<double>> dp(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double denom = 4.0 - (i > 1 ? cp[i - 1] : 0.0);
    cp[i] = 1.0 / denom;
    dp[i] = (d[i] - (i > 1 ? dp[i - 1] : 0.0)) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = dp[i] - cp[i] * m_[i + 1];
    if (i == 1) break;
  }
}

std::complex<double> UniformSpline::operator()(double x) const {
  const std::size_t n = y_.size();
  double s = (x - x0_) / h_;
  if (s <= 0.0) return y_.front();
  if (s >= static_cast<double>(n - 1)) return y_.back();
  auto i = static_cast<std::size_t>(s);
  if (i >= n - 1) i = n - 2;
  const double t = s - static_cast<double>(i);
  const double a = 1.0 - t;
  const double h2 = h_ * h_ / 6.0;
  return a * y_[i] + t * y_[i + 1] + h2 * ((a * a * a - a) * m_[i] + (t * t * t - t) * m_[i + 1]);
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double h) {
  std::vector<double> c(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return c;
}

}  // namespace photonstore::numerics
