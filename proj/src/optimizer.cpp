#include "photonstore/optimizer.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "photonstore/numerics.hpp"

namespace photonstore {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

Index ix(std::size_t i) { return static_cast<Index>(i); }

RVec uniform_z(std::size_t nz) {
  RVec z(nz);
  for (std::size_t i = 0; i < nz; ++i) z[i] = static_cast<double>(i) / static_cast<double>(nz - 1);
  return z;
}

// Weighted L2 distance between unit vectors after removing the relative phase.
double phase_free_distance(const VectorXcd& a, const VectorXcd& b) {
  const cplx ip = a.dot(b);
  const cplx rot = std::abs(ip) > 0 ? std::conj(ip) / std::abs(ip) : cplx(1.0);
  return (b * rot - a).norm();
}

// Builds the result mode on a uniform grid from its continuum form.
OptimResult finish(std::function<cplx(double)> shape, std::size_t nz, bool fix_phase) {
  OptimResult r;
  const RVec z = uniform_z(nz);
  CVec v(nz);
  for (std::size_t i = 0; i < nz; ++i) v[i] = shape(z[i]);
  if (fix_phase) {
    // rotate the grid samples and the continuum shape identically
    std::size_t imax = 0;
    for (std::size_t i = 1; i < nz; ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    const cplx rot = std::abs(v[imax]) > 0 ? std::conj(v[imax]) / std::abs(v[imax]) : cplx(1.0);
    for (auto& x : v) x *= rot;
    shape = [shape, rot](double zz) { return rot * shape(zz); };
  } else {
    cplx mean = 0.0;
    for (auto x : v) mean += x;
    if (mean.real() < 0) {
      for (auto& x : v) x = -x;
      shape = [shape](double zz) { return -shape(zz); };
    }
  }
  r.mode = SpinWave(std::move(v)).renormalized();
  r.shape = std::move(shape);
  return r;
}

// Dense dominant eigenpair of the weighted kernel (backward problem).
struct BackwardSolve {
  std::shared_ptr<KernelMatrix> k;
  double lambda = 0.0;
  VectorXd g;  // sqrt(w) f, unit norm
};

BackwardSolve solve_backward(double d, std::size_t refine) {
  BackwardSolve b;
  b.k = std::make_shared<KernelMatrix>(d, refine);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(b.k->matrix());
  if (es.info() != Eigen::Success) throw NumericalError("kernel eigensolver failed");
  const Index n = es.eigenvalues().size();
  b.lambda = es.eigenvalues()(n - 1);
  b.g = es.eigenvectors().col(n - 1);
  return b;
}

// Square root of the (positive semidefinite) weighted kernel.
MatrixXd psd_sqrt(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("kernel eigensolver failed");
  VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

OptimResult optimal_backward_mode(double d, const OptimOptions& opt) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("optimal_backward_mode: d must be positive");
  BackwardSolve b = solve_backward(d, opt.refine);
  const KernelMatrix& km = *b.k;
  const std::size_t n = km.size();
  VectorXd sw(ix(n));
  for (std::size_t i = 0; i < n; ++i) sw(ix(i)) = std::sqrt(km.w()[i]);

  // Polish with the iteration f <- K f itself and record its residual.
  VectorXd g = b.g;
  double lambda = b.lambda;
  RVec history;
  double residual = 1.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    VectorXd g2 = km.matrix() * g;
    const double lam = g.dot(g2);
    g2.normalize();
    if (g2.sum() < 0) g2 = -g2;
    residual = (g2 - g).norm();
    const double dl = std::abs(lam - lambda);
    g = g2;
    lambda = lam;
    history.push_back(lambda);
    if (residual < opt.mode_tol && dl < opt.tol) break;
  }
  if (residual >= opt.mode_tol) {
    std::ostringstream os;
    os << "optimal_backward_mode: no convergence (residual " << residual << ")";
    throw NumericalError(os.str());
  }
  // f at nodes: g / sqrt(w); S(z) = f(1 - z) = (1/lambda) sum_j k(1-z, x_j) w_j f_j
  CVec f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = g(ix(i)) / sw(ix(i));
  auto k = b.k;
  const double lam = lambda;
  auto shape = [k, f, lam](double z) {
    const double y = 1.0 - z;
    return k->extend(std::span<const double>(&y, 1), f)[0] / lam;
  };
  OptimResult r = finish(shape, opt.nz, false);
  r.eigenvalue = lambda;
  r.efficiency = lambda;
  r.iterations = it + 1;
  r.residual = residual;
  r.history = std::move(history);
  return r;
}

OptimResult optimal_forward_mode(double d, const OptimOptions& opt) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("optimal_forward_mode: d must be positive");
  auto k = std::make_shared<KernelMatrix>(d, opt.refine);
  const std::size_t n = k->size();
  const MatrixXd& a = k->matrix();
  // A R is similar to B R B with B = A^{1/2}; R reverses node order.
  const MatrixXd b = psd_sqrt(a);
  MatrixXd br = b.rowwise().reverse();  // B R
  MatrixXd m = br * b;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("forward eigensolver failed");
  const Index last = ix(n) - 1;
  Index pick = last;
  if (std::abs(es.eigenvalues()(0)) > std::abs(es.eigenvalues()(last))) pick = 0;
  double lambda = es.eigenvalues()(pick);
  VectorXd g = (b * es.eigenvectors().col(pick)).normalized();

  RVec history;
  double residual = 1.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    VectorXd g2 = a * g.reverse();
    const double lam = g.dot(g2);
    g2.normalize();
    if (g2.dot(g) < 0) g2 = -g2;
    residual = (g2 - g).norm();
    const double dl = std::abs(lam - lambda);
    g = g2;
    lambda = lam;
    history.push_back(lambda);
    if (residual < opt.mode_tol && dl < opt.tol) break;
  }
  if (residual >= opt.mode_tol) {
    std::ostringstream os;
    os << "optimal_forward_mode: no convergence (residual " << residual << ")";
    throw NumericalError(os.str());
  }
  CVec s(n), sr(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = g(ix(i)) / std::sqrt(k->w()[i]);
  for (std::size_t i = 0; i < n; ++i) sr[i] = s[k->mirror(i)];
  const double lam = lambda;
  auto shape = [k, sr, lam](double z) { return k->extend(std::span<const double>(&z, 1), sr)[0] / lam; };
  OptimResult r = finish(shape, opt.nz, false);
  r.eigenvalue = lambda;
  r.efficiency = lambda * lambda;
  r.iterations = it + 1;
  r.residual = residual;
  r.history = std::move(history);
  return r;
}

OptimResult optimal_nondegenerate_mode(double d, double dk, const OptimOptions& opt) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("optimal_nondegenerate_mode: d must be positive");
  if (!(dk >= 0.0) || !std::isfinite(dk)) throw ValidationError("optimal_nondegenerate_mode: dk must be >= 0");
  auto k = std::make_shared<KernelMatrix>(d, opt.refine);
  const std::size_t n = k->size();
  const MatrixXd& a = k->matrix();
  VectorXcd ph(ix(n));
  for (std::size_t i = 0; i < n; ++i) ph(ix(i)) = std::polar(1.0, -2.0 * dk * k->x()[i]);

  // The antilinear map g -> A D conj(g) has Takagi form via C = B D B (complex
  // symmetric, B = A^{1/2}): C conj(y) = sigma y  =>  g = B y, A D conj(g) = sigma g.
  const MatrixXd b = psd_sqrt(a);
  const MatrixXcd c = b.cast<cplx>() * ph.asDiagonal() * b.cast<cplx>();
  Eigen::BDCSVD<MatrixXcd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXcd u1 = svd.matrixU().col(0);
  const VectorXcd v1 = svd.matrixV().col(0);
  const cplx t = (u1.transpose() * v1)(0);
  const cplx half = std::abs(t) > 0 ? std::sqrt(t / std::abs(t)) : cplx(1.0);
  const VectorXcd y = half * v1.conjugate();
  VectorXcd g = (b.cast<cplx>() * y).normalized();
  double lambda = svd.singularValues()(0);

  // Polish with the conjugating iteration S2 = K D S1*; its eigenvalue may alternate
  // in phase, so convergence is judged on |lambda| and the phase-free mode change.
  RVec history;
  double residual = 1.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    VectorXcd g2 = a.cast<cplx>() * (ph.asDiagonal() * g.conjugate());
    const double lam = g2.norm();
    g2 /= lam;
    residual = phase_free_distance(g, g2);
    const double dl = std::abs(lam - lambda);
    // undo the unimportant constant phase so the sequence does not oscillate
    const cplx ip = g.dot(g2);
    if (std::abs(ip) > 0) g2 *= std::conj(ip) / std::abs(ip);
    g = g2;
    lambda = lam;
    history.push_back(lambda);
    if (residual < opt.mode_tol && dl < opt.tol) break;
  }
  if (residual >= opt.mode_tol) {
    std::ostringstream os;
    os << "optimal_nondegenerate_mode: no convergence of |lambda| (residual " << residual << ")";
    throw NumericalError(os.str());
  }
  // g is a fixed point only up to phase; find lambda with A D conj(g) = lambda g
  const VectorXcd ag = a.cast<cplx>() * (ph.asDiagonal() * g.conjugate());
  const cplx lam_c = g.dot(ag);
  CVec src(n);  // w_j D_j conj(f_j) / lambda, with the weights applied inside extend()
  for (std::size_t i = 0; i < n; ++i)
    src[i] = ph(ix(i)) * std::conj(g(ix(i))) / std::sqrt(k->w()[i]) / lam_c;
  auto shape = [k, src](double z) { return k->extend(std::span<const double>(&z, 1), src)[0]; };
  OptimResult r = finish(shape, opt.nz, true);
  r.eigenvalue = lam_c;
  r.efficiency = lambda * lambda;
  r.iterations = it + 1;
  r.residual = residual;
  r.history = std::move(history);
  return r;
}

OptimResult kernel_power_iteration(double d, const SpinWave& seed, const OptimOptions& opt) {
  auto k = std::make_shared<KernelMatrix>(d, opt.refine);
  const std::size_t n = k->size();
  const numerics::UniformSpline sp(seed.samples(), 0.0, 1.0);
  VectorXd g(ix(n));
  for (std::size_t i = 0; i < n; ++i) g(ix(i)) = std::sqrt(k->w()[i]) * sp(1.0 - k->x()[i]).real();
  if (g.norm() == 0.0) throw ValidationError("kernel_power_iteration: seed has no real component");
  g.normalize();
  RVec history;
  double lambda = 0.0, residual = 1.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    VectorXd g2 = k->matrix() * g;
    const double lam = g.dot(g2);  // Rayleigh quotient of the current iterate
    g2.normalize();
    residual = (g2 - g).norm();
    const double dl = std::abs(lam - lambda);
    g = g2;
    lambda = lam;
    history.push_back(lambda);
    if (residual < opt.mode_tol && dl < opt.tol) break;
  }
  CVec f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = g(ix(i)) / std::sqrt(k->w()[i]);
  const double lam = lambda;
  auto shape = [k, f, lam](double z) {
    const double y = 1.0 - z;
    return k->extend(std::span<const double>(&y, 1), f)[0] / lam;
  };
  OptimResult r = finish(shape, opt.nz, false);
  r.eigenvalue = lambda;
  r.efficiency = lambda;
  r.iterations = it + 1;
  r.residual = residual;
  r.history = std::move(history);
  return r;
}

double halfwidth_dk(const SpinWave& s, double d) {
  const numerics::UniformSpline sp(s.samples(), 0.0, 1.0);
  const QuadNodes q = kernel_quadrature(d);
  const std::size_t n = q.size();
  MatrixXd kk(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      kk(ix(i), ix(j)) = kk(ix(j), ix(i)) = q.w[i] * q.w[j] * kr(q.x[i], q.x[j], d);
  CVec base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = sp(1.0 - q.x[i]);
  auto eta = [&](double dk) {
    VectorXcd f(ix(n));
    for (std::size_t i = 0; i < n; ++i) f(ix(i)) = base[i] * std::polar(1.0, -2.0 * dk * (1.0 - q.x[i]));
    return (f.adjoint() * kk.cast<cplx>() * f)(0).real();
  };
  const double e0 = eta(0.0);
  auto g = [&](double dk) { return eta(dk) / e0 - 0.5; };
  // locate the first crossing inside [0, 20 sqrt(d)], then bisect
  const double hi = 20.0 * std::sqrt(d);
  const int scan = 2000;
  double lo = 0.0;
  for (int i = 1; i <= scan; ++i) {
    const double x = hi * i / scan;
    if (g(x) < 0) return numerics::bisect(g, lo, x, 1e-4);
    lo = x;
  }
  throw NumericalError("halfwidth_dk: efficiency never halves inside [0, 20 sqrt(d)]");
}

namespace {

// |lambda|^2 as a function of dk for a fixed d, sharing the kernel square root.
struct NondegenerateScan {
  std::shared_ptr<KernelMatrix> k;
  MatrixXcd b;
  explicit NondegenerateScan(double d, std::size_t refine)
      : k(std::make_shared<KernelMatrix>(d, refine)), b(psd_sqrt(k->matrix()).cast<cplx>()) {}
  double operator()(double dk) const {
    const std::size_t n = k->size();
    VectorXcd ph(ix(n));
    for (std::size_t i = 0; i < n; ++i) ph(ix(i)) = std::polar(1.0, -2.0 * dk * k->x()[i]);
    const MatrixXcd c = b * ph.asDiagonal() * b;
    Eigen::BDCSVD<MatrixXcd> svd(c);
    const double s = svd.singularValues()(0);
    return s * s;
  }
};

double first_crossing(const std::function<double(double)>& g, double step, double limit, const char* what) {
  double lo = 0.0;
  for (double x = step; x <= limit; x += step) {
    if (g(x) < 0) return numerics::bisect(g, lo, x, 1e-6 * std::max(1.0, x));
    lo = x;
  }
  throw NumericalError(std::string(what) + ": no crossing found");
}

}  // namespace

double half_efficiency_dk(double d, const OptimOptions& opt) {
  NondegenerateScan scan(d, opt.refine);
  const double e0 = scan(0.0);
  return first_crossing([&](double dk) { return scan(dk) / e0 - 0.5; }, 0.05 * std::sqrt(d) + 0.05, 50.0 * (d + 10.0),
                        "half_efficiency_dk");
}

double forward_crossover_dk(double d, const OptimOptions& opt) {
  NondegenerateScan scan(d, opt.refine);
  const double ef = optimal_forward_mode(d, opt).efficiency;
  return first_crossing([&](double dk) { return scan(dk) - ef; }, 0.02 * std::sqrt(d) + 0.02, 50.0 * (d + 10.0),
                        "forward_crossover_dk");
}

TimeReversalResult time_reversal_iterate(const Params& params, const Grid& grid, const ControlField& storage_control,
                                         const ControlField& retrieval_control, const FieldMode& seed,
                                         Direction direction, const TimeReversalOptions& opt) {
  params.validate();
  grid.validate();
  SolverOptions so;
  so.extend = false;  // keep every pass on the same window so that reversal is exact
  const StageKind rk = direction == Direction::backward ? StageKind::retrieval_backward : StageKind::retrieval_forward;
  const ControlField s_tr = storage_control.time_reversed();
  const ControlField r_tr = retrieval_control.time_reversed();

  auto pass = [&](const FieldMode& in, const ControlField& cs, const ControlField& cr, SpinWave* stored) {
    StageSpec st{StageKind::storage, cs, in, std::nullopt};
    SimResult a = simulate(params, grid, st, so);
    if (stored) *stored = a.spin;
    StageSpec rt{rk, cr, std::nullopt, a.spin};
    return simulate(params, grid, rt, so).e_out;
  };

  TimeReversalResult res;
  FieldMode a = seed.resampled(grid.nt).renormalized();
  if (std::abs(a.t_win() - grid.t_win) > 1e-12 * grid.t_win)
    a = FieldMode(a.samples(), grid.t_win).renormalized();
  double prev = -1.0;
  for (int it = 0; it < opt.max_iters; ++it) {
    SpinWave stored;
    const FieldMode out = pass(a, storage_control, retrieval_control, &stored);
    const double eta = out.norm2();
    res.history.push_back(eta);
    if (eta < prev - opt.monotone_slack) res.monotone = false;
    prev = eta;
    res.efficiency = eta;
    res.spin = stored;
    res.input = a;
    res.iterations = it + 1;
    if (eta <= 0.0) throw NumericalError("time_reversal_iterate: zero efficiency (seed orthogonal to the optimum?)");
    // inverse map by time reversal: reversed output through the reversed controls
    const FieldMode back = pass(time_reverse(out).renormalized(), r_tr, s_tr, nullptr);
    const FieldMode next = time_reverse(back).renormalized();
    const cplx ip = trapezoid_inner(a.samples(), next.samples(), a.dt());
    CVec v(next.samples());
    if (std::abs(ip) > 0)
      for (auto& x : v) x *= std::conj(ip) / std::abs(ip);
    CVec diff(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) diff[i] = v[i] - a[i];
    res.residual = std::sqrt(trapezoid_norm2(diff, a.dt()));
    a = FieldMode(std::move(v), grid.t_win, true);
    if (res.residual < opt.tol) {
      // final pass with the converged input
      SpinWave st2;
      const FieldMode o2 = pass(a, storage_control, retrieval_control, &st2);
      const double e2 = o2.norm2();
      if (e2 < prev - opt.monotone_slack) res.monotone = false;
      res.history.push_back(e2);
      res.efficiency = e2;
      res.spin = st2;
      res.input = a;
      return res;
    }
  }
  std::ostringstream os;
  os << "time_reversal_iterate: no convergence after " << opt.max_iters << " iterations (residual " << res.residual
     << ")";
  throw NumericalError(os.str());
}

}  // namespace photonstore
