#include "photonstore/adiabatic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "photonstore/bessel.hpp"
#include "photonstore/numerics.hpp"

namespace photonstore {

namespace {

constexpr double kResonant = 1e-3;
constexpr std::size_t kTableIntervals = 4096;
constexpr std::size_t kOrder = 10;

std::size_t panels(double p) { return static_cast<std::size_t>(std::ceil(std::max(16.0, p))); }

// Storage-side kernel -sqrt(d)/(1+i delta) e^{-(h+dz)/(1+i delta)} I0(2 sqrt(h d z)/(1+i delta)).
cplx lossy_kernel(double h, double dz, double sd, cplx c) {
  return -sd / c * bessel::exp_i0(-(h + dz) / c, 2.0 * std::sqrt(h * dz) / c);
}

// Response tabulated on a grid uniform in v = sqrt(h), with the cumulative
// G(h) = int_0^h |K|^2 from Simpson's rule and Hermite inversion inside cells.
class HTable {
 public:
  template <class K>
  HTable(K&& k, double h_max, std::size_t n = kTableIntervals) : n_(n), dv_(std::sqrt(h_max) / static_cast<double>(n)) {
    CVec half(2 * n + 1);
    for (std::size_t j = 0; j <= 2 * n; ++j) {
      const double v = 0.5 * dv_ * static_cast<double>(j);
      half[j] = k(v * v);
    }
    f_.resize(n + 1);
    g_.assign(n + 1, 0.0);
    auto f = [&](std::size_t j) { return std::norm(half[j]) * dv_ * static_cast<double>(j); };  // |K|^2 dh/dv
    for (std::size_t i = 0; i <= n; ++i) f_[i] = f(2 * i);
    for (std::size_t i = 0; i < n; ++i) g_[i + 1] = g_[i] + dv_ / 6.0 * (f_[i] + 4.0 * f(2 * i + 1) + f_[i + 1]);
    for (const auto& x : half) peak_ = std::max(peak_, std::abs(x));
    spline_ = numerics::UniformSpline(half, 0.0, std::sqrt(h_max));
  }

  double total() const { return g_.back(); }
  double h_max() const { return sq(dv_ * static_cast<double>(n_)); }
  double peak() const { return peak_; }
  cplx response(double h) const { return spline_(std::sqrt(std::clamp(h, 0.0, h_max()))); }

  /// h with G(h) = target (clamped to the table range).
  double solve(double target) const {
    if (target <= 0.0) return 0.0;
    if (target >= total()) return h_max();
    const auto it = std::upper_bound(g_.begin(), g_.end(), target);
    const std::size_t i = static_cast<std::size_t>(it - g_.begin()) - 1;
    auto cubic = [&](double s) {
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * g_[i] + (s3 - 2 * s2 + s) * dv_ * f_[i] + (-2 * s3 + 3 * s2) * g_[i + 1] +
             (s3 - s2) * dv_ * f_[i + 1] - target;
    };
    const double s = numerics::bisect(cubic, 0.0, 1.0, 1e-14, 80);
    return sq(dv_ * (static_cast<double>(i) + s));
  }

 private:
  static double sq(double x) { return x * x; }
  std::size_t n_;
  double dv_;
  RVec f_, g_;
  double peak_ = 0.0;
  numerics::UniformSpline spline_;
};

FieldMode normalized_with_weight(const FieldMode& e, double gamma) {
  if (gamma == 0.0) return e.renormalized();
  CVec v(e.samples());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(gamma * e.t(i));
  return FieldMode(std::move(v), e.t_win()).renormalized();
}

// Converts per-sample (target amplitude, response) pairs into a control, applying
// divergence zeroing, clipping and the non-negligible-clipping check.
ControlField finish_control(const CVec& amp, const CVec& resp, double t_win, const HTable& tab,
                            const ShapingConfig& cfg) {
  const std::size_t nt = amp.size();
  const double dt = t_win / static_cast<double>(nt - 1);
  CVec om(nt, 0.0);
  double clipped = 0.0, energy = 0.0;
  double t_first = -1.0, t_last = -1.0;
  for (std::size_t i = 0; i < nt; ++i) {
    energy += std::norm(amp[i]);
    if (amp[i] == cplx(0.0)) continue;
    if (std::abs(resp[i]) < cfg.eps_div * tab.peak()) continue;  // divergence: truncate
    cplx o = amp[i] / resp[i];
    if (std::abs(o) > cfg.omega_cap) {
      o *= cfg.omega_cap / std::abs(o);
      clipped += std::norm(amp[i]);
      if (t_first < 0.0) t_first = dt * static_cast<double>(i);
      t_last = dt * static_cast<double>(i);
    }
    om[i] = o;
  }
  if (energy > 0.0 && clipped / energy > 1e-2) {
    std::ostringstream os;
    os << "target too fast: |Omega| exceeds omega_cap = " << cfg.omega_cap << " on t in [" << t_first << ", "
       << t_last << "] carrying " << clipped / energy << " of the target energy";
    throw NumericalError(os.str());
  }
  return ControlField(std::move(om), t_win);
}

struct SplineFn {
  numerics::UniformSpline sp;
  double lo, hi;
  cplx operator()(double x) const { return (x < lo || x > hi) ? cplx(0.0) : sp(x); }
};

SplineFn spline_of(const DecaylessMode& s) { return {numerics::UniformSpline(s.samples(), 0.0, s.z_max()), 0.0, s.z_max()}; }

CVec input_on_control_grid(const FieldMode& e, const ControlField& c) {
  if (e.size() == c.size()) return e.samples();
  CVec v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = e.at(c.t(i) * e.t_win() / c.t_win());
  return v;
}

}  // namespace

// ------------------------------------------------------------------ config

void ShapingConfig::validate() const {
  if (!(h_total >= 0.0) || !std::isfinite(h_total)) throw ValidationError("h_total must be finite and non-negative");
  if (!(omega_cap > 0.0)) throw ValidationError("omega_cap must be positive");
  if (!(eps_div >= 0.0)) throw ValidationError("eps_div must be non-negative");
  if (!(complete_factor >= 1.0)) throw ValidationError("complete_factor must be at least 1");
}

double ShapingConfig::resolve_h_total(const Params& p) const {
  validate();
  const double need = complete_factor * std::norm(cplx(p.d, p.delta)) / p.d;
  if (h_total == 0.0) return need;
  if (h_total < need * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "h_total = " << h_total << " violates d h >= " << complete_factor << " |d + i delta|^2 (needs h >= " << need
       << ")";
    throw ValidationError(os.str());
  }
  return h_total;
}

// ------------------------------------------------------------------ retrieval

namespace {
cplx retrieval_response_fn(const numerics::UniformSpline& sp, double h, const Params& p) {
  const double d = p.d;
  const cplx c(1.0, p.delta);
  const double sd = std::sqrt(d);
  const double np = 2.0 * std::sqrt(d) + (2.0 * std::sqrt(h * d) / std::abs(c) + d * std::abs(p.delta) / std::norm(c)) / 2.0;
  const auto nodes = numerics::composite_gauss(0.0, 1.0, panels(16.0 + np), kOrder);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double u = nodes.x[i];
    const double z = u * u;
    acc += 2.0 * u * nodes.w[i] * lossy_kernel(h, d * z, sd, c) * sp(1.0 - z);
  }
  return acc;
}
}  // namespace

cplx retrieval_response(const SpinWave& s, double h, const Params& params) {
  params.validate();
  if (!(h >= 0.0)) throw ValidationError("retrieval_response: h must be non-negative");
  return retrieval_response_fn(numerics::UniformSpline(s.samples(), 0.0, 1.0), h, params);
}

FieldMode adiabatic_retrieve(const SpinWave& s, const ControlField& control, const Params& params) {
  params.validate();
  if (control.size() < 2) throw ValidationError("adiabatic_retrieve: control required");
  const numerics::UniformSpline sp(s.samples(), 0.0, 1.0);
  CVec out(control.size(), 0.0);
  for (std::size_t i = 0; i < control.size(); ++i) {
    if (control[i] == cplx(0.0)) continue;
    out[i] = control[i] * retrieval_response_fn(sp, control.h_cum()[i], params);
    if (params.gamma_s > 0.0) out[i] *= std::exp(-params.gamma_s * control.t(i));
  }
  return FieldMode(std::move(out), control.t_win());
}

// ------------------------------------------------------------------ storage

SpinWave adiabatic_store(const FieldMode& e_in, const ControlField& control, const Params& params, std::size_t nz) {
  params.validate();
  if (control.size() < 2) throw ValidationError("adiabatic_store: control required");
  if (std::abs(e_in.t_win() - control.t_win()) > 1e-9 * control.t_win())
    throw ValidationError("adiabatic_store: input and control must share the window");
  if (nz < 2) throw ValidationError("adiabatic_store: nz must be at least 2");
  const CVec e = input_on_control_grid(e_in, control);
  const std::size_t nt = control.size();
  const double dt = control.dt();
  const double H = control.h_total();
  const double T = control.t_win();
  const double sd = std::sqrt(params.d);
  const cplx c(1.0, params.delta);
  CVec src(nt);  // trapezoid weight * Omega^* E_in * spin decay
  for (std::size_t i = 0; i < nt; ++i) {
    const double w = (i == 0 || i + 1 == nt) ? 0.5 * dt : dt;
    src[i] = w * std::conj(control[i]) * e[i];
    if (params.gamma_s > 0.0) src[i] *= std::exp(-params.gamma_s * (T - control.t(i)));
  }
  CVec s(nz, 0.0);
  for (std::size_t k = 0; k < nz; ++k) {
    const double dz = params.d * static_cast<double>(k) / static_cast<double>(nz - 1);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      if (src[i] == cplx(0.0)) continue;
      acc += src[i] * lossy_kernel(std::max(0.0, H - control.h_cum()[i]), dz, sd, c);
    }
    s[k] = acc;
  }
  return SpinWave(std::move(s));
}

// ------------------------------------------------------------------ decayless

DecaylessMode decayless_store(const FieldMode& e_in, const ControlField& control, double d, double delta,
                              const DecaylessOptions& opt) {
  Params{d, delta}.validate();
  if (control.size() < 2) throw ValidationError("decayless_store: control required");
  if (std::abs(e_in.t_win() - control.t_win()) > 1e-9 * control.t_win())
    throw ValidationError("decayless_store: input and control must share the window");
  const CVec e = input_on_control_grid(e_in, control);
  const std::size_t nt = control.size();
  const double dt = control.dt();
  const double H = control.h_total();
  const RVec& hc = control.h_cum();
  const double sd = std::sqrt(d);
  const bool resonant = std::abs(delta) < kResonant;

  auto eval = [&](double z) -> cplx {
    if (resonant) {
      // lossless group-velocity propagation: s(z) = -sqrt(d) E Omega^* / |Omega|^2 at h(t,T) = d z
      const double target = H - d * z;
      if (target < 0.0) return 0.0;
      auto it = std::upper_bound(hc.begin(), hc.end(), target);
      if (it == hc.end()) it = hc.end() - 1;
      const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - hc.begin())) - 1;
      const double span = hc[i + 1] - hc[i];
      const double f = span > 0.0 ? std::clamp((target - hc[i]) / span, 0.0, 1.0) : 0.0;
      const cplx om = (1.0 - f) * control[i] + f * control[i + 1];
      const cplx ev = (1.0 - f) * e[i] + f * e[i + 1];
      const double m2 = std::norm(om);
      return m2 > 0.0 ? -sd * ev * std::conj(om) / m2 : cplx(0.0);
    }
    const cplx i1(0.0, 1.0);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      if (control[i] == cplx(0.0) || e[i] == cplx(0.0)) continue;
      const double w = (i == 0 || i + 1 == nt) ? 0.5 * dt : dt;
      const double h = std::max(0.0, H - hc[i]);
      acc += w * std::conj(control[i]) * std::exp(i1 * (h + d * z) / delta) *
             bessel::j0(2.0 * std::sqrt(h * d * z) / std::abs(delta)) * e[i];
    }
    return i1 * sd / delta * acc;
  };

  const double in_norm = e_in.norm2();
  double Z = opt.z_max > 0.0 ? opt.z_max : 1.0 + 6.0 / std::sqrt(std::max(d, 1.0));
  for (;;) {
    const auto n = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(opt.samples_per_unit * Z)) + 1, 64,
                                           opt.max_samples);
    CVec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = eval(Z * static_cast<double>(k) / static_cast<double>(n - 1));
    DecaylessMode m(std::move(v), Z);
    if (opt.z_max > 0.0 || 2.0 * Z > opt.max_z || m.tail_mass(0.5 * Z) <= opt.tail_tol * std::max(in_norm, 1e-300))
      return m;
    Z *= 2.0;
  }
}

cplx decayless_response(const DecaylessMode& s, double h, double d, double delta) {
  const SplineFn sp = spline_of(s);
  const double sd = std::sqrt(d);
  if (std::abs(delta) < kResonant) return -sp(h / d) / sd;
  const cplx i1(0.0, 1.0);
  const double Z = s.z_max();
  const double np = 2.0 * std::sqrt(d * Z) + (2.0 * std::sqrt(h * d * Z) / std::abs(delta) + d * Z / std::abs(delta)) / 2.0;
  const auto nodes = numerics::sqrt_graded_gauss(Z, panels(16.0 * std::sqrt(Z) + np), kOrder);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double z = nodes.x[i];
    acc += nodes.w[i] * std::exp(-i1 * (h + d * z) / delta) * bessel::j0(2.0 * std::sqrt(h * d * z) / std::abs(delta)) *
           sp(z);
  }
  return -i1 * sd / delta * acc;
}

FieldMode decayless_inverse(const DecaylessMode& s, const ControlField& control, double d, double delta) {
  Params{d, delta}.validate();
  const double H = control.h_total();
  CVec out(control.size(), 0.0);
  for (std::size_t i = 0; i < control.size(); ++i) {
    if (control[i] == cplx(0.0)) continue;
    out[i] = control[i] * decayless_response(s, std::max(0.0, H - control.h_cum()[i]), d, delta);
  }
  return FieldMode(std::move(out), control.t_win());
}

// ------------------------------------------------------------------ dressing

namespace {
// d e^{-d(z+z')} I0(2 d sqrt(z z'))
double dress_kernel(double z, double zp, double d) {
  const double r = std::sqrt(z) - std::sqrt(zp);
  return d * std::exp(-d * r * r) * bessel::i0e(2.0 * d * std::sqrt(z * zp));
}

numerics::Nodes dress_nodes(double d, double z_max) {
  return numerics::sqrt_graded_gauss(z_max, panels(std::max(16.0, 4.0 * std::sqrt(d)) * std::sqrt(z_max)), kOrder);
}
}  // namespace

SpinWave decay_dress(const DecaylessMode& s, double d, std::size_t nz) {
  Params{d}.validate();
  if (nz < 2) throw ValidationError("decay_dress: nz must be at least 2");
  const SplineFn sp = spline_of(s);
  const auto q = dress_nodes(d, s.z_max());
  CVec f(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) f[j] = q.w[j] * sp(q.x[j]);
  CVec out(nz);
  for (std::size_t k = 0; k < nz; ++k) {
    const double z = static_cast<double>(k) / static_cast<double>(nz - 1);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) acc += dress_kernel(z, q.x[j], d) * f[j];
    out[k] = acc;
  }
  return SpinWave(std::move(out));
}

DecaylessMode optimal_decayless_mode(double d, double tol) {
  Params{d}.validate();
  const auto out = numerics::sqrt_graded_gauss(1.0, panels(std::max(16.0, 4.0 * std::sqrt(d))), kOrder);
  double Z = 1.0 + 6.0 / std::sqrt(std::max(d, 1.0));
  for (int attempt = 0; attempt < 14; ++attempt, Z = 1.0 + 2.0 * (Z - 1.0)) {
    const auto in = dress_nodes(d, Z);
    const auto m = static_cast<Eigen::Index>(out.size()), n = static_cast<Eigen::Index>(in.size());
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        a(i, j) = std::sqrt(out.w[i] * in.w[j]) * dress_kernel(out.x[i], in.x[j], d);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    Eigen::VectorXd v = svd.matrixV().col(0);
    // polish with the power iteration of the composed map
    double sigma2 = svd.singularValues()(0) * svd.singularValues()(0);
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd nv = a.transpose() * (a * v);
      const double lam = nv.norm();
      nv /= lam;
      if (nv.dot(v) < 0) nv = -nv;
      const double change = (nv - v).norm();
      v = nv;
      sigma2 = lam;
      if (change < tol) break;
    }
    if (v.sum() < 0) v = -v;
    // Nystrom extension onto a uniform grid: s = D^T S / sigma^2
    Eigen::VectorXd S = a * v;  // sqrt(w_out) * S(x_i)
    const auto ns = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(400.0 * Z)) + 1, 201, 40001);
    CVec samples(ns);
    for (std::size_t k = 0; k < ns; ++k) {
      const double z = Z * static_cast<double>(k) / static_cast<double>(ns - 1);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) acc += dress_kernel(out.x[i], z, d) * std::sqrt(out.w[i]) * S(i);
      samples[k] = acc / sigma2;
    }
    DecaylessMode mode = DecaylessMode(std::move(samples), Z).renormalized();
    if (mode.tail_mass(1.0 + 0.5 * (Z - 1.0)) <= 1e-6) return mode;
  }
  throw NumericalError("optimal_decayless_mode: support did not converge");
}

// ------------------------------------------------------------------ shaping

ControlField shape_retrieval_control(const SpinWave& s, const FieldMode& target, const Params& params,
                                     const ShapingConfig& cfg) {
  params.validate();
  const double H = cfg.resolve_h_total(params);
  const FieldMode e2 = normalized_with_weight(target, params.gamma_s);
  const numerics::UniformSpline sp(s.samples(), 0.0, 1.0);
  Params p0 = params;
  p0.gamma_s = 0.0;
  const HTable tab([&](double h) { return retrieval_response_fn(sp, h, p0); }, H);
  const double eta = tab.total();
  RVec mag2(e2.size());
  for (std::size_t i = 0; i < e2.size(); ++i) mag2[i] = std::norm(e2[i]);
  const RVec cum = numerics::cumulative_trapezoid(mag2, e2.dt());
  CVec amp(e2.size()), resp(e2.size());
  for (std::size_t i = 0; i < e2.size(); ++i) {
    const double h = tab.solve(eta * cum[i] / cum.back());
    amp[i] = std::sqrt(eta) * e2[i];
    resp[i] = tab.response(h);
  }
  return finish_control(amp, resp, e2.t_win(), tab, cfg);
}

ControlField shape_storage_control(const FieldMode& e_in, const DecaylessMode& s, const Params& params,
                                   const ShapingConfig& cfg) {
  params.validate();
  double H = cfg.resolve_h_total(params);
  const double d = params.d, delta = params.delta;
  if (std::abs(delta) < kResonant) H = std::max(H, d * s.z_max());
  // spin decay during storage: shape for E_in(t) e^{-gamma_s (T - t)}
  FieldMode e = e_in;
  if (params.gamma_s > 0.0) {
    CVec v(e_in.samples());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(-params.gamma_s * (e_in.t_win() - e_in.t(i)));
    e = FieldMode(std::move(v), e_in.t_win());
  }
  e = e.renormalized();
  const HTable tab([&](double h) { return decayless_response(s, h, d, delta); }, H);
  const double total = tab.total();
  const std::size_t nt = e.size();
  RVec mag2(nt);
  for (std::size_t i = 0; i < nt; ++i) mag2[i] = std::norm(e[i]);
  const RVec cum = numerics::cumulative_trapezoid(mag2, e.dt());
  CVec amp(nt), resp(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double remaining = (cum.back() - cum[i]) / cum.back();
    const double h = tab.solve(total * remaining);
    amp[i] = std::sqrt(total) * e[i];
    resp[i] = tab.response(h);
  }
  return finish_control(amp, resp, e.t_win(), tab, cfg);
}

// ------------------------------------------------------------------ EIT window

EitWindowProfile eit_window_diagnostics(const SpinWave& s, double d) {
  Params{d}.validate();
  const CVec& v = s.samples();
  const std::size_t n = v.size();
  const double hz = s.dz();
  // filtered spin wave: piecewise-linear S convolved with a Gaussian of variance 2 tau / d at 1 - tau
  auto filtered = [&](double tau) -> cplx {
    const double mu = 1.0 - tau;
    const double sig = std::sqrt(2.0 * tau / d);
    if (sig < 1e-14) return (mu < 0.0 || mu > 1.0) ? cplx(0.0) : s.at(mu);
    cplx acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double z0 = hz * static_cast<double>(j), z1 = z0 + hz;
      const double a = (z0 - mu) / sig, b = (z1 - mu) / sig;
      if (a > 40.0 || b < -40.0) continue;
      const double dPhi = 0.5 * (std::erf(b / std::numbers::sqrt2) - std::erf(a / std::numbers::sqrt2));
      const double dphi = (std::exp(-0.5 * b * b) - std::exp(-0.5 * a * a)) / std::sqrt(2.0 * std::numbers::pi);
      const cplx slope = (v[j + 1] - v[j]) / hz;
      const cplx at_mu = v[j] + slope * (mu - z0);
      acc += at_mu * dPhi - slope * sig * dphi;
    }
    return acc;
  };
  double tmax = 2.0;
  for (int i = 0; i < 20; ++i) tmax = std::max(1.0 + 10.0 * std::sqrt(2.0 * tmax / d), 40.0 / d);
  const auto q = numerics::sqrt_graded_gauss(tmax, panels(std::max(32.0, 8.0 * std::sqrt(d)) * std::sqrt(tmax)), kOrder);
  EitWindowProfile p;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double g2 = std::norm(filtered(q.x[i]));
    p.tau.push_back(q.x[i]);
    p.width.push_back(std::sqrt(d / q.x[i]));
    p.intensity.push_back(g2);
    p.efficiency += q.w[i] * g2;
  }
  p.error = 1.0 - p.efficiency;
  return p;
}

}  // namespace photonstore
