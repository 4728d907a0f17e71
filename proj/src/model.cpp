#include "photonstore/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "photonstore/numerics.hpp"

namespace photonstore {

namespace {

std::string fmt(const char* what, double v) {
  std::ostringstream os;
  os << what << " (got " << v << ")";
  return os.str();
}

cplx lerp_uniform(const CVec& v, double h, double x) {
  if (x < 0.0) return 0.0;
  const double s = x / h;
  const auto n = v.size();
  if (s >= static_cast<double>(n - 1)) return s > static_cast<double>(n - 1) + 1e-9 ? cplx(0.0) : v.back();
  const auto i = static_cast<std::size_t>(s);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * v[i] + t * v[i + 1];
}

}  // namespace

void Params::validate() const {
  if (!(std::isfinite(d) && d > 0.0)) throw ValidationError(fmt("optical depth d must be positive", d));
  if (!std::isfinite(delta)) throw ValidationError("detuning must be finite");
  if (!(std::isfinite(gamma_s) && gamma_s >= 0.0))
    throw ValidationError(fmt("spin decay gamma_s must be non-negative", gamma_s));
  if (!(std::isfinite(dk) && dk >= 0.0)) throw ValidationError(fmt("dk must be non-negative", dk));
}

void Grid::validate() const {
  if (nz < 2) throw ValidationError("grid needs nz >= 2");
  if (nt < 2) throw ValidationError("grid needs nt >= 2");
  if (!(std::isfinite(t_win) && t_win > 0.0)) throw ValidationError(fmt("window length must be positive", t_win));
}

double trapezoid_norm2(std::span<const cplx> f, double h) {
  if (f.empty()) return 0.0;
  double s = 0.5 * (std::norm(f.front()) + std::norm(f.back()));
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += std::norm(f[i]);
  return s * h;
}

cplx trapezoid_inner(std::span<const cplx> f, std::span<const cplx> g, double h) {
  cplx s = 0.5 * (std::conj(f.front()) * g.front() + std::conj(f.back()) * g.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * h;
}

// ---------------------------------------------------------------- SpinWave

SpinWave::SpinWave(CVec samples, bool normalized) : samples_(std::move(samples)), normalized_(normalized) {
  if (samples_.size() < 2) throw ValidationError("spin wave needs at least two samples");
}

SpinWave SpinWave::renormalized() const {
  const double n = std::sqrt(norm2());
  if (n == 0.0) throw ValidationError("cannot normalize a zero spin wave");
  CVec v(samples_);
  for (auto& x : v) x /= n;
  return SpinWave(std::move(v), true);
}

cplx SpinWave::at(double z) const {
  numerics::UniformSpline sp(samples_, 0.0, 1.0);
  return sp(z);
}

SpinWave SpinWave::resampled(std::size_t n) const {
  if (n == samples_.size()) return *this;
  numerics::UniformSpline sp(samples_, 0.0, 1.0);
  CVec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = sp(static_cast<double>(i) / static_cast<double>(n - 1));
  return SpinWave(std::move(v), false);
}

// ---------------------------------------------------------------- FieldMode

FieldMode::FieldMode(CVec samples, double t_win, bool normalized)
    : samples_(std::move(samples)), t_win_(t_win), normalized_(normalized) {
  if (samples_.size() < 2) throw ValidationError("field mode needs at least two samples");
  if (!(t_win_ > 0.0)) throw ValidationError(fmt("field window must be positive", t_win_));
}

FieldMode FieldMode::renormalized() const {
  const double n = std::sqrt(norm2());
  if (n == 0.0) throw ValidationError("cannot normalize a zero field mode");
  CVec v(samples_);
  for (auto& x : v) x /= n;
  return FieldMode(std::move(v), t_win_, true);
}

cplx FieldMode::at(double t) const { return lerp_uniform(samples_, dt(), t); }

FieldMode FieldMode::resampled(std::size_t n) const {
  if (n == samples_.size()) return *this;
  CVec v(n);
  const double h = t_win_ / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = at(std::min(t_win_, h * static_cast<double>(i)));
  return FieldMode(std::move(v), t_win_, false);
}

FieldMode FieldMode::last(double length) const {
  if (!(length > 0.0)) throw ValidationError("FieldMode::last: length must be positive");
  if (length >= t_win_) return *this;
  const auto keep = static_cast<std::size_t>(std::llround(length / dt()));
  const std::size_t start = samples_.size() - 1 - keep;
  CVec v(samples_.begin() + static_cast<std::ptrdiff_t>(start), samples_.end());
  return FieldMode(std::move(v), dt() * static_cast<double>(keep), false);
}

// ---------------------------------------------------------------- ControlField

ControlField::ControlField(CVec samples, double t_win) : samples_(std::move(samples)), t_win_(t_win) {
  if (samples_.size() < 2) throw ValidationError("control needs at least two samples");
  if (!(t_win_ > 0.0)) throw ValidationError(fmt("control window must be positive", t_win_));
  RVec mag2(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].real()) || !std::isfinite(samples_[i].imag()))
      throw ValidationError("control contains non-finite samples");
    mag2[i] = std::norm(samples_[i]);
  }
  h_cum_ = numerics::cumulative_trapezoid(mag2, dt());
}

double ControlField::h_between(double t1, double t2) const {
  auto h_at = [&](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= t_win_) return h_cum_.back();
    const double s = t / dt();
    const auto i = static_cast<std::size_t>(s);
    if (i + 1 >= h_cum_.size()) return h_cum_.back();
    const double f = s - static_cast<double>(i);
    return (1.0 - f) * h_cum_[i] + f * h_cum_[i + 1];
  };
  return h_at(t2) - h_at(t1);
}

cplx ControlField::at(double t) const { return lerp_uniform(samples_, dt(), t); }

ControlField ControlField::resampled(std::size_t n) const {
  if (n == samples_.size()) return *this;
  CVec v(n);
  const double h = t_win_ / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = at(std::min(t_win_, h * static_cast<double>(i)));
  return ControlField(std::move(v), t_win_);
}

ControlField ControlField::time_reversed() const {
  CVec v(samples_.rbegin(), samples_.rend());
  for (auto& x : v) x = std::conj(x);
  return ControlField(std::move(v), t_win_);
}

ControlField ControlField::clipped(double omega_cap) const {
  CVec v(samples_);
  for (auto& x : v) {
    const double a = std::abs(x);
    if (a > omega_cap) x *= omega_cap / a;
  }
  return ControlField(std::move(v), t_win_);
}

ControlField ControlField::rescaled_to(double t_win) const {
  const double f = std::sqrt(t_win_ / t_win);
  CVec v(samples_);
  for (auto& x : v) x *= f;
  return ControlField(std::move(v), t_win);
}

ControlField ControlField::constant(cplx value, double t_win, std::size_t nt) {
  return ControlField(CVec(nt, value), t_win);
}

// ---------------------------------------------------------------- DecaylessMode

DecaylessMode::DecaylessMode(CVec samples, double z_max, bool normalized)
    : samples_(std::move(samples)), z_max_(z_max), normalized_(normalized) {
  if (samples_.size() < 2) throw ValidationError("decayless mode needs at least two samples");
  if (!(z_max_ >= 1.0)) throw ValidationError(fmt("decayless mode support must reach z = 1", z_max_));
}

DecaylessMode DecaylessMode::renormalized() const {
  const double n = std::sqrt(norm2());
  if (n == 0.0) throw ValidationError("cannot normalize a zero decayless mode");
  CVec v(samples_);
  for (auto& x : v) x /= n;
  return DecaylessMode(std::move(v), z_max_, true);
}

cplx DecaylessMode::at(double z) const {
  if (z < 0.0 || z > z_max_) return 0.0;
  numerics::UniformSpline sp(samples_, 0.0, z_max_);
  return sp(z);
}

double DecaylessMode::tail_mass(double z_from) const {
  const double h = dz();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
    const double a = h * static_cast<double>(i);
    if (a + h <= z_from) continue;
    const double frac = a >= z_from ? 1.0 : (a + h - z_from) / h;
    s += frac * 0.5 * h * (std::norm(samples_[i]) + std::norm(samples_[i + 1]));
  }
  return s;
}

// ---------------------------------------------------------------- operations

FieldMode gaussian_like_input(double t_win, const Grid& grid) {
  if (!(std::isfinite(t_win) && t_win > 0.0)) throw ValidationError(fmt("t_win must be positive", t_win));
  if (grid.nt < 2) throw ValidationError("grid needs nt >= 2");
  const std::size_t n = grid.nt;
  CVec v(n);
  const double floor = std::exp(-7.5);
  for (std::size_t i = 0; i < n; ++i) {
    // symmetric integer offset keeps E(t) = E(T - t) bitwise on the grid
    const double x = (2.0 * static_cast<double>(i) - static_cast<double>(n - 1)) / (2.0 * static_cast<double>(n - 1));
    v[i] = (std::exp(-30.0 * x * x) - floor) / std::sqrt(t_win);
  }
  v.front() = 0.0;
  v.back() = 0.0;
  return FieldMode(std::move(v), t_win).renormalized();
}

FieldMode time_reverse(const FieldMode& mode) {
  CVec v(mode.samples().rbegin(), mode.samples().rend());
  for (auto& x : v) x = std::conj(x);
  return FieldMode(std::move(v), mode.t_win(), mode.normalized());
}

SpinWave flip_spin_wave(const SpinWave& s, double dk) {
  const std::size_t n = s.size();
  CVec v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx phase = dk == 0.0 ? cplx(1.0) : std::polar(1.0, -2.0 * dk * s.z(i));
    v[i] = s[n - 1 - i] * phase;
  }
  return SpinWave(std::move(v), s.normalized());
}

double l2_distance(const SpinWave& a, const SpinWave& b) {
  const SpinWave bb = b.resampled(a.size());
  CVec diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - bb[i];
  return std::sqrt(trapezoid_norm2(diff, a.dz()));
}

double overlap(const SpinWave& a, const SpinWave& b) {
  const SpinWave bb = b.resampled(a.size());
  const cplx ip = trapezoid_inner(a.samples(), bb.samples(), a.dz());
  return std::norm(ip) / (a.norm2() * bb.norm2());
}

double overlap(const FieldMode& a, const FieldMode& b) {
  const FieldMode bb = b.resampled(a.size());
  const cplx ip = trapezoid_inner(a.samples(), bb.samples(), a.dt());
  return std::norm(ip) / (a.norm2() * bb.norm2());
}

CVec fix_global_phase(CVec v) {
  if (v.empty()) return v;
  auto it = std::max_element(v.begin(), v.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  if (std::abs(*it) == 0.0) return v;
  const cplx rot = std::conj(*it) / std::abs(*it);
  for (auto& x : v) x *= rot;
  return v;
}

}  // namespace photonstore
