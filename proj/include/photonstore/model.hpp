#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace photonstore {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

/// Thrown when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimensionless configuration of the ensemble.
///   d       optical depth
///   delta   single-photon detuning in units of the polarization decay rate
///   gamma_s spin-wave decay rate in the same units
///   dk      metastable nondegeneracy momentum times ensemble length
struct Params {
  double d = 1.0;
  double delta = 0.0;
  double gamma_s = 0.0;
  double dk = 0.0;

  void validate() const;
};

/// Uniform space-time discretization: nz points on [0,1], nt points on [0,t_win].
struct Grid {
  std::size_t nz = 201;
  std::size_t nt = 2001;
  double t_win = 1.0;

  void validate() const;
  double dz() const { return 1.0 / static_cast<double>(nz - 1); }
  double dt() const { return t_win / static_cast<double>(nt - 1); }
  double z(std::size_t i) const { return static_cast<double>(i) * dz(); }
  double t(std::size_t i) const { return static_cast<double>(i) * dt(); }
};

// Trapezoid quadrature on a uniform grid of spacing h.
double trapezoid_norm2(std::span<const cplx> f, double h);
cplx trapezoid_inner(std::span<const cplx> f, std::span<const cplx> g, double h);

/// Spin-wave amplitude S(z) sampled on a uniform grid over [0,1], both ends included.
class SpinWave {
 public:
  SpinWave() = default;
  explicit SpinWave(CVec samples, bool normalized = false);

  std::size_t size() const { return samples_.size(); }
  double dz() const { return 1.0 / static_cast<double>(samples_.size() - 1); }
  double z(std::size_t i) const { return static_cast<double>(i) * dz(); }
  const CVec& samples() const { return samples_; }
  cplx operator[](std::size_t i) const { return samples_[i]; }
  bool normalized() const { return normalized_; }

  double norm2() const { return trapezoid_norm2(samples_, dz()); }
  SpinWave renormalized() const;
  /// Cubic-spline value at arbitrary z in [0,1].
  cplx at(double z) const;
  /// Same wave resampled onto n uniform points.
  SpinWave resampled(std::size_t n) const;

  template <class F>
  static SpinWave from_function(std::size_t n, F&& f, bool normalize = true) {
    CVec v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = cplx(f(static_cast<double>(i) / static_cast<double>(n - 1)));
    SpinWave s(std::move(v));
    return normalize ? s.renormalized() : s;
  }

 private:
  CVec samples_;
  bool normalized_ = false;
};

/// Temporal envelope E(t) sampled uniformly on [0, t_win].
class FieldMode {
 public:
  FieldMode() = default;
  FieldMode(CVec samples, double t_win, bool normalized = false);

  std::size_t size() const { return samples_.size(); }
  double t_win() const { return t_win_; }
  double dt() const { return t_win_ / static_cast<double>(samples_.size() - 1); }
  double t(std::size_t i) const { return static_cast<double>(i) * dt(); }
  const CVec& samples() const { return samples_; }
  cplx operator[](std::size_t i) const { return samples_[i]; }
  bool normalized() const { return normalized_; }

  double norm2() const { return trapezoid_norm2(samples_, dt()); }
  FieldMode renormalized() const;
  /// Linear interpolation, zero outside the window.
  cplx at(double t) const;
  FieldMode resampled(std::size_t n) const;
  /// Keeps only the final `length` of the window, re-origined at zero.
  FieldMode last(double length) const;

 private:
  CVec samples_;
  double t_win_ = 1.0;
  bool normalized_ = false;
};

/// Control Rabi envelope with its cumulative energy h(0,t) = int_0^t |Omega|^2.
class ControlField {
 public:
  ControlField() = default;
  ControlField(CVec samples, double t_win);

  std::size_t size() const { return samples_.size(); }
  double t_win() const { return t_win_; }
  double dt() const { return t_win_ / static_cast<double>(samples_.size() - 1); }
  double t(std::size_t i) const { return static_cast<double>(i) * dt(); }
  const CVec& samples() const { return samples_; }
  const RVec& h_cum() const { return h_cum_; }
  cplx operator[](std::size_t i) const { return samples_[i]; }
  double h_total() const { return h_cum_.back(); }
  /// h(t1, t2) with linear interpolation of the cumulative integral.
  double h_between(double t1, double t2) const;
  cplx at(double t) const;
  ControlField resampled(std::size_t n) const;
  /// Omega*(T - t): the control for the time-reversed process.
  ControlField time_reversed() const;
  ControlField clipped(double omega_cap) const;
  /// Same shape stretched to a new window with h(0,T) preserved.
  ControlField rescaled_to(double t_win) const;

  static ControlField constant(cplx value, double t_win, std::size_t nt);

 private:
  CVec samples_;
  RVec h_cum_;
  double t_win_ = 1.0;
};

/// Decayless stored mode s(z) on [0, z_max], z_max >= 1.
class DecaylessMode {
 public:
  DecaylessMode() = default;
  DecaylessMode(CVec samples, double z_max, bool normalized = false);

  std::size_t size() const { return samples_.size(); }
  double z_max() const { return z_max_; }
  double dz() const { return z_max_ / static_cast<double>(samples_.size() - 1); }
  double z(std::size_t i) const { return static_cast<double>(i) * dz(); }
  const CVec& samples() const { return samples_; }
  bool normalized() const { return normalized_; }
  double norm2() const { return trapezoid_norm2(samples_, dz()); }
  DecaylessMode renormalized() const;
  cplx at(double z) const;
  /// Mass carried beyond z = z_from.
  double tail_mass(double z_from) const;

 private:
  CVec samples_;
  double z_max_ = 1.0;
  bool normalized_ = false;
};

FieldMode gaussian_like_input(double t_win, const Grid& grid);
FieldMode time_reverse(const FieldMode& mode);
SpinWave flip_spin_wave(const SpinWave& s, double dk);

/// L2 distance between two spin waves after resampling b onto a's grid.
double l2_distance(const SpinWave& a, const SpinWave& b);
/// |<a,b>|^2 / (|a|^2 |b|^2) on a common grid.
double overlap(const SpinWave& a, const SpinWave& b);
double overlap(const FieldMode& a, const FieldMode& b);
/// Rotates a complex profile so that its largest-magnitude sample is real positive.
CVec fix_global_phase(CVec v);

}  // namespace photonstore
