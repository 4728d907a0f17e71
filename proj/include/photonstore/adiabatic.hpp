#pragma once

#include "photonstore/model.hpp"

namespace photonstore {

/// Control-shaping settings.
///   h_total          truncation of the cumulative control energy; 0 picks
///                    complete_factor |d + i delta|^2 / d
///   omega_cap        |Omega| clip level
///   eps_div          relative floor below which the shaping denominator is
///                    treated as a divergence and Omega is zeroed
///   complete_factor  required d h_total / |d + i delta|^2
struct ShapingConfig {
  double h_total = 0.0;
  double omega_cap = 1e3;
  double eps_div = 1e-6;
  double complete_factor = 10.0;

  void validate() const;
  /// h_total actually used for `params`; throws if it violates the completeness condition.
  double resolve_h_total(const Params& params) const;
};

/// A(h) with adiabatic output E(1,t) = Omega(t) A(h(0,t)) (times e^{-gamma_s t}).
cplx retrieval_response(const SpinWave& s, double h, const Params& params);

/// Adiabatic forward retrieval of `s`; the output shares the control's time grid.
FieldMode adiabatic_retrieve(const SpinWave& s, const ControlField& control, const Params& params);

/// Adiabatic storage; the input is sampled on the control's time grid. The result is
/// not normalized: its norm^2 is the storage efficiency.
SpinWave adiabatic_store(const FieldMode& e_in, const ControlField& control, const Params& params,
                         std::size_t nz = 201);

struct DecaylessOptions {
  double z_max = 0.0;            // 0: adaptive, starting at 1 + 6/sqrt(max(d,1))
  double tail_tol = 1e-6;        // mass allowed in the outer half of the support
  double max_z = 16.0;           // adaptive growth stops here
  double samples_per_unit = 400.0;
  std::size_t max_samples = 4001;
};

/// Storage with decay and leakage switched off (unitary in the complete-control limit).
/// |delta| < 1e-3 uses the lossless group-velocity map.
DecaylessMode decayless_store(const FieldMode& e_in, const ControlField& control, double d, double delta,
                              const DecaylessOptions& opt = {});

/// Q(h) with E_in(t) = Omega(t) Q(h(t,T)) for decayless mode s.
cplx decayless_response(const DecaylessMode& s, double h, double d, double delta);

/// Inverse of decayless_store: the input that the control maps onto s.
FieldMode decayless_inverse(const DecaylessMode& s, const ControlField& control, double d, double delta);

/// Physical spin wave on [0,1] carried by a decayless mode (lossy).
SpinWave decay_dress(const DecaylessMode& s, double d, std::size_t nz = 201);

/// Normalized decayless mode maximizing the dressed storage efficiency.
DecaylessMode optimal_decayless_mode(double d, double tol = 1e-10);

/// Control retrieving `s` into the normalized `target` (forward-retrieval frame).
ControlField shape_retrieval_control(const SpinWave& s, const FieldMode& target, const Params& params,
                                     const ShapingConfig& cfg = {});

/// Control storing `e_in` into decayless mode `s`; shares e_in's time grid.
ControlField shape_storage_control(const FieldMode& e_in, const DecaylessMode& s, const Params& params,
                                   const ShapingConfig& cfg = {});

struct EitWindowProfile {
  RVec tau;          // propagation distance h(0,t)/d
  RVec width;        // transparency window sqrt(d / tau)
  RVec intensity;    // |filtered spin wave at 1 - tau|^2
  double efficiency = 0.0;
  double error = 0.0;  // 1 - efficiency (s taken as normalized)
};

/// Gaussian momentum-window estimate of resonant retrieval.
EitWindowProfile eit_window_diagnostics(const SpinWave& s, double d);

}  // namespace photonstore
