#pragma once

#include "photonstore/adiabatic.hpp"
#include "photonstore/optimizer.hpp"
#include "photonstore/solver.hpp"

namespace photonstore {

/// Constant control on [0, t_win] with h(0, t_win) = h_total.
ControlField square_control(double h_total, double t_win, std::size_t nt);

struct StoreRetrieveResult {
  SimResult storage;          // exact storage run
  SpinWave spin;              // stored spin wave (unnormalized)
  double eta_store = 0.0;
  double eta_retrieve = 0.0;  // complete retrieval of the normalized stored wave
  double eta_total = 0.0;
};

/// Exact storage of `input` with `control`, then complete retrieval evaluated with the
/// retrieval kernel (control-independent).  Backward retrieval flips the spin wave
/// and applies the dk phase.
StoreRetrieveResult store_then_retrieve(const Params& params, const FieldMode& input, const ControlField& control,
                                        Direction direction, std::size_t nz = 201);

/// Total storage + backward-retrieval efficiency of the Gaussian-like input of
/// duration td/d stored with the adiabatically shaped optimal control, computed
/// without the adiabatic approximation.
double breakdown_efficiency(const Params& params, double td, std::size_t nz = 201, std::size_t nt = 4001,
                            const ShapingConfig& cfg = {});

/// Same input stored with a square control of h(0,T) = d (group-velocity matched).
double square_control_efficiency(const Params& params, double t_win, std::size_t nz = 201, std::size_t nt = 4001);

}  // namespace photonstore
