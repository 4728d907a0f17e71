#pragma once

#include <optional>

#include "photonstore/model.hpp"

namespace photonstore {

enum class StageKind { storage, retrieval_forward, retrieval_backward, fast_storage, fast_retrieval };

const char* to_string(StageKind k);

struct StageSpec {
  StageKind kind = StageKind::storage;
  ControlField control;
  std::optional<FieldMode> input;   // storage kinds
  std::optional<SpinWave> spin;     // retrieval kinds

  void validate() const;
};

struct SolverOptions {
  bool store_fields = false;
  std::size_t z_stride = 1;
  std::size_t t_stride = 1;
  /// Retrieval only: keep integrating past the control window (holding the last
  /// control sample) until the residual excitation drops below residual_target or
  /// the time reaches max_extend_factor * max(1, t_win).
  bool extend = true;
  double residual_target = 1e-6;
  double max_extend_factor = 50.0;
  /// |Omega| above this is clipped before integration.
  double omega_cap = 1e3;
  /// Upper bound on dt * max|Omega|; beyond it the Rabi dynamics are unresolved.
  double max_step_ratio = 4.0;
};

/// Complex samples on a (possibly strided) space-time lattice; row per time.
struct Field2D {
  RVec z;
  RVec t;
  CVec data;
  bool empty() const { return data.empty(); }
  cplx operator()(std::size_t iz, std::size_t it) const { return data[it * z.size() + iz]; }
};

struct SimResult {
  StageKind kind = StageKind::storage;
  Field2D e_field, p_field, s_field;
  FieldMode e_out;          // E(1, t) on the simulated window
  SpinWave spin;            // S(z, t_end)
  CVec polarization;        // P(z, t_end)
  RVec loss_density;        // 2 int |P(z,t)|^2 dt on the z grid
  double eta = 0.0;
  double leak = 0.0;        // storage: energy transmitted past z = 1
  double loss = 0.0;        // 2 int int |P|^2
  double spin_loss = 0.0;   // 2 gamma_s int int |S|^2
  double residual = 0.0;    // excitation left in P (and in S for retrieval)
  double input_energy = 0.0;
  double t_end = 0.0;
  std::size_t steps = 0;
};

SimResult simulate(const Params& params, const Grid& grid, const StageSpec& stage, const SolverOptions& opt = {});

/// State of the atoms at one instant.
struct AtomicState {
  CVec p;
  CVec s;
};
/// Perfect pi pulse: P -> i S, S -> i P.
AtomicState apply_pi_pulse(const AtomicState& state);

struct EnergyLedger {
  double eta = 0.0;
  double leak = 0.0;
  double loss = 0.0;
  double residual = 0.0;
  double input = 0.0;
  /// eta + leak + loss + residual - input (spin decay counted as loss)
  double defect = 0.0;
};
EnergyLedger energy_ledger(const SimResult& r);

}  // namespace photonstore
