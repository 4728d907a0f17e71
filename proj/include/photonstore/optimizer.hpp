#pragma once

#include <functional>
#include <memory>

#include "photonstore/kernels.hpp"
#include "photonstore/model.hpp"
#include "photonstore/solver.hpp"

namespace photonstore {

struct OptimOptions {
  double tol = 1e-10;       // eigenvalue change
  double mode_tol = 1e-8;   // L2 mode change
  int max_iter = 500;
  std::size_t nz = 201;     // samples of the returned mode
  std::size_t refine = 1;   // quadrature refinement factor
};

struct OptimResult {
  SpinWave mode;            // normalized on its grid, global phase fixed
  cplx eigenvalue = 0.0;
  double efficiency = 0.0;
  int iterations = 0;
  double residual = 0.0;
  RVec history;             // |eigenvalue| estimate after each iteration
  /// Continuum (Nystrom) form of the mode with unit quadrature norm.
  std::function<cplx(double)> shape;
};

/// Mode S~_d maximizing backward retrieval: eta f = K f with f(z) = S(1-z).
OptimResult optimal_backward_mode(double d, const OptimOptions& opt = {});

/// Mode for storage followed by forward retrieval: lambda S(z) = int k_r(z,1-z') S(z').
/// efficiency = lambda^2.
OptimResult optimal_forward_mode(double d, const OptimOptions& opt = {});

/// Stored mode (forward-propagation convention) optimizing storage followed by
/// backward retrieval with nondegenerate metastable states:
/// lambda S(z) = int k_r(z,z') e^{-2i dk z'} S*(z').  efficiency = |lambda|^2.
OptimResult optimal_nondegenerate_mode(double d, double dk, const OptimOptions& opt = {});

/// Plain power iteration of the backward-retrieval map from an arbitrary seed;
/// `history` holds the Rayleigh quotient per iteration.
OptimResult kernel_power_iteration(double d, const SpinWave& seed, const OptimOptions& opt = {});

/// dk at which the backward retrieval efficiency of s e^{-2i dk z} drops to half
/// of its dk = 0 value (mode held fixed).
double halfwidth_dk(const SpinWave& s, double d);

/// dk at which the reoptimized total backward efficiency falls to half its dk = 0 value.
double half_efficiency_dk(double d, const OptimOptions& opt = {});
/// dk at which the reoptimized total backward efficiency equals the forward optimum.
double forward_crossover_dk(double d, const OptimOptions& opt = {});

enum class Direction { backward, forward };

struct TimeReversalOptions {
  int max_iters = 30;
  double tol = 1e-4;          // L2 change of the input mode
  double monotone_slack = 1e-6;
};

struct TimeReversalResult {
  FieldMode input;
  SpinWave spin;              // stored spin wave of the final pass (unnormalized)
  double efficiency = 0.0;    // total storage + retrieval efficiency
  int iterations = 0;
  double residual = 0.0;
  RVec history;               // total efficiency per iteration
  bool monotone = true;
};

/// Physical optimization loop: store the input with `storage_control`, retrieve with
/// `retrieval_control`, time-reverse the output and feed it back as the next input.
/// The reversed pass uses the time-reversed controls, so each full iteration is a
/// store/retrieve pair followed by its time reverse.
TimeReversalResult time_reversal_iterate(const Params& params, const Grid& grid,
                                         const ControlField& storage_control,
                                         const ControlField& retrieval_control, const FieldMode& seed,
                                         Direction direction, const TimeReversalOptions& opt = {});

}  // namespace photonstore
