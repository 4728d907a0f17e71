#pragma once

#include "photonstore/model.hpp"
#include "photonstore/optimizer.hpp"

namespace photonstore {

/// Retrieval after a perfect pi pulse: E(t) = -sqrt(d) int dz e^{-t} J0(2 sqrt(d t z)) S(1-z).
/// The window is extended until the omitted tail carries < 1e-6 of the energy; the
/// sampling step is at most grid.dt() and at most 0.05/d.
FieldMode fast_retrieve(const SpinWave& s, double d, const Grid& grid);

/// Storage closed by a perfect pi pulse at the end of the input window; not normalized.
SpinWave fast_store(const FieldMode& e_in, double d, const Grid& grid);

/// Normalized input that fast storage maps onto the optimal mode for `direction`.
FieldMode fast_optimal_input(double d, Direction direction, const Grid& grid);

}  // namespace photonstore
