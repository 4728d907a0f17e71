#include "photonstore/protocols.hpp"

#include <cmath>

#include "photonstore/kernels.hpp"

namespace photonstore {

ControlField square_control(double h_total, double t_win, std::size_t nt) {
  if (!(h_total >= 0.0)) throw ValidationError("square_control: h_total must be >= 0");
  return ControlField::constant(std::sqrt(h_total / t_win), t_win, nt);
}

StoreRetrieveResult store_then_retrieve(const Params& params, const FieldMode& input, const ControlField& control,
                                        Direction direction, std::size_t nz) {
  params.validate();
  const Grid g{nz, input.size(), input.t_win()};
  StoreRetrieveResult out;
  out.storage = simulate(params, g, StageSpec{StageKind::storage, control, input, std::nullopt});
  out.spin = out.storage.spin;
  out.eta_store = out.storage.eta;
  if (out.eta_store > 0.0) {
    const SpinWave s = out.spin.renormalized();
    out.eta_retrieve = retrieval_efficiency(direction == Direction::backward ? flip_spin_wave(s, params.dk) : s, params.d);
  }
  out.eta_total = out.eta_store * out.eta_retrieve;
  return out;
}

double breakdown_efficiency(const Params& params, double td, std::size_t nz, std::size_t nt, const ShapingConfig& cfg) {
  params.validate();
  if (!(td > 0.0)) throw ValidationError("breakdown_efficiency: Td must be positive");
  const double T = td / params.d;
  const Grid g{nz, nt, T};
  const FieldMode in = gaussian_like_input(T, g).renormalized();
  const ControlField c = shape_storage_control(in, optimal_decayless_mode(params.d), params, cfg);
  return store_then_retrieve(params, in, c, Direction::backward, nz).eta_total;
}

double square_control_efficiency(const Params& params, double t_win, std::size_t nz, std::size_t nt) {
  params.validate();
  const Grid g{nz, nt, t_win};
  const FieldMode in = gaussian_like_input(t_win, g).renormalized();
  return store_then_retrieve(params, in, square_control(params.d, t_win, nt), Direction::backward, nz).eta_total;
}

}  // namespace photonstore
