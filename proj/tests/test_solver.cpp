#include "doctest.h"

#include <cmath>

#include "photonstore/kernels.hpp"
#include "photonstore/optimizer.hpp"
#include "photonstore/solver.hpp"

using namespace photonstore;

namespace {
const SpinWave kFlat = SpinWave::from_function(201, [](double) { return 1.0; });

SimResult retrieve(const Params& p, const SpinWave& s, const ControlField& c, std::size_t nt,
                   StageKind k = StageKind::retrieval_forward, SolverOptions o = {}) {
  return simulate(p, Grid{s.size(), nt, c.t_win()}, StageSpec{k, c, std::nullopt, s}, o);
}

ControlField shaped(double t_win, std::size_t nt, double peak, int kind) {
  CVec v(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = t_win * static_cast<double>(i) / static_cast<double>(nt - 1);
    switch (kind) {
      case 0: v[i] = peak; break;
      case 1: v[i] = peak * t / t_win; break;
      default: v[i] = peak * std::exp(-std::pow((t - 0.4 * t_win) / (0.2 * t_win), 2)) + 0.3 * peak; break;
    }
  }
  return ControlField(v, t_win);
}
}  // namespace

TEST_CASE("zero control: nothing is stored and energy is accounted for") {
  const Grid g{201, 2001, 1.0};
  const StageSpec st{StageKind::storage, ControlField::constant(0.0, 1.0, 2001), gaussian_like_input(1.0, g),
                     std::nullopt};
  const auto r = simulate(Params{10.0}, g, st);
  CHECK(r.eta == 0.0);
  CHECK(std::abs(energy_ledger(r).defect) < 1e-12);
  CHECK(r.input_energy == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flat-wave retrieval matches the closed form") {
  const double exact = 1.0 - (std::exp(-10.0) * (std::cyl_bessel_i(0.0, 10.0) + std::cyl_bessel_i(1.0, 10.0)));
  const auto r = retrieve(Params{10.0}, kFlat, ControlField::constant(5.0, 10.0, 2001), 2001);
  CHECK(r.eta == doctest::Approx(exact).epsilon(1e-5));
  CHECK(r.residual < 1e-6);
  CHECK(std::abs(energy_ledger(r).defect) < 1e-10);
}

TEST_CASE("retrieval efficiency is control and detuning independent") {
  const auto mode = optimal_backward_mode(10.0).mode;
  const double kernel = retrieval_efficiency(mode, 10.0);
  double lo = 1.0, hi = 0.0;
  for (double delta : {0.0, 10.0, 100.0})
    for (int kind : {0, 1, 2}) {
      const double peak = delta > 20.0 ? 60.0 : 8.0;
      const auto r = retrieve(Params{10.0, delta}, mode, shaped(12.0, 4001, peak, kind), 4001,
                              StageKind::retrieval_forward);
      lo = std::min(lo, r.eta);
      hi = std::max(hi, r.eta);
      CHECK(std::abs(energy_ledger(r).defect) < 1e-10);
    }
  CHECK(hi - lo < 1e-3);
  CHECK(std::abs(lo - kernel) < 2e-3);
}

TEST_CASE("loss density matches the closed form") {
  const double d = 10.0;
  const auto s = SpinWave::from_function(201, [](double z) { return std::sqrt(3.0) * z; }, false);
  const auto r = retrieve(Params{d}, s, ControlField::constant(5.0, 10.0, 4001), 4001);
  const auto ref = loss_density(s, d);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(r.loss_density[i] - ref[i]));
  CHECK(worst < 1e-2);
}

TEST_CASE("pi pulse swaps the coherences") {
  const AtomicState a{{1.0, cplx(0.0, 2.0)}, {3.0, cplx(1.0, 1.0)}};
  const auto b = apply_pi_pulse(a);
  CHECK(b.p[0] == cplx(0.0, 3.0));
  CHECK(b.s[1] == cplx(0.0, 1.0) * cplx(0.0, 2.0));
  const auto c = apply_pi_pulse(b);  // two pi pulses: overall sign flip
  CHECK(c.p[1] == -a.p[1]);
  CHECK(c.s[0] == -a.s[0]);
}

TEST_CASE("fast retrieval radiates the stored excitation") {
  const auto r = simulate(Params{10.0}, Grid{201, 4001, 10.0},
                          StageSpec{StageKind::fast_retrieval, {}, std::nullopt, kFlat});
  const double exact = 1.0 - (std::exp(-10.0) * (std::cyl_bessel_i(0.0, 10.0) + std::cyl_bessel_i(1.0, 10.0)));
  CHECK(r.eta == doctest::Approx(exact).epsilon(1e-4));
  CHECK(std::abs(energy_ledger(r).defect) < 1e-10);
}

TEST_CASE("grid refinement converges") {
  const auto s = SpinWave::from_function(401, [](double z) { return std::sqrt(3.0) * z; });
  const double exact = retrieval_efficiency(s, 10.0);
  double prev = 1.0;
  for (std::size_t nz : {51, 101, 201}) {
    const auto r = retrieve(Params{10.0}, s.resampled(nz), ControlField::constant(4.0, 10.0, 2001), 2001);
    const double e = std::abs(r.eta - exact);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("step size guard and validation") {
  CHECK_THROWS_AS(retrieve(Params{10.0}, kFlat, ControlField::constant(500.0, 10.0, 101), 101), NumericalError);
  CHECK_THROWS_AS(simulate(Params{10.0}, Grid{201, 101, 1.0},
                           StageSpec{StageKind::storage, ControlField::constant(1.0, 1.0, 101), std::nullopt,
                                     std::nullopt}),
                  ValidationError);
}

TEST_CASE("time-reversal iteration reaches the kernel optimum") {
  const double d = 10.0;
  const double eta_max = optimal_backward_mode(d).efficiency;
  const Grid g{201, 2001, 8.0};
  const auto c = ControlField::constant(4.0, 8.0, 2001);
  const auto r = time_reversal_iterate(Params{d}, g, c, c, gaussian_like_input(8.0, g), Direction::backward);
  CHECK(r.iterations <= 30);
  CHECK(r.monotone);
  CHECK(std::abs(r.efficiency - eta_max * eta_max) < 1e-2);
  const auto target = flip_spin_wave(optimal_backward_mode(d).mode, 0.0);
  const SpinWave a(fix_global_phase(r.spin.renormalized().samples()));
  const SpinWave b(fix_global_phase(target.samples()));
  CHECK(l2_distance(a, b) < 0.05);
}
