#include "doctest.h"

#include <cmath>

#include "photonstore/adiabatic.hpp"
#include "photonstore/fast.hpp"
#include "photonstore/kernels.hpp"
#include "photonstore/optimizer.hpp"
#include "photonstore/solver.hpp"

using namespace photonstore;

namespace {
const Grid kGrid{201, 2001, 1.0};
const SpinWave kFlat = SpinWave::from_function(201, [](double) { return 1.0; });
const SpinWave kRamp = SpinWave::from_function(201, [](double z) { return std::sqrt(3.0) * z; });

// a sampled onto b's time grid
FieldMode on_grid_of(const FieldMode& a, const FieldMode& b) {
  CVec v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v[i] = a.at(b.t(i));
  return FieldMode(std::move(v), b.t_win());
}

// width of the region where |E|^2 exceeds half its peak
double fwhm(const FieldMode& e) {
  double peak = 0.0;
  for (const auto& x : e.samples()) peak = std::max(peak, std::norm(x));
  double lo = e.t_win(), hi = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (std::norm(e[i]) > 0.5 * peak) {
      lo = std::min(lo, e.t(i));
      hi = std::max(hi, e.t(i));
    }
  return hi - lo;
}
}  // namespace

TEST_CASE("fast retrieval efficiency equals the kernel form") {
  for (double d : {1.0, 10.0, 100.0}) {
    for (const auto& s : {kFlat, kRamp, optimal_backward_mode(d).mode}) {
      CAPTURE(d);
      CHECK(std::abs(fast_retrieve(s, d, kGrid).norm2() - retrieval_efficiency(s, d)) < 1e-4);
    }
  }
}

TEST_CASE("empty spin wave radiates nothing") {
  const auto e = fast_retrieve(SpinWave(CVec(201, 0.0)), 10.0, kGrid);
  CHECK(e.norm2() == 0.0);
}

TEST_CASE("time-reversal pairing of the fast maps") {
  const double d = 10.0;
  // general s: the round trip projects onto flip(s) with weight eta_r(s)
  const auto back = fast_store(time_reverse(fast_retrieve(kRamp, d, kGrid)), d, kGrid);
  const cplx proj = trapezoid_inner(flip_spin_wave(kRamp, 0.0).samples(), back.samples(), 1.0 / 200.0);
  CHECK(std::abs(proj - retrieval_efficiency(kRamp, d)) < 1e-3);
  // eigenmode: the round trip returns eta flip(s) pointwise
  const auto opt = optimal_backward_mode(d);
  const auto s = SpinWave(fix_global_phase(opt.mode.samples()));
  const auto round = fast_store(time_reverse(fast_retrieve(s, d, kGrid)), d, kGrid);
  const auto expect = flip_spin_wave(s, 0.0);
  CVec diff(round.size());
  for (std::size_t k = 0; k < round.size(); ++k) diff[k] = round[k] - opt.efficiency * expect[k];
  CHECK(std::sqrt(SpinWave(diff).norm2()) < 1e-3);
}

TEST_CASE("optimal fast input stores the optimal mode") {
  const double d = 10.0;
  const auto opt = optimal_backward_mode(d);
  const auto in = fast_optimal_input(d, Direction::backward, kGrid);
  CHECK(in.norm2() == doctest::Approx(1.0).epsilon(1e-12));
  const auto s = fast_store(in, d, kGrid);
  CHECK(std::abs(s.norm2() - opt.efficiency) < 1e-3);
  const auto stored = SpinWave(fix_global_phase(s.renormalized().samples()));
  const auto want = SpinWave(fix_global_phase(flip_spin_wave(opt.mode, 0.0).samples()));
  CHECK(l2_distance(stored, want) < 1e-2);
  const double total = s.norm2() * retrieval_efficiency(flip_spin_wave(s.renormalized(), 0.0), d);
  CHECK(std::abs(total - opt.efficiency * opt.efficiency) < 1e-2);
}

TEST_CASE("slow input is lost to polarization decay") {
  const FieldMode slow = FieldMode(CVec(4001, 1.0), 50.0).renormalized();
  CHECK(fast_store(slow, 10.0, kGrid).norm2() < 0.05);
}

TEST_CASE("fast maps agree with the pi-pulse solver") {
  const double d = 10.0;
  const Grid g{201, 4001, 10.0};
  const auto r = simulate(Params{d}, g, StageSpec{StageKind::fast_retrieval, {}, std::nullopt, kRamp});
  const auto e = fast_retrieve(kRamp, d, kGrid);
  CHECK(std::abs(r.eta - e.norm2()) < 1e-3);
  CHECK(overlap(on_grid_of(r.e_out, e), e) > 0.99);

  const auto in = fast_optimal_input(d, Direction::backward, kGrid);
  const auto st = simulate(Params{d}, Grid{201, in.size(), in.t_win()},
                           StageSpec{StageKind::fast_storage, {}, in, std::nullopt});
  CHECK(std::abs(st.eta - fast_store(in, d, kGrid).norm2()) < 1e-3);
}

TEST_CASE("optimal input duration scales as 1/d") {
  const double w10 = fwhm(fast_optimal_input(10.0, Direction::backward, kGrid));
  const double w100 = fwhm(fast_optimal_input(100.0, Direction::backward, kGrid));
  const double ratio = w10 / w100;
  CHECK(ratio > 5.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("forward and backward optimal inputs coincide at small d") {
  const auto b = fast_optimal_input(0.01, Direction::backward, kGrid);
  const auto f = fast_optimal_input(0.01, Direction::forward, kGrid);
  CHECK(overlap(b, f) > 0.99);
}

TEST_CASE("fast retrieval is the far-detuned limit of adiabatic retrieval") {
  const double d = 10.0, delta = 1e3;
  const auto e = fast_retrieve(kRamp, d, kGrid);
  const std::size_t nt = 40001;
  const double T = e.t_win();
  CVec om(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(nt - 1);
    om[i] = cplx(1.0, delta) * std::exp(cplx(0.0, -delta * t));
  }
  const auto a = adiabatic_retrieve(kRamp, ControlField(om, T), Params{d, delta});
  CHECK(overlap(on_grid_of(a, e), e) > 0.99);
}
