// Acceptance run: every criterion at its stated tolerance, one PASS/FAIL line each.
// Oracles are independent of the library where one exists (std::cyl_bessel_i for
// the flat wave, closed-form limits, the exact solver for the adiabatic maps).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "photonstore/adiabatic.hpp"
#include "photonstore/fast.hpp"
#include "photonstore/kernels.hpp"
#include "photonstore/optimizer.hpp"
#include "photonstore/protocols.hpp"
#include "photonstore/solver.hpp"

using namespace photonstore;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << (ok ? "" : "MISS ") << what;
  }
};

std::string fmt(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

// worst |energy defect| over every solver run below (criterion 6)
double g_worst_defect = 0.0;
int g_solver_runs = 0;

SimResult solve(const Params& p, const Grid& g, const StageSpec& s, const SolverOptions& o = {}) {
  SimResult r = simulate(p, g, s, o);
  g_worst_defect = std::max(g_worst_defect, std::abs(energy_ledger(r).defect));
  ++g_solver_runs;
  return r;
}

SpinWave fn(std::size_t n, const std::function<double(double)>& f) { return SpinWave::from_function(n, f, false); }
const auto kSqrt3z = [](double z) { return std::sqrt(3.0) * z; };
const auto kParabola = [](double z) { return std::sqrt(15.0 / 8.0) * (1.0 - 4.0 * (z - 0.5) * (z - 0.5)); };

ControlField shaped_window(double h, double T, std::size_t nt, const std::function<double(double)>& f) {
  CVec v(nt);
  for (std::size_t i = 0; i < nt; ++i) v[i] = f(static_cast<double>(i) / static_cast<double>(nt - 1));
  const double scale = std::sqrt(h / ControlField(v, T).h_total());
  for (auto& x : v) x *= scale;
  return ControlField(std::move(v), T);
}

// ---------------------------------------------------------------- criteria

void c1(Verdict& v) {
  const auto flat = [](double) { return cplx(1.0); };
  double worst = 0.0;
  for (double d : {0.5, 1.0, 10.0, 100.0}) {
    const double exact = std::exp(-d) * (std::cyl_bessel_i(0.0, d) + std::cyl_bessel_i(1.0, d));
    worst = std::max(worst, std::abs((1.0 - retrieval_efficiency(flat, d)) - exact) / exact);
  }
  v.require(worst < 1e-6, "max rel error of 1-eta " + fmt(worst) + " < 1e-6");
  const double err400 = 1.0 - retrieval_efficiency(flat, 400.0);
  const double rel = std::abs(err400 / (std::sqrt(2.0 / std::numbers::pi) / 20.0) - 1.0);
  v.require(rel < 0.01, "d=400 vs sqrt(2/pi)/sqrt(d): rel " + fmt(rel) + " < 0.01");
}

void c2(Verdict& v) {
  for (double d : {50.0, 100.0, 500.0}) {
    const double scaled = (1.0 - optimal_backward_mode(d).efficiency) * d;
    v.require(scaled >= 2.45 && scaled <= 3.35, "d=" + fmt(d) + ": (1-eta)d = " + fmt(scaled) + " in [2.45,3.35]");
  }
  const auto m = optimal_backward_mode(1000.0).mode;
  const double l2 = l2_distance(m, fn(m.size(), kSqrt3z));
  v.require(l2 < 0.1, "d=1000 L2 to sqrt(3)z " + fmt(l2) + " < 0.1");
}

void c3(Verdict& v) {
  const auto r = optimal_forward_mode(1000.0);
  const double scaled = (1.0 - r.efficiency) * 1000.0;
  v.require(scaled >= 15.0 && scaled <= 23.0, "(1-lambda^2)d = " + fmt(scaled) + " in [15,23]");
  const double l2 = l2_distance(r.mode, fn(r.mode.size(), kParabola));
  v.require(l2 < 0.1, "L2 to parabola " + fmt(l2) + " < 0.1");
}

void c4(Verdict& v) {
  const double eta = optimal_backward_mode(1000.0).efficiency;
  const double scaled = (1.0 - eta * eta) * 1000.0;
  v.require(scaled >= 4.9 && scaled <= 6.7, "(1-eta_back)d = " + fmt(scaled) + " in [4.9,6.7]");
}

void c5(Verdict& v) {
  const double d = 10.0, T = 10.0;
  const std::size_t nt = 4001;
  const SpinWave s = optimal_backward_mode(d).mode;
  const double kernel = retrieval_efficiency(s, d);
  const std::vector<std::pair<std::string, std::function<double(double)>>> shapes = {
      {"square", [](double) { return 1.0; }},
      {"ramp", [](double x) { return 0.1 + x; }},
      {"bump", [](double x) { return std::exp(-std::pow((x - 0.3) / 0.15, 2)) + 0.05; }}};
  double lo_s = 2, hi_s = -1, lo_a = 2, hi_a = -1;
  for (double delta : {0.0, 10.0, 100.0}) {
    const Params p{d, delta};
    const double h = 10.0 * (d * d + delta * delta) / d;
    for (const auto& [name, f] : shapes) {
      const ControlField c = shaped_window(h, T, nt, f);
      const double es = solve(p, Grid{201, nt, T}, StageSpec{StageKind::retrieval_forward, c, std::nullopt, s}).eta;
      const double ea = adiabatic_retrieve(s, c, p).norm2();
      lo_s = std::min(lo_s, es), hi_s = std::max(hi_s, es);
      lo_a = std::min(lo_a, ea), hi_a = std::max(hi_a, ea);
    }
  }
  v.require(hi_s - lo_s < 1e-3, "solver span " + fmt(hi_s - lo_s) + " < 1e-3 (kernel " + fmt(kernel, 7) + ")");
  v.require(hi_a - lo_a < 1e-3, "adiabatic span " + fmt(hi_a - lo_a) + " < 1e-3");
}

void c6(Verdict& v) {
  const double d = 10.0;
  const SpinWave s = optimal_backward_mode(d).mode;
  const RVec l = loss_density(s, d);
  {
    // the integral is taken on a fine resampling so quadrature error stays below the gate
    const SpinWave fine = s.resampled(3201);
    const RVec lf = loss_density(fine, d);
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < lf.size(); ++k) integral += 0.5 * fine.dz() * (lf[k] + lf[k + 1]);
    const double gap = std::abs(integral - (fine.norm2() - retrieval_efficiency(fine, d)));
    v.require(gap < 1e-6, "int loss density vs 1-eta " + fmt(gap) + " < 1e-6");
  }
  const auto r = solve(Params{d}, Grid{201, 4001, 10.0},
                       StageSpec{StageKind::retrieval_forward, square_control(100.0, 10.0, 4001), std::nullopt, s});
  double worst = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) worst = std::max(worst, std::abs(l[k] - r.loss_density[k]));
  v.require(worst < 1e-2, "pointwise |closed form - solver| " + fmt(worst) + " < 1e-2");
  // runs after all other solver criteria (see main), so the ledger covers them
  v.require(g_worst_defect < 1e-4,
            "max |eta+leak+loss+residual-1| over " + std::to_string(g_solver_runs) + " solver runs " +
                fmt(g_worst_defect) + " < 1e-4");
}

void c7(Verdict& v) {
  const double d = 10.0, T = 8.0;
  const std::size_t nt = 2001;
  const Grid g{201, nt, T};
  const auto opt = optimal_backward_mode(d);
  const ControlField c = square_control(10.0 * d, T, nt);
  const auto r = time_reversal_iterate(Params{d}, g, c, c, gaussian_like_input(T, g), Direction::backward);
  v.require(r.iterations <= 30, std::to_string(r.iterations) + " iterations <= 30");
  const double gap = std::abs(r.efficiency - opt.efficiency * opt.efficiency);
  v.require(gap < 1e-2, "|eta - kernel prediction| " + fmt(gap) + " < 1e-2");
  const SpinWave a(fix_global_phase(r.spin.renormalized().samples()));
  const SpinWave b(fix_global_phase(flip_spin_wave(opt.mode, 0.0).samples()));
  const double l2 = l2_distance(a, b);
  v.require(l2 < 0.05, "L2 to S~(1-z) " + fmt(l2) + " < 0.05");
  v.require(r.monotone, std::string("efficiency sequence ") + (r.monotone ? "nondecreasing" : "decreases"));
}

void c8(Verdict& v) {
  const double d = 10.0;
  const RVec tds = {1, 2, 3, 5, 10, 20, 30, 50, 100};
  const double best = std::pow(optimal_backward_mode(d).efficiency, 2);
  auto curve = [&](double delta) {
    RVec e;
    for (double td : tds) e.push_back(breakdown_efficiency(Params{d, delta}, td));
    return e;
  };
  const RVec e0 = curve(0.0);
  v.require(std::abs(e0.back() - best) < 1e-2, "Td=100 gap to optimum " + fmt(std::abs(e0.back() - best)) + " < 1e-2");
  const double drop = 1.0 - e0.front() / e0.back();
  v.require(drop >= 0.2, "drop at Td=1 " + fmt(drop) + " >= 0.2");
  const RVec e100 = curve(100.0), e200 = curve(200.0);
  double gap = 0.0, at = 0.0;
  for (std::size_t j = 0; j < tds.size(); ++j)
    if (std::abs(e100[j] - e200[j]) > gap) gap = std::abs(e100[j] - e200[j]), at = tds[j];
  v.require(gap < 0.03, "max |eta(delta=100) - eta(delta=200)| " + fmt(gap) + " at Td=" + fmt(at) + " < 0.03");
}

FieldMode on_grid_of(const FieldMode& a, const FieldMode& b) {
  CVec v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v[i] = a.at(b.t(i));
  return FieldMode(std::move(v), b.t_win());
}

void c9(Verdict& v) {
  const double d = 1000.0, T = 0.05;
  const Grid g{201, 4001, 1.0};
  const FieldMode in = fast_optimal_input(d, Direction::backward, g).last(T).renormalized();
  const double eta = fast_store(in, d, g).norm2();
  v.require(eta > 0.8, "d=1000 T=0.05 storage " + fmt(eta) + " > 0.8");

  const double dd = 10.0;
  const SpinWave ramp = fn(201, kSqrt3z);
  const auto rr = solve(Params{dd}, Grid{201, 4001, 10.0}, StageSpec{StageKind::fast_retrieval, {}, std::nullopt, ramp});
  const FieldMode e = fast_retrieve(ramp, dd, g);
  const double gr = std::abs(rr.eta - e.norm2());
  const FieldMode opt_in = fast_optimal_input(dd, Direction::backward, g);
  const auto rs = solve(Params{dd}, Grid{201, opt_in.size(), opt_in.t_win()},
                        StageSpec{StageKind::fast_storage, {}, opt_in, std::nullopt});
  const SpinWave s = fast_store(opt_in, dd, g);
  const double gs = std::abs(rs.eta - s.norm2());
  v.require(gr < 1e-3, "d=10 retrieval vs solver " + fmt(gr) + " < 1e-3");
  v.require(gs < 1e-3, "d=10 storage vs solver " + fmt(gs) + " < 1e-3");
  const double ov = overlap(on_grid_of(rr.e_out, e), e);
  v.require(ov > 1.0 - 1e-3, "retrieval output overlap " + fmt(ov, 7) + " > 0.999");
}

void c10(Verdict& v) {
  for (const auto& [name, f, centre] :
       std::vector<std::tuple<std::string, std::function<double(double)>, double>>{
           {"flat", [](double) { return 1.0; }, 0.46}, {"sqrt(3)z", kSqrt3z, 0.67}}) {
    for (double d : {25.0, 100.0, 400.0}) {
      const double r = halfwidth_dk(SpinWave::from_function(401, f), d) / std::sqrt(d);
      v.require(std::abs(r - centre) <= 0.05, name + " d=" + fmt(d) + ": " + fmt(r) + " in " + fmt(centre) + "+-0.05");
    }
  }
  RVec ds, dk;
  for (double d = 10.0; d <= 200.0; d += 38.0) {
    ds.push_back(d);
    dk.push_back(half_efficiency_dk(d));
  }
  const double n = static_cast<double>(ds.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    sx += ds[i], sy += dk[i], sxx += ds[i] * ds[i], sxy += ds[i] * dk[i], syy += dk[i] * dk[i];
  const double r2 = std::pow(n * sxy - sx * sy, 2) / ((n * sxx - sx * sx) * (n * syy - sy * sy));
  v.require(r2 > 0.98, "reoptimized half-efficiency dk linear in d: R^2 " + fmt(r2, 6) + " > 0.98");
}

void c11(Verdict& v) {
  const double T = 10.0;
  const Grid g{201, 4001, T};
  const FieldMode target = gaussian_like_input(T, g).renormalized();
  for (const auto& [d, delta] : std::vector<std::pair<double, double>>{{10, 0}, {10, 100}, {100, 0}}) {
    const Params p{d, delta};
    const SpinWave s = optimal_backward_mode(d).mode;
    const FieldMode e = adiabatic_retrieve(s, shape_retrieval_control(s, target, p), p);
    const double ov = overlap(e, target), gap = std::abs(e.norm2() - retrieval_efficiency(s, d));
    const std::string at = "(" + fmt(d) + "," + fmt(delta) + ")";
    v.require(ov > 0.99, at + " overlap " + fmt(ov, 7) + " > 0.99");
    v.require(gap < 1e-3, at + " |eta - kernel| " + fmt(gap) + " < 1e-3");
  }
  const double d = 10.0;
  const Params p{d};
  const FieldMode in = gaussian_like_input(T, Grid{201, 2001, T}).renormalized();
  const ControlField cs = shape_storage_control(in, optimal_decayless_mode(d), p);
  const ControlField cr = shape_retrieval_control(optimal_backward_mode(d).mode, time_reverse(in), p).time_reversed();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    num += std::pow(std::abs(cs[i]) - std::abs(cr[i]), 2);
    den += std::norm(cr[i]);
  }
  const double rel = std::sqrt(num / den);
  v.require(rel < 1e-2, "storage vs reversed retrieval control rel L2 " + fmt(rel) + " < 1e-2");
}

void c12(Verdict& v) {
  for (double d : {1.0, 10.0, 100.0}) {
    const double T = std::max(10.0, 100.0 / d);
    const Params p{d};
    const double naive = square_control_efficiency(p, T);
    const double best = breakdown_efficiency(p, T * d);
    v.require(best - naive > 0.0, "d=" + fmt(d) + ": shaped " + fmt(best) + " - square " + fmt(naive) + " > 0");
  }
}

}  // namespace

int main(int argc, char** argv) {
  // optional arguments: criterion numbers to run (default: all)
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) only.push_back(std::atoi(argv[a]));
  const std::vector<std::pair<std::string, void (*)(Verdict&)>> criteria = {
      {"flat-wave exact error", c1},        {"optimal backward retrieval", c2},
      {"forward optimum", c3},              {"backward total optimum", c4},
      {"control independence", c5},         {"time-reversal fixed point", c7},
      {"adiabaticity breakdown", c8},       {"fast regime", c9},
      {"nondegeneracy", c10},               {"shaping round trips", c11},
      {"naive vs optimal gap", c12},        {"energy conservation", c6}};
  const std::vector<int> number = {1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 12, 6};
  std::vector<std::string> lines(13);
  int failed = 0;
  int ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), number[i]) == only.end()) continue;
    ++ran;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += v.pass ? 0 : 1;
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d %-27s [%6.1fs] ", v.pass ? "PASS" : "FAIL", number[i],
                  criteria[i].first.c_str(), secs);
    lines[static_cast<std::size_t>(number[i])] = head + v.detail.str();
    std::fprintf(stderr, "%s\n", lines[static_cast<std::size_t>(number[i])].c_str());
  }
  for (int k = 1; k <= 12; ++k)
    if (!lines[static_cast<std::size_t>(k)].empty()) std::printf("%s\n", lines[static_cast<std::size_t>(k)].c_str());
  std::printf("%d/%d criteria pass\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
