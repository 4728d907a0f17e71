#include "photonstore/solver.hpp"

#include <cmath>
#include <sstream>

namespace photonstore {

namespace {

bool is_storage(StageKind k) { return k == StageKind::storage || k == StageKind::fast_storage; }

// Grid-point sampler for a uniformly sampled envelope on [0, t_win]; direct
// samples when the sampling coincides with the simulation grid.
struct Sampler {
  const CVec* v = nullptr;
  double t_win = 0.0;
  bool same_grid = false;
  double h = 0.0;

  cplx operator()(std::size_t n, double t) const {
    if (!v) return 0.0;
    if (same_grid) return n < v->size() ? (*v)[n] : cplx(0.0);
    if (t < 0.0 || t > t_win * (1.0 + 1e-12)) return 0.0;
    const double s = t / h;
    const auto i = static_cast<std::size_t>(s);
    if (i + 1 >= v->size()) return v->back();
    const double f = s - static_cast<double>(i);
    return (1.0 - f) * (*v)[i] + f * (*v)[i + 1];
  }
};

Sampler make_sampler(const CVec& v, double t_win, const Grid& g) {
  Sampler s;
  s.v = &v;
  s.t_win = t_win;
  s.h = t_win / static_cast<double>(v.size() - 1);
  s.same_grid = v.size() == g.nt && std::abs(t_win - g.t_win) <= 1e-14 * g.t_win;
  return s;
}

// Midpoint value whose squared modulus equals the trapezoid average of the two
// endpoint intensities, so that the injected energy matches the trapezoid norm.
cplx energy_matched_mid(cplx a, cplx b) {
  const cplx m = 0.5 * (a + b);
  const double target = 0.5 * (std::norm(a) + std::norm(b));
  const double am = std::abs(m);
  if (target == 0.0) return 0.0;
  if (am < 1e-300) return std::sqrt(target);
  return m * (std::sqrt(target) / am);
}

void snapshot(Field2D& f, const CVec& v, std::size_t z_stride, double t) {
  f.t.push_back(t);
  for (std::size_t j = 0; j < v.size(); j += z_stride) f.data.push_back(v[j]);
}

}  // namespace

const char* to_string(StageKind k) {
  switch (k) {
    case StageKind::storage: return "storage";
    case StageKind::retrieval_forward: return "retrieval-forward";
    case StageKind::retrieval_backward: return "retrieval-backward";
    case StageKind::fast_storage: return "fast-storage";
    case StageKind::fast_retrieval: return "fast-retrieval";
  }
  return "?";
}

void StageSpec::validate() const {
  if (is_storage(kind) && !input) throw ValidationError(std::string(to_string(kind)) + " stage requires an input mode");
  if (!is_storage(kind) && !spin) throw ValidationError(std::string(to_string(kind)) + " stage requires a spin wave");
  if (kind != StageKind::fast_storage && kind != StageKind::fast_retrieval && control.size() < 2)
    throw ValidationError("stage requires a control field");
}

AtomicState apply_pi_pulse(const AtomicState& st) {
  const cplx i(0.0, 1.0);
  AtomicState out{CVec(st.s.size()), CVec(st.p.size())};
  for (std::size_t j = 0; j < st.s.size(); ++j) out.p[j] = i * st.s[j];
  for (std::size_t j = 0; j < st.p.size(); ++j) out.s[j] = i * st.p[j];
  return out;
}

SimResult simulate(const Params& params, const Grid& grid, const StageSpec& stage, const SolverOptions& opt) {
  params.validate();
  grid.validate();
  stage.validate();

  const std::size_t nz = grid.nz;
  const double hz = grid.dz();
  const double h = grid.dt();
  const double sd = std::sqrt(params.d);
  const cplx i1(0.0, 1.0);
  const cplx decay(1.0, params.delta);
  const double spin_den = 1.0 + 0.5 * h * params.gamma_s;

  RVec w(nz, hz);
  w.front() = w.back() = 0.5 * hz;

  const bool fast = stage.kind == StageKind::fast_storage || stage.kind == StageKind::fast_retrieval;
  const bool storage = is_storage(stage.kind);

  ControlField control;
  CVec omega_samples;
  if (!fast) {
    control = stage.control.clipped(opt.omega_cap);
    omega_samples = control.samples();
    double peak = 0.0;
    for (const auto& o : omega_samples) peak = std::max(peak, std::abs(o));
    if (h * peak > opt.max_step_ratio) {
      std::ostringstream os;
      os << "time step too coarse for the control: dt*max|Omega| = " << h * peak << " exceeds "
         << opt.max_step_ratio << " (dt = " << h << ", max|Omega| = " << peak << ")";
      throw NumericalError(os.str());
    }
  }
  const Sampler omega = fast ? Sampler{} : make_sampler(omega_samples, control.t_win(), grid);
  const cplx omega_hold = fast ? cplx(0.0) : omega_samples.back();

  const FieldMode* input = storage ? &*stage.input : nullptr;
  const Sampler ein = storage ? make_sampler(input->samples(), input->t_win(), grid) : Sampler{};

  CVec p(nz, 0.0), s(nz, 0.0);
  SimResult r;
  r.kind = stage.kind;
  if (!storage) {
    SpinWave sw = stage.spin->size() == nz ? *stage.spin : stage.spin->resampled(nz);
    if (stage.kind == StageKind::retrieval_backward) sw = flip_spin_wave(sw, params.dk);
    s = sw.samples();
    for (std::size_t j = 0; j < nz; ++j) r.input_energy += w[j] * std::norm(s[j]);
    if (stage.kind == StageKind::fast_retrieval) {
      auto st = apply_pi_pulse({p, s});
      p = std::move(st.p);
      s = std::move(st.s);
    }
  }

  RVec zs;
  for (std::size_t j = 0; j < nz; j += opt.z_stride) zs.push_back(grid.z(j));
  r.e_field.z = r.p_field.z = r.s_field.z = zs;

  CVec e_nodes(nz);
  auto node_fields = [&](cplx e0) {
    cplx acc = e0;
    for (std::size_t j = 0; j < nz; ++j) {
      const cplx inc = i1 * sd * w[j] * p[j];
      e_nodes[j] = acc + 0.5 * inc;
      acc += inc;
    }
    return acc;  // E at z = 1
  };

  CVec eout;
  r.loss_density.assign(nz, 0.0);
  const std::size_t n_window = grid.nt - 1;
  const double t_cap = storage ? grid.t_win : opt.max_extend_factor * std::max(1.0, grid.t_win);
  const bool may_extend = !storage && opt.extend;

  auto record = [&](std::size_t n, double t, cplx e0) {
    const cplx e1 = node_fields(e0);
    eout.push_back(e1);
    if (opt.store_fields && n % opt.t_stride == 0) {
      snapshot(r.e_field, e_nodes, opt.z_stride, t);
      snapshot(r.p_field, p, opt.z_stride, t);
      snapshot(r.s_field, s, opt.z_stride, t);
    }
  };

  record(0, 0.0, storage ? ein(0, 0.0) : cplx(0.0));

  CVec pbar(nz), sbar(nz);
  std::size_t n = 0;
  double eta_out = 0.0;
  for (;; ++n) {
    const double t0 = h * static_cast<double>(n);
    const double t1 = t0 + h;
    const bool in_window = n < n_window;
    if (!in_window) {
      if (!may_extend || t0 >= t_cap * (1.0 - 1e-12)) break;
      double res = 0.0, pres = 0.0;
      for (std::size_t j = 0; j < nz; ++j) {
        pres += w[j] * std::norm(p[j]);
        res += w[j] * (std::norm(p[j]) + std::norm(s[j]));
      }
      if (res < opt.residual_target) break;
      if (omega_hold == cplx(0.0) && pres < 1e-14) break;
    }
    cplx om, e0m, e0_next;
    if (in_window) {
      om = 0.5 * (omega(n, t0) + omega(n + 1, t1));
      if (storage) {
        e0_next = ein(n + 1, t1);
        e0m = energy_matched_mid(ein(n, t0), e0_next);
      }
    } else {
      om = omega_hold;
    }
    const double om2 = std::norm(om);
    const cplx diag_common = 1.0 + 0.5 * h * decay + 0.25 * h * h * om2 / spin_den;
    cplx run = 0.0;  // sum_{k<j} w_k pbar_k
    for (std::size_t j = 0; j < nz; ++j) {
      const cplx rhs = p[j] + 0.5 * h * (i1 * sd * e0m - params.d * run + i1 * om * s[j] / spin_den);
      pbar[j] = rhs / (diag_common + 0.25 * h * params.d * w[j]);
      sbar[j] = (s[j] + 0.5 * h * i1 * std::conj(om) * pbar[j]) / spin_den;
      run += w[j] * pbar[j];
    }
    const cplx e1m = e0m + i1 * sd * run;
    const double oute = h * std::norm(e1m);
    if (storage)
      r.leak += oute;
    else
      eta_out += oute;
    double lstep = 0.0, sstep = 0.0;
    for (std::size_t j = 0; j < nz; ++j) {
      const double lp = 2.0 * h * std::norm(pbar[j]);
      r.loss_density[j] += lp;
      lstep += w[j] * lp;
      sstep += w[j] * std::norm(sbar[j]);
      p[j] = 2.0 * pbar[j] - p[j];
      s[j] = 2.0 * sbar[j] - s[j];
    }
    r.loss += lstep;
    r.spin_loss += 2.0 * params.gamma_s * h * sstep;
    if (storage) r.input_energy += h * std::norm(e0m);
    if (!std::isfinite(lstep) || !std::isfinite(sstep)) {
      std::size_t bad = 0;
      while (bad < nz && std::isfinite(std::abs(p[bad])) && std::isfinite(std::abs(s[bad]))) ++bad;
      std::ostringstream os;
      os << "non-finite field at z = " << grid.z(std::min(bad, nz - 1)) << ", t = " << t1;
      throw NumericalError(os.str());
    }
    record(n + 1, t1, storage ? e0_next : cplx(0.0));
  }
  r.steps = n;
  r.t_end = h * static_cast<double>(n);

  if (stage.kind == StageKind::fast_storage) {
    auto st = apply_pi_pulse({p, s});
    p = std::move(st.p);
    s = std::move(st.s);
  }

  double pe = 0.0, se = 0.0;
  for (std::size_t j = 0; j < nz; ++j) {
    pe += w[j] * std::norm(p[j]);
    se += w[j] * std::norm(s[j]);
  }
  if (storage) {
    r.eta = se;
    r.residual = pe;
  } else {
    r.eta = eta_out;
    r.residual = pe + se;
  }
  r.e_out = FieldMode(std::move(eout), r.t_end);
  r.spin = SpinWave(s);
  r.polarization = p;
  return r;
}

EnergyLedger energy_ledger(const SimResult& r) {
  EnergyLedger l;
  l.eta = r.eta;
  l.leak = r.leak;
  l.loss = r.loss + r.spin_loss;
  l.residual = r.residual;
  l.input = r.input_energy;
  l.defect = l.eta + l.leak + l.loss + l.residual - l.input;
  return l;
}

}  // namespace photonstore
