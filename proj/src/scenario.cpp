#include "photonstore/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "photonstore/adiabatic.hpp"
#include "photonstore/fast.hpp"
#include "photonstore/kernels.hpp"
#include "photonstore/protocols.hpp"
#include "scenario_detail.hpp"

namespace photonstore {

namespace fs = std::filesystem;
using detail::Context;
using detail::Outcome;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "command",
      "params.d", "params.delta", "params.gamma_s", "params.dk",
      "grid.nz", "grid.nt", "grid.t_win",
      "input.shape", "input.file",
      "spin.mode", "spin.file",
      "control.shape", "control.amplitude", "control.h_total", "control.omega_cap", "control.eps_div",
      "control.complete_factor", "control.file",
      "retrieval.direction", "retrieval.method", "retrieval.wait",
      "optimize.direction", "optimize.max_iters",
      "shape.kind",
      "sweep.parameter", "sweep.values", "sweep.command",
      "figure.id", "figure.d", "figure.d_list", "figure.td_list", "figure.delta_list", "figure.dk_list",
      "figure.t_win"};
  return keys;
}

// Keys a sweep may vary.
const std::set<std::string>& sweepable() {
  static const std::set<std::string> keys = {"params.d",         "params.delta",      "params.gamma_s",
                                             "params.dk",        "grid.t_win",        "grid.nz",
                                             "grid.nt",          "control.amplitude", "control.h_total",
                                             "control.omega_cap", "retrieval.wait"};
  return keys;
}

void require_one_of(const Config& c, const std::string& key, std::initializer_list<const char*> allowed,
                    const char* fallback) {
  const std::string v = c.text(key, fallback);
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  c.fail(key, "'" + v + "' is not one of {" + list + "}");
}

void require_file(const Config& c, const std::string& switch_key, const char* switch_value, const char* fallback,
                  const std::string& file_key) {
  if (c.text(switch_key, fallback) != switch_value) return;
  if (!c.has(file_key)) c.fail(switch_key, std::string("'") + switch_value + "' needs " + file_key);
  if (!fs::exists(c.text(file_key, ""))) c.fail(file_key, "file not found: " + c.text(file_key, ""));
}

double need(const Params& p) { return (p.d * p.d + p.delta * p.delta) / p.d; }

// ---------------------------------------------------------------- resolvers

ShapingConfig shaping(const Context& ctx) {
  ShapingConfig s;
  s.h_total = ctx.cfg().number("control.h_total", 0.0);
  s.omega_cap = ctx.cfg().number("control.omega_cap", s.omega_cap);
  s.eps_div = ctx.cfg().number("control.eps_div", s.eps_div);
  s.complete_factor = ctx.cfg().number("control.complete_factor", s.complete_factor);
  return s;
}

Direction direction(const Context& ctx, const char* fallback) {
  return ctx.cfg().text("retrieval.direction", fallback) == "forward" ? Direction::forward : Direction::backward;
}

SpinWave resolve_spin(Context& ctx) {
  const std::string mode = ctx.cfg().text("spin.mode", "optimal");
  const std::size_t nz = ctx.grid().nz;
  if (mode == "flat") return SpinWave::from_function(nz, [](double) { return 1.0; });
  if (mode == "ramp") return SpinWave::from_function(nz, [](double z) { return std::sqrt(3.0) * z; });
  if (mode == "file") return io::read_spin(ctx.cfg().text("spin.file", "")).resampled(nz);
  if (mode == "optimal-forward") return ctx.cache.forward(ctx.params().d, ctx.optim()).mode.resampled(nz);
  return ctx.cache.backward(ctx.params().d, ctx.optim()).mode.resampled(nz);
}

FieldMode resolve_input(Context& ctx, Outcome& o) {
  FieldMode in = ctx.cfg().text("input.shape", "gaussian") == "file"
                     ? io::read_field(ctx.cfg().text("input.file", ""))
                     : gaussian_like_input(ctx.grid().t_win, ctx.grid());
  o.summary.set("input_norm2", in.norm2());
  return in.renormalized();
}

// The control for storing `in`, sharing its time grid.
ControlField storage_control(Context& ctx, const FieldMode& in) {
  const Config& c = ctx.cfg();
  const std::string shape = c.text("control.shape", "shaped");
  if (shape == "square") return square_control(c.number("control.h_total", ctx.params().d), in.t_win(), in.size());
  if (shape == "constant") {
    if (!c.has("control.amplitude")) c.fail("control.shape", "'constant' needs control.amplitude");
    return ControlField::constant(c.number("control.amplitude", 0.0), in.t_win(), in.size());
  }
  if (shape == "file") {
    ControlField f = io::read_control(c.text("control.file", ""));
    if (f.size() != in.size() || std::abs(f.t_win() - in.t_win()) > 1e-9 * in.t_win())
      c.fail("control.file", "control grid must match the input grid (" + std::to_string(in.size()) + " samples on [0, " +
                                 io::format_number(in.t_win()) + "])");
    return f;
  }
  return shape_storage_control(in, ctx.cache.decayless(ctx.params().d), ctx.params(), shaping(ctx));
}

// Retrieval control on the scenario grid; "shaped" targets input-section mode.
ControlField retrieval_control(Context& ctx, const SpinWave& s, Outcome& o) {
  const Config& c = ctx.cfg();
  const Grid& g = ctx.grid();
  const std::string shape = c.text("control.shape", "square");
  const double complete = shaping(ctx).complete_factor * need(ctx.params());
  if (shape == "square") return square_control(c.number("control.h_total", complete), g.t_win, g.nt);
  if (shape == "constant") {
    if (!c.has("control.amplitude")) c.fail("control.shape", "'constant' needs control.amplitude");
    return ControlField::constant(c.number("control.amplitude", 0.0), g.t_win, g.nt);
  }
  if (shape == "file") return io::read_control(c.text("control.file", ""));
  const FieldMode target = resolve_input(ctx, o);
  return shape_retrieval_control(s, target, ctx.params(), shaping(ctx));
}

void record_sim(Outcome& o, const SimResult& r) {
  const EnergyLedger l = energy_ledger(r);
  o.summary.set("eta", r.eta);
  o.summary.set("leak", r.leak);
  o.summary.set("loss", r.loss);
  o.summary.set("spin_loss", r.spin_loss);
  o.summary.set("residual", r.residual);
  o.summary.set("steps", r.steps);
  o.summary.set("t_end", r.t_end);
  o.check("energy_defect", std::abs(l.defect), "<1e-4", std::abs(l.defect) < 1e-4);
}

// ---------------------------------------------------------------- commands

Outcome cmd_retrieve(Context& ctx) {
  Outcome o{"retrieve"};
  const Params& p = ctx.params();
  const SpinWave s = resolve_spin(ctx);
  const Direction dir = direction(ctx, "forward");
  const SpinWave eff = dir == Direction::backward ? flip_spin_wave(s, p.dk) : s;
  const double kernel = retrieval_efficiency(eff, p.d);
  const std::string method = ctx.cfg().text("retrieval.method", "solver");
  o.summary.set("method", method);
  o.summary.set("direction", dir == Direction::backward ? "backward" : "forward");
  FieldMode e;
  if (method == "fast") {
    e = fast_retrieve(eff, p.d, ctx.grid());
    o.summary.set("eta", e.norm2());
  } else {
    const ControlField c = retrieval_control(ctx, s, o);
    o.summary.set("control_h_total", c.h_total());
    if (method == "adiabatic") {
      e = adiabatic_retrieve(eff, c, p);
      o.summary.set("eta", e.norm2());
    } else {
      const StageKind kind = dir == Direction::backward ? StageKind::retrieval_backward : StageKind::retrieval_forward;
      const SimResult r = simulate(p, Grid{ctx.grid().nz, c.size(), c.t_win()},
                                   StageSpec{kind, c, std::nullopt, s});
      record_sim(o, r);
      e = r.e_out;
    }
  }
  o.summary.set("kernel_eta", kernel);
  io::field_table(e).write(ctx.out("retrieve.csv"));
  return o;
}

SpinWave store_with_method(Context& ctx, const FieldMode& in, Outcome& o) {
  const Params& p = ctx.params();
  const std::string method = ctx.cfg().text("retrieval.method", "solver");
  o.summary.set("method", method);
  if (method == "fast") {
    SpinWave s = fast_store(in, p.d, ctx.grid());
    o.summary.set("eta_store", s.norm2());
    return s;
  }
  const ControlField c = storage_control(ctx, in);
  o.summary.set("control_h_total", c.h_total());
  io::control_table(c).write(ctx.out(o.stem + "_control.csv"));
  if (method == "adiabatic") {
    SpinWave s = adiabatic_store(in, c, p, ctx.grid().nz);
    o.summary.set("eta_store", s.norm2());
    return s;
  }
  const SimResult r = simulate(p, Grid{ctx.grid().nz, in.size(), in.t_win()}, StageSpec{StageKind::storage, c, in, std::nullopt});
  record_sim(o, r);
  o.summary.set("eta_store", r.eta);
  return r.spin;
}

Outcome cmd_store(Context& ctx) {
  Outcome o{"store"};
  const FieldMode in = resolve_input(ctx, o);
  const SpinWave s = store_with_method(ctx, in, o);
  o.summary.set("eta_store_max", ctx.cache.backward(ctx.params().d, ctx.optim()).efficiency);
  io::spin_table(s).write(ctx.out("store.csv"));
  return o;
}

Outcome cmd_store_retrieve(Context& ctx) {
  Outcome o{"store_retrieve"};
  const Params& p = ctx.params();
  const FieldMode in = resolve_input(ctx, o);
  const SpinWave s = store_with_method(ctx, in, o);
  const Direction dir = direction(ctx, "backward");
  const double eta_s = s.norm2();
  double eta_r = 0.0;
  if (eta_s > 0.0) {
    const SpinWave n = s.renormalized();
    eta_r = retrieval_efficiency(dir == Direction::backward ? flip_spin_wave(n, p.dk) : n, p.d);
  }
  const double wait = ctx.cfg().number("retrieval.wait", 0.0);
  const double hold = std::exp(-2.0 * p.gamma_s * wait);
  double best = 0.0;
  if (dir == Direction::forward) {
    best = ctx.cache.forward(p.d, ctx.optim()).efficiency;
  } else if (p.dk > 0.0) {
    best = ctx.cache.nondegenerate(p.d, p.dk, ctx.optim()).efficiency;
  } else {
    const double b = ctx.cache.backward(p.d, ctx.optim()).efficiency;
    best = b * b;
  }
  o.summary.set("direction", dir == Direction::backward ? "backward" : "forward");
  o.summary.set("eta_retrieve", eta_r);
  o.summary.set("storage_hold_factor", hold);
  o.summary.set("eta_total", eta_s * eta_r * hold);
  o.summary.set("eta_total_max", best * hold);
  io::spin_table(s).write(ctx.out("store_retrieve.csv"));
  return o;
}

Outcome cmd_optimize(Context& ctx) {
  Outcome o{"optimize_mode"};
  const Params& p = ctx.params();
  const std::string kind = ctx.cfg().text("optimize.direction", "backward");
  o.summary.set("direction", kind);
  const double mode_limit = ctx.reference() ? 1e-6 : 1e-4;
  if (kind == "time-reversal") {
    const Grid& g = ctx.grid();
    const Direction dir = direction(ctx, "backward");
    const double h = ctx.cfg().number("control.h_total", shaping(ctx).complete_factor * need(p));
    const ControlField c = square_control(h, g.t_win, g.nt);
    TimeReversalOptions to;
    to.max_iters = static_cast<int>(ctx.cfg().count("optimize.max_iters", 30));
    const auto r = time_reversal_iterate(p, g, c, c, gaussian_like_input(g.t_win, g).renormalized(), dir, to);
    const double b = ctx.cache.backward(p.d, ctx.optim()).efficiency;
    const double predicted = dir == Direction::backward ? b * b : ctx.cache.forward(p.d, ctx.optim()).efficiency;
    o.summary.set("efficiency", r.efficiency);
    o.summary.set("iterations", r.iterations);
    o.summary.set("residual", r.residual);
    o.summary.set("kernel_prediction", predicted);
    o.check("monotone", r.monotone ? 1.0 : 0.0, "nondecreasing within 1e-6", r.monotone);
    o.check("converged", r.residual, "<" + io::format_number(to.tol), r.residual < to.tol);
    io::CsvTable hist;
    RVec it(r.history.size());
    for (std::size_t i = 0; i < it.size(); ++i) it[i] = static_cast<double>(i + 1);
    hist.add("iteration", it);
    hist.add("efficiency", r.history);
    hist.write(ctx.out("optimize_mode_history.csv"));
    io::field_table(r.input).write(ctx.out("optimize_mode_input.csv"));
    io::spin_table(r.spin).write(ctx.out("optimize_mode.csv"));
    return o;
  }
  OptimResult r;
  if (kind == "forward") {
    r = ctx.cache.forward(p.d, ctx.optim());
  } else if (kind == "nondegenerate") {
    r = ctx.cache.nondegenerate(p.d, p.dk, ctx.optim());
  } else {
    r = ctx.cache.backward(p.d, ctx.optim());
  }
  o.summary.set("efficiency", r.efficiency);
  o.summary.set("eigenvalue_re", r.eigenvalue.real());
  o.summary.set("eigenvalue_im", r.eigenvalue.imag());
  o.summary.set("iterations", r.iterations);
  o.check("mode_residual", r.residual, "<" + io::format_number(mode_limit), r.residual < mode_limit);
  io::CsvTable t = io::spin_table(r.mode);
  RVec mag(r.mode.size()), arg(r.mode.size());
  for (std::size_t k = 0; k < mag.size(); ++k) {
    mag[k] = std::abs(r.mode[k]);
    arg[k] = std::arg(r.mode[k]);
  }
  t.add("S_abs", mag);
  t.add("S_arg", arg);
  t.write(ctx.out("optimize_mode.csv"));
  return o;
}

Outcome cmd_shape(Context& ctx) {
  Outcome o{"shape_control"};
  const Params& p = ctx.params();
  const std::string kind = ctx.cfg().text("shape.kind", "retrieval");
  o.summary.set("kind", kind);
  const ShapingConfig sc = shaping(ctx);
  ControlField c;
  if (kind == "storage") {
    const FieldMode in = resolve_input(ctx, o);
    c = shape_storage_control(in, ctx.cache.decayless(p.d), p, sc);
    const double eta = adiabatic_store(in, c, p, ctx.grid().nz).norm2();
    const double best = ctx.cache.backward(p.d, ctx.optim()).efficiency;
    // gamma_s only rescales: the optimum is eta_max int |E|^2 e^{-2 gamma_s (T - t)}
    double w = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i)
      w += ((i == 0 || i + 1 == in.size()) ? 0.5 : 1.0) * in.dt() * std::norm(in[i]) *
           std::exp(-2.0 * p.gamma_s * (in.t_win() - in.t(i)));
    o.summary.set("eta_store", eta);
    o.summary.set("eta_store_max", best * w);
    o.check("storage_gap", std::abs(eta - best * w), "<1e-2", std::abs(eta - best * w) < 1e-2);
  } else {
    const SpinWave s = resolve_spin(ctx);
    const FieldMode target = resolve_input(ctx, o);
    c = shape_retrieval_control(s, target, p, sc);
    const FieldMode e = adiabatic_retrieve(s, c, p);
    const double ov = overlap(e, target);
    o.summary.set("eta", e.norm2());
    o.summary.set("kernel_eta", retrieval_efficiency(s, p.d));
    o.check("target_overlap", ov, ">0.99", ov > 0.99);
  }
  double peak = 0.0;
  std::size_t zeroed = 0;
  for (const auto& x : c.samples()) {
    peak = std::max(peak, std::abs(x));
    zeroed += x == 0.0 ? 1 : 0;
  }
  o.summary.set("control_h_total", c.h_total());
  o.summary.set("control_peak", peak);
  o.summary.set("control_zero_samples", zeroed);
  io::control_table(c).write(ctx.out("shape_control.csv"));
  return o;
}

Outcome run_single(Context& ctx) {
  switch (ctx.sc.command) {
    case Command::retrieve: return cmd_retrieve(ctx);
    case Command::store: return cmd_store(ctx);
    case Command::store_retrieve: return cmd_store_retrieve(ctx);
    case Command::optimize_mode: return cmd_optimize(ctx);
    case Command::shape_control: return cmd_shape(ctx);
    case Command::figure: return detail::run_figure(ctx);
    case Command::sweep: break;
  }
  throw ValidationError("sweep points cannot themselves be sweeps");
}

void common_summary(const Scenario& sc, const RunOptions& opt, io::Summary& s) {
  s.set("command", to_string(sc.command));
  if (sc.command == Command::figure) s.set("figure", sc.figure);
  s.set("profile", to_string(opt.profile));
  s.set("d", sc.params.d);
  s.set("delta", sc.params.delta);
  s.set("gamma_s", sc.params.gamma_s);
  s.set("dk", sc.params.dk);
  s.set("nz", sc.grid.nz);
  s.set("nt", sc.grid.nt);
  s.set("t_win", sc.grid.t_win);
}

// Sweep: every point runs in its own directory; rows are merged in input order.
Outcome cmd_sweep(Context& ctx) {
  Outcome o{"sweep"};
  const Config& cfg = ctx.cfg();
  const std::string key = cfg.text("sweep.parameter", "");
  const RVec values = cfg.numbers("sweep.values", {});
  const Command sub = parse_command(cfg.text("sweep.command", "store-retrieve"));
  const std::size_t n = values.size();
  std::vector<io::Summary> results(n);
  std::vector<int> status(n, kExitOk);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const fs::path dir = ctx.opt.out_dir / "points" / ("point_" + std::to_string(i));
      try {
        Config c = cfg;
        c.set(key, io::format_number(values[i]));
        const Scenario point = make_scenario(sub, c, "", ctx.opt.profile);
        RunOptions po = ctx.opt;
        po.out_dir = dir;
        Context pc{point, po, ctx.cache, ctx.log};
        Outcome r = run_single(pc);
        io::Summary s;
        common_summary(point, po, s);
        s.merge(r.summary);
        s.set("tolerance_met", r.tolerance_met);
        s.write(dir / (r.stem + ".summary"));
        results[i] = std::move(s);
        if (!r.tolerance_met) status[i] = kExitNumerical;
      } catch (const ValidationError& e) {
        status[i] = kExitValidation;
        errors[i] = e.what();
      } catch (const std::exception& e) {
        status[i] = kExitNumerical;
        errors[i] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(ctx.opt.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) {
      const std::string msg = "sweep point " + std::to_string(i) + " (" + key + " = " + io::format_number(values[i]) +
                              "): " + errors[i];
      if (status[i] == kExitValidation) throw ValidationError(msg);
      throw NumericalError(msg);
    }

  // numeric summary fields of the first point define the columns
  io::CsvTable t;
  t.add(key, values);
  for (const auto& [k, v] : results.front().items()) {
    if (k == key || k == "d" || k == "nz" || k == "nt") continue;
    RVec col(n);
    bool numeric = true;
    for (std::size_t i = 0; i < n && numeric; ++i) {
      const std::string* s = results[i].find(k);
      char* end = nullptr;
      col[i] = s ? std::strtod(s->c_str(), &end) : std::nan("");
      numeric = s && end && *end == '\0' && !s->empty();
    }
    if (numeric) t.add(k, col);
  }
  t.write(ctx.out("sweep.csv"));
  std::size_t failed = 0;
  for (int s : status) failed += s != kExitOk ? 1 : 0;
  o.summary.set("parameter", key);
  o.summary.set("points", n);
  o.summary.set("sub_command", to_string(sub));
  o.check("points_within_tolerance", static_cast<double>(n - failed), "=" + std::to_string(n), failed == 0);
  return o;
}

}  // namespace

// ---------------------------------------------------------------- detail

namespace detail {

void Outcome::check(const std::string& name, double value, const std::string& requirement, bool met) {
  summary.set("acceptance." + name + ".value", value);
  summary.set("acceptance." + name + ".requirement", requirement);
  summary.set("acceptance." + name + ".met", met);
  tolerance_met = tolerance_met && met;
}

OptimOptions Context::optim() const {
  OptimOptions o;
  o.nz = std::max<std::size_t>(sc.grid.nz, 201);
  if (!reference()) {
    o.tol = 1e-8;
    o.mode_tol = 1e-6;
  }
  return o;
}

std::string tag(double x) { return io::format_number(x); }

}  // namespace detail

// ---------------------------------------------------------------- public

Command parse_command(const std::string& name) {
  if (name == "retrieve") return Command::retrieve;
  if (name == "store") return Command::store;
  if (name == "store-retrieve") return Command::store_retrieve;
  if (name == "optimize-mode") return Command::optimize_mode;
  if (name == "shape-control") return Command::shape_control;
  if (name == "sweep") return Command::sweep;
  if (name == "figure") return Command::figure;
  throw ValidationError("unknown command '" + name + "'");
}

const char* to_string(Command c) {
  switch (c) {
    case Command::retrieve: return "retrieve";
    case Command::store: return "store";
    case Command::store_retrieve: return "store-retrieve";
    case Command::optimize_mode: return "optimize-mode";
    case Command::shape_control: return "shape-control";
    case Command::sweep: return "sweep";
    case Command::figure: return "figure";
  }
  return "?";
}

ToleranceProfile parse_profile(const std::string& name) {
  if (name == "fast") return ToleranceProfile::fast;
  if (name == "reference") return ToleranceProfile::reference;
  throw ValidationError("unknown tolerance profile '" + name + "' (fast, reference)");
}

const char* to_string(ToleranceProfile p) { return p == ToleranceProfile::fast ? "fast" : "reference"; }

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"2", "3", "4a", "4b", "5", "6", "7"};
  return ids;
}

Scenario make_scenario(Command command, const Config& config, const std::string& figure, ToleranceProfile profile) {
  const Config& c = config;
  for (const auto& k : c.keys())
    if (!known_keys().count(k)) c.fail(k, "unknown key");

  Scenario sc;
  sc.command = command;
  sc.config = config;
  sc.params.d = c.number("params.d", 10.0);
  sc.params.delta = c.number("params.delta", 0.0);
  sc.params.gamma_s = c.number("params.gamma_s", 0.0);
  sc.params.dk = c.number("params.dk", 0.0);
  if (!(sc.params.d > 0.0)) c.fail("params.d", "optical depth must be positive");
  if (!(sc.params.gamma_s >= 0.0)) c.fail("params.gamma_s", "must be non-negative");
  if (!(sc.params.dk >= 0.0)) c.fail("params.dk", "must be non-negative");
  if (sc.params.d > 1e4) c.fail("params.d", "above the supported range (d <= 1e4)");

  const bool ref = profile == ToleranceProfile::reference;
  sc.grid.nz = c.count("grid.nz", ref ? 201 : 101);
  sc.grid.nt = c.count("grid.nt", ref ? 4001 : 2001);
  sc.grid.t_win = c.number("grid.t_win", 10.0);
  if (sc.grid.nz < 11) c.fail("grid.nz", "need at least 11 points");
  if (sc.grid.nt < 11) c.fail("grid.nt", "need at least 11 points");
  if (!(sc.grid.t_win > 0.0)) c.fail("grid.t_win", "window must be positive");

  require_one_of(c, "input.shape", {"gaussian", "file"}, "gaussian");
  require_file(c, "input.shape", "file", "gaussian", "input.file");
  require_one_of(c, "spin.mode", {"optimal", "optimal-forward", "flat", "ramp", "file"}, "optimal");
  require_file(c, "spin.mode", "file", "optimal", "spin.file");
  require_one_of(c, "control.shape", {"shaped", "square", "constant", "file"}, "shaped");
  require_file(c, "control.shape", "file", "shaped", "control.file");
  require_one_of(c, "retrieval.direction", {"forward", "backward"}, "backward");
  require_one_of(c, "retrieval.method", {"solver", "adiabatic", "fast"}, "solver");
  require_one_of(c, "optimize.direction", {"backward", "forward", "nondegenerate", "time-reversal"}, "backward");
  require_one_of(c, "shape.kind", {"retrieval", "storage"}, "retrieval");
  if (c.number("control.omega_cap", 1.0) <= 0.0) c.fail("control.omega_cap", "must be positive");
  if (c.number("control.complete_factor", 1.0) <= 0.0) c.fail("control.complete_factor", "must be positive");
  if (c.number("control.h_total", 0.0) < 0.0) c.fail("control.h_total", "must be non-negative");
  if (c.number("retrieval.wait", 0.0) < 0.0) c.fail("retrieval.wait", "must be non-negative");

  if (command == Command::sweep) {
    if (!c.has("sweep.parameter")) throw ConfigError(c.source() + ": sweep needs sweep.parameter");
    if (!sweepable().count(c.text("sweep.parameter", ""))) c.fail("sweep.parameter", "not a sweepable key");
    if (!c.has("sweep.values")) throw ConfigError(c.source() + ": sweep needs sweep.values");
    c.numbers("sweep.values", {});
    const std::string sub = c.text("sweep.command", "store-retrieve");
    if (sub == "sweep" || sub == "figure") c.fail("sweep.command", "cannot sweep '" + sub + "'");
    try {
      parse_command(sub);
    } catch (const ValidationError& e) {
      c.fail("sweep.command", e.what());
    }
  }
  if (command == Command::figure) {
    sc.figure = figure.empty() ? c.text("figure.id", "") : figure;
    const auto& ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), sc.figure) == ids.end())
      throw ConfigError(c.where("figure.id") + ": unknown figure '" + sc.figure + "' (2, 3, 4a, 4b, 5, 6, 7)");
    for (const char* k : {"figure.d_list", "figure.td_list", "figure.delta_list", "figure.dk_list"}) {
      for (double v : c.numbers(k, {1.0}))
        if (!(v >= 0.0)) c.fail(k, "values must be non-negative");
    }
    for (double v : c.numbers("figure.d_list", {1.0}))
      if (!(v > 0.0)) c.fail("figure.d_list", "optical depths must be positive");
    for (double v : c.numbers("figure.td_list", {1.0}))
      if (!(v > 0.0)) c.fail("figure.td_list", "Td must be positive");
  }
  return sc;
}

namespace {

std::string default_stem(const Scenario& sc) {
  if (sc.command == Command::figure) return "figure_" + sc.figure;
  std::string s = to_string(sc.command);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

void write_failure(const Scenario& sc, const RunOptions& opt, const std::string& what) {
  io::Summary s;
  common_summary(sc, opt, s);
  s.set("status", "numerical_failure");
  s.set("error", what);
  s.set("tolerance_met", false);
  try {
    fs::create_directories(opt.out_dir);
    s.write(opt.out_dir / (default_stem(sc) + ".summary"));
  } catch (const std::exception&) {
  }
}

}  // namespace

int run(const Scenario& scenario, const RunOptions& options, std::ostream& log) {
  ModeCache cache(options.cache_dir);
  Context ctx{scenario, options, cache, log};
  try {
    fs::create_directories(options.out_dir);
    Outcome o = scenario.command == Command::sweep ? cmd_sweep(ctx) : run_single(ctx);
    io::Summary s;
    common_summary(scenario, options, s);
    s.set("status", o.tolerance_met ? "ok" : "tolerance_not_met");
    s.merge(o.summary);
    s.set("tolerance_met", o.tolerance_met);
    s.write(options.out_dir / (o.stem + ".summary"));
    if (!o.tolerance_met) {
      log << "tolerance not met:";
      for (const auto& [k, v] : o.summary.items())
        if (k.size() > 15 && k.ends_with(".met") && v == "false") log << ' ' << k.substr(11, k.size() - 15);
      log << " (see " << (options.out_dir / (o.stem + ".summary")).string() << ")\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << '\n';
    write_failure(scenario, options, e.what());
    return kExitNumerical;
  }
}

}  // namespace photonstore
