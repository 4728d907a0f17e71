// Thin Python layer: arrays in, arrays and plain numbers out.
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "photonstore/adiabatic.hpp"
#include "photonstore/fast.hpp"
#include "photonstore/kernels.hpp"
#include "photonstore/optimizer.hpp"
#include "photonstore/protocols.hpp"
#include "photonstore/scenario.hpp"

namespace py = pybind11;
using namespace photonstore;

namespace {

CVec to_cvec(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw ValidationError("expected a 1-d array");
  return CVec(a.data(), a.data() + a.size());
}

py::array_t<cplx> to_array(const CVec& v) { return py::array_t<cplx>(v.size(), v.data()); }

Params make_params(double d, double delta, double gamma_s, double dk) {
  Params p{d, delta, gamma_s, dk};
  p.validate();
  return p;
}

py::dict mode_dict(const OptimResult& r) {
  py::dict out;
  out["mode"] = to_array(r.mode.samples());
  out["efficiency"] = r.efficiency;
  out["eigenvalue"] = r.eigenvalue;
  out["iterations"] = r.iterations;
  return out;
}

}  // namespace

PYBIND11_MODULE(_photonstore, m) {
  m.doc() = "optimal photon storage in atomic ensembles";
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("retrieval_efficiency", [](const py::array_t<cplx>& s, double d) {
        return retrieval_efficiency(SpinWave(to_cvec(s)), d);
      }, py::arg("spin"), py::arg("d"), "efficiency of complete forward retrieval of the spin wave on [0,1] (normalized)");

  m.def("optimal_backward_mode", [](double d, std::size_t nz) {
        OptimOptions o;
        o.nz = nz;
        return mode_dict(optimal_backward_mode(d, o));
      }, py::arg("d"), py::arg("nz") = 201);
  m.def("optimal_forward_mode", [](double d, std::size_t nz) {
        OptimOptions o;
        o.nz = nz;
        return mode_dict(optimal_forward_mode(d, o));
      }, py::arg("d"), py::arg("nz") = 201);
  m.def("optimal_nondegenerate_mode", [](double d, double dk, std::size_t nz) {
        OptimOptions o;
        o.nz = nz;
        return mode_dict(optimal_nondegenerate_mode(d, dk, o));
      }, py::arg("d"), py::arg("dk"), py::arg("nz") = 201);

  m.def("fast_retrieve", [](const py::array_t<cplx>& s, double d, double t_win, std::size_t nt) {
        const Grid g{SpinWave(to_cvec(s)).size(), nt, t_win};
        const FieldMode e = fast_retrieve(SpinWave(to_cvec(s)), d, g);
        RVec t(e.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = e.t(i);
        return py::make_tuple(py::array_t<double>(t.size(), t.data()), to_array(e.samples()));
      }, py::arg("spin"), py::arg("d"), py::arg("t_win") = 10.0, py::arg("nt") = 4001,
      "pi-pulse retrieval of a spin wave; returns (t, E(t)); the window extends until the output has decayed");

  m.def("breakdown_efficiency", [](double d, double delta, double td, std::size_t nz, std::size_t nt) {
        return breakdown_efficiency(make_params(d, delta, 0.0, 0.0), td, nz, nt);
      }, py::arg("d"), py::arg("delta"), py::arg("td"), py::arg("nz") = 201, py::arg("nt") = 4001,
      "storage + backward retrieval with the shaped optimal control for a Gaussian input of duration td/d");

  m.def("square_control_efficiency", [](double d, double t_win, std::size_t nz, std::size_t nt) {
        return square_control_efficiency(make_params(d, 0.0, 0.0, 0.0), t_win, nz, nt);
      }, py::arg("d"), py::arg("t_win"), py::arg("nz") = 201, py::arg("nt") = 4001);

  m.def("run_config", [](const std::string& command, const std::string& text, const std::filesystem::path& out,
                         const std::string& profile, const std::string& figure) {
        RunOptions opt;
        opt.out_dir = out;
        opt.profile = parse_profile(profile);
        std::ostringstream log;
        try {
          const Scenario sc = make_scenario(parse_command(command), Config::parse(text, "<python>"), figure, opt.profile);
          const int code = run(sc, opt, log);
          return py::make_tuple(code, log.str());
        } catch (const ValidationError& e) {
          return py::make_tuple(kExitValidation, std::string("error: ") + e.what());
        }
      }, py::arg("command"), py::arg("config"), py::arg("out"), py::arg("profile") = "reference",
      py::arg("figure") = "", "runs a scenario given as config text; returns (exit status, log)");
}
