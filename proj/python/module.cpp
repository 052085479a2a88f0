// Python bindings for the main operations: forward propagation, the
// van Leeuwen field construction, and the observable/entanglement kernels.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qchain/config.hpp"
#include "qchain/errors.hpp"
#include "qchain/observables.hpp"
#include "qchain/propagator.hpp"
#include "qchain/spinops.hpp"
#include "qchain/verify.hpp"
#include "qchain/version.hpp"
#include "qchain/vlmap.hpp"

namespace py = pybind11;
using namespace qchain;

namespace {

StateVector state_from_array(const py::array_t<Complex>& amps) {
    const auto buf = amps.request();
    if (buf.ndim != 1) throw ValidationError("state must be a 1-d complex array");
    const auto dim = static_cast<std::size_t>(buf.shape[0]);
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if ((std::size_t{1} << n) != dim || n < 1)
        throw ValidationError("state length must be a power of two >= 2");
    StateVector s(n);
    const auto* ptr = static_cast<const Complex*>(buf.ptr);
    std::copy(ptr, ptr + dim, s.amps.begin());
    return s;
}

py::array_t<double> matrix_out(const std::vector<double>& data, std::size_t rows,
                               std::size_t cols) {
    py::array_t<double> arr({rows, cols});
    std::copy(data.begin(), data.end(), arr.mutable_data());
    return arr;
}

py::dict trajectory_dict(const Trajectory& traj) {
    py::dict d;
    const std::size_t m = traj.n_points();
    const std::size_t n = static_cast<std::size_t>(traj.n_qubits);
    const std::size_t b = traj.n_bonds();
    py::array_t<double> t(m);
    std::copy(traj.times.begin(), traj.times.end(), t.mutable_data());
    d["t"] = t;
    d["bonds"] = traj.bond_pairs;
    if (traj.record.sigma_z) d["sigma_z"] = matrix_out(traj.sigma_z, m, n);
    if (traj.record.currents) d["currents"] = matrix_out(traj.currents, m, b);
    if (traj.record.kinetics) d["kinetics"] = matrix_out(traj.kinetics, m, b);
    d["fields"] = matrix_out(traj.field_values, m, n);
    return d;
}

PauliAxis axis_from_string(const std::string& axis) {
    if (axis == "x" || axis == "X") return PauliAxis::X;
    if (axis == "y" || axis == "Y") return PauliAxis::Y;
    if (axis == "z" || axis == "Z") return PauliAxis::Z;
    throw ValidationError("axis must be one of 'x', 'y', 'z'");
}

} // namespace

PYBIND11_MODULE(_qchain, m) {
    m.doc() = "Exact dynamics and inverse field engineering for 1D qubit chains";
    m.attr("__version__") = kVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IncompatibleStateError>(m, "IncompatibleStateError", PyExc_ValueError);

    m.def(
        "simulate",
        [](const std::string& config_json) {
            const ExperimentConfig cfg = parse_config(config_json);
            return trajectory_dict(propagate(cfg.experiment));
        },
        py::arg("config_json"),
        "Propagate the experiment described by a JSON config string.");

    m.def(
        "vl_map",
        [](const std::string& config_json) {
            const ExperimentConfig cfg = parse_config(config_json);
            if (!cfg.vl) throw ValidationError("config has no 'vl' block");
            const VLResult res = vl_construct(cfg.experiment, *cfg.vl);
            py::dict d;
            d["reference"] = trajectory_dict(res.reference_trajectory);
            d["auxiliary"] = trajectory_dict(res.aux_trajectory);
            d["max_sigma_deviation"] = res.max_sigma_deviation;
            d["max_current_deviation"] = res.max_current_deviation;
            d["max_kinetic_deviation"] = res.max_kinetic_deviation;
            d["max_state_coefficient_deviation"] = res.max_state_deviation;
            d["gauge_qubit"] = res.gauge_qubit;
            d["regularization_events"] = res.regularization_events.size();
            return d;
        },
        py::arg("config_json"),
        "Run the van Leeuwen construction for a config with a 'vl' block.");

    m.def(
        "apply_pauli",
        [](const py::array_t<Complex>& amps, int qubit, const std::string& axis) {
            const StateVector out =
                apply_pauli(state_from_array(amps), qubit, axis_from_string(axis));
            py::array_t<Complex> arr(out.dim());
            std::copy(out.amps.begin(), out.amps.end(), arr.mutable_data());
            return arr;
        },
        py::arg("state"), py::arg("qubit"), py::arg("axis"));

    m.def(
        "local_polarizations",
        [](const py::array_t<Complex>& amps) {
            const auto sig = local_polarizations(state_from_array(amps));
            py::array_t<double> arr(sig.size());
            std::copy(sig.begin(), sig.end(), arr.mutable_data());
            return arr;
        },
        py::arg("state"), "Per-qubit sigma_z expectations of a state vector.");

    m.def(
        "concurrence",
        [](const py::array_t<Complex>& amps, int k, int l) {
            const auto cs = concurrence(reduced_density_2q(state_from_array(amps), k, l));
            return py::make_tuple(cs.concurrence,
                                  py::make_tuple(cs.lambdas[0], cs.lambdas[1], cs.lambdas[2],
                                                 cs.lambdas[3]));
        },
        py::arg("state"), py::arg("k"), py::arg("l"),
        "Wootters concurrence and the rho*rho~ eigenvalues for a qubit pair.");

    m.def(
        "entanglement_functional",
        [](const std::vector<double>& sigma_z, int k, int l) {
            return entanglement_functional_single_excitation(sigma_z, k, l);
        },
        py::arg("sigma_z"), py::arg("k"), py::arg("l"),
        "Closed-form single-excitation pair concurrence from the sigma_z profile.");

    m.def(
        "two_excitation_spectrum",
        [](const py::array_t<Complex>& amps, int k, int l) {
            const auto lam = two_excitation_spectrum(state_from_array(amps), k, l);
            return py::make_tuple(lam[0], lam[1], lam[2], lam[3]);
        },
        py::arg("state"), py::arg("k"), py::arg("l"));

    m.def("embedded_config", &embedded_config, py::arg("name"),
          "Text of a shipped configuration preset, or '' if unknown.");

    m.def(
        "verify_default_suite",
        []() {
            const ExperimentConfig cfg = parse_config(embedded_config("paper_fig3"));
            const ExperimentSpec& spec = cfg.experiment;
            py::list out;
            std::vector<VerificationReport> reports;
            reports.push_back(continuity_residual(propagate(spec), spec.model));
            reports.push_back(conservation_drift(propagate(spec)));
            reports.push_back(gauge_invariance_check(spec, GlobalFieldShift{ConstantTerm{0.3}}));
            reports.push_back(rg_divergence_probe(spec.model, spec.schedule,
                                                  FieldSchedule(spec.model.n_qubits()),
                                                  build_initial_state(spec), spec.grid));
            reports.push_back(loop_current_identity());
            for (const auto& r : reports) {
                py::dict d;
                d["check"] = r.check;
                d["residual"] = r.max_residual;
                d["threshold"] = r.threshold;
                d["pass"] = r.pass;
                out.append(d);
            }
            return out;
        },
        "Run the gating verification checks on the shipped reference preset.");
}
