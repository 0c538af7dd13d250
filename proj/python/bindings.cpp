#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spc/config.hpp"
#include "spc/evolution.hpp"
#include "spc/scattering.hpp"
#include "spc/statics.hpp"
#include "spc/studies.hpp"

namespace py = pybind11;
using namespace spc;

namespace {

PotentialModel make_model(const std::string& shape, double radius, double lambda_c, double lambda_slope, int sign,
                          int channel)
{
    PotentialModel m;
    m.shape = parse_shape(shape);
    m.radius = radius;
    m.lambda_c = lambda_c;
    m.lambda_slope = lambda_slope;
    m.sign = sign;
    m.channel = channel;
    return m;
}

py::dict profile_dict(const ResonanceProfile& p)
{
    py::dict d;
    d["sigma"] = p.sigma;
    d["k"] = p.k;
    d["phi_out_sq"] = p.phi_out_sq;
    d["k_peak"] = p.k_peak;
    d["delta_width"] = p.delta_width;
    d["peak_value"] = p.peak_value;
    return d;
}

} // namespace

PYBIND11_MODULE(_spclab, m)
{
    m.doc() = "Near-critical Dirac bound states, resonances and decay";

    static py::handle error = PyErr_NewException("spclab.Error", PyExc_RuntimeError, nullptr);
    m.attr("Error") = error;
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error)(e.what());
            inst.attr("kind") = kind_name(e.kind());
            inst.attr("exit_code") = exit_code(e.kind());
            PyErr_SetObject(error.ptr(), inst.ptr());
        }
    });

    py::class_<PotentialModel>(m, "PotentialModel")
        .def(py::init(&make_model), py::arg("shape") = "well", py::arg("radius") = 0.5, py::arg("lambda_c") = 0.0,
             py::arg("lambda_slope") = 1.0, py::arg("sign") = 1, py::arg("channel") = 1)
        .def_readwrite("radius", &PotentialModel::radius)
        .def_readwrite("lambda_c", &PotentialModel::lambda_c)
        .def_readwrite("lambda_slope", &PotentialModel::lambda_slope)
        .def_readwrite("sign", &PotentialModel::sign)
        .def_readwrite("channel", &PotentialModel::channel)
        .def_property_readonly("shape", [](const PotentialModel& p) { return shape_name(p.shape); })
        .def("potential", [](const PotentialModel& p, double sigma, double r) { return potential_at(p, sigma, r); });

    py::class_<RadialGrid>(m, "RadialGrid")
        .def(py::init(&build_grid), py::arg("r_max"), py::arg("n"))
        .def_readonly("r_max", &RadialGrid::r_max)
        .def_readonly("n", &RadialGrid::n)
        .def_readonly("h", &RadialGrid::h);

    py::class_<RadialSpinor>(m, "RadialSpinor")
        .def_readonly("u1", &RadialSpinor::u1)
        .def_readonly("u2", &RadialSpinor::u2)
        .def_readonly("channel", &RadialSpinor::channel)
        .def("norm2", &RadialSpinor::norm2);

    py::class_<CriticalData>(m, "CriticalData")
        .def_readonly("Phi", &CriticalData::Phi)
        .def_readonly("energy", &CriticalData::energy)
        .def_readonly("lambda_c", &CriticalData::lambda_c)
        .def_readonly("identity_residual", &CriticalData::identity_residual)
        .def_readonly("C0", &CriticalData::C0);

    py::class_<ResonanceConstants>(m, "ResonanceConstants")
        .def(py::init<>())
        .def_readwrite("C", &ResonanceConstants::C)
        .def_readwrite("C0", &ResonanceConstants::C0)
        .def_readwrite("absC2", &ResonanceConstants::absC2)
        .def_readwrite("absC3", &ResonanceConstants::absC3)
        .def_readonly("fit_residual", &ResonanceConstants::fit_residual)
        .def_readonly("kpeak_slope", &ResonanceConstants::kpeak_slope)
        .def_readonly("kpeak_r2", &ResonanceConstants::kpeak_r2)
        .def_readonly("width_ratio", &ResonanceConstants::width_ratio)
        .def_readonly("width_spread", &ResonanceConstants::width_spread);

    py::class_<ScalingFit>(m, "ScalingFit")
        .def_readonly("slope", &ScalingFit::slope)
        .def_readonly("intercept", &ScalingFit::intercept)
        .def_readonly("stderr_slope", &ScalingFit::stderr_slope)
        .def_readonly("r_squared", &ScalingFit::r_squared);

    m.def(
        "critical_coupling",
        [](const PotentialModel& model, const RadialGrid& g) { return find_critical_coupling(model, g).lambda_c; },
        py::arg("model"), py::arg("grid"), "Coupling where the diving state reaches the continuum edge.");
    m.def("critical_data", &critical_data, py::arg("model"), py::arg("grid"), py::arg("branch") = -1);
    m.def(
        "gap_eigenvalues",
        [](const PotentialModel& model, const RadialGrid& g, double sigma, double a, double b) {
            return gap_eigenvalues(assemble_operator(g, model, sigma), a, b);
        },
        py::arg("model"), py::arg("grid"), py::arg("sigma") = 0.0, py::arg("a") = -1.0, py::arg("b") = 1.0);
    m.def(
        "bound_state_energy",
        [](const PotentialModel& model, const RadialGrid& g, double sigma) { return bound_state_at(model, g, sigma).energy; },
        py::arg("model"), py::arg("grid"), py::arg("sigma") = 0.0);
    m.def("analytic_well_energy", &analytic::well_energy, py::arg("depth"), py::arg("radius"), py::arg("kappa"),
          py::arg("e_lo"), py::arg("e_hi"));
    m.def("analytic_threshold_coupling", &analytic::well_threshold_coupling, py::arg("radius"), py::arg("kappa"),
          py::arg("lam_lo"), py::arg("lam_hi"));

    m.def(
        "phase_shift",
        [](const PotentialModel& model, const RadialGrid& g, double sigma, double k) {
            return continuum_wave(model, g, sigma, k).phase_shift;
        },
        py::arg("model"), py::arg("grid"), py::arg("sigma"), py::arg("k"));
    m.def("default_k_window", &default_k_window, py::arg("sigma"), py::arg("points") = 200);
    m.def(
        "scan_resonance",
        [](const PotentialModel& model, const RadialGrid& g, double sigma, const CriticalData& crit,
           std::optional<std::vector<double>> k_grid) {
            return profile_dict(scan_resonance(model, g, sigma, k_grid ? *k_grid : default_k_window(sigma), crit));
        },
        py::arg("model"), py::arg("grid"), py::arg("sigma"), py::arg("crit"), py::arg("k_grid") = py::none());
    m.def(
        "fit_constants",
        [](const PotentialModel& model, const RadialGrid& g, const CriticalData& crit, const std::vector<double>& sigmas,
           double max_residual) {
            std::vector<ResonanceProfile> ps;
            for (double s : sigmas) ps.push_back(scan_resonance(model, g, s, default_k_window(s), crit));
            FitOptions o;
            o.pinned_value = crit.C0;
            o.max_residual = max_residual;
            return fit_constants(ps, o);
        },
        py::arg("model"), py::arg("grid"), py::arg("crit"), py::arg("sigmas"), py::arg("max_residual") = 0.25,
        "Scan each sigma and fit the resonance line shape with C0 pinned to the derivative value.");
    m.def("resonance_shape", &resonance_shape, py::arg("C"), py::arg("C0"), py::arg("absC2"), py::arg("absC3"),
          py::arg("sigma"), py::arg("k"));

    m.def(
        "static_decay",
        [](const PotentialModel& model, const RadialGrid& g, double sigma, double eps, const CriticalData& crit) {
            auto d = static_decay_check(model, g, sigma, eps, crit);
            py::dict r;
            r["s_d_measured"] = d.s_d_measured;
            r["s_d_formula"] = d.s_d_formula;
            r["k_peak"] = d.k_peak;
            r["delta_width"] = d.delta_width;
            r["norm_drift"] = d.norm_drift;
            return r;
        },
        py::arg("model"), py::arg("grid"), py::arg("sigma"), py::arg("epsilon"), py::arg("crit"));
    m.def(
        "short_time_probability",
        [](const PotentialModel& model, const RadialGrid& g, double a, double S, double eps, const CriticalData& crit) {
            auto r = short_time_probability(model, g, {a, S, eps}, crit);
            return py::make_tuple(r.p_measured, r.p_estimate);
        },
        py::arg("model"), py::arg("grid"), py::arg("a"), py::arg("S"), py::arg("epsilon"), py::arg("crit"),
        "(measured, estimated) probability of leaving Phi.");
    m.def("fixed_point_sd", &fixed_point_sd, py::arg("constants"), py::arg("epsilon"));
    m.def("loglog_fit", &loglog_fit, py::arg("x"), py::arg("y"));
    m.def(
        "config_hash", [](const std::string& text) { return config_hash(nlohmann::json::parse(text)); },
        py::arg("json_text"));
    m.def(
        "check_config", [](const std::string& path) { load_config(path); }, py::arg("path"),
        "Raise spclab.Error if the configuration file is invalid.");
}
