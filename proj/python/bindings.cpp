#include "qwork/analytic.hpp"
#include "qwork/cli.hpp"
#include "qwork/core.hpp"
#include "qwork/numeric.hpp"
#include "qwork/oracle.hpp"
#include "qwork/thermo.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qwork;

namespace {

py::dict to_dict(const WorkDistribution& d) {
    py::dict out;
    out["work"] = py::array_t<double>(d.work.size(), d.work.data());
    out["density"] = py::array_t<double>(d.density.size(), d.density.data());
    out["time"] = d.time;
    out["engine"] = d.engine;
    out["integral"] = d.integral();
    out["warnings"] = d.warnings;
    return out;
}

py::dict to_dict(const thermo::WorkHeatLedger& l) {
    py::dict out;
    out["convention"] = thermo::to_string(l.convention);
    out["w_free"] = l.w_free;
    out["w_tilde"] = l.w_tilde;
    out["w_dist"] = l.w_dist;
    out["du"] = l.du;
    out["du_tilde"] = l.du_tilde;
    out["q"] = l.q;
    out["q_tilde"] = l.q_tilde;
    out["dW_int"] = l.dw_int;
    out["dW_povm"] = l.dw_povm;
    out["dQ_int"] = l.dq_int;
    return out;
}

cli::Json to_json(const py::object& o) {
    return cli::Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::object from_json(const cli::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

numeric::SolverOptions solver(double rtol, double atol) {
    numeric::SolverOptions o;
    o.rtol = rtol;
    o.atol = atol;
    return o;
}

}  // namespace

PYBIND11_MODULE(_qwork, m) {
    m.doc() = "Measured quantum work statistics";
    m.attr("__version__") = cli::version();

    py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<cli::config_error>(m, "ConfigError", PyExc_ValueError);

    py::class_<ProtocolSchedule>(m, "ProtocolSchedule")
        .def(py::init([](double t_p, double t_i, double t_f, double t_m, double delta) {
                 ProtocolSchedule s{t_p, t_i, t_f, t_m, delta};
                 s.validate();
                 return s;
             }),
             py::arg("t_p") = 0.0, py::arg("t_i") = 2.0, py::arg("t_f") = 3.0, py::arg("t_m") = 4.0,
             py::arg("delta") = 0.2)
        .def_readonly("t_p", &ProtocolSchedule::t_p)
        .def_readonly("t_i", &ProtocolSchedule::t_i)
        .def_readonly("t_f", &ProtocolSchedule::t_f)
        .def_readonly("t_m", &ProtocolSchedule::t_m)
        .def_readonly("delta", &ProtocolSchedule::delta)
        .def("__repr__", [](const ProtocolSchedule& s) {
            return "ProtocolSchedule(t_p=" + std::to_string(s.t_p) + ", t_i=" + std::to_string(s.t_i) +
                   ", t_f=" + std::to_string(s.t_f) + ", t_m=" + std::to_string(s.t_m) +
                   ", delta=" + std::to_string(s.delta) + ")";
        });

    py::class_<ApparatusSpec>(m, "ApparatusSpec")
        .def(py::init([](double mass, double sigma_p, double lambda) {
                 ApparatusSpec a{mass, sigma_p, lambda};
                 a.validate();
                 return a;
             }),
             py::arg("mass") = 1000.0, py::arg("sigma_p") = 1.0, py::arg("lam") = 1.0)
        .def_readonly("mass", &ApparatusSpec::mass)
        .def_readonly("sigma_p", &ApparatusSpec::sigma_p)
        .def_readonly("lam", &ApparatusSpec::lambda);

    py::class_<DrivenQubit>(m, "DrivenQubit")
        .def(py::init([](double kappa, double omega, double theta) {
                 DrivenQubit q{kappa, omega, theta};
                 q.validate();
                 return q;
             }),
             py::arg("kappa") = 1.0, py::arg("omega") = 1.0, py::arg("theta") = 0.0)
        .def_readonly("kappa", &DrivenQubit::kappa)
        .def_readonly("omega", &DrivenQubit::omega)
        .def_readonly("theta", &DrivenQubit::theta)
        .def("hamiltonian", [](const DrivenQubit& q, double t) { return Eigen::MatrixXcd(qubit_hamiltonian(q, t)); });

    py::class_<SpectralSystem>(m, "SpectralSystem")
        .def_static("polynomial", &SpectralSystem::polynomial, py::arg("coefficients"),
                    "E_n(t) = sum_k coefficients[n][k] t^k")
        .def_property_readonly("dimension", &SpectralSystem::dimension)
        .def("energy", &SpectralSystem::energy, py::arg("n"), py::arg("t"));

    m.def("sigma_width", &sigma_width, py::arg("apparatus"), py::arg("t"), py::arg("t_p") = 0.0);

    auto an = m.def_submodule("analytic", "Closed forms for self-commuting Hamiltonians");
    an.def("work_centers", &analytic::work_centers, py::arg("system"), py::arg("schedule"));
    an.def(
        "work_distribution",
        [](const SpectralSystem& sys, const std::vector<double>& pops, const ProtocolSchedule& s,
           const ApparatusSpec& a, double t, const std::vector<double>& grid) {
            return to_dict(analytic::work_distribution(sys, pops, s, a, t, grid));
        },
        py::arg("system"), py::arg("populations"), py::arg("schedule"), py::arg("apparatus"), py::arg("t"),
        py::arg("work_grid"));
    an.def(
        "thermal_work_distribution",
        [](const SpectralSystem& sys, double beta, const ProtocolSchedule& s, const ApparatusSpec& a, double t,
           const std::vector<double>& grid) {
            return to_dict(analytic::thermal_work_distribution(sys, {beta}, s, a, t, grid));
        },
        py::arg("system"), py::arg("beta"), py::arg("schedule"), py::arg("apparatus"), py::arg("t"),
        py::arg("work_grid"));
    an.def(
        "partition_function",
        [](const SpectralSystem& sys, double beta, double t) { return analytic::partition_function(sys, {beta}, t); },
        py::arg("system"), py::arg("beta"), py::arg("t"));
    an.def(
        "free_energy_change",
        [](const SpectralSystem& sys, double beta, const ProtocolSchedule& s) {
            return analytic::free_energy_change(sys, {beta}, s);
        },
        py::arg("system"), py::arg("beta"), py::arg("schedule"));
    an.def(
        "modified_jarzynski",
        [](const SpectralSystem& sys, double beta, const ProtocolSchedule& s, const ApparatusSpec& a) {
            return analytic::modified_jarzynski(sys, {beta}, s, a);
        },
        py::arg("system"), py::arg("beta"), py::arg("schedule"), py::arg("apparatus"));
    an.def(
        "crooks_ratio",
        [](const SpectralSystem& sys, double beta, const ProtocolSchedule& s, double t, const ApparatusSpec& a,
           double w) { return analytic::crooks_ratio(sys, {beta}, {s, t}, a, w); },
        py::arg("system"), py::arg("beta"), py::arg("schedule"), py::arg("t"), py::arg("apparatus"), py::arg("w"));
    an.def(
        "second_law_bound",
        [](const SpectralSystem& sys, double beta, const ProtocolSchedule& s, const ApparatusSpec& a) {
            const auto b = analytic::second_law_bound(sys, {beta}, s, a);
            py::dict out;
            out["lhs"] = b.lhs;
            out["rhs"] = b.rhs;
            out["correction"] = b.correction;
            out["holds"] = b.holds();
            return out;
        },
        py::arg("system"), py::arg("beta"), py::arg("schedule"), py::arg("apparatus"));
    an.def("delta_w_povm", &analytic::delta_w_povm, py::arg("system"), py::arg("populations"), py::arg("schedule"));

    auto nu = m.def_submodule("numeric", "Momentum-grid integration of the driven qubit");
    nu.def("qubit_work_grid", &numeric::qubit_work_grid, py::arg("qubit"), py::arg("schedule"), py::arg("apparatus"),
           py::arg("n") = 4096);
    nu.def(
        "run_qubit",
        [](const DrivenQubit& q, const Eigen::MatrixXcd& rho, const ProtocolSchedule& s, const ApparatusSpec& a,
           std::size_t momentum_points, const std::vector<double>& work_grid, double rtol, double atol) {
            const auto grid = numeric::default_grid(a, momentum_points);
            const auto wg = work_grid.empty() ? numeric::qubit_work_grid(q, s, a) : work_grid;
            numeric::QubitRun run;
            {
                py::gil_scoped_release release;
                run = numeric::run_qubit(q, SystemState::mixed(rho), s, a, grid, wg, solver(rtol, atol));
            }
            py::dict out = to_dict(run.distribution);
            out["norm_drift"] = run.trajectory.norm_drift;
            out["max_point_drift"] = run.trajectory.max_point_drift;
            out["rho_tilde"] = Eigen::MatrixXcd(run.trajectory.rho.back());
            py::dict ledgers;
            for (auto c : {thermo::Convention::split, thermo::Convention::window, thermo::Convention::protocol})
                ledgers[py::str(thermo::to_string(c))] = to_dict(thermo::qubit_ledger(q, rho, s, run, c));
            out["ledger"] = ledgers;
            return out;
        },
        py::arg("qubit"), py::arg("rho"), py::arg("schedule"), py::arg("apparatus"), py::arg("momentum_points") = 4096,
        py::arg("work_grid") = std::vector<double>{}, py::arg("rtol") = 1e-10, py::arg("atol") = 1e-12,
        "Density matrix rho at t_i; returns the distribution at t_m, norm drift and work/heat ledgers.");

    auto orc = m.def_submodule("oracle", "Independent references");
    orc.def(
        "two_point_distribution",
        [](const DrivenQubit& q, const Eigen::Matrix2cd& rho, const ProtocolSchedule& s) {
            std::vector<std::pair<double, double>> atoms;
            for (const auto& a : oracle::two_point_distribution(q, rho, s).atoms) atoms.emplace_back(a.work, a.weight);
            return atoms;
        },
        py::arg("qubit"), py::arg("rho"), py::arg("schedule"), "[(W, probability)] for the ideal two-point scheme");
    orc.def(
        "povm_completeness",
        [](const DrivenQubit& q, const ProtocolSchedule& s, const ApparatusSpec& a, std::size_t momentum_points,
           std::size_t work_points) {
            py::gil_scoped_release release;
            const auto e = oracle::povm_effects_qubit(q, s, a, numeric::default_grid(a, momentum_points),
                                                      numeric::qubit_work_grid(q, s, a, work_points));
            return Eigen::MatrixXcd(e.completeness());
        },
        py::arg("qubit"), py::arg("schedule"), py::arg("apparatus"), py::arg("momentum_points") = 1024,
        py::arg("work_points") = 2049);

    auto th = m.def_submodule("thermo", "Work and heat ledgers");
    th.def(
        "spectral_ledger",
        [](const SpectralSystem& sys, const Eigen::MatrixXcd& rho, const ProtocolSchedule& s, const ApparatusSpec& a,
           const std::string& convention) {
            return to_dict(thermo::spectral_ledger(sys, rho, s, a, thermo::convention_from_string(convention)));
        },
        py::arg("system"), py::arg("rho"), py::arg("schedule"), py::arg("apparatus"), py::arg("convention") = "split");

    m.def("default_config", [] { return from_json(cli::default_config()); });
    m.def(
        "run",
        [](const std::string& command, const py::object& overrides) {
            cli::Json cfg = cli::default_config();
            if (!overrides.is_none()) cli::merge_config(cfg, to_json(overrides));
            cli::validate_config(command, cfg);
            cli::RunResult r;
            {
                py::gil_scoped_release release;
                r = cli::run(command, cfg);
            }
            py::dict out;
            out["files"] = r.files;
            out["summary"] = from_json(r.summary);
            out["passed"] = r.passed;
            return out;
        },
        py::arg("command"), py::arg("config") = py::none(),
        "Runs a qwork command; `config` is a nested dict merged over the defaults.");
}
