#include "ftecdi/calibrate.hpp"
#include "ftecdi/errors.hpp"
#include "ftecdi/protocol.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ftecdi;

namespace {

py::array_t<double> to_array(const std::vector<double>& v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict micro_dict(const MicroporeState& s)
{
    py::dict d;
    d["sigma_ionic"] = s.sigma_ionic;
    d["c_mi_ions"] = s.c_mi_ions;
    d["dphi_d"] = s.dphi_d;
    d["dphi_s"] = s.dphi_s;
    d["mu_att"] = s.mu_att;
    return d;
}

py::dict point_dict(const EquilibriumPoint& p)
{
    py::dict d;
    d["v_ch"] = p.v_ch;
    d["c_feed"] = p.c_feed;
    d["sigma"] = p.sigma;
    d["charge"] = p.charge;
    d["salt_mol"] = p.salt_mol;
    d["eq_sac"] = p.eq_sac;
    d["charge_efficiency"] = p.charge_efficiency;
    return d;
}

template <class T>
auto edl_field(double EDLParams::*field)
{
    return py::cpp_function([field](const T& p) { return p.edl.*field; });
}

template <class T>
auto edl_setter(double EDLParams::*field)
{
    return py::cpp_function([field](T& p, double v) { p.edl.*field = v; });
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Flow-through electrode CDI cell model (SI units unless noted)";

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const SolverError& e) {
            py::set_error(solver_error, e.what());
        } catch (const IoError& e) {
            py::set_error(PyExc_OSError, e.what());
        }
    });

    py::class_<CellParams>(m, "CellParams")
        .def(py::init<>())
        .def_readwrite("electrode_thickness", &CellParams::electrode_thickness)
        .def_readwrite("spacer_thickness", &CellParams::spacer_thickness)
        .def_readwrite("area", &CellParams::area)
        .def_readwrite("spacer_porosity", &CellParams::spacer_porosity)
        .def_readwrite("skeleton_density", &CellParams::skeleton_density)
        .def_readwrite("velocity", &CellParams::velocity)
        .def_property("micropore_volume", edl_field<CellParams>(&EDLParams::micropore_volume),
                      edl_setter<CellParams>(&EDLParams::micropore_volume))
        .def_property("attraction_energy", edl_field<CellParams>(&EDLParams::attraction_energy),
                      edl_setter<CellParams>(&EDLParams::attraction_energy))
        .def_property("stern_capacitance", edl_field<CellParams>(&EDLParams::stern_capacitance),
                      edl_setter<CellParams>(&EDLParams::stern_capacitance))
        .def_property("electrode_density", edl_field<CellParams>(&EDLParams::electrode_density),
                      edl_setter<CellParams>(&EDLParams::electrode_density))
        .def_property(
            "temperature", [](const CellParams& p) { return p.constants.temperature; },
            [](CellParams& p, double v) { p.constants.temperature = v; })
        .def_property(
            "d_infty", [](const CellParams& p) { return p.constants.d_infty; },
            [](CellParams& p, double v) { p.constants.d_infty = v; })
        .def("flow_rate", &CellParams::flow_rate)
        .def("electrode_mass", &CellParams::electrode_mass)
        .def("macropore_porosity", &CellParams::macropore_porosity)
        .def("violations", &CellParams::violations);

    py::class_<CycleSpec>(m, "CycleSpec")
        .def(py::init<>())
        .def_readwrite("v_ch", &CycleSpec::v_ch)
        .def_readwrite("v_dis", &CycleSpec::v_dis)
        .def_readwrite("c_feed", &CycleSpec::c_feed)
        .def_readwrite("current_tol", &CycleSpec::current_tol)
        .def_readwrite("conc_tol_rel", &CycleSpec::conc_tol_rel)
        .def_readwrite("max_time", &CycleSpec::max_time)
        .def_property(
            "t_mix", [](const CycleSpec& s) { return s.downstream.t_mix; },
            [](CycleSpec& s, double v) { s.downstream.t_mix = v; })
        .def_property(
            "t_plug", [](const CycleSpec& s) { return s.downstream.t_plug; },
            [](CycleSpec& s, double v) { s.downstream.t_plug = v; });

    py::class_<ElectrodeFit>(m, "ElectrodeFit")
        .def(py::init<>())
        .def(py::init([](double v_mi, double e, double cs) { return ElectrodeFit{v_mi, e, cs}; }),
             py::arg("micropore_volume"), py::arg("attraction_energy"), py::arg("stern_capacitance"))
        .def_readwrite("micropore_volume", &ElectrodeFit::micropore_volume)
        .def_readwrite("attraction_energy", &ElectrodeFit::attraction_energy)
        .def_readwrite("stern_capacitance", &ElectrodeFit::stern_capacitance);

    m.def("peclet", &peclet, py::arg("params"));

    m.def(
        "zero_charge_state", [](double c, const CellParams& p) { return micro_dict(edl::zero_charge_state(c, p.edl)); },
        py::arg("c_mA"), py::arg("params") = CellParams{});
    m.def(
        "state_from_charge",
        [](double c, double sigma, const CellParams& p) {
            return micro_dict(edl::state_from_charge(c, sigma, p.edl, p.constants));
        },
        py::arg("c_mA"), py::arg("sigma"), py::arg("params") = CellParams{});
    m.def(
        "state_from_potential",
        [](double c, double dphi, const CellParams& p) {
            return micro_dict(edl::state_from_potential(c, dphi, p.edl, p.constants));
        },
        py::arg("c_mA"), py::arg("dphi_total"), py::arg("params") = CellParams{});

    m.def(
        "equilibrium", [](const CellParams& p, double v, double c) { return point_dict(solve_equilibrium(p, v, c)); },
        py::arg("params"), py::arg("v_ch"), py::arg("c_feed"));

    m.def(
        "sweep",
        [](const CellParams& p, const std::vector<double>& voltages, double c) {
            std::vector<SweepPoint> points;
            {
                py::gil_scoped_release release;
                points = equilibrium_sweep(p, voltages, c);
            }
            py::list out;
            for (const auto& sp : points) {
                auto d = point_dict(sp.point);
                d["ok"] = sp.ok;
                d["error"] = sp.error;
                out.append(d);
            }
            return out;
        },
        py::arg("params"), py::arg("voltages"), py::arg("c_feed"));

    m.def(
        "simulate",
        [](const CellParams& p, const CycleSpec& spec, std::size_t n_electrode, std::size_t n_spacer) {
            SimulationOptions opt;
            opt.n_electrode = n_electrode;
            opt.n_spacer = n_spacer;
            CycleResult r;
            {
                py::gil_scoped_release release;
                r = run_cv_cycle(p, spec, opt);
            }
            py::dict d;
            d["t"] = to_array(r.times);
            d["current"] = to_array(r.current);
            d["c_outlet"] = to_array(r.c_outlet);
            d["c_sensed"] = to_array(r.c_sensed);
            d["discharge_start"] = r.discharge_start;
            d["charge_in"] = r.charge_in;
            d["charge_stored"] = r.charge_out;
            d["salt_removed"] = r.salt_removed;
            d["salt_released"] = r.salt_released;
            d["eq_sac"] = r.eq_sac;
            d["charge_efficiency"] = r.charge_efficiency;
            d["complete"] = r.complete();
            d["message"] = r.message;
            return d;
        },
        py::arg("params"), py::arg("spec") = CycleSpec{}, py::arg("n_electrode") = 40, py::arg("n_spacer") = 10);

    m.def(
        "fit_equilibrium",
        [](const CellParams& base, const std::vector<std::vector<double>>& rows, const ElectrodeFit& initial) {
            EquilibriumDataset data;
            for (const auto& r : rows) {
                if (r.size() != 4 && r.size() != 5) {
                    throw ConfigError("each row needs (V_ch, c_feed, charge, eq_sac[, weight])");
                }
                data.rows.push_back({r[0], r[1], r[2], r[3], r.size() == 5 ? r[4] : 1.0});
            }
            FitResult fit;
            {
                py::gil_scoped_release release;
                fit = ftecdi::fit_equilibrium(base, data, initial);
            }
            py::dict d;
            d["params"] = fit.params;
            d["objective"] = fit.objective;
            d["residual_norm"] = fit.residual_norm;
            d["row_residuals"] = fit.row_residuals;
            d["converged"] = fit.converged;
            d["evaluations"] = fit.evaluations;
            return d;
        },
        py::arg("params"), py::arg("rows"), py::arg("initial") = ElectrodeFit{});
}
