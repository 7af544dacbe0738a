#include "homctl/control.hpp"
#include "homctl/error.hpp"
#include "homctl/hnorm.hpp"
#include "homctl/homogenize.hpp"
#include "homctl/io.hpp"
#include "homctl/reproduce.hpp"
#include "homctl/scenarios.hpp"
#include "homctl/sim.hpp"
#include "homctl/synthesis.hpp"
#include "homctl/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace homctl;

namespace {

Matrix stack_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return Matrix(0, 0);
    Matrix out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    return out;
}

RhoSpec rho_from_py(const py::object& o) {
    if (py::isinstance<py::str>(o) && o.cast<std::string>() == "auto") return AutoRho{};
    return o.cast<double>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Homogeneous controller synthesis and simulation for switched linear systems";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ModeError>(m, "ModeError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<Mode>(m, "Mode")
        .def(py::init([](Matrix a, Matrix b, std::optional<Matrix> e) {
                 Mode md{std::move(a), std::move(b), Matrix()};
                 md.E = e ? *e : md.B;
                 return md;
             }),
             py::arg("A"), py::arg("B"), py::arg("E") = py::none())
        .def_readonly("A", &Mode::A)
        .def_readonly("B", &Mode::B)
        .def_readonly("E", &Mode::E);

    py::class_<SwitchedPlant>(m, "SwitchedPlant")
        .def(py::init<std::vector<Mode>>(), py::arg("modes"))
        .def_property_readonly("n", &SwitchedPlant::n)
        .def_property_readonly("m", &SwitchedPlant::m)
        .def_property_readonly("p", &SwitchedPlant::p)
        .def_property_readonly("mode_count", &SwitchedPlant::mode_count)
        .def_property_readonly("modes", &SwitchedPlant::modes);
    m.def("load_plant", &load_plant, py::arg("path"));
    m.def("save_plant", &save_plant, py::arg("plant"), py::arg("path"));

    py::class_<DisturbanceSpec>(m, "Disturbance")
        .def_static("none", &DisturbanceSpec::none)
        .def_static(
            "matched_sin",
            [](double amplitude, double frequency, double phase, std::size_t channel) {
                return DisturbanceSpec::matched_sinusoid({amplitude, frequency, phase, Waveform::kSin}, channel);
            },
            py::arg("amplitude"), py::arg("frequency"), py::arg("phase") = 0.0, py::arg("channel") = 0)
        .def("__call__", [](const DisturbanceSpec& d, double t, Eigen::Index p) {
            return eval_disturbance(d, t, Vector::Zero(1), p);
        }, py::arg("t"), py::arg("p"));
    m.def("load_disturbance", &load_disturbance, py::arg("path"));
    m.def("disturbance_bound", &disturbance_bound, py::arg("disturbance"));

    py::class_<DegreeWindow>(m, "DegreeWindow")
        .def_readonly("lower", &DegreeWindow::lower)
        .def_readonly("upper", &DegreeWindow::upper);
    py::class_<HomogenizationResiduals>(m, "HomogenizationResiduals")
        .def_readonly("sylvester", &HomogenizationResiduals::sylvester)
        .def_readonly("input_kernel", &HomogenizationResiduals::input_kernel)
        .def_readonly("degree", &HomogenizationResiduals::degree)
        .def_readonly("input_dilation", &HomogenizationResiduals::input_dilation)
        .def_readonly("relative_lsq", &HomogenizationResiduals::relative_lsq);
    py::class_<HomogenizationResult>(m, "HomogenizationResult")
        .def_readonly("G0", &HomogenizationResult::G0)
        .def_readonly("Y0", &HomogenizationResult::Y0)
        .def_readonly("mu", &HomogenizationResult::mu)
        .def_readonly("Gd", &HomogenizationResult::Gd)
        .def_readonly("K0", &HomogenizationResult::K0)
        .def_readonly("A0", &HomogenizationResult::A0)
        .def_readonly("residuals", &HomogenizationResult::residuals)
        .def_readonly("admissible", &HomogenizationResult::admissible);
    m.def("solve_homogenization", [](const SwitchedPlant& p, double mu) { return solve_homogenization(p, mu); },
          py::arg("plant"), py::arg("mu"));

    py::class_<ModeGains>(m, "ModeGains")
        .def_readonly("X", &ModeGains::X)
        .def_readonly("P", &ModeGains::P)
        .def_readonly("Y", &ModeGains::Y)
        .def_readonly("K", &ModeGains::K)
        .def_readonly("K0", &ModeGains::K0)
        .def_readonly("rho", &ModeGains::rho)
        .def_readonly("k_tilde", &ModeGains::k_tilde);
    py::class_<Controller>(m, "Controller")
        .def_property_readonly("kind", [](const Controller& c) { return std::string(to_string(c.kind)); })
        .def_readonly("mu", &Controller::mu)
        .def_readonly("Gd", &Controller::Gd)
        .def_readonly("modes", &Controller::modes)
        .def_readonly("gamma", &Controller::gamma)
        .def_readonly("c1", &Controller::c1)
        .def_readonly("c2", &Controller::c2)
        .def_property_readonly("rho_min", &Controller::rho_min);
    m.def("load_controller", &load_controller, py::arg("path"));
    m.def("save_controller", &save_controller, py::arg("controller"), py::arg("path"));
    m.def(
        "synthesize_common",
        [](const SwitchedPlant& p, const HomogenizationResult& h, const py::object& rho) {
            return synthesize_common(p, h, rho_from_py(rho));
        },
        py::arg("plant"), py::arg("homogenization"), py::arg("rho"));
    m.def(
        "synthesize_multiple",
        [](const SwitchedPlant& p, const HomogenizationResult& h, const py::list& rho) {
            std::vector<RhoSpec> r;
            for (const auto& o : rho) r.push_back(rho_from_py(py::reinterpret_borrow<py::object>(o)));
            return synthesize_multiple(p, h, r);
        },
        py::arg("plant"), py::arg("homogenization"), py::arg("rho"));

    m.def(
        "canonical_norm",
        [](const Vector& x, const Controller& c, std::size_t mode) { return canonical_norm(x, c.context(mode)); },
        py::arg("x"), py::arg("controller"), py::arg("mode") = 0);
    m.def(
        "projector", [](const Vector& x, const Controller& c, std::size_t mode) { return projector(x, c.context(mode)); },
        py::arg("x"), py::arg("controller"), py::arg("mode") = 0);
    m.def(
        "hnorm_gradient",
        [](const Vector& x, const Controller& c, std::size_t mode) {
            return Vector(hnorm_gradient(x, c.context(mode)).transpose());
        },
        py::arg("x"), py::arg("controller"), py::arg("mode") = 0);
    m.def("control_input", &control_input, py::arg("x"), py::arg("mode"), py::arg("controller"));

    py::class_<SwitchingPolicy>(m, "SwitchingPolicy")
        .def_static("constant", &SwitchingPolicy::constant, py::arg("mode"))
        .def_static("periodic", &SwitchingPolicy::periodic, py::arg("period"),
                    py::arg("cycle") = std::vector<std::size_t>{0, 1})
        .def_static("min_dwell", &SwitchingPolicy::min_dwell, py::arg("tau"), py::arg("jitter") = 0.0,
                    py::arg("seed") = 0, py::arg("cycle") = std::vector<std::size_t>{0, 1})
        .def_static("state_dependent", &SwitchingPolicy::state_dependent, py::arg("proposal_gap"),
                    py::arg("cycle") = std::vector<std::size_t>{0, 1})
        .def("mode_at", [](const SwitchingPolicy& p, double t) { return mode_at(p, t); }, py::arg("t"));
    m.def("load_policy", &load_policy, py::arg("path"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times", [](const Trajectory& t) {
            return Eigen::Map<const Vector>(t.times.data(), static_cast<Eigen::Index>(t.times.size())).eval();
        })
        .def_property_readonly("states", [](const Trajectory& t) { return stack_rows(t.states); })
        .def_property_readonly("inputs", [](const Trajectory& t) { return stack_rows(t.inputs); })
        .def_readonly("modes", &Trajectory::modes)
        .def_property_readonly("vnorm", [](const Trajectory& t) {
            return Eigen::Map<const Vector>(t.vnorm.data(), static_cast<Eigen::Index>(t.vnorm.size())).eval();
        })
        .def_property_readonly("switch_times", [](const Trajectory& t) {
            std::vector<double> out;
            for (const auto& e : t.switches) out.push_back(e.time);
            return out;
        })
        .def("__len__", &Trajectory::size);
    m.def(
        "integrate",
        [](const SwitchedPlant& p, const Controller& c, const SwitchingPolicy& pol, const Vector& x0, double tf,
           double h, std::optional<DisturbanceSpec> d) {
            return integrate(p, c, pol, x0, tf, h, d ? *d : DisturbanceSpec::none());
        },
        py::arg("plant"), py::arg("controller"), py::arg("policy"), py::arg("x0"), py::arg("t_final"),
        py::arg("h") = 1e-3, py::arg("disturbance") = py::none());
    m.def("settling_time", &settling_time, py::arg("trajectory"), py::arg("threshold"));

    m.def(
        "verify",
        [](const SwitchedPlant& p, const Controller& c, const std::string& suites, std::uint64_t seed) {
            std::vector<Suite> s;
            std::size_t start = 0;
            while (start <= suites.size()) {
                const auto comma = suites.find(',', start);
                const auto name = suites.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                if (!name.empty()) {
                    const auto more = suites_from_string(name);
                    s.insert(s.end(), more.begin(), more.end());
                }
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            return py::module_::import("json").attr("loads")(report_to_json(run_suite(p, c, s, seed)).dump());
        },
        py::arg("plant"), py::arg("controller"), py::arg("suites") = "homog,lmi,norm,decay", py::arg("seed") = 0);

    m.def(
        "reproduce",
        [](const std::string& scenario, const std::filesystem::path& outdir, std::uint64_t seed) {
            const auto r = reproduce_scenario(scenario, outdir, seed);
            return py::module_::import("json").attr("loads")(r.summary.dump());
        },
        py::arg("scenario"), py::arg("outdir"), py::arg("seed") = 0);

    auto sc = m.def_submodule("scenarios", "Bundled demo plants and signals");
    sc.def("ft_plant", &scenarios::ft_plant);
    sc.def("nfxt_plant", &scenarios::nfxt_plant);
    sc.def("ft_plant_variant", &scenarios::ft_plant_variant);
    sc.def("nfxt_plant_variant", &scenarios::nfxt_plant_variant);
    sc.def("chain2", &scenarios::chain2);
    sc.def("ft_x0", &scenarios::ft_x0);
    sc.def("nfxt_x0", &scenarios::nfxt_x0);
    sc.def("ft_disturbance", &scenarios::ft_disturbance);
    sc.def("demo_switching", &scenarios::demo_switching);
    sc.def("ft_reference_controller", &scenarios::ft_reference_controller);
}
