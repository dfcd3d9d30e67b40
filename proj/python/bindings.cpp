#include "ucplab/carleman.hpp"
#include "ucplab/error.hpp"
#include "ucplab/extension.hpp"
#include "ucplab/fields.hpp"
#include "ucplab/geometry.hpp"
#include "ucplab/harness.hpp"
#include "ucplab/observability.hpp"
#include "ucplab/shannon.hpp"
#include "ucplab/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <span>

namespace py = pybind11;
using namespace ucplab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const double> v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ScalarField to_field(const Grid& grid, const Array& values) {
    if (values.ndim() != 1) throw DimensionError("field values must be a 1-D array in flat node order");
    return ScalarField(grid, std::vector<double>(values.data(), values.data() + values.size()));
}

Point to_point(const std::vector<double>& x) {
    if (x.size() > static_cast<std::size_t>(kMaxDim)) throw DimensionError("points have at most 3 components");
    Point p{0.0, 0.0, 0.0};
    std::copy(x.begin(), x.end(), p.begin());
    return p;
}

Boundary bc_arg(const std::string& name) { return boundary_from_string(name); }

EnergyWindow window_arg(double E, std::optional<double> a) {
    return a ? EnergyWindow::interval(*a, E) : EnergyWindow::below(E);
}

}  // namespace

PYBIND11_MODULE(_ucplab, m) {
    m.doc() = "Discrete unique-continuation and observability laboratory";

    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<CoverageError>(m, "CoverageError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    py::class_<Domain>(m, "Domain")
        .def(py::init([](int dim, double L, const std::string& bc) { return Domain(dim, L, bc_arg(bc)); }),
             py::arg("dim"), py::arg("L"), py::arg("bc") = "dirichlet")
        .def_property_readonly("dim", &Domain::dim)
        .def_property_readonly("L", &Domain::length)
        .def_property_readonly("bc", [](const Domain& d) { return std::string(to_string(d.boundary())); });

    py::class_<Grid>(m, "Grid")
        .def(py::init<Domain, int>(), py::arg("domain"), py::arg("n"))
        .def_property_readonly("n", &Grid::points_per_axis)
        .def_property_readonly("h", &Grid::spacing)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("domain", &Grid::domain)
        .def("nodes", [](const Grid& g) {
            py::array_t<double> out({static_cast<py::ssize_t>(g.size()), static_cast<py::ssize_t>(g.dim())});
            auto r = out.mutable_unchecked<2>();
            for (std::size_t k = 0; k < g.size(); ++k) {
                const Point x = g.node(k);
                for (int a = 0; a < g.dim(); ++a) r(static_cast<py::ssize_t>(k), a) = x[a];
            }
            return out;
        });

    py::class_<DiscreteOperator>(m, "Operator")
        .def_property_readonly("grid", &DiscreteOperator::grid)
        .def_property_readonly("norm_estimate", &DiscreteOperator::norm_estimate)
        .def("apply", [](const DiscreteOperator& op, const Array& u) {
            return to_array(op.apply(to_field(op.grid(), u)).values());
        });

    m.def(
        "schrodinger",
        [](const Domain& d, int n, std::optional<Array> v) {
            const Grid g(d, n);
            return build_schrodinger(d, n, v ? to_field(g, *v) : ScalarField::zeros(g));
        },
        py::arg("domain"), py::arg("n"), py::arg("potential") = py::none(),
        "-Laplacian + V with V given as a flat array of node values (zero when omitted).");
    m.def(
        "random_potential",
        [](const Grid& g, double K, std::uint64_t seed) { return to_array(random_potential(g, K, seed).values()); },
        py::arg("grid"), py::arg("K"), py::arg("seed"));

    py::class_<SpectralBasis>(m, "SpectralBasis")
        .def_property_readonly("energies", [](const SpectralBasis& b) { return to_array(b.energies()); })
        .def_property_readonly("modes", [](const SpectralBasis& b) { return Eigen::MatrixXd(b.modes()); })
        .def("__len__", &SpectralBasis::size);

    m.def(
        "spectrum",
        [](const DiscreteOperator& op, double E, std::optional<double> a) {
            return spectrum_below(op, window_arg(E, a));
        },
        py::arg("op"), py::arg("E"), py::arg("a") = py::none(),
        "Eigenpairs with energy <= E (or in [a, E]); modes are L2-normalised with cell weight h^d.");
    m.def(
        "project",
        [](const SpectralBasis& b, const Array& psi) { return to_array(project(b, to_field(b.grid(), psi)).values()); },
        py::arg("basis"), py::arg("psi"));

    py::class_<BallArrangement>(m, "Arrangement")
        .def_property_readonly("delta", &BallArrangement::delta)
        .def_property_readonly("centers", [](const BallArrangement& a) {
            std::vector<std::vector<double>> out;
            for (const auto& c : a.centers()) out.emplace_back(c.begin(), c.begin() + a.domain().dim());
            return out;
        })
        .def("__len__", &BallArrangement::size);

    m.def(
        "arrangement",
        [](const Domain& d, double delta, const std::string& mode, std::uint64_t seed, double amplitude,
           std::optional<std::vector<std::vector<double>>> centers) {
            if (mode == "periodic") return make_arrangement(d, delta, arrangement::Periodic{});
            if (mode == "jitter") return make_arrangement(d, delta, arrangement::Jitter{seed, amplitude});
            if (mode == "explicit") {
                if (!centers) throw InvalidArgument("explicit arrangement needs centers");
                std::vector<Point> pts;
                for (const auto& c : *centers) pts.push_back(to_point(c));
                return make_arrangement(d, delta, arrangement::Explicit{pts});
            }
            throw InvalidArgument("mode must be periodic, jitter or explicit");
        },
        py::arg("domain"), py::arg("delta"), py::arg("mode") = "periodic", py::arg("seed") = 0,
        py::arg("amplitude") = 0.0, py::arg("centers") = py::none());
    m.def(
        "indicator",
        [](const BallArrangement& a, const Grid& g, int subsamples) {
            return to_array(indicator(a, g, subsamples).weights());
        },
        py::arg("arrangement"), py::arg("grid"), py::arg("subsamples") = 8);
    m.def(
        "ratio",
        [](const Grid& g, const Array& psi, const BallArrangement& a) { return ratio(to_field(g, psi), a); },
        py::arg("grid"), py::arg("psi"), py::arg("arrangement"));
    m.def(
        "uncertainty_constant",
        [](const SpectralBasis& b, const BallArrangement& a) { return uncertainty_constant(b, a); },
        py::arg("basis"), py::arg("arrangement"));
    m.def(
        "sfuc_bound",
        [](double delta, double K, double E, double N) { return sfuc_bound(delta, {K, E, N, 1.0}); },
        py::arg("delta"), py::arg("K") = 0.0, py::arg("E") = 0.0, py::arg("N") = 1.0);
    m.def(
        "klein_gamma",
        [](double delta, double K, double E, double M_d) {
            const auto k = klein_gamma(delta, {K, E, 1.0, M_d});
            return py::make_tuple(k.gamma, k.bound);
        },
        py::arg("delta"), py::arg("K") = 0.0, py::arg("E") = 0.0, py::arg("M_d") = 1.0);

    m.def(
        "carleman_psi", [](double mu, double s) { return CarlemanWeight::identity(1, mu).psi(s); }, py::arg("mu"),
        py::arg("s"));
    m.def(
        "weight_violations",
        [](int dim, double mu, double theta1, const std::vector<std::vector<double>>& points) {
            std::vector<Point> pts;
            for (const auto& p : points) pts.push_back(to_point(p));
            return check_weight_bounds(CarlemanWeight::identity(dim, mu), theta1, pts).violations;
        },
        py::arg("dim"), py::arg("mu"), py::arg("theta1"), py::arg("points"));

    m.def("s_case", &s_case, py::arg("E"), py::arg("y"));
    m.def(
        "extension_residual",
        [](const SpectralBasis& b, const Array& psi, const Array& potential, double Y, int ny) {
            const auto ext = build_extension(b, to_field(b.grid(), psi), Y, ny);
            const auto r = residual(ext, to_field(b.grid(), potential));
            return py::make_tuple(r.l2_residual, r.boundary_error);
        },
        py::arg("basis"), py::arg("psi"), py::arg("potential"), py::arg("Y") = 1.0, py::arg("ny") = 0);

    m.def("sinc", &sinc, py::arg("t"));
    m.def(
        "reconstruct",
        [](const RealFunction& f, double K, int J, const std::vector<double>& xs) {
            const auto p = make_sampling_problem(f, K, J);
            return to_array(reconstruct(p, xs));
        },
        py::arg("f"), py::arg("K"), py::arg("J"), py::arg("xs"), "Truncated Shannon series S_K f at xs.");
    m.def(
        "verify_aliasing",
        [](const RealFunction& f, const RealFunction& fhat_abs, double K, const std::vector<double>& xs, int J0) {
            const auto r = verify_aliasing(f, fhat_abs, K, xs, J0);
            py::dict out;
            out["verdict"] = to_string(r.verdict);
            out["sup_error"] = r.sup_error;
            out["bound"] = r.bound;
            out["truncation_allowance"] = r.truncation_allowance;
            out["J_used"] = r.J_used;
            out["notice"] = r.notice;
            return out;
        },
        py::arg("f"), py::arg("fhat_abs"), py::arg("K"), py::arg("xs"), py::arg("J0") = 200);

    m.def("experiment_names", &experiment_names);
    m.def(
        "run_experiment",
        [](const std::string& name, const std::map<std::string, std::string>& params) {
            ExperimentConfig c;
            c.experiment = name;
            c.params = params;
            py::gil_scoped_release release;
            return run_to_string(c);
        },
        py::arg("name"), py::arg("params") = std::map<std::string, std::string>{},
        "Runs a harness experiment and returns its CSV text.");
}
