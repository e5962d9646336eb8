// Python surface: grid construction, fixtures, both extension operators,
// norms, and the loop-degree diagnostic. Arrays cross the boundary as
// copies; grids stay opaque shared handles.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "mext/analysis.hpp"
#include "mext/errors.hpp"
#include "mext/extend_constrained.hpp"
#include "mext/extend_unconstrained.hpp"
#include "mext/fixtures.hpp"
#include "mext/manifold.hpp"
#include "mext/microcell.hpp"
#include "mext/norms.hpp"
#include "mext/perforation.hpp"

namespace py = pybind11;
using namespace mext;

namespace {

// GridPtr is shared_ptr-to-const; pybind holders want mutable T, so the
// handle wraps it instead.
struct Grid {
    GridPtr ptr;
    const PerforatedGrid& ref() const { return *ptr; }
};

std::array<double, 3> to_point(const std::vector<double>& v, int dim, const char* what) {
    if (static_cast<int>(v.size()) != dim)
        throw std::invalid_argument(std::string(what) + " expects one coordinate per dimension");
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) out[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)];
    return out;
}

Vec to_vec(const std::vector<double>& v) {
    if (v.empty() || v.size() > 4) throw std::invalid_argument("expected 1 to 4 components");
    Vec out(static_cast<int>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<int>(k)] = v[k];
    return out;
}

NormRegion to_region(const std::string& name) {
    if (name == "all") return NormRegion::All;
    if (name == "solid") return NormRegion::Solid;
    if (name == "hole") return NormRegion::Hole;
    throw std::invalid_argument("region must be 'all', 'solid' or 'hole'");
}

py::array_t<double> field_values(const VectorField& f) {
    auto n = static_cast<py::ssize_t>(f.grid->cellCount());
    auto l = static_cast<py::ssize_t>(f.components);
    py::array_t<double> out({n, l});
    std::memcpy(out.mutable_data(), f.values.data(),
                static_cast<std::size_t>(n * l) * sizeof(double));
    return out;
}

py::array_t<bool> field_defined(const VectorField& f) {
    auto n = static_cast<py::ssize_t>(f.grid->cellCount());
    py::array_t<bool> out(n);
    bool* dst = out.mutable_data();
    for (py::ssize_t i = 0; i < n; ++i) dst[i] = f.defined[static_cast<std::size_t>(i)] != 0;
    return out;
}

TranslationSearchConfig make_tcfg(int candidates, double guardEta, int mollifyRadius,
                                  std::uint64_t seed) {
    TranslationSearchConfig tcfg;
    tcfg.candidateCount = candidates;
    tcfg.guardEta = guardEta;
    tcfg.mollifyRadius = mollifyRadius;
    tcfg.seed = seed;
    return tcfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "periodically perforated grids and manifold-constrained extension operators";

    py::register_exception<ConfigError>(m, "ConfigErrorPy", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractErrorPy", PyExc_ValueError);

    m.attr("SOLID") = static_cast<int>(CellLabel::Solid);
    m.attr("HOLE") = static_cast<int>(CellLabel::Hole);
    m.attr("OUTSIDE") = static_cast<int>(CellLabel::Outside);

    py::class_<MicroCell>(m, "MicroCell")
        .def_readonly("dim", &MicroCell::dim)
        .def_readonly("q0", &MicroCell::q0)
        .def("__repr__", [](const MicroCell& c) {
            return "MicroCell(dim=" + std::to_string(c.dim) + ", q0=" + std::to_string(c.q0) + ")";
        });

    m.def(
        "disk_cell",
        [](int dim, const std::vector<double>& center, double radius) {
            return make_microcell_disk(dim, to_point(center, dim, "center"), radius);
        },
        py::arg("dim"), py::arg("center"), py::arg("radius"),
        "Unit periodicity cell with a disk hole.");
    m.def(
        "box_cell",
        [](int dim, const std::vector<double>& center, const std::vector<double>& halfWidths) {
            return make_microcell_box(dim, to_point(center, dim, "center"),
                                      to_point(halfWidths, dim, "half_widths"));
        },
        py::arg("dim"), py::arg("center"), py::arg("half_widths"),
        "Unit periodicity cell with an axis-aligned box hole.");

    py::class_<Grid>(m, "Grid")
        .def_property_readonly("dim", [](const Grid& g) { return g.ref().dim; })
        .def_property_readonly("epsilon", [](const Grid& g) { return g.ref().epsilon; })
        .def_property_readonly("spacing", [](const Grid& g) { return g.ref().spacing; })
        .def_property_readonly("cell_count", [](const Grid& g) { return g.ref().cellCount(); })
        .def_property_readonly("dims",
                               [](const Grid& g) {
                                   py::tuple t(g.ref().dim);
                                   for (int k = 0; k < g.ref().dim; ++k)
                                       t[k] = g.ref().dims[static_cast<std::size_t>(k)];
                                   return t;
                               })
        .def_property_readonly("solid_cells",
                               [](const Grid& g) { return g.ref().countLabel(CellLabel::Solid); })
        .def_property_readonly("hole_cells",
                               [](const Grid& g) { return g.ref().countLabel(CellLabel::Hole); })
        .def_property_readonly("outside_cells",
                               [](const Grid& g) { return g.ref().countLabel(CellLabel::Outside); })
        .def_property_readonly("hole_count", [](const Grid& g) { return g.ref().holes.size(); })
        .def("measure_ratio", [](const Grid& g) { return measure_ratio(g.ref()); })
        .def(
            "labels",
            [](const Grid& g) {
                auto n = static_cast<py::ssize_t>(g.ref().cellCount());
                py::array_t<std::uint8_t> out(n);
                std::memcpy(out.mutable_data(), g.ref().mask.data(), static_cast<std::size_t>(n));
                return out;
            },
            "Flat per-cell labels (SOLID/HOLE/OUTSIDE), row-major, last axis fastest.")
        .def("__repr__", [](const Grid& g) {
            return "Grid(dim=" + std::to_string(g.ref().dim) +
                   ", epsilon=" + std::to_string(g.ref().epsilon) +
                   ", cells=" + std::to_string(g.ref().cellCount()) + ")";
        });

    m.def(
        "build_grid",
        [](const MicroCell& cell, const std::vector<double>& lo, const std::vector<double>& hi,
           double epsilon, double lam, double mu, double spacing, const std::string& variant) {
            Variant v;
            if (variant == "safe") v = Variant::Safe;
            else if (variant == "general") v = Variant::General;
            else throw std::invalid_argument("variant must be 'safe' or 'general'");
            if (mu <= 0.0) mu = std::sqrt(static_cast<double>(cell.dim));
            if (spacing <= 0.0) spacing = epsilon / 8.0;
            return Grid{build_grid(cell, to_point(lo, cell.dim, "lo"), to_point(hi, cell.dim, "hi"),
                                   epsilon, lam, mu, spacing, v)};
        },
        py::arg("cell"), py::arg("lo"), py::arg("hi"), py::arg("epsilon"), py::arg("lam") = 1.0,
        py::arg("mu") = 0.0, py::arg("spacing") = 0.0, py::arg("variant") = "safe",
        "Label a uniform grid over the box [lo, hi] cut by the periodic perforation. "
        "mu <= 0 selects sqrt(dim); spacing <= 0 selects epsilon/8.");

    m.def("epsilon_threshold",
          [](const MicroCell& cell, const std::vector<double>& lo, const std::vector<double>& hi) {
              return epsilon_threshold(cell, to_point(lo, cell.dim, "lo"),
                                       to_point(hi, cell.dim, "hi"));
          });
    m.def("measure_ratio_bound",
          [](const MicroCell& cell) { return measure_ratio_bound(cell); });

    py::class_<ManifoldSpec>(m, "Manifold")
        .def_property_readonly("name", [](const ManifoldSpec& s) { return manifold_name(s); })
        .def_readonly("ambient_dim", &ManifoldSpec::ambientDim)
        .def_readonly("delta", &ManifoldSpec::delta)
        .def_readonly("sigma", &ManifoldSpec::sigma)
        .def_readonly("connectivity_order", &ManifoldSpec::connectivityOrder)
        .def("__repr__",
             [](const ManifoldSpec& s) { return "Manifold('" + manifold_name(s) + "')"; });
    m.def("manifold", &make_manifold_by_name, py::arg("name"),
          "Target by name: 'sphere 2', 'sphere 3' or 'flat-torus'.");

    py::class_<VectorField>(m, "Field")
        .def_readonly("components", &VectorField::components)
        .def_property_readonly("grid", [](const VectorField& f) { return Grid{f.grid}; })
        .def("values", &field_values,
             "Copy of the per-cell values, shape (cells, components); undefined cells are NaN.")
        .def("defined", &field_defined, "Copy of the per-cell defined flags.");

    m.def(
        "fixture_field",
        [](const Grid& g, const ManifoldSpec& spec, const std::string& id, std::uint64_t seed) {
            return make_fixture_field(g.ptr, spec, id, seed);
        },
        py::arg("grid"), py::arg("manifold"), py::arg("fixture") = "affine-0", py::arg("seed") = 42,
        "Deterministic solid-cell fixture: 'constant', 'affine-0'..'affine-4', "
        "'converging-K' or 'random'.");
    m.def(
        "constant_field",
        [](const Grid& g, const ManifoldSpec& spec, const std::vector<double>& q) {
            return constant_field(g.ptr, spec, to_vec(q));
        },
        py::arg("grid"), py::arg("manifold"), py::arg("q"));
    m.def(
        "random_field",
        [](const Grid& g, const ManifoldSpec& spec, std::uint64_t seed) {
            return random_unit_field(g.ptr, spec, seed);
        },
        py::arg("grid"), py::arg("manifold"), py::arg("seed") = 42);

    m.def(
        "lp_norm",
        [](const VectorField& f, double p, const std::string& region) {
            return lp_norm(f, p, to_region(region));
        },
        py::arg("field"), py::arg("p") = 2.0, py::arg("region") = "all");
    m.def(
        "w1p_seminorm",
        [](const VectorField& f, double p, const std::string& region) {
            return w1p_seminorm(f, p, to_region(region));
        },
        py::arg("field"), py::arg("p") = 2.0, py::arg("region") = "all");

    m.def(
        "extend_unconstrained",
        [](const VectorField& f, double p) {
            ExtensionDiagnostics diag;
            VectorField out = extend_unconstrained(f, p, &diag);
            return py::make_tuple(out,
                                  py::dict(py::arg("c_func") = diag.cFunc,
                                           py::arg("c_grad") = diag.cGrad,
                                           py::arg("lp_in") = diag.lpIn,
                                           py::arg("lp_out") = diag.lpOut,
                                           py::arg("grad_in") = diag.gradIn,
                                           py::arg("grad_out") = diag.gradOut,
                                           py::arg("convex_hull_violation") = diag.convexHullViolation,
                                           py::arg("unfilled_cells") = diag.unfilledCells));
        },
        py::arg("field"), py::arg("p") = 2.0,
        "Linear hole-filling extension; returns (field, diagnostics).");

    py::class_<ConstrainedResult>(m, "ConstrainedResult")
        .def_readonly("field", &ConstrainedResult::field)
        .def_readonly("pre_snap_mismatch", &ConstrainedResult::preSnapMismatch)
        .def_readonly("constraint_violation", &ConstrainedResult::constraintViolation)
        .def_readonly("warnings", &ConstrainedResult::warnings)
        .def_property_readonly("objective",
                               [](const ConstrainedResult& r) { return r.choice.objective; })
        .def_property_readonly("survivor_count",
                               [](const ConstrainedResult& r) { return r.choice.survivorCount; })
        .def_property_readonly(
            "survivor_mean_objective",
            [](const ConstrainedResult& r) { return r.choice.survivorMeanObjective; })
        .def_property_readonly("translation",
                               [](const ConstrainedResult& r) {
                                   py::tuple t(r.choice.h.n);
                                   for (int k = 0; k < r.choice.h.n; ++k) t[k] = r.choice.h[k];
                                   return t;
                               })
        .def_property_readonly("c_func",
                               [](const ConstrainedResult& r) { return r.diag.cFunc; })
        .def_property_readonly("c_grad",
                               [](const ConstrainedResult& r) { return r.diag.cGrad; })
        .def_property_readonly("unfilled_cells",
                               [](const ConstrainedResult& r) { return r.diag.unfilledCells; });

    m.def(
        "extend_constrained",
        [](const VectorField& f, const ManifoldSpec& spec, int candidates, double guardEta,
           int mollifyRadius, std::uint64_t seed, double p, bool diagnosticMode) {
            return extend_constrained(f, spec, make_tcfg(candidates, guardEta, mollifyRadius, seed),
                                      p, diagnosticMode);
        },
        py::arg("field"), py::arg("manifold"), py::arg("candidates") = 64,
        py::arg("guard_eta") = 0.0, py::arg("mollify_radius") = 2, py::arg("seed") = 42,
        py::arg("p") = 2.0, py::arg("diagnostic_mode") = false,
        "Manifold-constrained extension: values stay on the target, solid cells come back "
        "bit-exact.");
    m.def(
        "extend_constrained_retracted",
        [](const VectorField& f, const ManifoldSpec& spec, double margin, int candidates,
           double guardEta, int mollifyRadius, std::uint64_t seed, double p, bool diagnosticMode) {
            return extend_constrained_retracted(
                f, spec, make_tcfg(candidates, guardEta, mollifyRadius, seed), margin, p,
                diagnosticMode);
        },
        py::arg("field"), py::arg("manifold"), py::arg("margin"), py::arg("candidates") = 64,
        py::arg("guard_eta") = 0.0, py::arg("mollify_radius") = 2, py::arg("seed") = 42,
        py::arg("p") = 2.0, py::arg("diagnostic_mode") = false,
        "General-variant extension restricted to cells with boundary distance > margin.");

    m.def(
        "winding_number",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> loop) {
            if (loop.ndim() != 2 || loop.shape(1) != 2)
                throw std::invalid_argument("loop must have shape (n, 2)");
            std::vector<Vec> pts;
            pts.reserve(static_cast<std::size_t>(loop.shape(0)));
            for (py::ssize_t i = 0; i < loop.shape(0); ++i)
                pts.push_back(Vec{loop.at(i, 0), loop.at(i, 1)});
            return winding_number(pts);
        },
        py::arg("loop"), "Degree of a closed loop of nonzero plane vectors.");
}
