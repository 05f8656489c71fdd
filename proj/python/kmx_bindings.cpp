// Python bindings for the main kinetic-toolkit operations.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kmx/collision.hpp"
#include "kmx/diagnostics.hpp"
#include "kmx/grid.hpp"
#include "kmx/linearized.hpp"
#include "kmx/norms.hpp"
#include "kmx/solver.hpp"

namespace py = pybind11;
using namespace kmx;

namespace {

GridFunction function_from_array(std::shared_ptr<const VelocityGrid> grid,
                                 const py::array_t<double>& values) {
    auto buf = values.request();
    if (static_cast<std::size_t>(buf.size) != grid->size())
        throw ContractError("value array size does not match the grid");
    const double* p = static_cast<const double*>(buf.ptr);
    return GridFunction(std::move(grid), std::vector<double>(p, p + buf.size));
}

py::array_t<double> to_array(const GridFunction& g) {
    py::array_t<double> out(static_cast<py::ssize_t>(g.size()));
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

Vec3 to_vec3(const py::sequence& s) {
    if (py::len(s) != 3) throw ContractError("expected a 3-vector");
    return Vec3{s[0].cast<double>(), s[1].cast<double>(), s[2].cast<double>()};
}

}  // namespace

PYBIND11_MODULE(_kmx, m) {
    m.doc() = "Near-equilibrium Boltzmann toolkit: grids, collision quadratures, "
              "weighted norms, diagnostics.";

    py::class_<VelocityGrid, std::shared_ptr<VelocityGrid>>(m, "VelocityGrid")
        .def(py::init([](double extent, int nodes) {
                 return std::make_shared<VelocityGrid>(extent, nodes);
             }),
             py::arg("extent"), py::arg("nodes_per_axis"))
        .def_property_readonly("extent", &VelocityGrid::extent)
        .def_property_readonly("nodes_per_axis", &VelocityGrid::nodes_per_axis)
        .def_property_readonly("spacing", &VelocityGrid::spacing)
        .def("__len__", &VelocityGrid::size)
        .def("node", [](const VelocityGrid& g, std::size_t i) { return g.node(i); })
        .def("weights", [](const VelocityGrid& g) {
            py::array_t<double> out(static_cast<py::ssize_t>(g.size()));
            std::copy(g.weights().begin(), g.weights().end(), out.mutable_data());
            return out;
        });

    py::class_<SphereQuadrature, std::shared_ptr<SphereQuadrature>>(m, "SphereQuadrature")
        .def(py::init([](int n_polar, int n_azimuth) {
                 return std::make_shared<SphereQuadrature>(n_polar, n_azimuth);
             }),
             py::arg("n_polar"), py::arg("n_azimuth"))
        .def("__len__", &SphereQuadrature::size)
        .def("node", [](const SphereQuadrature& s, std::size_t k) { return s.node(k); })
        .def("weight", &SphereQuadrature::weight);

    py::class_<CollisionParams>(m, "CollisionParams")
        .def(py::init([](double gamma, double cb) {
                 CollisionParams p{gamma, cb};
                 p.validate();
                 return p;
             }),
             py::arg("gamma") = 1.0, py::arg("cb") = 1.0)
        .def_readonly("gamma", &CollisionParams::gamma)
        .def_readonly("cb", &CollisionParams::cb);

    m.def("post_collision",
          [](const py::sequence& v, const py::sequence& u, const py::sequence& omega) {
              return post_collision(to_vec3(v), to_vec3(u), to_vec3(omega));
          });
    m.def("kinetic_kernel",
          [](const py::sequence& v, const py::sequence& u, const py::sequence& omega,
             const CollisionParams& p) {
              return kinetic_kernel(to_vec3(v), to_vec3(u), to_vec3(omega), p);
          });

    m.def("maxwellian",
          [](std::shared_ptr<VelocityGrid> g) { return to_array(maxwellian(g)); });
    m.def("sqrt_maxwellian",
          [](std::shared_ptr<VelocityGrid> g) { return to_array(sqrt_maxwellian(g)); });

    m.def(
        "interpolate",
        [](std::shared_ptr<VelocityGrid> g, const py::array_t<double>& values,
           const py::sequence& p) {
            return interpolate(function_from_array(std::move(g), values), to_vec3(p));
        },
        py::arg("grid"), py::arg("values"), py::arg("point"));
    m.def(
        "integrate_v",
        [](std::shared_ptr<VelocityGrid> g, const py::array_t<double>& values) {
            return integrate_v(function_from_array(std::move(g), values));
        },
        py::arg("grid"), py::arg("values"));

    m.def(
        "q_full",
        [](std::shared_ptr<VelocityGrid> g, const py::array_t<double>& F,
           const py::array_t<double>& G, const CollisionParams& p, const SphereQuadrature& sq,
           int threads) {
            GridFunction gf = function_from_array(g, F);
            GridFunction gg = function_from_array(g, G);
            return to_array(q_full(gf, gg, p, sq, EvalOptions{threads, false}));
        },
        py::arg("grid"), py::arg("F"), py::arg("G"), py::arg("params"), py::arg("sphere"),
        py::arg("threads") = 1);
    m.def(
        "gamma_gain",
        [](std::shared_ptr<VelocityGrid> g, const py::array_t<double>& a,
           const py::array_t<double>& b, const CollisionParams& p, const SphereQuadrature& sq,
           int threads) {
            GridFunction ga = function_from_array(g, a);
            GridFunction gb = function_from_array(g, b);
            return to_array(gamma_gain(ga, gb, p, sq, EvalOptions{threads, false}));
        },
        py::arg("grid"), py::arg("g"), py::arg("h"), py::arg("params"), py::arg("sphere"),
        py::arg("threads") = 1);
    m.def(
        "gamma_loss",
        [](std::shared_ptr<VelocityGrid> g, const py::array_t<double>& a,
           const py::array_t<double>& b, const CollisionParams& p, const SphereQuadrature& sq) {
            GridFunction ga = function_from_array(g, a);
            GridFunction gb = function_from_array(g, b);
            return to_array(gamma_loss(ga, gb, p, sq));
        });
    m.def(
        "collision_frequency",
        [](std::shared_ptr<VelocityGrid> g, const CollisionParams& p) {
            SphereQuadrature sq(2, 4);
            return to_array(*compute_nu(g, p, sq));
        },
        py::arg("grid"), py::arg("params"));
    m.def(
        "apply_K",
        [](std::shared_ptr<VelocityGrid> g, const py::array_t<double>& f,
           const CollisionParams& p, const SphereQuadrature& sq) {
            return to_array(apply_K(function_from_array(g, f), p, sq));
        });

    m.def("conjugate_exponent", &conjugate_exponent);
    m.def(
        "mixed_norm",
        [](std::shared_ptr<VelocityGrid> g, const py::array_t<double>& values, double r,
           double l) {
            return mixed_norm(function_from_array(std::move(g), values),
                              NormSpec{r, l, NormOrder::lr_v_linf_tx});
        },
        py::arg("grid"), py::arg("values"), py::arg("r"), py::arg("l") = 0.0);
    m.def("validate_parameters", [](double r, double l, double gamma) {
        const ParameterReport rep = validate_parameters(r, l, gamma);
        py::dict d;
        d["r_conjugate"] = rep.r_conjugate;
        d["local_threshold"] = rep.local_threshold;
        d["local_ok"] = rep.local_ok;
        d["global_threshold"] = rep.global_threshold;
        d["global_ok"] = rep.global_ok;
        d["low_r_boundary"] = rep.low_r_boundary;
        d["smallness_required"] = rep.smallness_required;
        return d;
    });

    m.attr("INF") = kInfExponent;
}
