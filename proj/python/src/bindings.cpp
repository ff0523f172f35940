#include <memory>
#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ballidx/bench.hpp"
#include "ballidx/forest_io.hpp"
#include "ballidx/geometry.hpp"
#include "ballidx/pipeline.hpp"
#include "ballidx/report.hpp"

namespace py = pybind11;
using namespace ballidx;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dataset to_dataset(const Array& a) {
    if (a.ndim() != 2) throw data_error("expected a 2-D array of shape (n, dim)");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto dim = static_cast<std::size_t>(a.shape(1));
    if (rows == 0 || dim == 0) throw data_error("empty array");
    return Dataset(dim, std::vector<double>(a.data(), a.data() + rows * dim));
}

py::array_t<double> to_array(const Dataset& ds) {
    py::array_t<double> out({ds.size(), ds.dimension()});
    std::copy(ds.raw().begin(), ds.raw().end(), out.mutable_data());
    return out;
}

// Built forest plus the report of how it was built (empty after load()).
struct PyForest {
    Forest forest;
    BuildReport report;
};

py::tuple knn(const PyForest& f, const Array& q, std::size_t k, bool parallel) {
    if (q.ndim() != 1) throw data_error("query must be a 1-D array");
    if (static_cast<std::size_t>(q.shape(0)) != f.forest.dataset().dimension())
        throw data_error("query has dimension " + std::to_string(q.shape(0)) + ", forest expects " +
                         std::to_string(f.forest.dataset().dimension()));
    QueryResult res;
    {
        py::gil_scoped_release release;
        res = forest_knn(f.forest, std::span<const double>(q.data(), f.forest.dataset().dimension()), k,
                         {.parallel = parallel});
    }
    py::array_t<std::int64_t> ids(res.hits.size());
    py::array_t<double> dists(res.hits.size());
    for (std::size_t i = 0; i < res.hits.size(); ++i) {
        ids.mutable_at(i) = res.hits[i].id;
        dists.mutable_at(i) = res.hits[i].distance;
    }
    py::dict cost;
    cost["distances"] = res.counters.distance_count;
    cost["comparisons"] = res.counters.comparison_count;
    cost["trees"] = res.searched_tree_ids;
    return py::make_tuple(ids, dists, cost);
}

py::dict rate_dict(const OverlapReport& r) {
    py::dict d;
    d["regime"] = std::string(to_string(r.regime));
    d["rate"] = r.rate;
    d["raw_rate"] = r.raw_rate;
    d["lens_volume"] = r.lens_volume;
    d["cap_heights"] = py::make_tuple(r.cap_height_1, r.cap_height_2);
    return d;
}

Ball make_ball(std::vector<double> center, double radius) { return {std::move(center), radius}; }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Overlap-managed metric index forest";

    static py::exception<Error> error(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            static const char* kinds[] = {"config", "data", "domain", "internal"};
            py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
            exc.attr("kind") = kinds[static_cast<int>(e.kind())];
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    py::class_<PyForest>(m, "Forest")
        .def_property_readonly("method", [](const PyForest& f) { return std::string(to_string(f.forest.method())); })
        .def_property_readonly("metric", [](const PyForest& f) { return f.forest.metric().name(); })
        .def_property_readonly("num_trees", [](const PyForest& f) { return f.forest.trees().size(); })
        .def_property_readonly("tree_sizes",
                               [](const PyForest& f) {
                                   std::vector<std::size_t> s;
                                   for (const auto& t : f.forest.trees()) s.push_back(t.size());
                                   return s;
                               })
        .def_property_readonly("neighbors", [](const PyForest& f) { return f.forest.adjacency(); })
        .def("knn", &knn, py::arg("query"), py::arg("k"), py::arg("parallel") = true,
             "ids, distances and a cost dict of the k nearest objects")
        .def("stats_json", [](const PyForest& f) { return build_stats(f.forest, f.report).dump(); })
        .def("save", [](const PyForest& f, const std::string& path) { save_forest(f.forest, path); })
        .def("dumps",
             [](const PyForest& f) {
                 std::ostringstream os;
                 save_forest(f.forest, os);
                 return os.str();
             })
        .def("data", [](const PyForest& f) { return to_array(f.forest.dataset()); });

    m.def(
        "build",
        [](const Array& data, const std::string& method, double epsilon, std::size_t min_pts, double xi_min,
           double xi_max, const std::string& metric, std::uint64_t seed) {
            BuildConfig cfg;
            cfg.method = parse_build_method(method);
            cfg.dbscan = {epsilon, min_pts};
            cfg.thresholds = {xi_min, xi_max};
            cfg.metric = metric;
            cfg.seed = seed;
            auto ds = std::make_shared<const Dataset>(to_dataset(data));
            py::gil_scoped_release release;
            BuildOutput out = build_forest(std::move(ds), cfg);
            return PyForest{std::move(out.forest), out.report};
        },
        py::arg("data"), py::arg("method") = "vbm", py::arg("epsilon") = 0.0, py::arg("min_pts") = 1,
        py::arg("xi_min") = 0.4, py::arg("xi_max") = 0.8, py::arg("metric") = "euclidean", py::arg("seed") = 42);

    m.def("load", [](const std::string& path) {
        Forest f = load_forest(path);
        BuildReport r;
        r.method = f.method();
        r.objects = f.dataset().size();
        r.dimension = f.dataset().dimension();
        return PyForest{std::move(f), r};
    });

    m.def(
        "generate_clusters",
        [](std::size_t clusters, std::size_t points, std::size_t dim, double spread, double separation,
           std::uint64_t seed) {
            GenConfig g{clusters, points, dim, spread, separation, seed};
            return to_array(generate_clusters(g));
        },
        py::arg("clusters") = 3, py::arg("points") = 10'000, py::arg("dim") = 5, py::arg("spread") = 1.0,
        py::arg("separation") = 20.0, py::arg("seed") = 42);

    m.def("vbm_rate", [](std::vector<double> c1, double r1, std::vector<double> c2, double r2, double dist) {
        return rate_dict(vbm_rate(make_ball(std::move(c1), r1), make_ball(std::move(c2), r2), dist));
    });
    m.def("dbm_rate", [](std::vector<double> c1, double r1, std::vector<double> c2, double r2, double dist) {
        return rate_dict(dbm_rate(make_ball(std::move(c1), r1), make_ball(std::move(c2), r2), dist));
    });
    m.def("ball_volume", [](std::size_t n, double r) { return ball_volume(n, r); });
    m.def("classify_regime",
          [](double r1, double r2, double d) { return std::string(to_string(classify_regime(r1, r2, d))); });
}
