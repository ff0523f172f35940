#include "ballidx/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ballidx {

Dataset::Dataset(std::size_t dimension, std::vector<double> row_major)
    : dimension_(dimension), coords_(std::move(row_major)) {
    if (dimension_ == 0) throw data_error("dataset dimension must be at least 1");
    if (coords_.size() % dimension_ != 0)
        throw data_error("coordinate buffer size is not a multiple of the dimension");
}

Dataset Dataset::from_rows(const std::vector<Point>& rows) {
    if (rows.empty()) throw data_error("dataset has no rows");
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim)
            throw data_error("row " + std::to_string(i) + " has dimension " + std::to_string(rows[i].size()) +
                             ", expected " + std::to_string(dim));
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return Dataset(dim, std::move(flat));
}

std::vector<ObjectId> Dataset::all_ids() const {
    std::vector<ObjectId> ids(size());
    std::iota(ids.begin(), ids.end(), ObjectId{0});
    return ids;
}

DistanceFn DistanceFn::custom(std::string name, Callable fn) {
    DistanceFn d(MetricKind::Custom, std::move(name));
    d.custom_ = std::make_shared<const Callable>(std::move(fn));
    return d;
}

DistanceFn DistanceFn::from_name(std::string_view name) {
    if (name == "euclidean") return euclidean();
    if (name == "manhattan") return manhattan();
    if (name == "chebyshev") return chebyshev();
    throw config_error("unknown metric '" + std::string(name) + "' (expected euclidean, manhattan or chebyshev)");
}

double DistanceFn::operator()(std::span<const double> a, std::span<const double> b, CostCounters& counters) const {
    if (a.size() != b.size())
        throw data_error("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    ++counters.distance_count;
    const std::size_t n = a.size();
    switch (kind_) {
    case MetricKind::Euclidean: {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = a[i] - b[i];
            acc += t * t;
        }
        return std::sqrt(acc);
    }
    case MetricKind::Manhattan: {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
        return acc;
    }
    case MetricKind::Chebyshev: {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
        return acc;
    }
    case MetricKind::Custom:
        return (*custom_)(a, b);
    }
    throw internal_error("unhandled metric kind");
}

Point centroid(std::span<const Point> points) {
    if (points.empty()) throw domain_error("centroid of an empty object sequence");
    const std::size_t dim = points.front().size();
    Point mean(dim, 0.0);
    for (const auto& p : points) {
        if (p.size() != dim) throw data_error("centroid over objects of mixed dimension");
        for (std::size_t i = 0; i < dim; ++i) mean[i] += p[i];
    }
    for (auto& v : mean) v /= static_cast<double>(points.size());
    return mean;
}

Point centroid(const Dataset& ds, std::span<const ObjectId> ids) {
    if (ids.empty()) throw domain_error("centroid of an empty object sequence");
    const std::size_t dim = ds.dimension();
    Point mean(dim, 0.0);
    for (ObjectId id : ids) {
        auto c = ds.coords(id);
        for (std::size_t i = 0; i < dim; ++i) mean[i] += c[i];
    }
    for (auto& v : mean) v /= static_cast<double>(ids.size());
    return mean;
}

} // namespace ballidx
