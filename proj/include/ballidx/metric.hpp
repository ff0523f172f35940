#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ballidx/error.hpp"

namespace ballidx {

/// Dense object identifier, assigned in ingestion order starting at 0.
using ObjectId = std::uint32_t;

/// A raw coordinate vector. Pivots and group centers are stored as points
/// because centroids are synthetic and need not be dataset members.
using Point = std::vector<double>;

/// Non-owning view of one stored object.
struct ObjectView {
    ObjectId id;
    std::span<const double> coords;
};

/// Immutable set of fixed-dimension vectors, stored row-major.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::size_t dimension, std::vector<double> row_major);

    static Dataset from_rows(const std::vector<Point>& rows);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return dimension_ == 0 ? 0 : coords_.size() / dimension_; }
    bool empty() const noexcept { return size() == 0; }

    std::span<const double> coords(ObjectId id) const {
        return {coords_.data() + static_cast<std::size_t>(id) * dimension_, dimension_};
    }
    ObjectView object(ObjectId id) const { return {id, coords(id)}; }
    Point point(ObjectId id) const {
        auto c = coords(id);
        return {c.begin(), c.end()};
    }

    std::vector<ObjectId> all_ids() const;
    const std::vector<double>& raw() const noexcept { return coords_; }

private:
    std::size_t dimension_ = 0;
    std::vector<double> coords_;
};

/// Cost instrumentation. One instance per top-level operation (a build, a
/// query); concurrent work uses private instances merged with +=.
///
/// distance_count grows by one per metric evaluation. comparison_count grows
/// by one per order predicate between two distance-valued quantities
/// (distances, radii, query radii, bounds); use the helpers below so that
/// every such predicate is tallied.
struct CostCounters {
    std::uint64_t distance_count = 0;
    std::uint64_t comparison_count = 0;

    bool less(double a, double b) {
        ++comparison_count;
        return a < b;
    }
    bool less_equal(double a, double b) {
        ++comparison_count;
        return a <= b;
    }

    CostCounters& operator+=(const CostCounters& other) {
        distance_count += other.distance_count;
        comparison_count += other.comparison_count;
        return *this;
    }
    friend CostCounters operator+(CostCounters a, const CostCounters& b) { return a += b; }
    friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

enum class MetricKind { Euclidean, Manhattan, Chebyshev, Custom };

/// A metric d: S x S -> R+. Built-ins dispatch on an enum; custom metrics
/// wrap a callable (tests use this to tally calls independently).
class DistanceFn {
public:
    using Callable = std::function<double(std::span<const double>, std::span<const double>)>;

    DistanceFn() = default;

    static DistanceFn euclidean() { return DistanceFn(MetricKind::Euclidean, "euclidean"); }
    static DistanceFn manhattan() { return DistanceFn(MetricKind::Manhattan, "manhattan"); }
    static DistanceFn chebyshev() { return DistanceFn(MetricKind::Chebyshev, "chebyshev"); }
    static DistanceFn custom(std::string name, Callable fn);

    /// Resolves "euclidean", "manhattan" or "chebyshev"; throws a config error otherwise.
    static DistanceFn from_name(std::string_view name);

    MetricKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    /// Evaluates the metric and counts it. Throws a data error on dimension mismatch.
    double operator()(std::span<const double> a, std::span<const double> b, CostCounters& counters) const;

private:
    DistanceFn(MetricKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    MetricKind kind_ = MetricKind::Euclidean;
    std::string name_ = "euclidean";
    std::shared_ptr<const Callable> custom_;
};

inline double distance(const ObjectView& a, const ObjectView& b, const DistanceFn& fn, CostCounters& counters) {
    return fn(a.coords, b.coords, counters);
}

/// Component-wise mean of the given points. Throws on empty input or ragged dimensions.
Point centroid(std::span<const Point> points);

/// Component-wise mean of the dataset objects named by ids.
Point centroid(const Dataset& ds, std::span<const ObjectId> ids);

} // namespace ballidx
