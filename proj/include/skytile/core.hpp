#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace skytile {

// Coordinates are signed 64-bit fixed point in half-units of the input grid.
// All input coordinates are doubled on ingestion, so the midpoint of any two
// data points is exactly representable and every comparison is exact.
using Coord = std::int64_t;
using PointId = std::int32_t;

// Domain bound: the query space is [-kDefaultInf, kDefaultInf] per dimension.
inline constexpr Coord kDefaultInf = Coord{1} << 40;

struct Point {
    PointId id = -1;
    std::vector<Coord> coords;

    Point() = default;
    Point(PointId pid, std::vector<Coord> c) : id(pid), coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    Coord operator[](int i) const { return coords[static_cast<size_t>(i)]; }
};

struct Query {
    std::vector<Coord> coords;

    Query() = default;
    explicit Query(std::vector<Coord> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    Coord operator[](int i) const { return coords[static_cast<size_t>(i)]; }
};

// A closed/open interval over Coord. lo > hi denotes the empty interval.
struct Interval {
    Coord lo = 0;
    Coord hi = 0;
    bool lo_closed = true;
    bool hi_closed = true;

    bool empty() const {
        if (lo > hi) return true;
        if (lo == hi) return !(lo_closed && hi_closed);
        return false;
    }
    bool contains(Coord x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return true;
    }
    static Interval full(Coord inf) { return Interval{-inf, inf, true, true}; }
    static Interval none() { return Interval{1, 0, false, false}; }
};

// Axis-parallel box as a product of per-dimension intervals.
struct AxisBox {
    std::vector<Interval> dims;

    AxisBox() = default;
    explicit AxisBox(std::vector<Interval> d) : dims(std::move(d)) {}

    int dim() const { return static_cast<int>(dims.size()); }
    bool empty() const {
        for (const auto& iv : dims)
            if (iv.empty()) return true;
        return dims.empty();
    }
    bool contains(std::span<const Coord> q) const {
        for (size_t i = 0; i < dims.size(); ++i)
            if (!dims[i].contains(q[i])) return false;
        return true;
    }
    bool contains(const Query& q) const {
        return contains(std::span<const Coord>(q.coords));
    }
    static AxisBox full(int d, Coord inf) {
        return AxisBox(std::vector<Interval>(static_cast<size_t>(d), Interval::full(inf)));
    }
};

struct Dataset {
    std::string name;
    int dim = 0;
    std::vector<Point> points;

    size_t size() const { return points.size(); }
    const Point& operator[](PointId id) const { return points[static_cast<size_t>(id)]; }
};

// Builds a dataset from raw grid coordinates, doubling them into half-units.
Dataset make_dataset(std::string name, int dim,
                     const std::vector<std::vector<Coord>>& raw,
                     Coord inf = kDefaultInf);

// p dominates p2 with respect to q: at least as close in every dimension and
// strictly closer in one.
bool dominates(const Point& p, const Point& p2, const Query& q);

// Exact midpoint in half-units. Throws if the sum is odd (cannot happen for
// ingested data, whose coordinates are all even) or outside the domain.
Point midpoint(const Point& p, const Point& p2, Coord inf = kDefaultInf);

// The set Z of queries q at which p2 is at least as close as p in every
// dimension: per dimension [m,inf] if p2[i]>p[i], [-inf,m] if p2[i]<p[i],
// full range otherwise.
AxisBox dom_box(const Point& p, const Point& p2, Coord inf = kDefaultInf);

inline Coord abs_dist(Coord a, Coord b) { return a < b ? b - a : a - b; }

void require_same_dim(int a, int b);

}  // namespace skytile
