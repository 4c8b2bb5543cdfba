#include "skytile/core.hpp"

#include <stdexcept>

namespace skytile {

void require_same_dim(int a, int b) {
    if (a != b) throw std::invalid_argument("dimensionality mismatch");
}

Dataset make_dataset(std::string name, int dim,
                     const std::vector<std::vector<Coord>>& raw, Coord inf) {
    Dataset ds;
    ds.name = std::move(name);
    ds.dim = dim;
    ds.points.reserve(raw.size());
    PointId next = 0;
    for (const auto& row : raw) {
        if (static_cast<int>(row.size()) != dim)
            throw std::invalid_argument("point dimensionality mismatch");
        std::vector<Coord> half(row.size());
        for (size_t i = 0; i < row.size(); ++i) {
            if (row[i] > inf / 2 || row[i] < -inf / 2)
                throw std::domain_error("coordinate outside domain bound");
            half[i] = row[i] * 2;
        }
        ds.points.emplace_back(next++, std::move(half));
    }
    if (ds.points.empty()) throw std::invalid_argument("empty dataset");
    return ds;
}

bool dominates(const Point& p, const Point& p2, const Query& q) {
    require_same_dim(p.dim(), p2.dim());
    require_same_dim(p.dim(), q.dim());
    bool strict = false;
    for (int i = 0; i < p.dim(); ++i) {
        const Coord dp = abs_dist(p[i], q[i]);
        const Coord dp2 = abs_dist(p2[i], q[i]);
        if (dp > dp2) return false;
        if (dp < dp2) strict = true;
    }
    return strict;
}

Point midpoint(const Point& p, const Point& p2, Coord inf) {
    require_same_dim(p.dim(), p2.dim());
    std::vector<Coord> m(p.coords.size());
    for (int i = 0; i < p.dim(); ++i) {
        const Coord s = p[i] + p2[i];
        if (s % 2 != 0)
            throw std::domain_error("midpoint not representable in half-units");
        m[static_cast<size_t>(i)] = s / 2;
        if (m[static_cast<size_t>(i)] > inf || m[static_cast<size_t>(i)] < -inf)
            throw std::domain_error("midpoint outside domain bound");
    }
    return Point{-1, std::move(m)};
}

AxisBox dom_box(const Point& p, const Point& p2, Coord inf) {
    require_same_dim(p.dim(), p2.dim());
    const Point m = midpoint(p, p2, inf);
    AxisBox box;
    box.dims.resize(p.coords.size());
    for (int i = 0; i < p.dim(); ++i) {
        auto& iv = box.dims[static_cast<size_t>(i)];
        if (p2[i] > p[i]) {
            iv = Interval{m[i], inf, true, true};
        } else if (p2[i] < p[i]) {
            iv = Interval{-inf, m[i], true, true};
        } else {
            iv = Interval::full(inf);
        }
    }
    return box;
}

}  // namespace skytile
