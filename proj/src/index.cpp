#include "skytile/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace skytile {

namespace {

// Chain for the boundary "first cell of the right subtree". The slab-end
// sentinel inf+1 keeps queries at exactly +inf inside the last slab.
std::vector<Coord> boundary_chain(const PlanCell& cell, int dim, Coord inf) {
    std::vector<Coord> chain;
    chain.reserve(static_cast<size_t>(2 * dim - 1));
    for (int t = 0; t + 1 < dim; ++t) {
        const Interval& iv = cell.box.dims[static_cast<size_t>(t)];
        chain.push_back(iv.lo);
        chain.push_back(iv.hi_closed ? inf + 1 : iv.hi);
    }
    chain.push_back(cell.box.dims[static_cast<size_t>(dim - 1)].lo);
    return chain;
}

bool descend_left(const std::vector<Coord>& chain, const Query& q, int dim) {
    for (int t = 0; t + 1 < dim; ++t) {
        if (q[t] < chain[static_cast<size_t>(2 * t)]) return true;
        if (q[t] >= chain[static_cast<size_t>(2 * t + 1)]) return false;
    }
    return q[dim - 1] < chain[static_cast<size_t>(2 * (dim - 1))];
}

int depth_needed(size_t count) {
    int d = 0;
    size_t c = 1;
    while (c < count) {
        c *= 2;
        ++d;
    }
    return d;
}

struct Builder {
    const PartitionPlan& plan;
    int dim;
    Coord inf;
    int target_depth;  // -1: natural build with <= 1 leaf depth spread
    std::vector<IndexNode> nodes;

    std::int32_t build(size_t lo, size_t hi, int depth) {
        const std::int32_t self = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        if (hi - lo == 1 && (target_depth < 0 || depth >= target_depth)) {
            nodes[static_cast<size_t>(self)].payload = static_cast<std::int32_t>(lo);
            return self;
        }
        size_t mid = lo + (hi - lo) / 2;
        if (hi - lo == 1) mid = hi;  // duplicate-content split to equalize depth
        const size_t chain_cell = mid == hi ? lo : mid;
        nodes[static_cast<size_t>(self)].chain =
            boundary_chain(plan.cells[chain_cell], dim, inf);
        const std::int32_t l = build(lo, mid == hi ? hi : mid, depth + 1);
        const std::int32_t r = build(mid == hi ? lo : mid, hi, depth + 1);
        nodes[static_cast<size_t>(self)].left = l;
        nodes[static_cast<size_t>(self)].right = r;
        return self;
    }
};

}  // namespace

SkyIndex::Path SkyIndex::locate(const Query& q) const {
    require_same_dim(dim, q.dim());
    Path p;
    std::int32_t at = 0;
    while (!nodes[static_cast<size_t>(at)].is_leaf()) {
        const IndexNode& n = nodes[static_cast<size_t>(at)];
        const bool left = descend_left(n.chain, q, dim);
        p.decisions.push_back(left ? 0 : 1);
        at = left ? n.left : n.right;
    }
    p.payload = nodes[static_cast<size_t>(at)].payload;
    return p;
}

int SkyIndex::height() const { return leaf_depth_range().second; }

std::pair<int, int> SkyIndex::leaf_depth_range() const {
    int mn = std::numeric_limits<int>::max(), mx = 0;
    // iterative DFS with depths
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [at, d] = stack.back();
        stack.pop_back();
        const IndexNode& n = nodes[static_cast<size_t>(at)];
        if (n.is_leaf()) {
            mn = std::min(mn, d);
            mx = std::max(mx, d);
        } else {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return {mn, mx};
}

SkyIndex build_index(const PartitionPlan& plan, const TileSet& ts, bool equalize_depth) {
    if (plan.cells.empty()) throw std::invalid_argument("build_index: empty plan");
    SkyIndex idx;
    idx.dim = ts.dim;
    idx.inf = ts.inf;
    idx.k = plan.k;

    Builder b{plan, ts.dim, ts.inf,
              equalize_depth ? depth_needed(plan.cells.size()) : -1,
              {}};
    b.nodes.reserve(plan.cells.size() * 2);
    b.build(0, plan.cells.size(), 0);
    idx.nodes = std::move(b.nodes);
    idx.leaf_contents.reserve(plan.cells.size());
    for (const PlanCell& c : plan.cells) idx.leaf_contents.push_back(c.content);

    idx.side_coords.assign(static_cast<size_t>(ts.dim), {});
    idx.side_regions.assign(static_cast<size_t>(ts.dim), {});
    idx.regions = ts.regions;
    for (size_t r = 0; r < idx.regions.size(); ++r)
        for (const SkylineHyperPlane& h : idx.regions[r].planes)
            idx.side_coords[static_cast<size_t>(h.dim)].push_back(h.coord);
    for (auto& v : idx.side_coords) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (int d = 0; d < ts.dim; ++d)
        idx.side_regions[static_cast<size_t>(d)].assign(
            idx.side_coords[static_cast<size_t>(d)].size(), {});
    for (size_t r = 0; r < idx.regions.size(); ++r) {
        for (const SkylineHyperPlane& h : idx.regions[r].planes) {
            const auto& v = idx.side_coords[static_cast<size_t>(h.dim)];
            const size_t pos =
                static_cast<size_t>(std::lower_bound(v.begin(), v.end(), h.coord) - v.begin());
            auto& lst = idx.side_regions[static_cast<size_t>(h.dim)][pos];
            if (lst.empty() || lst.back() != static_cast<std::int32_t>(r))
                lst.push_back(static_cast<std::int32_t>(r));
        }
        idx.regions[r].planes.clear();
        idx.regions[r].planes.shrink_to_fit();
    }
    return idx;
}

std::vector<PointId> lookup(const SkyIndex& idx, const Query& q) {
    const SkyIndex::Path p = idx.locate(q);
    std::vector<PointId> cand = idx.leaf_contents[static_cast<size_t>(p.payload)];

    std::vector<Coord> q2(q.coords.size());
    for (size_t i = 0; i < q2.size(); ++i) q2[i] = q.coords[i] * 2;
    for (int d = 0; d < idx.dim; ++d) {
        const auto& coords = idx.side_coords[static_cast<size_t>(d)];
        const auto it = std::lower_bound(coords.begin(), coords.end(), q[d]);
        if (it == coords.end() || *it != q[d]) continue;
        const size_t pos = static_cast<size_t>(it - coords.begin());
        for (std::int32_t r : idx.side_regions[static_cast<size_t>(d)][pos]) {
            const SkylineRegion& reg = idx.regions[static_cast<size_t>(r)];
            const bool member = reg.contains2(q2);
            const auto at = std::lower_bound(cand.begin(), cand.end(), reg.generator);
            const bool have = at != cand.end() && *at == reg.generator;
            if (member && !have)
                cand.insert(at, reg.generator);
            else if (!member && have)
                cand.erase(at);
        }
    }
    return cand;
}

std::vector<PointId> query_all(std::span<const SkyIndex> idxs, const Query& q) {
    std::vector<PointId> out;
    for (const SkyIndex& idx : idxs) {
        std::vector<PointId> part = lookup(idx, q);
        std::vector<PointId> merged;
        merged.reserve(out.size() + part.size());
        std::set_union(out.begin(), out.end(), part.begin(), part.end(),
                       std::back_inserter(merged));
        out = std::move(merged);
    }
    return out;
}

// --- serialization ---------------------------------------------------------

namespace {

struct Writer {
    std::vector<std::uint8_t> buf;
    template <typename T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const size_t at = buf.size();
        buf.resize(at + sizeof(T));
        std::memcpy(buf.data() + at, &v, sizeof(T));
    }
    void put_u32(std::uint32_t v) { put(v); }
    void put_i64(std::int64_t v) { put(v); }
};

struct Reader {
    std::span<const std::uint8_t> buf;
    size_t at = 0;
    template <typename T>
    T get() {
        static_assert(std::is_trivially_copyable_v<T>);
        if (at + sizeof(T) > buf.size()) throw std::runtime_error("index file truncated");
        T v;
        std::memcpy(&v, buf.data() + at, sizeof(T));
        at += sizeof(T);
        return v;
    }
};

constexpr std::uint32_t kMagic = 0x54594B53;  // "SKYT"

}  // namespace

std::vector<std::uint8_t> serialize_indexes(const IndexFileHeader& hdr,
                                            std::span<const SkyIndex> idxs) {
    Writer w;
    w.put_u32(kMagic);
    w.put_u32(hdr.version);
    w.put(hdr.mode);
    w.put(hdr.padded);
    w.put(hdr.dim);
    w.put(hdr.l);
    w.put(hdr.k);
    w.put(hdr.inf);
    w.put_u32(static_cast<std::uint32_t>(idxs.size()));
    for (const SkyIndex& idx : idxs) {
        w.put_u32(static_cast<std::uint32_t>(idx.dim));
        w.put(idx.inf);
        w.put(idx.k);
        w.put_u32(static_cast<std::uint32_t>(idx.nodes.size()));
        for (const IndexNode& n : idx.nodes) {
            w.put(n.left);
            w.put(n.right);
            w.put(n.payload);
            w.put_u32(static_cast<std::uint32_t>(n.chain.size()));
            for (Coord c : n.chain) w.put_i64(c);
        }
        w.put_u32(static_cast<std::uint32_t>(idx.leaf_contents.size()));
        for (const auto& leaf : idx.leaf_contents) {
            w.put_u32(static_cast<std::uint32_t>(leaf.size()));
            for (PointId id : leaf) w.put(id);
        }
        for (int d = 0; d < idx.dim; ++d) {
            const auto& coords = idx.side_coords[static_cast<size_t>(d)];
            w.put_u32(static_cast<std::uint32_t>(coords.size()));
            for (size_t c = 0; c < coords.size(); ++c) {
                w.put_i64(coords[c]);
                const auto& lst = idx.side_regions[static_cast<size_t>(d)][c];
                w.put_u32(static_cast<std::uint32_t>(lst.size()));
                for (std::int32_t r : lst) w.put(r);
            }
        }
        w.put_u32(static_cast<std::uint32_t>(idx.regions.size()));
        for (const SkylineRegion& r : idx.regions) {
            w.put(r.generator);
            w.put_u32(static_cast<std::uint32_t>(r.borders.size()));
            for (const BorderBox& b : r.borders) {
                w.put(b.border);
                for (int d = 0; d < idx.dim; ++d) {
                    w.put(b.side[static_cast<size_t>(d)]);
                    w.put_i64(b.mid[static_cast<size_t>(d)]);
                }
            }
        }
    }
    return std::move(w.buf);
}

std::pair<IndexFileHeader, std::vector<SkyIndex>> deserialize_indexes(
    std::span<const std::uint8_t> bytes) {
    Reader rd{bytes};
    if (rd.get<std::uint32_t>() != kMagic) throw std::runtime_error("not a SKYT index file");
    IndexFileHeader hdr;
    hdr.version = rd.get<std::uint32_t>();
    if (hdr.version != 1) throw std::runtime_error("unsupported index file version");
    hdr.mode = rd.get<std::uint8_t>();
    hdr.padded = rd.get<std::uint8_t>();
    hdr.dim = rd.get<std::uint16_t>();
    hdr.l = rd.get<std::uint64_t>();
    hdr.k = rd.get<std::int64_t>();
    hdr.inf = rd.get<Coord>();
    const std::uint32_t count = rd.get<std::uint32_t>();
    std::vector<SkyIndex> idxs(count);
    for (SkyIndex& idx : idxs) {
        idx.dim = static_cast<int>(rd.get<std::uint32_t>());
        idx.inf = rd.get<Coord>();
        idx.k = rd.get<std::int64_t>();
        idx.nodes.resize(rd.get<std::uint32_t>());
        for (IndexNode& n : idx.nodes) {
            n.left = rd.get<std::int32_t>();
            n.right = rd.get<std::int32_t>();
            n.payload = rd.get<std::int32_t>();
            n.chain.resize(rd.get<std::uint32_t>());
            for (Coord& c : n.chain) c = rd.get<std::int64_t>();
        }
        idx.leaf_contents.resize(rd.get<std::uint32_t>());
        for (auto& leaf : idx.leaf_contents) {
            leaf.resize(rd.get<std::uint32_t>());
            for (PointId& id : leaf) id = rd.get<PointId>();
        }
        idx.side_coords.assign(static_cast<size_t>(idx.dim), {});
        idx.side_regions.assign(static_cast<size_t>(idx.dim), {});
        for (int d = 0; d < idx.dim; ++d) {
            const std::uint32_t nc = rd.get<std::uint32_t>();
            idx.side_coords[static_cast<size_t>(d)].resize(nc);
            idx.side_regions[static_cast<size_t>(d)].resize(nc);
            for (std::uint32_t c = 0; c < nc; ++c) {
                idx.side_coords[static_cast<size_t>(d)][c] = rd.get<std::int64_t>();
                auto& lst = idx.side_regions[static_cast<size_t>(d)][c];
                lst.resize(rd.get<std::uint32_t>());
                for (std::int32_t& r : lst) r = rd.get<std::int32_t>();
            }
        }
        idx.regions.resize(rd.get<std::uint32_t>());
        for (SkylineRegion& r : idx.regions) {
            r.dim = idx.dim;
            r.inf = idx.inf;
            r.generator = rd.get<PointId>();
            r.borders.resize(rd.get<std::uint32_t>());
            for (BorderBox& b : r.borders) {
                b.border = rd.get<PointId>();
                b.side.resize(static_cast<size_t>(idx.dim));
                b.mid.resize(static_cast<size_t>(idx.dim));
                for (int d = 0; d < idx.dim; ++d) {
                    b.side[static_cast<size_t>(d)] = rd.get<std::int8_t>();
                    b.mid[static_cast<size_t>(d)] = rd.get<std::int64_t>();
                }
            }
        }
    }
    return {hdr, std::move(idxs)};
}

void save_indexes(const std::string& path, const IndexFileHeader& hdr,
                  std::span<const SkyIndex> idxs) {
    const std::vector<std::uint8_t> bytes = serialize_indexes(hdr, idxs);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::pair<IndexFileHeader, std::vector<SkyIndex>> load_indexes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return deserialize_indexes(bytes);
}

}  // namespace skytile
