#include "skytile/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace skytile {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

Dataset gen_dataset(const BenchConfig& cfg) {
    if (cfg.dist == Distribution::kCsv) return ingest_csv(cfg.csv_path);
    if (cfg.n < 1) throw std::invalid_argument("gen_dataset: n must be >= 1");
    if (cfg.d < 1 || cfg.d > 5)
        throw std::invalid_argument("gen_dataset: d must be in [1, 5]");
    if (cfg.dist == Distribution::kAnticorrelated && cfg.d != 2)
        throw std::invalid_argument(
            "gen_dataset: anticorrelated (rho = -0.9) is only a valid correlation "
            "structure for d = 2");

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::vector<Coord>> raw(cfg.n, std::vector<Coord>(static_cast<size_t>(cfg.d)));
    if (cfg.dist == Distribution::kUniform) {
        std::uniform_int_distribution<Coord> u(0, cfg.range - 1);
        for (auto& row : raw)
            for (auto& c : row) c = u(rng);
    } else {
        // Equicorrelated Gaussian via a shared factor: x_i = a*w + b*z_i with
        // a^2 = |rho|, b^2 = 1 - |rho|; the anticorrelated pair flips the
        // factor's sign on the second coordinate.
        const double rho = 0.9;
        const double a = std::sqrt(rho);
        const double b = std::sqrt(1.0 - rho);
        const bool anti = cfg.dist == Distribution::kAnticorrelated;
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double mu = static_cast<double>(cfg.range) / 2.0;
        const double sd = static_cast<double>(cfg.range) / 8.0;
        for (auto& row : raw) {
            const double w = gauss(rng);
            for (int i = 0; i < cfg.d; ++i) {
                const double f = (anti && i == 1) ? -a : a;
                const double x = f * w + b * gauss(rng);
                const double v = std::clamp(mu + sd * x, 0.0,
                                            static_cast<double>(cfg.range - 1));
                row[static_cast<size_t>(i)] = static_cast<Coord>(std::llround(v));
            }
        }
    }
    std::ostringstream name;
    name << (cfg.dist == Distribution::kUniform
                 ? "uniform"
                 : (cfg.dist == Distribution::kCorrelated ? "correlated" : "anticorrelated"))
         << "-n" << cfg.n << "-d" << cfg.d << "-s" << cfg.seed;
    return make_dataset(name.str(), cfg.d, raw);
}

Dataset ingest_csv(const std::string& path, double scale) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("ingest_csv: cannot open " + path);
    std::vector<std::vector<Coord>> raw;
    std::string line;
    size_t lineno = 0;
    int dim = -1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<Coord> row;
        std::stringstream ss(line);
        std::string cell;
        bool bad = false;
        while (std::getline(ss, cell, ',')) {
            // trim
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            if (b == std::string::npos) {
                bad = true;
                break;
            }
            cell = cell.substr(b, e - b + 1);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                bad = true;
                break;
            }
            row.push_back(static_cast<Coord>(std::llround(v * scale)));
        }
        if (bad) {
            if (lineno == 1 && raw.empty()) continue;  // header row
            throw std::runtime_error("ingest_csv: non-numeric cell at line " +
                                     std::to_string(lineno));
        }
        if (dim < 0) dim = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != dim)
            throw std::runtime_error("ingest_csv: ragged row at line " +
                                     std::to_string(lineno));
        raw.push_back(std::move(row));
    }
    if (raw.empty()) throw std::runtime_error("ingest_csv: no data rows in " + path);
    return make_dataset(path, dim, raw);
}

void export_csv(const Dataset& D, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("export_csv: cannot open " + path);
    for (const Point& p : D.points) {
        for (int i = 0; i < D.dim; ++i) {
            if (i) f << ',';
            f << p[i] / 2;  // back to original grid units
        }
        f << '\n';
    }
}

Pipeline build_pipeline(const Dataset& D, size_t l, std::int64_t k, Solver solver,
                        size_t m, std::uint64_t seed, bool equalize_depth,
                        std::uint64_t max_cells) {
    Pipeline out;
    if (l == 0 || l > D.size()) l = D.size();
    std::int64_t ek = k;
    if (D.dim != 2) ek = 0;  // aggregation is 2-D only; identity plans elsewhere
    if (solver == Solver::kNone) ek = 0;
    out.effective_k = ek;

    const auto groups = partition_points(D, l, seed);
    out.tilings.resize(groups.size());
    out.plans.resize(groups.size());
    out.indexes.resize(groups.size());

    // Only the identity-plan path reads materialized grid cells; the 2-D
    // solvers run on the sweep engine.
    const bool needs_cells = D.dim != 2 || solver == Solver::kNone;
    const std::uint64_t cell_guard = needs_cells ? max_cells : 0;

    // Groups are independent; construction parallelizes per group.
    auto worker = [&](size_t gi) {
        std::vector<SkylineRegion> regions;
        regions.reserve(groups[gi].size());
        for (PointId id : groups[gi]) regions.push_back(skyline_region(D, id));
        out.tilings[gi] = build_tiling(std::move(regions), kDefaultInf, cell_guard);
        TileSet& ts = out.tilings[gi];
        PartitionPlan plan;
        if (D.dim == 2 && solver != Solver::kNone) {
            switch (solver) {
                case Solver::kDp: plan = solve_dp(ts, ek); break;
                case Solver::kPrepartition: plan = solve_prepartition(ts, ek, m); break;
                default: plan = solve_greedy(ts, ek); break;
            }
        } else {
            plan = identity_plan(ts);
        }
        out.indexes[gi] = build_index(plan, ts, equalize_depth);
        out.plans[gi] = std::move(plan);
    };

    const size_t threads =
        std::min<size_t>(std::max(1u, std::thread::hardware_concurrency()), groups.size());
    if (threads <= 1 || groups.size() == 1) {
        for (size_t gi = 0; gi < groups.size(); ++gi) worker(gi);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (size_t gi = next.fetch_add(1); gi < groups.size();
                     gi = next.fetch_add(1))
                    worker(gi);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

Measurements run_benchmark(const BenchConfig& cfg) {
    const Dataset D = gen_dataset(cfg);
    const size_t l = cfg.l == 0 || cfg.l > D.size() ? D.size() : cfg.l;

    Measurements ms;
    ms.n = D.size();
    ms.d = D.dim;
    ms.l = l;

    const bool equalize = cfg.mode != SecureMode::kPlain;
    const auto t0 = Clock::now();
    Pipeline pipe = build_pipeline(D, l, cfg.k, cfg.solver, cfg.m, cfg.seed, equalize);
    SecretKeys keys = SecretKeys::from_seed(cfg.seed ^ 0x5ec5ec5ecULL);
    EncIndexSet enc;
    OpeDictionary dict;
    if (cfg.mode != SecureMode::kPlain) {
        enc = encrypt_indexes(pipe.indexes, D, keys, cfg.mode, cfg.pad_leaves,
                              static_cast<std::uint64_t>(l), pipe.effective_k);
        if (cfg.mode == SecureMode::kMope) dict = build_ope_dictionary(pipe.indexes);
    }
    ms.construction_ms = ms_since(t0);

    ms.k = pipe.effective_k;
    ms.index_count = pipe.indexes.size();
    for (const PartitionPlan& p : pipe.plans) {
        ms.plan_cost += p.cost;
        ms.cut_count += p.vertical_cuts.size();
        for (const auto& h : p.horizontal_cuts) ms.cut_count += h.size();
    }
    {
        IndexFileHeader hdr;
        hdr.dim = static_cast<std::uint16_t>(D.dim);
        hdr.l = l;
        hdr.k = pipe.effective_k;
        if (cfg.mode == SecureMode::kPlain)
            ms.index_bytes = serialize_indexes(hdr, pipe.indexes).size();
        else
            ms.index_bytes = serialize_enc_indexes(enc).size();
    }

    // Query workload: uniform half-unit coordinates over the occupied range.
    std::mt19937_64 qrng(cfg.seed + 17);
    std::uniform_int_distribution<Coord> qdist(0, 2 * cfg.range - 1);
    std::vector<Query> queries;
    queries.reserve(cfg.query_count);
    for (size_t i = 0; i < cfg.query_count; ++i) {
        std::vector<Coord> qc(static_cast<size_t>(D.dim));
        for (auto& c : qc) c = qdist(qrng);
        queries.emplace_back(std::move(qc));
    }

    const size_t warmup = std::min<size_t>(100, queries.size());
    std::vector<double> lat_us;
    lat_us.reserve(queries.size());
    double filter_us_total = 0.0;
    std::uint64_t total_false = 0;

    auto run_query = [&](const Query& q) -> std::vector<PointId> {
        if (cfg.mode == SecureMode::kPlain)
            return query_all(pipe.indexes, q);
        std::vector<Point> pts = secure_query(
            cfg.mode == SecureMode::kMope ? &dict : nullptr, keys, enc, q);
        std::vector<PointId> ids;
        for (const Point& p : pts) ids.push_back(p.id);
        std::sort(ids.begin(), ids.end());
        return ids;
    };

    for (size_t i = 0; i < warmup; ++i) (void)run_query(queries[i]);

    const size_t oracle_samples = std::min<size_t>(queries.size(), D.size() > 2000 ? 50 : 200);
    for (size_t i = 0; i < queries.size(); ++i) {
        const Query& q = queries[i];
        const auto q0 = Clock::now();
        std::vector<PointId> cand;
        if (cfg.parallel_queries && cfg.mode == SecureMode::kPlain &&
            pipe.indexes.size() > 1) {
            std::vector<std::future<std::vector<PointId>>> futs;
            for (const SkyIndex& idx : pipe.indexes)
                futs.push_back(std::async(std::launch::async,
                                          [&idx, &q] { return lookup(idx, q); }));
            for (auto& f : futs) {
                std::vector<PointId> part = f.get();
                std::vector<PointId> merged;
                std::set_union(cand.begin(), cand.end(), part.begin(), part.end(),
                               std::back_inserter(merged));
                cand = std::move(merged);
            }
        } else {
            cand = run_query(q);
        }
        lat_us.push_back(ms_since(q0) * 1000.0);

        const auto f0 = Clock::now();
        const std::vector<PointId> exact = client_filter(D, cand, q);
        filter_us_total += ms_since(f0) * 1000.0;
        // Candidates always contain the full skyline, so everything the
        // filter drops is a false hit.
        total_false += cand.size() - exact.size();
        ms.max_false_hits = std::max<std::uint64_t>(ms.max_false_hits,
                                                    cand.size() - exact.size());
        if (i < oracle_samples) {
            const std::vector<PointId> truth =
                D.dim == 2 ? dynamic_skyline_fast2d(D, q) : dynamic_skyline(D, q);
            if (exact != truth) ms.superset_ok = false;
        }
    }
    ms.mean_false_hits =
        queries.empty() ? 0.0 : static_cast<double>(total_false) / queries.size();
    ms.mean_filter_us = queries.empty() ? 0.0 : filter_us_total / queries.size();
    if (!lat_us.empty()) {
        std::vector<double> sorted = lat_us;
        std::sort(sorted.begin(), sorted.end());
        ms.median_query_us = sorted[sorted.size() / 2];
        double total = 0;
        for (double v : lat_us) total += v;
        ms.mean_query_us = total / static_cast<double>(lat_us.size());
    }
    return ms;
}

std::string measurements_csv_header() {
    return "n,d,l,k,indexes,plan_cost,cuts,index_bytes,max_false_hits,mean_false_hits,"
           "exact_ok,construction_ms,median_query_us,mean_query_us,mean_filter_us";
}

std::string measurements_csv_row(const BenchConfig& cfg, const Measurements& m) {
    (void)cfg;
    std::ostringstream ss;
    ss << m.n << ',' << m.d << ',' << m.l << ',' << m.k << ',' << m.index_count << ','
       << m.plan_cost << ',' << m.cut_count << ',' << m.index_bytes << ','
       << m.max_false_hits << ',' << m.mean_false_hits << ',' << (m.superset_ok ? 1 : 0)
       << ',' << m.construction_ms << ',' << m.median_query_us << ',' << m.mean_query_us
       << ',' << m.mean_filter_us;
    return ss.str();
}

void render_tiles_svg(const TileSet& ts, const std::string& path) {
    if (ts.dim != 2) throw std::invalid_argument("render_tiles_svg: d must be 2");
    if (!ts.materialized)
        throw std::invalid_argument("render_tiles_svg: tiling not materialized");
    // Frame the finite boundary coordinates with one gap of margin.
    Coord lo = 0, hi = 0;
    bool any = false;
    for (int d = 0; d < 2; ++d)
        for (Coord c : ts.boundaries[static_cast<size_t>(d)]) {
            if (!any) {
                lo = hi = c;
                any = true;
            }
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    if (!any) {
        lo = 0;
        hi = 1;
    }
    const Coord margin = std::max<Coord>(1, (hi - lo) / 8);
    const double flo = static_cast<double>(lo - margin);
    const double fhi = static_cast<double>(hi + margin);
    const double w = 1000.0;
    auto sx = [&](Coord c) {
        const double v = std::clamp(static_cast<double>(c), flo, fhi);
        return (v - flo) / (fhi - flo) * w;
    };
    auto sy = [&](Coord c) {
        const double v = std::clamp(static_cast<double>(c), flo, fhi);
        return w - (v - flo) / (fhi - flo) * w;  // y grows upward
    };

    std::ofstream f(path);
    if (!f) throw std::runtime_error("render_tiles_svg: cannot open " + path);
    f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n";
    for (const Tile& t : ts.tiles) {
        const double x0 = sx(t.location.dims[0].lo);
        const double x1 = sx(t.location.dims[0].hi);
        const double y0 = sy(t.location.dims[1].hi);
        const double y1 = sy(t.location.dims[1].lo);
        f << "  <rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0
          << "\" height=\"" << y1 - y0
          << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        f << "  <text x=\"" << (x0 + x1) / 2 << "\" y=\"" << (y0 + y1) / 2
          << "\" font-size=\"12\" text-anchor=\"middle\">" << t.content.size()
          << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace skytile
