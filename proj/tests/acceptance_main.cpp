// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Runs the full pipeline at the sizes the library is
// designed for, so expect a total runtime in the tens of minutes.

#include "skytile/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <random>
#include <thread>

using namespace skytile;

namespace {

using Clock = std::chrono::steady_clock;

std::atomic<std::uint64_t> g_balance_checked{0};
std::atomic<std::uint64_t> g_balance_violations{0};

void note_balance(std::span<const SkyIndex> idxs) {
    for (const SkyIndex& idx : idxs) {
        const auto [mn, mx] = idx.leaf_depth_range();
        g_balance_checked.fetch_add(1);
        if (mx - mn > 1) g_balance_violations.fetch_add(1);
    }
}

Query random_query(std::mt19937_64& rng, int d, Coord range) {
    std::uniform_int_distribution<Coord> u(-range / 2, 2 * range + range / 2);
    std::vector<Coord> c(static_cast<size_t>(d));
    for (auto& v : c) v = u(rng);
    return Query{std::move(c)};
}

struct Tally {
    std::atomic<std::uint64_t> queries{0};
    std::atomic<std::uint64_t> mismatches{0};
    std::atomic<std::uint64_t> superset_violations{0};
    std::atomic<std::uint64_t> excess_violations{0};
};

// Shared sweep for criteria 1 and 2: seeded datasets, all l settings, the
// given k values; per-point regions computed once per dataset.
void run_sweep(const std::vector<std::int64_t>& ks, size_t datasets, size_t queries,
               Tally& tally) {
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t di = next.fetch_add(1); di < datasets; di = next.fetch_add(1)) {
            std::mt19937_64 rng(1000 + di);
            const size_t n = 10 + rng() % 91;
            const Coord range = Coord{1} << 16;
            BenchConfig gen;
            gen.dist = Distribution::kUniform;
            gen.n = n;
            gen.d = 2;
            gen.seed = 555 + di;
            gen.range = range;
            const Dataset D = gen_dataset(gen);
            std::vector<SkylineRegion> regions;
            regions.reserve(n);
            for (size_t p = 0; p < n; ++p)
                regions.push_back(skyline_region(D, static_cast<PointId>(p)));

            for (const size_t l : {size_t{1}, std::max<size_t>(1, n / 2), n}) {
                const auto groups = partition_points(D, l, di);
                std::vector<TileSet> tilings;
                for (const auto& g : groups) {
                    std::vector<SkylineRegion> rs;
                    for (PointId id : g) rs.push_back(regions[static_cast<size_t>(id)]);
                    // solvers run on the sweep engine; skip grid materialization
                    tilings.push_back(build_tiling(std::move(rs), kDefaultInf, 0));
                }
                for (const std::int64_t k : ks) {
                    std::vector<SkyIndex> idxs;
                    for (TileSet& ts : tilings)
                        idxs.push_back(build_index(solve_greedy(ts, k), ts));
                    note_balance(idxs);
                    const std::uint64_t budget =
                        static_cast<std::uint64_t>(k) * idxs.size();
                    for (size_t qi = 0; qi < queries; ++qi) {
                        const Query q = random_query(rng, 2, range);
                        const auto cand = query_all(idxs, q);
                        const auto truth = dynamic_skyline_fast2d(D, q);
                        const auto exact = client_filter(D, cand, q);
                        tally.queries.fetch_add(1);
                        if (exact != truth) tally.mismatches.fetch_add(1);
                        if (!std::includes(cand.begin(), cand.end(), truth.begin(),
                                           truth.end()))
                            tally.superset_violations.fetch_add(1);
                        if (cand.size() - truth.size() > budget)
                            tally.excess_violations.fetch_add(1);
                    }
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const size_t tcount = std::max(1u, std::thread::hardware_concurrency());
    for (size_t t = 0; t < tcount; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

bool criterion1() {
    Tally tally;
    run_sweep({0}, 200, 1000, tally);
    std::printf("  k=0 sweep: %llu queries, %llu mismatches\n",
                static_cast<unsigned long long>(tally.queries.load()),
                static_cast<unsigned long long>(tally.mismatches.load()));
    return tally.mismatches == 0 && tally.queries >= 200 * 3 * 1000;
}

bool criterion2() {
    Tally tally;
    run_sweep({1, 2, 5}, 200, 1000, tally);
    std::printf(
        "  k in {1,2,5}: %llu queries, %llu superset violations, %llu excess "
        "violations, %llu post-filter mismatches\n",
        static_cast<unsigned long long>(tally.queries.load()),
        static_cast<unsigned long long>(tally.superset_violations.load()),
        static_cast<unsigned long long>(tally.excess_violations.load()),
        static_cast<unsigned long long>(tally.mismatches.load()));
    return tally.superset_violations == 0 && tally.excess_violations == 0 &&
           tally.mismatches == 0;
}

// Exhaustive APP oracle over every cut-line subset (tiny instances only).
std::uint64_t exhaustive_app(const TileSet& ts, std::int64_t k) {
    const size_t nv = ts.boundaries[0].size();
    const size_t nh = ts.boundaries[1].size();
    const size_t gy = ts.gap_count(1);
    auto rect = [&](size_t s, size_t i, size_t t, size_t j) -> std::int64_t {
        std::vector<PointId> uni;
        size_t smallest = SIZE_MAX;
        for (size_t x = s; x < t; ++x)
            for (size_t y = i; y < j; ++y) {
                const auto& c = ts.tiles[x * gy + y].content;
                smallest = std::min(smallest, c.size());
                uni.insert(uni.end(), c.begin(), c.end());
            }
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
        if (uni.size() > smallest + static_cast<size_t>(k)) return -1;
        return static_cast<std::int64_t>(uni.size());
    };
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::uint32_t vm = 0; vm < (1u << nv); ++vm) {
        std::vector<size_t> vc{0};
        for (size_t c = 0; c < nv; ++c)
            if (vm & (1u << c)) vc.push_back(c + 1);
        vc.push_back(nv + 1);
        std::uint64_t total = 0;
        bool ok = true;
        for (size_t si = 0; ok && si + 1 < vc.size(); ++si) {
            std::int64_t strip_best = -1;
            for (std::uint32_t hm = 0; hm < (1u << nh); ++hm) {
                std::vector<size_t> hc{0};
                for (size_t c = 0; c < nh; ++c)
                    if (hm & (1u << c)) hc.push_back(c + 1);
                hc.push_back(nh + 1);
                std::int64_t cost = 0;
                bool feas = true;
                for (size_t hi = 0; feas && hi + 1 < hc.size(); ++hi) {
                    const std::int64_t cc = rect(vc[si], hc[hi], vc[si + 1], hc[hi + 1]);
                    if (cc < 0)
                        feas = false;
                    else
                        cost += cc;
                }
                if (feas && (strip_best < 0 || cost < strip_best)) strip_best = cost;
            }
            if (strip_best < 0)
                ok = false;
            else
                total += static_cast<std::uint64_t>(strip_best);
        }
        if (ok) best = std::min(best, total);
    }
    return best;
}

bool criterion3() {
    std::mt19937_64 rng(2024);
    size_t instances = 0, dp_mismatches = 0, order_violations = 0;
    while (instances < 120) {
        const size_t n = 2 + rng() % 3;
        std::uniform_int_distribution<Coord> u(0, 7);
        std::vector<std::vector<Coord>> raw(n, std::vector<Coord>(2));
        for (auto& row : raw)
            for (auto& c : row) c = u(rng);
        Dataset D;
        try {
            D = make_dataset("tiny", 2, raw);
        } catch (...) {
            continue;
        }
        std::vector<SkylineRegion> rs;
        for (size_t p = 0; p < n; ++p) rs.push_back(skyline_region(D, static_cast<PointId>(p)));
        const TileSet ts = build_tiling(std::move(rs));
        if (ts.boundaries[0].size() > 5 || ts.boundaries[1].size() > 5 ||
            ts.boundaries[0].empty() || ts.boundaries[1].empty())
            continue;
        ++instances;
        const size_t nmax = std::max(ts.boundaries[0].size(), ts.boundaries[1].size());
        for (const std::int64_t k : {std::int64_t{0}, std::int64_t{1}, std::int64_t{2}}) {
            const std::uint64_t dp = solve_dp(ts, k).cost;
            if (dp != exhaustive_app(ts, k)) ++dp_mismatches;
            if (dp > solve_greedy(ts, k).cost) ++order_violations;
            std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
            for (size_t m = 1; m <= 2 * nmax; m *= 2) {
                const std::uint64_t pc = solve_prepartition(ts, k, m).cost;
                if (dp > pc || pc > prev) ++order_violations;
                prev = pc;
            }
        }
    }
    std::printf("  %zu tiny instances x k in {0,1,2}: %zu dp!=exhaustive, %zu order "
                "violations\n",
                instances, dp_mismatches, order_violations);
    return instances >= 100 && dp_mismatches == 0 && order_violations == 0;
}

bool criterion4() {
    BenchConfig gen;
    gen.dist = Distribution::kUniform;
    gen.n = 1000;
    gen.d = 2;
    gen.seed = 42;
    gen.range = Coord{1} << 20;
    const Dataset D = gen_dataset(gen);
    const size_t l = 100;  // the paper's DP-vs-greedy runs use l well below n
    bool ok = true;
    for (std::int64_t k = 0; k <= 10; ++k) {
        const auto t0 = Clock::now();
        const Pipeline dp = build_pipeline(D, l, k, Solver::kDp, 16, 9, false);
        std::uint64_t dp_cost = 0;
        for (const auto& p : dp.plans) dp_cost += p.cost;
        const Pipeline gr = build_pipeline(D, l, k, Solver::kGreedy, 16, 9, false);
        std::uint64_t gr_cost = 0;
        for (const auto& p : gr.plans) gr_cost += p.cost;
        note_balance(dp.indexes);
        note_balance(gr.indexes);
        const double ratio = static_cast<double>(gr_cost) / static_cast<double>(dp_cost);
        const double secs =
            std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("  k=%lld: dp=%llu greedy=%llu ratio=%.3f (%.0fs)\n",
                    static_cast<long long>(k),
                    static_cast<unsigned long long>(dp_cost),
                    static_cast<unsigned long long>(gr_cost), ratio, secs);
        if (ratio > 1.5) ok = false;
    }
    return ok;
}

bool criterion5() {
    std::printf("  %llu indexes checked across the suite, %llu depth violations\n",
                static_cast<unsigned long long>(g_balance_checked.load()),
                static_cast<unsigned long long>(g_balance_violations.load()));
    return g_balance_checked > 0 && g_balance_violations == 0;
}

struct BigBuild {
    Dataset D;
    Pipeline pipe;
};

BigBuild build_big(size_t n, std::int64_t k, size_t l, std::uint64_t seed) {
    BenchConfig gen;
    gen.dist = Distribution::kUniform;
    gen.n = n;
    gen.d = 2;
    gen.seed = seed;
    gen.range = Coord{1} << 20;
    BigBuild out{gen_dataset(gen), {}};
    out.pipe = build_pipeline(out.D, l, k, Solver::kGreedy, 16, seed, false);
    note_balance(out.pipe.indexes);
    return out;
}

bool criterion6(const BigBuild& big) {
    std::mt19937_64 rng(77);
    std::vector<double> lat;
    for (int warm = 0; warm < 100; ++warm)
        (void)query_all(big.pipe.indexes, random_query(rng, 2, Coord{1} << 20));
    for (int i = 0; i < 2000; ++i) {
        const Query q = random_query(rng, 2, Coord{1} << 20);
        const auto t0 = Clock::now();
        volatile size_t sink = query_all(big.pipe.indexes, q).size();
        (void)sink;
        lat.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
    }
    std::sort(lat.begin(), lat.end());
    const double median_us = lat[lat.size() / 2];
    std::printf("  n=10000 l=n k=%lld: median lookup %.1f us (paper <1ms: %s, desk "
                "<10ms: %s) [reported, not gated]\n",
                static_cast<long long>(big.pipe.effective_k), median_us,
                median_us < 1000 ? "yes" : "no", median_us < 10000 ? "yes" : "no");
    return true;
}

bool criterion7(const BigBuild& big10k) {
    bool ok = true;
    for (const size_t n : {size_t{1000}, size_t{10000}}) {
        const std::int64_t k = static_cast<std::int64_t>(n / 100);
        const BigBuild local = n == 10000 ? BigBuild{} : build_big(n, k, n, 31 + n);
        const BigBuild& big = n == 10000 ? big10k : local;
        const std::uint64_t bound = n / 100;  // ceil(n/l) * k with l = n
        std::uint64_t max_false = 0;
        std::mt19937_64 rng(n);
        for (int i = 0; i < 10000; ++i) {
            const Query q = random_query(rng, 2, Coord{1} << 20);
            const auto cand = query_all(big.pipe.indexes, q);
            const auto exact = client_filter(big.D, cand, q);
            max_false = std::max<std::uint64_t>(max_false, cand.size() - exact.size());
        }
        std::printf("  n=%zu k=%lld: max false hits per query %llu (bound %llu)\n", n,
                    static_cast<long long>(k),
                    static_cast<unsigned long long>(max_false),
                    static_cast<unsigned long long>(bound));
        if (max_false > bound) ok = false;
    }
    return ok;
}

std::uint64_t mode_seed(size_t l, std::int64_t k, SecureMode mode) {
    return l * 1000003ULL + static_cast<std::uint64_t>(k) * 97ULL +
           static_cast<std::uint64_t>(mode);
}

bool criterion8() {
    BenchConfig gen;
    gen.dist = Distribution::kUniform;
    gen.n = 400;
    gen.d = 2;
    gen.seed = 8;
    gen.range = Coord{1} << 16;
    const Dataset D = gen_dataset(gen);
    const SecretKeys keys = SecretKeys::from_seed(4242);
    bool ok = true;
    for (const SecureMode mode : {SecureMode::kMope, SecureMode::kPore}) {
        std::uint64_t path_mismatch = 0, answer_mismatch = 0, checked = 0;
        for (const auto& [l, k] :
             std::vector<std::pair<size_t, std::int64_t>>{{100, 2}, {400, 0}}) {
            const Pipeline pipe = build_pipeline(D, l, k, Solver::kGreedy, 16, 3, true);
            note_balance(pipe.indexes);
            const EncIndexSet enc =
                encrypt_indexes(pipe.indexes, D, keys, mode, false, l, k);
            const OpeDictionary dict = build_ope_dictionary(pipe.indexes);
            std::mt19937_64 rng(mode_seed(l, k, mode));
            for (int i = 0; i < 5000; ++i) {
                const Query q = random_query(rng, 2, Coord{1} << 16);
                ++checked;
                for (size_t xi = 0; xi < enc.indexes.size(); ++xi) {
                    const EncQuery eq = encode_query(
                        mode == SecureMode::kMope ? &dict : nullptr, &keys, q, enc, xi);
                    const EncResult res = enc_lookup(enc.indexes[xi], eq);
                    const SkyIndex::Path plain = pipe.indexes[xi].locate(q);
                    if (res.path.decisions != plain.decisions ||
                        res.path.payload != plain.payload)
                        ++path_mismatch;
                }
                const std::vector<Point> ans = secure_query(
                    mode == SecureMode::kMope ? &dict : nullptr, keys, enc, q);
                std::vector<PointId> ids;
                for (const Point& p : ans) ids.push_back(p.id);
                std::sort(ids.begin(), ids.end());
                if (ids != dynamic_skyline_fast2d(D, q)) ++answer_mismatch;
            }
        }
        std::printf("  %s: %llu queries, %llu path mismatches, %llu answer mismatches\n",
                    mode == SecureMode::kMope ? "mope" : "pore",
                    static_cast<unsigned long long>(checked),
                    static_cast<unsigned long long>(path_mismatch),
                    static_cast<unsigned long long>(answer_mismatch));
        if (path_mismatch || answer_mismatch) ok = false;
    }
    return ok;
}

bool criterion9() {
    std::mt19937_64 rng(1212);
    std::vector<std::vector<Coord>> raw(64, std::vector<Coord>(2));
    for (auto& row : raw)
        for (auto& c : row) c = static_cast<Coord>(rng() % 10000);
    std::vector<std::vector<Coord>> shifted = raw;
    for (auto& row : shifted) {
        row[0] += 123456;
        row[1] += 654321;
    }
    const Dataset A = make_dataset("A", 2, raw);
    const Dataset B = make_dataset("B", 2, shifted);
    const Pipeline pa = build_pipeline(A, 16, 1, Solver::kGreedy, 16, 5, true);
    const Pipeline pb = build_pipeline(B, 16, 1, Solver::kGreedy, 16, 5, true);
    bool ok = true;
    for (const SecureMode mode : {SecureMode::kMope, SecureMode::kPore}) {
        const EncIndexSet ea = encrypt_indexes(pa.indexes, A, SecretKeys::from_seed(1),
                                               mode, true, 16, 1);
        const EncIndexSet eb = encrypt_indexes(pb.indexes, B, SecretKeys::from_seed(2),
                                               mode, true, 16, 1);
        const bool leak_eq = leakage_report(ea) == leakage_report(eb);
        const bool digest_eq = structural_digest(ea) == structural_digest(eb);
        std::printf("  %s: leakage tuples %s, structure outside ciphertexts %s\n",
                    mode == SecureMode::kMope ? "mope" : "pore",
                    leak_eq ? "identical" : "DIFFER",
                    digest_eq ? "byte-identical" : "DIFFER");
        ok = ok && leak_eq && digest_eq;
    }
    return ok;
}

bool criterion10() {
    double medians[3] = {0, 0, 0};
    const Distribution dists[3] = {Distribution::kUniform, Distribution::kCorrelated,
                                   Distribution::kAnticorrelated};
    const char* names[3] = {"uniform", "correlated", "anticorrelated"};
    for (int di = 0; di < 3; ++di) {
        BenchConfig cfg;
        cfg.dist = dists[di];
        cfg.n = 10000;
        cfg.d = 2;
        cfg.l = 1000;
        cfg.k = 10;
        cfg.seed = 20;
        cfg.query_count = 2000;
        cfg.range = Coord{1} << 20;
        const Measurements m = run_benchmark(cfg);
        medians[di] = m.median_query_us;
        std::printf("  %s: median %.1f us (plan cost %llu, max false hits %llu)\n",
                    names[di], m.median_query_us,
                    static_cast<unsigned long long>(m.plan_cost),
                    static_cast<unsigned long long>(m.max_false_hits));
    }
    const double mx = std::max({medians[0], medians[1], medians[2]});
    const double mn = std::min({medians[0], medians[1], medians[2]});
    std::printf("  ratio max/min = %.2f\n", mx / mn);
    return mx / mn <= 2.0;
}

}  // namespace

int main() {
    int failures = 0;
    const auto run = [&](int num, const char* name, auto&& fn) {
        const auto t0 = Clock::now();
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            std::printf("  exception: %s\n", e.what());
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("%s criterion %d: %s (%.0fs)\n", ok ? "PASS" : "FAIL", num, name,
                    secs);
        std::fflush(stdout);
        if (!ok) ++failures;
    };

    run(1, "exactness at k=0 across 200 datasets and all l settings", criterion1);
    run(2, "superset and bounded excess for k in {1,2,5}", criterion2);
    run(3, "DP optimality vs exhaustive enumeration; solver cost ordering", criterion3);
    run(4, "greedy cost within 1.5x of DP at n=1000", criterion4);

    // criteria 6 and 7 share the n=10000 build
    BigBuild big10k = build_big(10000, 100, 10000, 64);
    run(6, "query latency at n=10000, l=n (reported)",
        [&] { return criterion6(big10k); });
    run(7, "false hits within 1% of the data at k=l/100",
        [&] { return criterion7(big10k); });
    big10k = BigBuild{};  // release before the encrypted runs

    run(8, "encrypted traversal equivalence and exactness (mope, pore)", criterion8);
    run(9, "leakage shape identical for structure-matched datasets", criterion9);
    run(10, "distribution insensitivity of query time", criterion10);
    run(5, "leaf depth spread <= 1 across every built index", criterion5);

    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}
