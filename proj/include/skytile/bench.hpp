#pragma once

#include "skytile/oracle.hpp"
#include "skytile/secure.hpp"

#include <string>

namespace skytile {

enum class Distribution : std::uint8_t { kUniform, kCorrelated, kAnticorrelated, kCsv };
enum class Solver : std::uint8_t { kDp, kPrepartition, kGreedy, kNone };

struct BenchConfig {
    Distribution dist = Distribution::kUniform;
    std::string csv_path;
    size_t n = 1000;
    int d = 2;
    size_t l = 0;  // 0 means l = n
    std::int64_t k = 0;
    size_t m = 16;  // prepartition block size
    Solver solver = Solver::kGreedy;
    SecureMode mode = SecureMode::kPlain;
    bool pad_leaves = false;
    std::uint64_t seed = 1;
    size_t query_count = 1000;
    Coord range = Coord{1} << 20;  // synthetic coordinate range, original units
    bool parallel_queries = false;
};

// Seeded synthetic data: uniform, or equicorrelated Gaussian with pairwise
// coefficient +/-0.9 quantized to the grid. Anticorrelated requires d == 2
// (pairwise -0.9 is not a valid correlation matrix beyond two dimensions).
Dataset gen_dataset(const BenchConfig& cfg);

// CSV of d numeric columns, header optional. Values are scaled then rounded
// to the integer grid before the half-unit doubling.
Dataset ingest_csv(const std::string& path, double scale = 1.0);
void export_csv(const Dataset& D, const std::string& path);

struct Pipeline {
    std::vector<TileSet> tilings;
    std::vector<PartitionPlan> plans;
    std::vector<SkyIndex> indexes;
    std::int64_t effective_k = 0;
};

// regions -> per-group tilings -> plans -> bulk-loaded indexes. For d != 2
// the aggregation step is bypassed (k forced to 0, identity plans).
Pipeline build_pipeline(const Dataset& D, size_t l, std::int64_t k, Solver solver,
                        size_t m, std::uint64_t seed, bool equalize_depth,
                        std::uint64_t max_cells = std::uint64_t{1} << 22);

struct Measurements {
    // non-timing fields (deterministic under a fixed seed)
    size_t n = 0;
    int d = 0;
    size_t l = 0;
    std::int64_t k = 0;
    size_t index_count = 0;
    std::uint64_t plan_cost = 0;
    std::uint64_t cut_count = 0;
    std::uint64_t index_bytes = 0;
    std::uint64_t max_false_hits = 0;
    double mean_false_hits = 0.0;
    bool superset_ok = true;  // spot-checked against the oracle
    // timing fields
    double construction_ms = 0.0;
    double median_query_us = 0.0;
    double mean_query_us = 0.0;
    double mean_filter_us = 0.0;
};

Measurements run_benchmark(const BenchConfig& cfg);

std::string measurements_csv_header();
std::string measurements_csv_row(const BenchConfig& cfg, const Measurements& m);

// One rectangle per tile, labeled with the content size.
void render_tiles_svg(const TileSet& ts, const std::string& path);

}  // namespace skytile
