// Command-line front end: dataset generation/ingestion, index construction,
// queries against plain or encrypted indexes, benchmark sweeps, and 2-D
// tiling rendering.

#include "skytile/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace skytile;

Distribution parse_dist(const std::string& s) {
    if (s == "uniform") return Distribution::kUniform;
    if (s == "correlated") return Distribution::kCorrelated;
    if (s == "anticorrelated") return Distribution::kAnticorrelated;
    if (s == "csv") return Distribution::kCsv;
    throw CLI::ValidationError("--dist", "unknown distribution " + s);
}

Solver parse_solver(const std::string& s) {
    if (s == "dp") return Solver::kDp;
    if (s == "prepartition") return Solver::kPrepartition;
    if (s == "greedy") return Solver::kGreedy;
    if (s == "none") return Solver::kNone;
    throw CLI::ValidationError("--solver", "unknown solver " + s);
}

SecureMode parse_mode(const std::string& s) {
    if (s == "plain") return SecureMode::kPlain;
    if (s == "mope") return SecureMode::kMope;
    if (s == "pore") return SecureMode::kPore;
    throw CLI::ValidationError("--mode", "unknown mode " + s);
}

std::vector<Coord> parse_query_coords(const std::string& s) {
    std::vector<Coord> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoll(cell) * 2);
    return out;
}

void write_or_print(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot open " + out);
        f << text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skytile: materialized dynamic-skyline indexes, plain or encrypted"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    std::string g_dist = "uniform", g_out;
    size_t g_n = 1000;
    int g_d = 2;
    std::uint64_t g_seed = 1;
    Coord g_range = Coord{1} << 20;
    gen->add_option("--dist", g_dist, "uniform|correlated|anticorrelated");
    gen->add_option("--n", g_n, "number of points");
    gen->add_option("--d", g_d, "dimensionality (1..5)");
    gen->add_option("--seed", g_seed, "RNG seed");
    gen->add_option("--range", g_range, "coordinate range");
    gen->add_option("--out", g_out, "output CSV path")->required();

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "validate and normalize a CSV dataset");
    std::string i_in, i_out;
    double i_scale = 1.0;
    ingest->add_option("--in", i_in, "input CSV")->required();
    ingest->add_option("--scale", i_scale, "multiply values before grid rounding");
    ingest->add_option("--out", i_out, "normalized CSV output");

    // ---- build ----
    auto* build = app.add_subcommand("build", "build (and optionally encrypt) indexes");
    std::string b_data, b_out, b_dict_out, b_solver = "greedy", b_mode = "plain";
    size_t b_l = 0, b_m = 16;
    std::int64_t b_k = 0;
    std::uint64_t b_seed = 1, b_key_seed = 42;
    bool b_pad = false;
    build->add_option("--data", b_data, "dataset CSV")->required();
    build->add_option("--l", b_l, "group size (0 = n)");
    build->add_option("--k", b_k, "false-hit budget per index");
    build->add_option("--m", b_m, "prepartition block size");
    build->add_option("--solver", b_solver, "dp|prepartition|greedy|none");
    build->add_option("--mode", b_mode, "plain|mope|pore");
    build->add_flag("--pad-leaves", b_pad, "pad leaf payloads to equal size");
    build->add_option("--seed", b_seed, "partition seed");
    build->add_option("--key-seed", b_key_seed, "secret key seed (encrypted modes)");
    build->add_option("--out", b_out, "index file")->required();
    build->add_option("--dict-out", b_dict_out, "mOPE dictionary file (mope mode)");

    // ---- query ----
    auto* query = app.add_subcommand("query", "answer one skyline query from an index file");
    std::string q_index, q_data, q_dict, q_point, q_mode = "plain";
    std::uint64_t q_key_seed = 42;
    query->add_option("--index", q_index, "index file")->required();
    query->add_option("--data", q_data, "dataset CSV (plain mode filtering)");
    query->add_option("--dict", q_dict, "mOPE dictionary file");
    query->add_option("--mode", q_mode, "plain|mope|pore");
    query->add_option("--key-seed", q_key_seed, "secret key seed");
    query->add_option("--q", q_point, "query point, comma-separated original units")
        ->required();

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "run one benchmark configuration");
    BenchConfig cfg;
    std::string be_dist = "uniform", be_solver = "greedy", be_mode = "plain", be_out,
                be_csv;
    bench->add_option("--dist", be_dist, "uniform|correlated|anticorrelated|csv");
    bench->add_option("--csv", be_csv, "dataset CSV when --dist csv");
    bench->add_option("--n", cfg.n, "points");
    bench->add_option("--d", cfg.d, "dimensionality");
    bench->add_option("--l", cfg.l, "group size (0 = n)");
    bench->add_option("--k", cfg.k, "false-hit budget");
    bench->add_option("--m", cfg.m, "prepartition block size");
    bench->add_option("--solver", be_solver, "dp|prepartition|greedy|none");
    bench->add_option("--mode", be_mode, "plain|mope|pore");
    bench->add_flag("--pad-leaves", cfg.pad_leaves, "pad leaf payloads");
    bench->add_option("--seed", cfg.seed, "seed");
    bench->add_option("--queries", cfg.query_count, "timed query count");
    bench->add_option("--range", cfg.range, "synthetic coordinate range");
    bench->add_flag("--parallel", cfg.parallel_queries, "parallel per-index lookups");
    bench->add_option("--out", be_out, "write CSV here instead of stdout");

    // ---- render ----
    auto* render = app.add_subcommand("render", "render a 2-D tiling as SVG");
    std::string r_data, r_out;
    size_t r_l = 0, r_group = 0;
    std::uint64_t r_seed = 1;
    render->add_option("--data", r_data, "dataset CSV")->required();
    render->add_option("--l", r_l, "group size (0 = n)");
    render->add_option("--group", r_group, "group ordinal to draw");
    render->add_option("--seed", r_seed, "partition seed");
    render->add_option("--out", r_out, "output SVG")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            BenchConfig c;
            c.dist = parse_dist(g_dist);
            c.n = g_n;
            c.d = g_d;
            c.seed = g_seed;
            c.range = g_range;
            export_csv(gen_dataset(c), g_out);
            std::cout << "wrote " << g_n << " points to " << g_out << "\n";
        } else if (*ingest) {
            const Dataset D = ingest_csv(i_in, i_scale);
            std::cout << "parsed " << D.size() << " points, d=" << D.dim << "\n";
            if (!i_out.empty()) export_csv(D, i_out);
        } else if (*build) {
            const Dataset D = ingest_csv(b_data);
            const SecureMode mode = parse_mode(b_mode);
            const size_t l = b_l == 0 || b_l > D.size() ? D.size() : b_l;
            Pipeline pipe = build_pipeline(D, l, b_k, parse_solver(b_solver), b_m, b_seed,
                                           mode != SecureMode::kPlain);
            std::uint64_t cost = 0;
            for (const auto& p : pipe.plans) cost += p.cost;
            std::cout << "indexes=" << pipe.indexes.size() << " plan_cost=" << cost
                      << " k=" << pipe.effective_k << "\n";
            IndexFileHeader hdr;
            hdr.mode = static_cast<std::uint8_t>(mode);
            hdr.padded = b_pad ? 1 : 0;
            hdr.dim = static_cast<std::uint16_t>(D.dim);
            hdr.l = l;
            hdr.k = pipe.effective_k;
            if (mode == SecureMode::kPlain) {
                save_indexes(b_out, hdr, pipe.indexes);
            } else {
                const SecretKeys keys = SecretKeys::from_seed(b_key_seed);
                const EncIndexSet enc = encrypt_indexes(pipe.indexes, D, keys, mode, b_pad,
                                                        l, pipe.effective_k);
                const Bytes bytes = serialize_enc_indexes(enc);
                std::ofstream f(b_out, std::ios::binary);
                f.write(reinterpret_cast<const char*>(bytes.data()),
                        static_cast<std::streamsize>(bytes.size()));
                if (mode == SecureMode::kMope) {
                    const OpeDictionary dict = build_ope_dictionary(pipe.indexes);
                    const Bytes db = dict.serialize();
                    const std::string dpath =
                        b_dict_out.empty() ? b_out + ".dict" : b_dict_out;
                    std::ofstream df(dpath, std::ios::binary);
                    df.write(reinterpret_cast<const char*>(db.data()),
                             static_cast<std::streamsize>(db.size()));
                    std::cout << "dictionary: " << dpath << "\n";
                }
            }
            std::cout << "wrote " << b_out << "\n";
        } else if (*query) {
            const SecureMode mode = parse_mode(q_mode);
            const Query q{parse_query_coords(q_point)};
            std::vector<Point> answer;
            if (mode == SecureMode::kPlain) {
                if (q_data.empty())
                    throw std::runtime_error("plain query needs --data for filtering");
                const Dataset D = ingest_csv(q_data);
                auto [hdr, idxs] = load_indexes(q_index);
                const std::vector<PointId> cand = query_all(idxs, q);
                for (PointId id : client_filter(D, cand, q)) answer.push_back(D[id]);
            } else {
                std::ifstream f(q_index, std::ios::binary);
                if (!f) throw std::runtime_error("cannot open " + q_index);
                const Bytes bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
                const EncIndexSet enc = deserialize_enc_indexes(bytes);
                const SecretKeys keys = SecretKeys::from_seed(q_key_seed);
                OpeDictionary dict;
                if (mode == SecureMode::kMope) {
                    if (q_dict.empty()) throw std::runtime_error("mope query needs --dict");
                    std::ifstream df(q_dict, std::ios::binary);
                    const Bytes db((std::istreambuf_iterator<char>(df)),
                                   std::istreambuf_iterator<char>());
                    dict = OpeDictionary::deserialize(db);
                }
                answer = secure_query(mode == SecureMode::kMope ? &dict : nullptr, keys,
                                      enc, q);
            }
            for (const Point& p : answer) {
                std::cout << p.id << ":";
                for (int i = 0; i < p.dim(); ++i)
                    std::cout << (i ? "," : " ") << p[i] / 2;
                std::cout << "\n";
            }
        } else if (*bench) {
            cfg.dist = parse_dist(be_dist);
            cfg.csv_path = be_csv;
            cfg.solver = parse_solver(be_solver);
            cfg.mode = parse_mode(be_mode);
            const Measurements m = run_benchmark(cfg);
            std::ostringstream ss;
            ss << measurements_csv_header() << "\n" << measurements_csv_row(cfg, m) << "\n";
            write_or_print(be_out, ss.str());
        } else if (*render) {
            const Dataset D = ingest_csv(r_data);
            if (D.dim != 2) throw std::runtime_error("render requires d == 2 data");
            const size_t l = r_l == 0 || r_l > D.size() ? D.size() : r_l;
            auto tilings = build_group_tilings(D, l, r_seed);
            if (r_group >= tilings.size())
                throw std::runtime_error("group ordinal out of range");
            render_tiles_svg(tilings[r_group], r_out);
            std::cout << "wrote " << r_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
