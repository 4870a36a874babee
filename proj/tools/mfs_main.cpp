#include "mfs/bench.hpp"
#include "mfs/dataset.hpp"
#include "mfs/doe.hpp"
#include "mfs/free_fall.hpp"
#include "mfs/surrogate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_manifest(const fs::path& dir, const json& config) {
    json man;
    man["tool"] = "mfs";
    man["version"] = kVersion;
    man["timestamp"] = timestamp();
    man["config"] = config;
    std::ofstream out(dir / "manifest.json.run");
    out << man.dump(2) << '\n';
    // dataset directories already carry a manifest.json; keep the run record
    // separate so the two never collide
    fs::rename(dir / "manifest.json.run", dir / "run_manifest.json");
}

std::vector<std::string> parse_surrogates(const std::string& arg, double ric) {
    std::vector<std::string> names;
    if (arg == "all") {
        for (const auto& s : mfs::catalog(ric)) names.push_back(s.name);
        return names;
    }
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        mfs::spec_by_name(tok, ric);  // validates
        names.push_back(tok);
    }
    if (names.empty()) throw mfs::Error("no surrogates selected");
    return names;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-fidelity surrogates for functional outputs: data generation, "
                 "benchmarking and reporting"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "generate a viscous-free-fall dataset directory");
    std::string g_case = "vff", g_variant = "no-ground", g_out;
    mfs::Index g_n1 = 8, g_n2 = 8, g_nodes = 101;
    std::uint64_t g_seed = 42;
    double g_horizon = 2.0, g_ode_tol = 1e-8;
    gen->add_option("--case", g_case, "case id (vff)")->capture_default_str();
    gen->add_option("--variant", g_variant, "ground | no-ground")->capture_default_str();
    gen->add_option("--n1", g_n1, "high-fidelity sample count")->capture_default_str();
    gen->add_option("--n2", g_n2, "low-fidelity sample count")->capture_default_str();
    gen->add_option("--seed", g_seed, "DoE seed")->capture_default_str();
    gen->add_option("--nodes", g_nodes, "mesh nodes (time steps)")->capture_default_str();
    gen->add_option("--horizon", g_horizon, "simulated duration, s")->capture_default_str();
    gen->add_option("--ode-tol", g_ode_tol, "HF integrator relative tolerance")->capture_default_str();
    gen->add_option("--out", g_out, "output dataset directory")->required();

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "run the repetition protocol over the (n1,n2) grid");
    std::string b_case = "vff", b_variant = "no-ground", b_dataset, b_out, b_surrogates = "all";
    std::vector<int> b_n1m = {2, 5, 10}, b_n2m = {1, 5, 10};
    int b_reps = 10, b_jobs = 0;
    mfs::Index b_nv = 1000, b_nodes = 101;
    double b_ric = 0.999, b_horizon = 2.0, b_ode_tol = 1e-8;
    std::uint64_t b_seed = 42;
    bench->add_option("--case", b_case, "case id (vff)")->capture_default_str();
    bench->add_option("--variant", b_variant, "ground | no-ground")->capture_default_str();
    bench->add_option("--dataset", b_dataset, "benchmark an ingested dataset directory instead");
    bench->add_option("--surrogates", b_surrogates, "'all' or comma-separated names")
        ->capture_default_str();
    bench->add_option("--n1-mult", b_n1m, "n1 multipliers of dim(U)")->capture_default_str();
    bench->add_option("--n2-mult", b_n2m, "n2 multipliers of n1")->capture_default_str();
    bench->add_option("--reps", b_reps, "repetitions per (n1,n2)")->capture_default_str();
    bench->add_option("--nv", b_nv, "validation sample count")->capture_default_str();
    bench->add_option("--ric", b_ric, "PCA relative information content")->capture_default_str();
    bench->add_option("--seed", b_seed, "base seed")->capture_default_str();
    bench->add_option("--jobs", b_jobs, "worker threads (0: hardware)")->capture_default_str();
    bench->add_option("--nodes", b_nodes, "mesh nodes for the vff case")->capture_default_str();
    bench->add_option("--horizon", b_horizon, "vff simulated duration, s")->capture_default_str();
    bench->add_option("--ode-tol", b_ode_tol, "vff HF integrator tolerance")->capture_default_str();
    bench->add_option("--out", b_out, "output directory")->required();

    // ---- report ----
    auto* rep = app.add_subcommand("report", "recompute summaries and rankings from results");
    std::string r_results, r_out;
    rep->add_option("--results", r_results, "results.csv path")->required();
    rep->add_option("--out", r_out, "directory for summary/ranking files (default: stdout only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    // semantic validation of names and selections: usage errors, exit code 1
    try {
        if (*gen) {
            if (g_case != "vff") throw mfs::Error("unknown case '" + g_case + "'");
            mfs::free_fall::variant_from_string(g_variant);
        }
        if (*bench) {
            if (b_dataset.empty() && b_case != "vff")
                throw mfs::Error("unknown case '" + b_case + "'");
            mfs::free_fall::variant_from_string(b_variant);
            parse_surrogates(b_surrogates, b_ric);
            if (!(b_ric > 0.0) || b_ric > 1.0) throw mfs::Error("--ric must be in (0, 1]");
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }

    try {
        if (*gen) {
            mfs::free_fall::CaseOptions opt;
            opt.variant = mfs::free_fall::variant_from_string(g_variant);
            opt.n_nodes = g_nodes;
            opt.horizon = g_horizon;
            opt.ode_tol = g_ode_tol;
            const auto doe =
                mfs::nested_lhs(g_n1, g_n2, mfs::free_fall::benchmark_domain(), g_seed);
            const auto ds = mfs::free_fall::generate_case(doe, opt);
            mfs::save_dataset(ds, g_out);
            write_manifest(g_out, json{{"command", "generate"},
                                       {"case", g_case},
                                       {"variant", g_variant},
                                       {"n1", g_n1},
                                       {"n2", g_n2},
                                       {"seed", g_seed},
                                       {"nodes", g_nodes},
                                       {"horizon", g_horizon},
                                       {"ode_tol", g_ode_tol}});
            std::printf("wrote %s (%lld HF x %lld, %lld LF x %lld)\n", g_out.c_str(),
                        static_cast<long long>(ds.hf.size()),
                        static_cast<long long>(ds.hf.field_dim()),
                        static_cast<long long>(ds.lf.size()),
                        static_cast<long long>(ds.lf.field_dim()));
            return 0;
        }

        if (*bench) {
            mfs::BenchConfig cfg;
            cfg.n1_multipliers = b_n1m;
            cfg.n2_multipliers = b_n2m;
            cfg.repetitions = b_reps;
            cfg.n_v = b_nv;
            cfg.ric = b_ric;
            cfg.seed = b_seed;
            cfg.jobs = b_jobs > 0 ? b_jobs
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
            const auto names = parse_surrogates(b_surrogates, b_ric);

            std::unique_ptr<mfs::CaseProvider> cas;
            if (!b_dataset.empty()) {
                cas = std::make_unique<mfs::IngestedCase>(mfs::load_dataset(b_dataset), "ingested",
                                                          b_nv, mfs::derive_seed(b_seed, 0xA1));
            } else {
                if (b_case != "vff") throw mfs::Error("unknown case '" + b_case + "'");
                mfs::free_fall::CaseOptions opt;
                opt.variant = mfs::free_fall::variant_from_string(b_variant);
                opt.n_nodes = b_nodes;
                opt.horizon = b_horizon;
                opt.ode_tol = b_ode_tol;
                cas = std::make_unique<mfs::FreeFallCase>(opt, b_nv,
                                                          mfs::derive_seed(b_seed, 0xA1));
            }

            const auto results = mfs::run_protocol(*cas, cfg, names);
            fs::create_directories(b_out);
            mfs::write_results(results, fs::path(b_out) / "results.csv");
            mfs::write_summary(mfs::summarize(results), fs::path(b_out) / "summary.csv");
            mfs::write_ranking(mfs::rank_results(results), fs::path(b_out) / "ranking.csv");
            write_manifest(b_out, json{{"command", "bench"},
                                       {"case", b_dataset.empty() ? b_case : b_dataset},
                                       {"variant", b_variant},
                                       {"surrogates", names},
                                       {"n1_mult", b_n1m},
                                       {"n2_mult", b_n2m},
                                       {"reps", b_reps},
                                       {"nv", b_nv},
                                       {"ric", b_ric},
                                       {"seed", b_seed},
                                       {"nodes", b_nodes},
                                       {"horizon", b_horizon},
                                       {"ode_tol", b_ode_tol}});

            std::size_t failed = 0;
            for (const auto& r : results) failed += r.failed ? 1 : 0;
            std::printf("%zu rows (%zu failed) -> %s\n", results.size(), failed, b_out.c_str());
            if (failed == results.size()) return 3;
            if (failed > 0) return 2;
            return 0;
        }

        if (*rep) {
            const auto results = mfs::read_results(r_results);
            const auto summary = mfs::summarize(results);
            const auto ranking = mfs::rank_results(results);
            if (!r_out.empty()) {
                fs::create_directories(r_out);
                mfs::write_summary(summary, fs::path(r_out) / "summary.csv");
                mfs::write_ranking(ranking, fs::path(r_out) / "ranking.csv");
                write_manifest(r_out, json{{"command", "report"}, {"results", r_results}});
            }
            std::printf("surrogate  within1.05  within1.25  within2.00  (of %d combinations)\n",
                        ranking.combinations_used);
            for (const auto& e : ranking.entries)
                std::printf("%-20s %4d %4d %4d\n", e.surrogate.c_str(), e.within_105,
                            e.within_125, e.within_200);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
