#include "mfs/bench.hpp"

#include "mfs/doe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

namespace mfs {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

double median(std::vector<double> values) {
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

FreeFallCase::FreeFallCase(free_fall::CaseOptions opt, Index n_v, std::uint64_t validation_seed)
    : opt_(opt) {
    const BoxDomain box = free_fall::benchmark_domain();
    val_inputs_ = lhs(n_v, box, validation_seed);
    val_fields_.resize(n_v, opt_.n_nodes);
    for (Index i = 0; i < n_v; ++i) {
        const auto p = free_fall::BallParams::from_vector(val_inputs_.row(i));
        Vector y = free_fall::hf_trajectory(p, opt_.n_nodes, opt_.horizon, opt_.ode_tol);
        if (opt_.variant == free_fall::Variant::ground) y = free_fall::apply_ground(y);
        val_fields_.row(i) = y.transpose();
    }
}

std::string FreeFallCase::id() const {
    return std::string("vff-") + free_fall::to_string(opt_.variant);
}

MultiFidelityDataset FreeFallCase::training_set(Index n1, Index n2, std::uint64_t seed) const {
    const NestedDoe doe = nested_lhs(n1, n2, free_fall::benchmark_domain(), seed);
    return free_fall::generate_case(doe, opt_);
}

LfFieldProvider FreeFallCase::lf_provider() const {
    const free_fall::CaseOptions opt = opt_;
    return [opt](const Vector& u) {
        const auto p = free_fall::BallParams::from_vector(u);
        Vector y = free_fall::lf_trajectory(p, opt.n_nodes, opt.horizon);
        if (opt.variant == free_fall::Variant::ground) y = free_fall::apply_ground(y);
        return y;
    };
}

IngestedCase::IngestedCase(MultiFidelityDataset pool, std::string id, Index n_v,
                           std::uint64_t validation_seed)
    : pool_(std::move(pool)), id_(std::move(id)) {
    // validation: a reserved random subset of the HF snapshots
    const Index n_hf = pool_.hf.size();
    std::vector<Index> perm(static_cast<std::size_t>(n_hf));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(validation_seed);
    for (Index i = n_hf - 1; i > 0; --i) {
        const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    const Index nv = std::min<Index>(n_v, std::max<Index>(1, n_hf / 2));
    val_hf_rows_.assign(perm.begin(), perm.begin() + nv);
    reserved_hf_.assign(static_cast<std::size_t>(n_hf), 0);
    for (Index r : val_hf_rows_) reserved_hf_[static_cast<std::size_t>(r)] = 1;

    val_inputs_.resize(nv, pool_.input_dim());
    val_fields_.resize(nv, pool_.hf.field_dim());
    for (Index k = 0; k < nv; ++k) {
        val_inputs_.row(k) = pool_.hf.inputs.row(val_hf_rows_[static_cast<std::size_t>(k)]);
        val_fields_.row(k) = pool_.hf.outputs.row(val_hf_rows_[static_cast<std::size_t>(k)]);
    }
}

MultiFidelityDataset IngestedCase::training_set(Index n1, Index n2, std::uint64_t seed) const {
    // bounding box of the pool inputs drives the LHS draw
    Vector lo(pool_.input_dim()), hi(pool_.input_dim());
    for (Index k = 0; k < pool_.input_dim(); ++k) {
        lo[k] = pool_.lf.inputs.col(k).minCoeff();
        hi[k] = pool_.lf.inputs.col(k).maxCoeff();
        if (!(lo[k] < hi[k])) hi[k] = lo[k] + 1.0;
    }
    const NestedDoe doe = nested_lhs(n1, n2, BoxDomain(lo, hi), seed);

    // nearest unused pool sample per DoE row; the first n1 rows must carry an
    // HF snapshot, so they match within the paired (common) rows only
    std::vector<char> used_lf(static_cast<std::size_t>(pool_.lf.size()), 0);
    std::vector<Index> lf_rows(static_cast<std::size_t>(n2), -1);
    std::vector<Index> hf_rows(static_cast<std::size_t>(n1), -1);

    std::vector<Index> lf_to_hf(static_cast<std::size_t>(pool_.lf.size()), -1);
    for (const auto& [i, j] : pool_.common_index) lf_to_hf[static_cast<std::size_t>(j)] = i;

    for (Index r = 0; r < n2; ++r) {
        const bool needs_hf = r < n1;
        double best = std::numeric_limits<double>::infinity();
        Index best_j = -1;
        for (Index j = 0; j < pool_.lf.size(); ++j) {
            if (used_lf[static_cast<std::size_t>(j)]) continue;
            const Index hf_row = lf_to_hf[static_cast<std::size_t>(j)];
            if (needs_hf &&
                (hf_row < 0 || reserved_hf_[static_cast<std::size_t>(hf_row)]))
                continue;
            const double d = (pool_.lf.inputs.row(j) - doe.u2.row(r)).squaredNorm();
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        if (best_j < 0)
            throw Error("ingested case: pool exhausted while drawing training set (n1=" +
                        std::to_string(n1) + ", n2=" + std::to_string(n2) + ")");
        used_lf[static_cast<std::size_t>(best_j)] = 1;
        lf_rows[static_cast<std::size_t>(r)] = best_j;
        if (needs_hf) hf_rows[static_cast<std::size_t>(r)] = lf_to_hf[static_cast<std::size_t>(best_j)];
    }

    MultiFidelityDataset out;
    out.hf.fidelity = 1;
    out.lf.fidelity = 2;
    out.hf.mesh = pool_.hf.mesh;
    out.lf.mesh = pool_.lf.mesh;
    out.hf.inputs.resize(n1, pool_.input_dim());
    out.hf.outputs.resize(n1, pool_.hf.field_dim());
    out.lf.inputs.resize(n2, pool_.input_dim());
    out.lf.outputs.resize(n2, pool_.lf.field_dim());
    for (Index r = 0; r < n1; ++r) {
        out.hf.inputs.row(r) = pool_.hf.inputs.row(hf_rows[static_cast<std::size_t>(r)]);
        out.hf.outputs.row(r) = pool_.hf.outputs.row(hf_rows[static_cast<std::size_t>(r)]);
    }
    for (Index r = 0; r < n2; ++r) {
        out.lf.inputs.row(r) = pool_.lf.inputs.row(lf_rows[static_cast<std::size_t>(r)]);
        out.lf.outputs.row(r) = pool_.lf.outputs.row(lf_rows[static_cast<std::size_t>(r)]);
    }
    out.common_index = match_common_inputs(out.hf.inputs, out.lf.inputs);
    validate_dataset(out);
    return out;
}

LfFieldProvider IngestedCase::lf_provider() const {
    const Matrix& inputs = pool_.lf.inputs;
    const Matrix& outputs = pool_.lf.outputs;
    return [&inputs, &outputs](const Vector& u) {
        for (Index j = 0; j < inputs.rows(); ++j)
            if (inputs.row(j) == u.transpose()) return Vector(outputs.row(j));
        throw Error("ingested case: no LF snapshot for the requested input");
    };
}

namespace {

struct RowTask {
    Index n1;
    Index n2;
    int rep;
    std::uint64_t seed;
};

}  // namespace

std::vector<BenchResult> run_protocol(const CaseProvider& cas, const BenchConfig& cfg,
                                      const std::vector<std::string>& surrogate_names) {
    std::vector<SurrogateSpec> specs;
    for (const auto& name : surrogate_names) specs.push_back(spec_by_name(name, cfg.ric));

    std::vector<RowTask> tasks;
    for (int m1 : cfg.n1_multipliers)
        for (int m2 : cfg.n2_multipliers)
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
                RowTask t;
                t.n1 = static_cast<Index>(m1) * cas.input_dim();
                t.n2 = static_cast<Index>(m2) * t.n1;
                t.rep = rep;
                t.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t.n1),
                                     static_cast<std::uint64_t>(t.n2),
                                     static_cast<std::uint64_t>(rep));
                tasks.push_back(t);
            }

    const LfFieldProvider lf = cas.lf_provider();
    const Matrix& val_u = cas.validation_inputs();
    const Matrix& val_y = cas.validation_fields();

    std::vector<std::vector<BenchResult>> per_task(tasks.size());
    std::atomic<std::size_t> cursor{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= tasks.size()) return;
            const RowTask& t = tasks[idx];

            MultiFidelityDataset ds;
            bool ds_ok = true;
            std::string ds_error;
            try {
                ds = cas.training_set(t.n1, t.n2, t.seed);
            } catch (const std::exception& e) {
                ds_ok = false;
                ds_error = e.what();
            }

            for (std::size_t si = 0; si < specs.size(); ++si) {
                BenchResult r;
                r.surrogate = specs[si].name;
                r.case_id = cas.id();
                r.n1 = t.n1;
                r.n2 = t.n2;
                r.rep = t.rep;
                r.e = r.e_norm = r.e_dr = r.e_ism = kNaN;
                if (!ds_ok) {
                    r.failed = true;
                    r.error = "dataset: " + ds_error;
                    per_task[idx].push_back(std::move(r));
                    continue;
                }
                try {
                    TrainOptions topt = cfg.train;
                    topt.seed = derive_seed(t.seed, 0xBE, si);
                    const TrainedSurrogate s = train(specs[si], ds, topt);
                    r.dz = s.latent_dim();
                    r.train_seconds = s.training_seconds();

                    const bool needs_lf = specs[si].needs_lf_at_predict();
                    const Matrix pred = predict_rows(s, val_u, needs_lf ? &lf : nullptr);
                    r.e = rmse(pred, val_y);
                    r.e_norm = normed_rmse(r.e, val_y);
                    if (s.has_latent_pipeline() && s.hf_dr()) {
                        r.e_dr = dr_error(*s.hf_dr(), val_y);
                        const Matrix zhat = predict_latent_rows(s, val_u);
                        r.e_ism = ism_error(*s.hf_dr(), zhat, val_y);
                    }
                } catch (const std::exception& e) {
                    r.failed = true;
                    r.error = e.what();
                }
                per_task[idx].push_back(std::move(r));
            }
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<BenchResult> results;
    for (auto& rows : per_task)
        for (auto& r : rows) results.push_back(std::move(r));
    std::sort(results.begin(), results.end(), [](const BenchResult& a, const BenchResult& b) {
        return std::tie(a.surrogate, a.n1, a.n2, a.rep) < std::tie(b.surrogate, b.n1, b.n2, b.rep);
    });
    return results;
}

Ranking rank_results(const std::vector<BenchResult>& results) {
    // combination key -> (surrogate, e)
    std::map<std::string, std::vector<std::pair<std::string, double>>> combos;
    std::map<std::string, int> expected;
    for (const auto& r : results) {
        const std::string key = std::to_string(r.n1) + "/" + std::to_string(r.n2) + "/rep" +
                                std::to_string(r.rep);
        ++expected[key];
        if (!r.failed && std::isfinite(r.e)) combos[key].emplace_back(r.surrogate, r.e);
    }

    std::vector<std::string> names;
    for (const auto& r : results)
        if (std::find(names.begin(), names.end(), r.surrogate) == names.end())
            names.push_back(r.surrogate);
    std::sort(names.begin(), names.end());

    Ranking out;
    std::map<std::string, RankEntry> entries;
    for (const auto& n : names) {
        entries[n].surrogate = n;
        entries[n].rank_histogram.assign(names.size(), 0);
    }

    for (auto& [key, rows] : combos) {
        if (rows.size() != names.size() || static_cast<int>(rows.size()) != expected[key]) {
            out.skipped_combinations.push_back(key);
            continue;
        }
        ++out.combinations_used;
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return std::tie(a.second, a.first) < std::tie(b.second, b.first);
        });
        const double best = rows.front().second;
        for (std::size_t rank = 0; rank < rows.size(); ++rank) {
            RankEntry& e = entries[rows[rank].first];
            ++e.rank_histogram[rank];
            const double v = rows[rank].second;
            if (v <= 1.05 * best) ++e.within_105;
            if (v <= 1.25 * best) ++e.within_125;
            if (v <= 2.0 * best) ++e.within_200;
        }
    }
    for (auto& [n, e] : entries) out.entries.push_back(e);
    std::sort(out.entries.begin(), out.entries.end(), [](const RankEntry& a, const RankEntry& b) {
        return std::tie(b.within_105, b.within_125, b.within_200, b.surrogate) <
               std::tie(a.within_105, a.within_125, a.within_200, a.surrogate);
    });
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<BenchResult>& results) {
    std::map<std::tuple<std::string, Index, Index>, std::vector<const BenchResult*>> groups;
    for (const auto& r : results)
        if (!r.failed) groups[{r.surrogate, r.n1, r.n2}].push_back(&r);

    std::vector<SummaryRow> rows;
    for (auto& [key, rs] : groups) {
        SummaryRow s;
        s.surrogate = std::get<0>(key);
        s.n1 = std::get<1>(key);
        s.n2 = std::get<2>(key);
        s.count = static_cast<int>(rs.size());
        auto collect = [&](auto getter) {
            std::vector<double> v;
            for (const auto* r : rs) {
                const double x = getter(*r);
                if (std::isfinite(x)) v.push_back(x);
            }
            return v;
        };
        auto mean_of = [](const std::vector<double>& v) {
            return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        };
        const auto es = collect([](const BenchResult& r) { return r.e; });
        const auto ens = collect([](const BenchResult& r) { return r.e_norm; });
        s.median_e = median(es);
        s.mean_e = mean_of(es);
        s.median_e_norm = median(ens);
        s.mean_e_norm = mean_of(ens);
        s.median_e_dr = median(collect([](const BenchResult& r) { return r.e_dr; }));
        s.median_e_ism = median(collect([](const BenchResult& r) { return r.e_ism; }));
        s.median_dz = median(collect([](const BenchResult& r) { return double(r.dz); }));
        s.median_train_seconds =
            median(collect([](const BenchResult& r) { return r.train_seconds; }));
        rows.push_back(std::move(s));
    }
    return rows;
}

void write_results(const std::vector<BenchResult>& results, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("cannot open for writing: " + file.string());
    out << "surrogate,case,n1,n2,rep,e,e_norm,e_dr,e_ism,dz,train_seconds,failed,error\n";
    for (const auto& r : results) {
        out << r.surrogate << ',' << r.case_id << ',' << r.n1 << ',' << r.n2 << ',' << r.rep << ','
            << fmt(r.e) << ',' << fmt(r.e_norm) << ',' << fmt(r.e_dr) << ',' << fmt(r.e_ism) << ','
            << r.dz << ',' << fmt(r.train_seconds) << ',' << (r.failed ? 1 : 0) << ','
            << r.error << '\n';
    }
    if (!out) throw Error("write failed: " + file.string());
}

std::vector<BenchResult> read_results(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open: " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(file.string() + ": empty results file");
    if (line.rfind("surrogate,case,", 0) != 0)
        throw Error(file.string() + ": unrecognized results header");

    std::vector<BenchResult> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> f;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() < 12)
            throw Error(file.string() + ": malformed row at line " + std::to_string(lineno));
        BenchResult r;
        try {
            r.surrogate = f[0];
            r.case_id = f[1];
            r.n1 = std::stol(f[2]);
            r.n2 = std::stol(f[3]);
            r.rep = std::stoi(f[4]);
            r.e = std::stod(f[5]);
            r.e_norm = std::stod(f[6]);
            r.e_dr = std::stod(f[7]);
            r.e_ism = std::stod(f[8]);
            r.dz = std::stol(f[9]);
            r.train_seconds = std::stod(f[10]);
            r.failed = f[11] == "1";
            if (f.size() > 12) r.error = f[12];
        } catch (const std::exception&) {
            throw Error(file.string() + ": malformed value at line " + std::to_string(lineno));
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("cannot open for writing: " + file.string());
    out << "surrogate,n1,n2,count,median_e,mean_e,median_e_norm,mean_e_norm,"
           "median_e_dr,median_e_ism,median_dz,median_train_seconds\n";
    for (const auto& s : rows) {
        out << s.surrogate << ',' << s.n1 << ',' << s.n2 << ',' << s.count << ','
            << fmt(s.median_e) << ',' << fmt(s.mean_e) << ',' << fmt(s.median_e_norm) << ','
            << fmt(s.mean_e_norm) << ',' << fmt(s.median_e_dr) << ',' << fmt(s.median_e_ism) << ','
            << fmt(s.median_dz) << ',' << fmt(s.median_train_seconds) << '\n';
    }
}

void write_ranking(const Ranking& r, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("cannot open for writing: " + file.string());
    out << "# combinations used: " << r.combinations_used << '\n';
    for (const auto& key : r.skipped_combinations)
        out << "# skipped (incomplete): " << key << '\n';
    out << "surrogate,within_1.05,within_1.25,within_2.00,rank_histogram\n";
    for (const auto& e : r.entries) {
        out << e.surrogate << ',' << e.within_105 << ',' << e.within_125 << ',' << e.within_200
            << ',';
        for (std::size_t i = 0; i < e.rank_histogram.size(); ++i) {
            if (i) out << ' ';
            out << e.rank_histogram[i];
        }
        out << '\n';
    }
}

}  // namespace mfs
