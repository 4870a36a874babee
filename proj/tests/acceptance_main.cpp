// Acceptance suite: runs every benchmark-level criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Heavier than the
// unit tests (the data-rich criterion trains co-Kriging stacks on 400-sample
// designs); expect tens of minutes total on two cores.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include "mfs/bench.hpp"
#include "mfs/doe.hpp"
#include "mfs/free_fall.hpp"
#include "mfs/gp.hpp"
#include "mfs/metrics.hpp"
#include "mfs/pca.hpp"
#include "mfs/procrustes.hpp"
#include "mfs/surrogate.hpp"
#include "mfs/tenscov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

using namespace mfs;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr std::uint64_t kValidationSeed = 9000;

int g_jobs = 2;

const FreeFallCase& case_for(free_fall::Variant v) {
    static std::map<int, std::unique_ptr<FreeFallCase>> cache;
    const int key = static_cast<int>(v);
    if (!cache.count(key)) {
        free_fall::CaseOptions opt;
        opt.variant = v;
        cache[key] = std::make_unique<FreeFallCase>(opt, 1000, kValidationSeed);
    }
    return *cache[key];
}

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

// ---------------------------------------------------------------- criterion 1
// decomposition identity e^2 = e_dr^2 + e_ism^2 for the PCA-based fusion
// surrogates whose prediction factors exactly through the HF DR
Check criterion1() {
    Check c;
    const std::vector<std::string> fusion = {
        "F-CPCA-AR1",   "F-HFPCA-AR1",    "F-MFPCA-AR1", "F-MFPCA-CategGPR",
        "F-SFPCA-AR1",  "F-SFPCA-MA-AR1", "F-LFPCA-AR1",
    };
    double worst = 0.0;
    for (auto variant : {free_fall::Variant::no_ground, free_fall::Variant::ground}) {
        const FreeFallCase& cas = case_for(variant);
        const auto ds = cas.training_set(8, 40, derive_seed(kSeed, 81));
        for (const auto& name : fusion) {
            TrainOptions topt;
            topt.seed = derive_seed(kSeed, 82);
            const TrainedSurrogate s = train(spec_by_name(name), ds, topt);
            const Matrix pred = predict_rows(s, cas.validation_inputs());
            const double e = rmse(pred, cas.validation_fields());
            const double edr = dr_error(*s.hf_dr(), cas.validation_fields());
            const Matrix zhat = predict_latent_rows(s, cas.validation_inputs());
            const double eism = ism_error(*s.hf_dr(), zhat, cas.validation_fields());
            const double defect = std::abs(e * e - (edr * edr + eism * eism)) / (e * e);
            worst = std::max(worst, defect);
            c.require(defect < 1e-8, name + " (" + free_fall::to_string(variant) +
                                         "): defect " + std::to_string(defect));
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst relative defect %.3g", worst);
    if (c.pass) c.detail = buf;
    return c;
}

// ---------------------------------------------------------------- criterion 2
// oracle equivalences: kronecker == dense, AR1 degenerate == single GP,
// gappy reconstruction reproduces training pairs at ric = 1
Check criterion2() {
    Check c;

    // (a) tensorized vs dense covariance on an n*d_y = 200 instance
    {
        const auto doe = nested_lhs(8, 8, free_fall::benchmark_domain(), 7);
        Matrix fields(8, 25);
        for (Index i = 0; i < 8; ++i) {
            const auto p = free_fall::BallParams::from_vector(doe.u1.row(i));
            fields.row(i) = free_fall::lf_trajectory(p, 25, 2.0).transpose();
        }
        Mesh mesh;
        mesh.coords = free_fall::time_grid(25, 2.0);
        Vector ls_u(4), ls_x(1);
        ls_u << 0.2, 10.0, 90.0, 0.9;
        ls_x << 1.0;
        TensCovFitOptions topt;
        topt.fixed_input_lengthscales = ls_u;
        topt.fixed_mesh_lengthscales = ls_x;
        const TensCovGpModel kron = fit_tenscov(doe.u1, mesh, fields, topt);

        // dense predictor over the materialized 200 x 200 covariance
        const Vector mean_field = fields.colwise().mean();
        const Matrix centered = fields.rowwise() - mean_field.transpose();
        Matern52Kernel ku, kx;
        ku.lengthscales = ls_u;
        kx.lengthscales = ls_x;
        Matrix ru(8, 8), rx(25, 25);
        for (Index i = 0; i < 8; ++i)
            for (Index j = 0; j < 8; ++j)
                ru(i, j) = ku.correlation(doe.u1.row(i), doe.u1.row(j));
        for (Index a = 0; a < 25; ++a)
            for (Index b = 0; b < 25; ++b)
                rx(a, b) = kx.correlation(mesh.coords.row(a), mesh.coords.row(b));
        Matrix big(200, 200);
        for (Index i = 0; i < 8; ++i)
            for (Index j = 0; j < 8; ++j) big.block(i * 25, j * 25, 25, 25) = ru(i, j) * rx;
        Vector vec(200);
        for (Index i = 0; i < 8; ++i) vec.segment(i * 25, 25) = centered.row(i).transpose();
        const Vector sol = big.fullPivLu().solve(vec);

        const Matrix probes = lhs(5, free_fall::benchmark_domain(), 11);
        double worst = 0.0;
        for (Index p = 0; p < probes.rows(); ++p) {
            Vector k(8);
            for (Index i = 0; i < 8; ++i) k[i] = ku.correlation(doe.u1.row(i), probes.row(p));
            Matrix cross(25, 200);
            for (Index i = 0; i < 8; ++i) cross.block(0, i * 25, 25, 25) = k[i] * rx;
            const Vector dense = mean_field + cross * sol;
            worst = std::max(worst,
                             (kron.predict(probes.row(p)) - dense).lpNorm<Eigen::Infinity>());
        }
        c.require(worst < 1e-8, "kronecker/dense mismatch " + std::to_string(worst));
    }

    // (b) AR1 with identical fidelities vs single-fidelity GP
    {
        Matrix x(9, 1);
        for (Index i = 0; i < 9; ++i) x(i, 0) = static_cast<double>(i) / 8.0;
        Vector y(9);
        for (Index i = 0; i < 9; ++i) y[i] = std::cos(3.0 * x(i, 0)) + 0.4 * x(i, 0);
        GpFitOptions opt;
        opt.nugget = 1e-10;
        opt.seed = 19;
        const Ar1Model ar = fit_ar1(x, y, x, y, opt);
        GpFitOptions single = opt;
        single.seed = derive_seed(opt.seed, 0x1f);
        const GpModel g = fit_gp(x, y, single);
        double worst = 0.0;
        for (double qv : {0.03, 0.21, 0.48, 0.66, 0.94}) {
            Vector q(1);
            q << qv;
            worst = std::max(worst, std::abs(ar.predict(q).mean - g.predict(q).mean));
        }
        c.require(worst < 1e-6, "AR1/GP mismatch " + std::to_string(worst));
    }

    // (c) gappy reconstruction of training pairs at ric = 1
    {
        const auto ds = case_for(free_fall::Variant::no_ground)
                            .training_set(6, 6, derive_seed(kSeed, 83));
        const GpcaModel g = fit_gpca(ds.hf.outputs, ds.lf.outputs, 1.0);
        double worst = 0.0;
        for (Index i = 0; i < 6; ++i) {
            const Vector rec = gappy_predict(g, ds.lf.outputs.row(i));
            worst = std::max(worst,
                             (rec - ds.hf.outputs.row(i).transpose()).lpNorm<Eigen::Infinity>());
        }
        c.require(worst < 1e-8, "gappy training-pair defect " + std::to_string(worst));
    }
    if (c.pass) c.detail = "kronecker==dense, AR1==GP, gappy exact";
    return c;
}

// ---------------------------------------------------------------- criterion 3
// latent dimension intervals at (n1, n2) = (40, 400), ric 0.999, 10 reps
Check criterion3() {
    Check c;
    struct Cell {
        const char* pca;
        int lo, hi;
    };
    const std::map<int, std::vector<Cell>> expected = {
        {0, {{"HFPCA", 2, 3}, {"LFPCA", 2, 2}, {"MFPCA", 3, 3}, {"DiffPCA", 3, 3}}},
        {1, {{"HFPCA", 2, 3}, {"LFPCA", 3, 4}, {"MFPCA", 4, 4}, {"DiffPCA", 3, 4}}},
    };

    for (auto variant : {free_fall::Variant::no_ground, free_fall::Variant::ground}) {
        const FreeFallCase& cas = case_for(variant);
        std::map<std::string, std::pair<int, int>> observed;
        for (int rep = 0; rep < 10; ++rep) {
            const auto ds = cas.training_set(40, 400, derive_seed(kSeed, 40, 400, rep));
            Matrix stacked(440, ds.hf.field_dim());
            stacked << ds.hf.outputs, ds.lf.outputs;
            Matrix diff(40, ds.hf.field_dim());
            for (Index k = 0; k < 40; ++k) {
                const auto [i, j] = ds.common_index[static_cast<std::size_t>(k)];
                diff.row(k) = ds.hf.outputs.row(i) - ds.lf.outputs.row(j);
            }
            const std::map<std::string, int> dz = {
                {"HFPCA", static_cast<int>(fit_pca(ds.hf.outputs, 0.999).latent_dim())},
                {"LFPCA", static_cast<int>(fit_pca(ds.lf.outputs, 0.999).latent_dim())},
                {"MFPCA", static_cast<int>(fit_pca(stacked, 0.999).latent_dim())},
                {"DiffPCA", static_cast<int>(fit_pca(diff, 0.999).latent_dim())},
            };
            for (const auto& [name, v] : dz) {
                if (!observed.count(name)) observed[name] = {v, v};
                observed[name].first = std::min(observed[name].first, v);
                observed[name].second = std::max(observed[name].second, v);
            }
        }
        for (const Cell& cell : expected.at(static_cast<int>(variant))) {
            const auto [lo, hi] = observed.at(cell.pca);
            std::printf("  criterion 3 %-10s %-8s observed [%d,%d], table [%d,%d]\n",
                        free_fall::to_string(variant).c_str(), cell.pca, lo, hi, cell.lo,
                        cell.hi);
            c.require(lo == cell.lo && hi == cell.hi,
                      std::string(cell.pca) + "(" + free_fall::to_string(variant) + ") [" +
                          std::to_string(lo) + "," + std::to_string(hi) + "] != [" +
                          std::to_string(cell.lo) + "," + std::to_string(cell.hi) + "]");
        }
    }
    if (c.pass) c.detail = "all eight intervals match";
    return c;
}

// ---------------------------------------------------------------- criterion 4
// scarce-data benchmark: median normed RMSE of C-DiffPCA-GPR in [0.06, 0.25]
// and strictly below M-SFPCA-GPR at (8, 8), 10 repetitions
Check criterion4() {
    Check c;
    BenchConfig cfg;
    cfg.n1_multipliers = {2};
    cfg.n2_multipliers = {1};
    cfg.repetitions = 10;
    cfg.n_v = 1000;
    cfg.seed = kSeed;
    cfg.jobs = g_jobs;
    const auto results = run_protocol(case_for(free_fall::Variant::no_ground), cfg,
                                      {"C-DiffPCA-GPR", "M-SFPCA-GPR"});
    std::vector<double> diffpca, mapping;
    for (const auto& r : results) {
        c.require(!r.failed, r.surrogate + " rep " + std::to_string(r.rep) + ": " + r.error);
        if (r.failed) continue;
        (r.surrogate == "C-DiffPCA-GPR" ? diffpca : mapping).push_back(r.e_norm);
    }
    const double med_c = median(diffpca), med_m = median(mapping);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "median e_norm: C-DiffPCA-GPR %.4f, M-SFPCA-GPR %.4f", med_c,
                  med_m);
    c.detail = buf;
    c.require(med_c >= 0.06 && med_c <= 0.25, "C-DiffPCA-GPR median outside [0.06, 0.25]");
    c.require(med_c < med_m, "C-DiffPCA-GPR not below M-SFPCA-GPR");
    return c;
}

// ---------------------------------------------------------------- criterion 5
// data-rich benchmark: median normed RMSE of F-CPCA-AR1 <= 0.05 and below
// both single-fidelity references at (40, 400), 10 repetitions
Check criterion5() {
    Check c;
    BenchConfig cfg;
    cfg.n1_multipliers = {10};
    cfg.n2_multipliers = {10};
    cfg.repetitions = 10;
    cfg.n_v = 1000;
    cfg.seed = kSeed;
    cfg.jobs = g_jobs;
    const auto results = run_protocol(case_for(free_fall::Variant::no_ground), cfg,
                                      {"F-CPCA-AR1", "S-HFPCA-GPR", "TensCovGPR"});
    std::map<std::string, std::vector<double>> by_name;
    for (const auto& r : results) {
        c.require(!r.failed, r.surrogate + " rep " + std::to_string(r.rep) + ": " + r.error);
        if (!r.failed) by_name[r.surrogate].push_back(r.e_norm);
    }
    const double cpca = median(by_name["F-CPCA-AR1"]);
    const double shf = median(by_name["S-HFPCA-GPR"]);
    const double tens = median(by_name["TensCovGPR"]);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "median e_norm: F-CPCA-AR1 %.5f, S-HFPCA-GPR %.5f, TensCovGPR %.5f", cpca, shf,
                  tens);
    c.detail = buf;
    c.require(cpca <= 0.05, "F-CPCA-AR1 median above 0.05");
    c.require(cpca < shf && cpca < tens, "F-CPCA-AR1 not below both single-fidelity references");
    return c;
}

// ---------------------------------------------------------------- criterion 6
// standalone property battery
Check criterion6() {
    Check c;
    Rng rng(123);

    // PCA orthonormality and exact round trip at ric = 1
    {
        Matrix y(20, 60);
        for (Index i = 0; i < y.rows(); ++i)
            for (Index j = 0; j < y.cols(); ++j) y(i, j) = rng.uniform(-1.0, 1.0);
        const PcaModel m = fit_pca(y, 1.0);
        const Matrix gram = m.modes() * m.modes().transpose();
        c.require((gram - Matrix::Identity(gram.rows(), gram.cols())).lpNorm<Eigen::Infinity>() <
                      1e-10,
                  "PCA modes not orthonormal");
        c.require((m.inverse_rows(m.transform_rows(y)) - y).lpNorm<Eigen::Infinity>() < 1e-10,
                  "PCA round trip not exact at ric=1");

        Index prev = 0;
        for (double ric : {0.5, 0.9, 0.99, 0.999, 1.0}) {
            const Index dz = fit_pca(y, ric).latent_dim();
            c.require(dz >= prev, "RIC truncation not monotone");
            prev = dz;
        }
    }

    // Procrustes recovery of a constructed similarity transform
    {
        Matrix src(30, 3);
        for (Index i = 0; i < 30; ++i)
            for (Index j = 0; j < 3; ++j) src(i, j) = rng.uniform(-1.0, 1.0);
        Matrix q(3, 3);
        const double a = 0.9;
        q << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
        Vector t(3);
        t << 0.4, -0.2, 1.1;
        const Matrix tgt = (1.7 * src * q).rowwise() + t.transpose();
        const MaTransform ma = fit_procrustes(src, tgt);
        c.require(std::abs(ma.scale - 1.7) < 1e-8 &&
                      (ma.rotation - q).lpNorm<Eigen::Infinity>() < 1e-8 &&
                      (ma.translation - t).norm() < 1e-8,
                  "Procrustes did not recover the constructed transform");
    }

    // GP interpolation at training points
    {
        Matrix x(5, 1);
        x << 0.05, 0.3, 0.5, 0.72, 0.95;
        Vector y(5);
        for (Index i = 0; i < 5; ++i) y[i] = std::sin(6.0 * x(i, 0));
        GpFitOptions opt;
        opt.seed = 31;
        const GpModel m = fit_gp(x, y, opt);
        for (Index i = 0; i < 5; ++i)
            c.require(std::abs(m.predict(x.row(i)).mean - y[i]) < 1e-5,
                      "GP does not interpolate its training data");
    }

    // nested DoE inclusion
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const auto doe = nested_lhs(8, 40, free_fall::benchmark_domain(), seed);
        c.require(doe.u2.rows() == 40, "nested DoE size wrong");
        for (Index i = 0; i < doe.u1.rows(); ++i) {
            bool found = false;
            for (Index j = 0; j < doe.u2.rows() && !found; ++j)
                found = doe.u1.row(i) == doe.u2.row(j);
            c.require(found, "U1 not contained in U2");
        }
    }

    // normed RMSE of the mean predictor is exactly 1
    {
        Matrix truths(50, 7);
        for (Index i = 0; i < truths.rows(); ++i)
            for (Index j = 0; j < truths.cols(); ++j) truths(i, j) = rng.uniform(-3.0, 3.0);
        const Vector mean = truths.colwise().mean();
        Matrix pred(truths.rows(), truths.cols());
        for (Index i = 0; i < truths.rows(); ++i) pred.row(i) = mean.transpose();
        c.require(std::abs(normed_rmse(rmse(pred, truths), truths) - 1.0) < 1e-12,
                  "mean predictor normed RMSE != 1");
    }

    // rank threshold monotonicity
    {
        std::vector<BenchResult> rs;
        for (int rep = 0; rep < 8; ++rep)
            for (const char* n : {"A", "B", "C"}) {
                BenchResult r;
                r.surrogate = n;
                r.case_id = "synthetic";
                r.n1 = 4;
                r.n2 = 4;
                r.rep = rep;
                r.e = 0.5 + rng.uniform();
                r.e_norm = r.e;
                rs.push_back(r);
            }
        for (const auto& e : rank_results(rs).entries)
            c.require(e.within_105 <= e.within_125 && e.within_125 <= e.within_200,
                      "rank threshold counts not monotone");
    }

    if (c.pass) c.detail = "PCA, Procrustes, GP, DoE, metric and ranking properties hold";
    return c;
}

// ---------------------------------------------------------------- criterion 7
// determinism: the full (8,8) protocol twice with the same seed produces
// bit-identical RMSE columns
Check criterion7() {
    Check c;
    BenchConfig cfg;
    cfg.n1_multipliers = {2};
    cfg.n2_multipliers = {1};
    cfg.repetitions = 10;
    cfg.n_v = 1000;
    cfg.seed = kSeed;
    cfg.jobs = g_jobs;
    std::vector<std::string> names;
    for (const auto& s : catalog()) names.push_back(s.name);

    const auto r1 = run_protocol(case_for(free_fall::Variant::no_ground), cfg, names);
    const auto r2 = run_protocol(case_for(free_fall::Variant::no_ground), cfg, names);
    c.require(r1.size() == r2.size(), "row count mismatch");
    int failures = 0;
    for (std::size_t i = 0; i < std::min(r1.size(), r2.size()); ++i) {
        c.require(r1[i].surrogate == r2[i].surrogate && r1[i].rep == r2[i].rep,
                  "row ordering mismatch");
        if (r1[i].failed || r2[i].failed) ++failures;
        const bool same_e = (r1[i].e == r2[i].e) ||
                            (std::isnan(r1[i].e) && std::isnan(r2[i].e));
        c.require(same_e, r1[i].surrogate + " rep " + std::to_string(r1[i].rep) +
                              ": e differs between runs");
    }
    c.require(failures == 0, std::to_string(failures) + " failed rows");
    if (c.pass) c.detail = std::to_string(r1.size()) + " rows bit-identical across runs";
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("--jobs=", 0) == 0) {
            g_jobs = std::max(1, std::stoi(a.substr(7)));
            continue;
        }
        wanted.insert(std::stoi(a));
    }
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7};

    const std::map<int, Check (*)()> criteria = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7},
    };
    const std::map<int, std::string> titles = {
        {1, "error decomposition identity"},
        {2, "oracle equivalences"},
        {3, "latent dimension intervals"},
        {4, "scarce-data benchmark (8,8)"},
        {5, "data-rich benchmark (40,400)"},
        {6, "property suites"},
        {7, "protocol determinism"},
    };

    int failures = 0;
    for (int id : wanted) {
        if (!criteria.count(id)) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        Check c;
        try {
            c = criteria.at(id)();
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("exception: ") + e.what();
        }
        std::printf("[criterion %d] %s — %s: %s\n", id, c.pass ? "PASS" : "FAIL",
                    titles.at(id).c_str(), c.detail.c_str());
        std::fflush(stdout);
        failures += c.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
