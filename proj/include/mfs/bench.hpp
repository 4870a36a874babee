#pragma once

#include "mfs/dataset.hpp"
#include "mfs/free_fall.hpp"
#include "mfs/metrics.hpp"
#include "mfs/surrogate.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mfs {

// A benchmarkable case: builds training datasets for nested DoEs, owns one
// shared validation set, and supplies the exact-LF-field provider needed by
// corrective and mapping surrogates.
class CaseProvider {
public:
    virtual ~CaseProvider() = default;
    virtual std::string id() const = 0;
    virtual Index input_dim() const = 0;
    virtual MultiFidelityDataset training_set(Index n1, Index n2, std::uint64_t seed) const = 0;
    virtual const Matrix& validation_inputs() const = 0;
    virtual const Matrix& validation_fields() const = 0;
    virtual LfFieldProvider lf_provider() const = 0;
};

// Viscous-free-fall case: training and validation data come from the two
// simulators; the LF provider is the closed form (clipped in the ground
// variant).
class FreeFallCase : public CaseProvider {
public:
    FreeFallCase(free_fall::CaseOptions opt, Index n_v, std::uint64_t validation_seed);

    std::string id() const override;
    Index input_dim() const override { return 4; }
    MultiFidelityDataset training_set(Index n1, Index n2, std::uint64_t seed) const override;
    const Matrix& validation_inputs() const override { return val_inputs_; }
    const Matrix& validation_fields() const override { return val_fields_; }
    LfFieldProvider lf_provider() const override;

    const free_fall::CaseOptions& options() const { return opt_; }

private:
    free_fall::CaseOptions opt_;
    Matrix val_inputs_;
    Matrix val_fields_;
};

// Ingested-snapshot case: training DoEs are nested LHS draws whose samples
// are replaced by the nearest unused dataset inputs; the validation set is a
// reserved subset of the paired snapshots; the LF provider is an exact
// lookup.
class IngestedCase : public CaseProvider {
public:
    IngestedCase(MultiFidelityDataset pool, std::string id, Index n_v,
                 std::uint64_t validation_seed);

    std::string id() const override { return id_; }
    Index input_dim() const override { return pool_.input_dim(); }
    MultiFidelityDataset training_set(Index n1, Index n2, std::uint64_t seed) const override;
    const Matrix& validation_inputs() const override { return val_inputs_; }
    const Matrix& validation_fields() const override { return val_fields_; }
    LfFieldProvider lf_provider() const override;

private:
    MultiFidelityDataset pool_;
    std::string id_;
    std::vector<Index> val_hf_rows_;   // reserved for validation
    std::vector<char> reserved_hf_;    // per pool HF row
    Matrix val_inputs_;
    Matrix val_fields_;
};

struct BenchConfig {
    std::vector<int> n1_multipliers = {2, 5, 10};  // of the input dimension
    std::vector<int> n2_multipliers = {1, 5, 10};  // of n1
    int repetitions = 10;
    Index n_v = 1000;
    double ric = 0.999;
    std::uint64_t seed = 42;  // per-row DoE/training seeds derive from this
    int jobs = 1;
    TrainOptions train;
};

struct BenchResult {
    std::string surrogate;
    std::string case_id;
    Index n1 = 0;
    Index n2 = 0;
    int rep = 0;
    double e = 0.0;
    double e_norm = 0.0;
    double e_dr = 0.0;   // NaN when undefined for the surrogate
    double e_ism = 0.0;  // NaN when undefined
    Index dz = 0;
    double train_seconds = 0.0;
    bool failed = false;
    std::string error;
};

// Runs the full (n1, n2, repetition) grid for the named surrogates. Training
// failures are recorded per row, never fatal. Deterministic under fixed
// seeds; rows are independent work units scheduled over cfg.jobs threads.
std::vector<BenchResult> run_protocol(const CaseProvider& cas, const BenchConfig& cfg,
                                      const std::vector<std::string>& surrogate_names);

struct RankEntry {
    std::string surrogate;
    std::vector<int> rank_histogram;  // rank_histogram[r] = times ranked r-th (0-based)
    int within_105 = 0;
    int within_125 = 0;
    int within_200 = 0;
};

struct Ranking {
    std::vector<RankEntry> entries;  // ordered by the 1.05 count, then 1.25, then 2
    int combinations_used = 0;
    std::vector<std::string> skipped_combinations;  // incomplete (n1,n2,rep) keys
};

Ranking rank_results(const std::vector<BenchResult>& results);

// Per-(surrogate, n1, n2) aggregate; both medians and means are emitted.
struct SummaryRow {
    std::string surrogate;
    Index n1 = 0;
    Index n2 = 0;
    int count = 0;
    double median_e = 0.0, mean_e = 0.0;
    double median_e_norm = 0.0, mean_e_norm = 0.0;
    double median_e_dr = 0.0, median_e_ism = 0.0;
    double median_dz = 0.0;
    double median_train_seconds = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<BenchResult>& results);

// Flat results file (one row per BenchResult) and readers for cmd_report.
void write_results(const std::vector<BenchResult>& results, const std::filesystem::path& file);
std::vector<BenchResult> read_results(const std::filesystem::path& file);
void write_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& file);
void write_ranking(const Ranking& r, const std::filesystem::path& file);

double median(std::vector<double> values);

}  // namespace mfs
