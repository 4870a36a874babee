#pragma once

#include "mfs/categorical_gp.hpp"
#include "mfs/dataset.hpp"
#include "mfs/gp.hpp"
#include "mfs/pca.hpp"
#include "mfs/procrustes.hpp"
#include "mfs/tenscov.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mfs {

enum class Family { single_fidelity, corrective, mapping, fusion };
enum class DrKind { none, hfpca, lfpca, mfpca, sfpca, diffpca, cpca, gpca };
enum class Intermediate { gpr, ar1, categ_gpr, tenscov, gappy_ls };

struct SurrogateSpec {
    std::string name;
    Family family = Family::single_fidelity;
    DrKind dr_kind = DrKind::none;
    Intermediate intermediate = Intermediate::gpr;
    bool use_ma = false;
    bool model_residuals = false;
    double ric = 0.999;

    // true for corrective/mapping families, which consume the exact LF field
    // of a new input at prediction time
    bool needs_lf_at_predict() const {
        return family == Family::corrective || family == Family::mapping;
    }
};

// The 13 named surrogates of the benchmark.
std::vector<SurrogateSpec> catalog(double ric = 0.999);
SurrogateSpec spec_by_name(const std::string& name, double ric = 0.999);

// Produces the LF field for a new input (exact simulator or dataset lookup).
using LfFieldProvider = std::function<Vector(const Vector&)>;

struct TrainOptions {
    std::uint64_t seed = 0;
    int restarts = 20;
    double single_fidelity_nugget = 1e-8;
    double ar1_nugget = 1e-10;
};

class TrainedSurrogate {
public:
    const SurrogateSpec& spec() const { return spec_; }
    double training_seconds() const { return train_seconds_; }

    // Latent dimension of the DR feeding the HF reconstruction (0 when the
    // surrogate has no PCA stage, e.g. TensCovGPR and M-GPCA).
    Index latent_dim() const;

    // HF field prediction for one input. lf must be provided iff
    // spec().needs_lf_at_predict().
    Vector predict(const Vector& u, const LfFieldProvider* lf = nullptr) const;

    // Latent prediction of the HF DR coordinates (defined for surrogates
    // whose prediction factors through hf_dr(); used by the error
    // decomposition).
    bool has_latent_pipeline() const;
    Vector predict_latent(const Vector& u) const;

    // The DR whose inverse produces the HF field (null when none).
    const PcaModel* hf_dr() const;

    friend TrainedSurrogate train(const SurrogateSpec&, const MultiFidelityDataset&,
                                  const TrainOptions&);

private:
    SurrogateSpec spec_;
    double train_seconds_ = 0.0;

    std::optional<PcaModel> dr_;           // basis used for HF reconstruction
    std::optional<PcaModel> dr_lf_;        // separate LF basis (M/F-SFPCA)
    std::optional<GpcaModel> gpca_;
    std::optional<MaTransform> ma_;
    std::vector<GpModel> gps_;             // one per latent variable
    std::vector<Ar1Model> ar1s_;
    std::vector<CategGpModel> categ_;
    std::optional<TensCovGpModel> tenscov_;  // whole-field model or residual model
};

// Trains per the family rules: corrective/mapping use only the common-index
// pairs; fusion uses all n1 HF and n2 LF snapshots.
TrainedSurrogate train(const SurrogateSpec& spec, const MultiFidelityDataset& ds,
                       const TrainOptions& opt = {});

// Batch prediction over rows.
Matrix predict_rows(const TrainedSurrogate& s, const Matrix& inputs,
                    const LfFieldProvider* lf = nullptr);
Matrix predict_latent_rows(const TrainedSurrogate& s, const Matrix& inputs);

}  // namespace mfs
