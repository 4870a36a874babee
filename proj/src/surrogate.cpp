#include "mfs/surrogate.hpp"

#include <algorithm>
#include <chrono>

namespace mfs {

std::vector<SurrogateSpec> catalog(double ric) {
    auto mk = [&](std::string name, Family f, DrKind d, Intermediate i, bool ma = false,
                  bool resid = false) {
        SurrogateSpec s;
        s.name = std::move(name);
        s.family = f;
        s.dr_kind = d;
        s.intermediate = i;
        s.use_ma = ma;
        s.model_residuals = resid;
        s.ric = ric;
        return s;
    };
    return {
        mk("S-HFPCA-GPR", Family::single_fidelity, DrKind::hfpca, Intermediate::gpr),
        mk("TensCovGPR", Family::single_fidelity, DrKind::none, Intermediate::tenscov),
        mk("C-DiffPCA-GPR", Family::corrective, DrKind::diffpca, Intermediate::gpr),
        mk("M-GPCA", Family::mapping, DrKind::gpca, Intermediate::gappy_ls),
        mk("M-SFPCA-GPR", Family::mapping, DrKind::sfpca, Intermediate::gpr),
        mk("F-CPCA-AR1", Family::fusion, DrKind::cpca, Intermediate::ar1),
        mk("F-HFPCA-AR1", Family::fusion, DrKind::hfpca, Intermediate::ar1),
        mk("F-MFPCA-AR1", Family::fusion, DrKind::mfpca, Intermediate::ar1),
        mk("F-MFPCA-CategGPR", Family::fusion, DrKind::mfpca, Intermediate::categ_gpr),
        mk("F-SFPCA-AR1", Family::fusion, DrKind::sfpca, Intermediate::ar1),
        mk("F-SFPCA-MA-AR1", Family::fusion, DrKind::sfpca, Intermediate::ar1, true),
        mk("F-LFPCA-AR1", Family::fusion, DrKind::lfpca, Intermediate::ar1),
        mk("F-LFPCA-AR1-Resid", Family::fusion, DrKind::lfpca, Intermediate::ar1, false, true),
    };
}

SurrogateSpec spec_by_name(const std::string& name, double ric) {
    for (auto& s : catalog(ric))
        if (s.name == name) return s;
    throw Error("unknown surrogate '" + name + "'");
}

namespace {

struct CommonPairs {
    Matrix inputs;  // n_c x d_u (HF side; identical to LF side by construction)
    Matrix y1;      // n_c x d_y1
    Matrix y2;      // n_c x d_y2
};

CommonPairs extract_common(const MultiFidelityDataset& ds) {
    if (ds.common_index.empty())
        throw Error("surrogate requires common HF/LF input pairs but the dataset has none");
    CommonPairs c;
    const Index n = static_cast<Index>(ds.common_index.size());
    c.inputs.resize(n, ds.input_dim());
    c.y1.resize(n, ds.hf.field_dim());
    c.y2.resize(n, ds.lf.field_dim());
    for (Index k = 0; k < n; ++k) {
        const auto [i, j] = ds.common_index[static_cast<std::size_t>(k)];
        c.inputs.row(k) = ds.hf.inputs.row(i);
        c.y1.row(k) = ds.hf.outputs.row(i);
        c.y2.row(k) = ds.lf.outputs.row(j);
    }
    return c;
}

PcaModel truncate_to(const PcaModel& m, Index dz) {
    return PcaModel(m.mean(), m.modes().topRows(dz), m.eigenvalues(), m.ric());
}

void require_same_mesh(const MultiFidelityDataset& ds, const std::string& who) {
    if (ds.hf.field_dim() != ds.lf.field_dim())
        throw Error(who + " requires HF and LF fields on a common mesh (got d_y " +
                    std::to_string(ds.hf.field_dim()) + " vs " +
                    std::to_string(ds.lf.field_dim()) + ")");
}

}  // namespace

TrainedSurrogate train(const SurrogateSpec& spec, const MultiFidelityDataset& ds,
                       const TrainOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();

    TrainedSurrogate s;
    s.spec_ = spec;

    GpFitOptions gp_opt;
    gp_opt.restarts = opt.restarts;
    gp_opt.nugget = opt.single_fidelity_nugget;

    GpFitOptions ar1_opt;
    ar1_opt.restarts = opt.restarts;
    ar1_opt.nugget = opt.ar1_nugget;

    auto latent_seed = [&](std::uint64_t k) { return derive_seed(opt.seed, 0x5A, k); };

    switch (spec.family) {
        case Family::single_fidelity: {
            if (spec.intermediate == Intermediate::tenscov) {
                TensCovFitOptions topt;
                topt.seed = latent_seed(0);
                topt.restarts = opt.restarts;
                s.tenscov_ = fit_tenscov(ds.hf.inputs, ds.hf.mesh, ds.hf.outputs, topt);
            } else {
                s.dr_ = fit_pca(ds.hf.outputs, spec.ric);
                const Matrix z1 = s.dr_->transform_rows(ds.hf.outputs);
                for (Index k = 0; k < s.dr_->latent_dim(); ++k) {
                    gp_opt.seed = latent_seed(static_cast<std::uint64_t>(k));
                    s.gps_.push_back(fit_gp(ds.hf.inputs, z1.col(k), gp_opt));
                }
            }
            break;
        }

        case Family::corrective: {
            require_same_mesh(ds, spec.name);
            const CommonPairs c = extract_common(ds);
            const Matrix diff = c.y1 - c.y2;
            s.dr_ = fit_pca(diff, spec.ric);
            const Matrix zd = s.dr_->transform_rows(diff);
            for (Index k = 0; k < s.dr_->latent_dim(); ++k) {
                gp_opt.seed = latent_seed(static_cast<std::uint64_t>(k));
                s.gps_.push_back(fit_gp(c.inputs, zd.col(k), gp_opt));
            }
            break;
        }

        case Family::mapping: {
            const CommonPairs c = extract_common(ds);
            if (spec.dr_kind == DrKind::gpca) {
                s.gpca_ = fit_gpca(c.y1, c.y2, spec.ric);
            } else {
                s.dr_ = fit_pca(c.y1, spec.ric);
                s.dr_lf_ = fit_pca(c.y2, spec.ric);
                const Matrix z1 = s.dr_->transform_rows(c.y1);
                const Matrix z2 = s.dr_lf_->transform_rows(c.y2);
                for (Index k = 0; k < s.dr_->latent_dim(); ++k) {
                    gp_opt.seed = latent_seed(static_cast<std::uint64_t>(k));
                    s.gps_.push_back(fit_gp(z2, z1.col(k), gp_opt));
                }
            }
            break;
        }

        case Family::fusion: {
            Matrix z1, z2;
            switch (spec.dr_kind) {
                case DrKind::hfpca:
                    require_same_mesh(ds, spec.name);
                    s.dr_ = fit_pca(ds.hf.outputs, spec.ric);
                    break;
                case DrKind::lfpca:
                    require_same_mesh(ds, spec.name);
                    s.dr_ = fit_pca(ds.lf.outputs, spec.ric);
                    break;
                case DrKind::mfpca: {
                    require_same_mesh(ds, spec.name);
                    Matrix stacked(ds.hf.size() + ds.lf.size(), ds.hf.field_dim());
                    stacked << ds.hf.outputs, ds.lf.outputs;
                    s.dr_ = fit_pca(stacked, spec.ric);
                    break;
                }
                case DrKind::cpca:
                    require_same_mesh(ds, spec.name);
                    s.dr_ = fit_cpca(ds.hf.outputs, ds.lf.outputs);
                    break;
                case DrKind::sfpca: {
                    PcaModel m1 = fit_pca(ds.hf.outputs, spec.ric);
                    PcaModel m2 = fit_pca(ds.lf.outputs, spec.ric);
                    // shared latent dimension: the lowest of the two
                    const Index dz = std::min(m1.latent_dim(), m2.latent_dim());
                    s.dr_ = truncate_to(m1, dz);
                    s.dr_lf_ = truncate_to(m2, dz);
                    break;
                }
                default:
                    throw Error(spec.name + ": unsupported DR kind for fusion");
            }
            z1 = s.dr_->transform_rows(ds.hf.outputs);
            z2 = s.dr_lf_ ? s.dr_lf_->transform_rows(ds.lf.outputs)
                          : s.dr_->transform_rows(ds.lf.outputs);

            if (spec.use_ma) {
                const Index nc = static_cast<Index>(ds.common_index.size());
                if (nc == 0) throw Error(spec.name + ": manifold alignment needs common pairs");
                Matrix src(nc, z2.cols()), tgt(nc, z1.cols());
                for (Index k = 0; k < nc; ++k) {
                    const auto [i, j] = ds.common_index[static_cast<std::size_t>(k)];
                    tgt.row(k) = z1.row(i);
                    src.row(k) = z2.row(j);
                }
                s.ma_ = fit_procrustes(src, tgt);
                z2 = s.ma_->apply_rows(z2);
            }

            for (Index k = 0; k < z1.cols(); ++k) {
                if (spec.intermediate == Intermediate::ar1) {
                    ar1_opt.seed = latent_seed(static_cast<std::uint64_t>(k));
                    s.ar1s_.push_back(
                        fit_ar1(ds.lf.inputs, z2.col(k), ds.hf.inputs, z1.col(k), ar1_opt));
                } else if (spec.intermediate == Intermediate::categ_gpr) {
                    Matrix xa(ds.hf.size() + ds.lf.size(), ds.input_dim());
                    xa << ds.hf.inputs, ds.lf.inputs;
                    std::vector<int> flags(static_cast<std::size_t>(xa.rows()), 2);
                    std::fill_n(flags.begin(), ds.hf.size(), 1);
                    Vector y(xa.rows());
                    y << z1.col(k), z2.col(k);
                    gp_opt.seed = latent_seed(static_cast<std::uint64_t>(k));
                    s.categ_.push_back(fit_categ_gp(xa, flags, y, gp_opt));
                } else {
                    throw Error(spec.name + ": unsupported intermediate for fusion");
                }
            }

            if (spec.model_residuals) {
                TensCovFitOptions topt;
                topt.seed = latent_seed(0xE51D);
                topt.restarts = opt.restarts;
                const Matrix resid = s.dr_->residual_rows(ds.hf.outputs);
                s.tenscov_ = fit_tenscov(ds.hf.inputs, ds.hf.mesh, resid, topt);
            }
            break;
        }
    }

    s.train_seconds_ =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

Index TrainedSurrogate::latent_dim() const {
    if (dr_) return dr_->latent_dim();
    if (gpca_) return gpca_->pca.latent_dim();
    return 0;
}

const PcaModel* TrainedSurrogate::hf_dr() const {
    return dr_ ? &*dr_ : nullptr;
}

bool TrainedSurrogate::has_latent_pipeline() const {
    if (spec_.family == Family::fusion) return true;
    return spec_.family == Family::single_fidelity && spec_.intermediate == Intermediate::gpr;
}

Vector TrainedSurrogate::predict_latent(const Vector& u) const {
    if (!has_latent_pipeline()) throw Error(spec_.name + ": no input-to-latent pipeline");
    Vector z(latent_dim());
    for (Index k = 0; k < z.size(); ++k) {
        if (!ar1s_.empty()) z[k] = ar1s_[static_cast<std::size_t>(k)].predict_mean(u);
        else if (!categ_.empty()) z[k] = categ_[static_cast<std::size_t>(k)].predict_mean(u, 1);
        else z[k] = gps_[static_cast<std::size_t>(k)].predict_mean(u);
    }
    return z;
}

Vector TrainedSurrogate::predict(const Vector& u, const LfFieldProvider* lf) const {
    if (spec_.needs_lf_at_predict() && !lf)
        throw Error(spec_.name + ": prediction requires a low-fidelity field provider");

    switch (spec_.family) {
        case Family::single_fidelity:
            if (tenscov_) return tenscov_->predict(u);
            return dr_->inverse(predict_latent(u));

        case Family::corrective: {
            const Vector y2 = (*lf)(u);
            Vector zd(dr_->latent_dim());
            for (Index k = 0; k < zd.size(); ++k)
                zd[k] = gps_[static_cast<std::size_t>(k)].predict_mean(u);
            return y2 + dr_->inverse(zd);
        }

        case Family::mapping: {
            const Vector y2 = (*lf)(u);
            if (gpca_) return gappy_predict(*gpca_, y2);
            const Vector z2 = dr_lf_->transform(y2);
            Vector z1(dr_->latent_dim());
            for (Index k = 0; k < z1.size(); ++k)
                z1[k] = gps_[static_cast<std::size_t>(k)].predict_mean(z2);
            return dr_->inverse(z1);
        }

        case Family::fusion: {
            Vector y = dr_->inverse(predict_latent(u));
            if (tenscov_) y += tenscov_->predict(u);
            return y;
        }
    }
    throw Error("unreachable");
}

Matrix predict_rows(const TrainedSurrogate& s, const Matrix& inputs, const LfFieldProvider* lf) {
    Matrix out;
    for (Index i = 0; i < inputs.rows(); ++i) {
        const Vector y = s.predict(inputs.row(i), lf);
        if (i == 0) out.resize(inputs.rows(), y.size());
        out.row(i) = y.transpose();
    }
    return out;
}

Matrix predict_latent_rows(const TrainedSurrogate& s, const Matrix& inputs) {
    Matrix out(inputs.rows(), s.latent_dim());
    for (Index i = 0; i < inputs.rows(); ++i)
        out.row(i) = s.predict_latent(inputs.row(i)).transpose();
    return out;
}

}  // namespace mfs
