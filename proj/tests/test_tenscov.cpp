#include "mfs/tenscov.hpp"

#include <doctest.h>

#include <cmath>

using namespace mfs;

namespace {

struct Toy {
    Matrix inputs;
    Mesh mesh;
    Matrix fields;
};

Toy make_toy(Index n, Index dy, std::uint64_t seed) {
    Rng rng(seed);
    Toy t;
    t.inputs.resize(n, 2);
    for (Index i = 0; i < n; ++i) {
        t.inputs(i, 0) = rng.uniform();
        t.inputs(i, 1) = rng.uniform();
    }
    t.mesh.coords.resize(dy, 1);
    for (Index j = 0; j < dy; ++j)
        t.mesh.coords(j, 0) = static_cast<double>(j) / static_cast<double>(dy - 1);
    t.fields.resize(n, dy);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dy; ++j)
            t.fields(i, j) = std::sin(3.0 * t.inputs(i, 0) + 2.0 * t.mesh.coords(j, 0)) +
                             t.inputs(i, 1) * t.mesh.coords(j, 0);
    return t;
}

// dense predictor over the full Kronecker covariance, grouped by sample:
// cov(vec) = Ru (x) Rx with vec = [field_1; field_2; ...]
struct DenseOracle {
    Matrix ru_inv;
    Matrix rx;
    Vector mean_field;
    Matrix centered;
    Matern52Kernel ku;
    double sigma2;

    DenseOracle(const Toy& t, const Vector& ls_u, const Vector& ls_x) {
        const Index n = t.inputs.rows();
        const Index dy = t.mesh.coords.rows();
        mean_field = t.fields.colwise().mean();
        centered = t.fields.rowwise() - mean_field.transpose();
        ku.lengthscales = ls_u;
        ku.variance = 1.0;
        Matern52Kernel kx;
        kx.lengthscales = ls_x;
        kx.variance = 1.0;
        Matrix ru(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) ru(i, j) = ku.correlation(t.inputs.row(i), t.inputs.row(j));
        rx.resize(dy, dy);
        for (Index a = 0; a < dy; ++a)
            for (Index b = 0; b < dy; ++b)
                rx(a, b) = kx.correlation(t.mesh.coords.row(a), t.mesh.coords.row(b));

        // full (n dy) x (n dy) solve — only viable at toy sizes
        Matrix big(n * dy, n * dy);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) big.block(i * dy, j * dy, dy, dy) = ru(i, j) * rx;
        Vector vec(n * dy);
        for (Index i = 0; i < n; ++i) vec.segment(i * dy, dy) = centered.row(i).transpose();
        big_solution = big.fullPivLu().solve(vec);
        ru_inv = ru.fullPivLu().solve(Matrix::Identity(n, n));
        sigma2 = vec.dot(big_solution) / static_cast<double>(n * dy);
        inputs = t.inputs;
        mesh = t.mesh.coords;
    }

    Vector predict(const Vector& q) const {
        const Index n = inputs.rows();
        const Index dy = mesh.rows();
        Vector k(n);
        for (Index i = 0; i < n; ++i) k[i] = ku.correlation(inputs.row(i), q);
        Matrix cross(dy, n * dy);
        for (Index i = 0; i < n; ++i) cross.block(0, i * dy, dy, dy) = k[i] * rx;
        return mean_field + cross * big_solution;
    }

    Vector big_solution;
    Matrix inputs;
    Matrix mesh;
};

}  // namespace

TEST_CASE("tenscov: interpolates training fields without a nugget") {
    const Toy t = make_toy(9, 15, 3);
    TensCovFitOptions opt;
    opt.seed = 5;
    const TensCovGpModel m = fit_tenscov(t.inputs, t.mesh, t.fields, opt);
    for (Index i = 0; i < t.inputs.rows(); ++i) {
        const Vector pred = m.predict(t.inputs.row(i));
        const double rel = (pred - t.fields.row(i).transpose()).norm() /
                           std::max(1.0, t.fields.row(i).norm());
        CHECK(rel < 1e-6);
    }
}

TEST_CASE("tenscov: n = 1 returns the single training field everywhere") {
    const Toy t = make_toy(1, 12, 9);
    const TensCovGpModel m = fit_tenscov(t.inputs, t.mesh, t.fields, {});
    Vector q(2);
    q << 0.123, 0.987;
    CHECK((m.predict(q) - t.fields.row(0).transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("tenscov: kronecker predictor equals the dense-covariance oracle") {
    // 3 inputs, 5 nodes: full covariance is 15 x 15
    const Toy t = make_toy(3, 5, 17);
    Vector ls_u(2), ls_x(1);
    ls_u << 0.7, 1.1;
    ls_x << 0.5;
    TensCovFitOptions opt;
    opt.fixed_input_lengthscales = ls_u;
    opt.fixed_mesh_lengthscales = ls_x;
    const TensCovGpModel m = fit_tenscov(t.inputs, t.mesh, t.fields, opt);
    const DenseOracle oracle(t, ls_u, ls_x);

    for (double a : {0.1, 0.42, 0.9}) {
        Vector q(2);
        q << a, 1.0 - a;
        const Vector kron = m.predict(q);
        const Vector dense = oracle.predict(q);
        CHECK((kron - dense).lpNorm<Eigen::Infinity>() < 1e-8);
    }
    CHECK(m.amplitude() == doctest::Approx(oracle.sigma2).epsilon(1e-8));
}

TEST_CASE("tenscov: kronecker/dense equivalence on larger instances (n dy <= 200)") {
    for (std::uint64_t seed : {21ull, 22ull}) {
        const Toy t = make_toy(8, 25, seed);  // 200 = 8 * 25
        Vector ls_u(2), ls_x(1);
        ls_u << 0.9, 0.6;
        ls_x << 0.8;
        TensCovFitOptions opt;
        opt.fixed_input_lengthscales = ls_u;
        opt.fixed_mesh_lengthscales = ls_x;
        const TensCovGpModel m = fit_tenscov(t.inputs, t.mesh, t.fields, opt);
        const DenseOracle oracle(t, ls_u, ls_x);
        Vector q(2);
        q << 0.31, 0.64;
        CHECK((m.predict(q) - oracle.predict(q)).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("tenscov: per-node variance is nonnegative and vanishes on data") {
    const Toy t = make_toy(6, 10, 8);
    TensCovFitOptions opt;
    opt.seed = 2;
    const TensCovGpModel m = fit_tenscov(t.inputs, t.mesh, t.fields, opt);
    const Vector v_at = m.predict_variance(t.inputs.row(2));
    CHECK(v_at.lpNorm<Eigen::Infinity>() < 1e-6 * std::max(1.0, m.amplitude()));
    Vector q(2);
    q << 5.0, -4.0;
    const Vector v_far = m.predict_variance(q);
    for (Index j = 0; j < v_far.size(); ++j) CHECK(v_far[j] >= 0.0);
}

TEST_CASE("tenscov: mesh mismatch is rejected") {
    const Toy t = make_toy(4, 10, 1);
    Mesh wrong;
    wrong.coords = Matrix::Zero(7, 1);
    CHECK_THROWS_AS(fit_tenscov(t.inputs, wrong, t.fields, {}), Error);
}
