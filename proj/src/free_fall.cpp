#include "mfs/free_fall.hpp"

#include "mfs/ode.hpp"

#include <cmath>
#include <limits>

namespace mfs {
namespace free_fall {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

BallParams BallParams::from_vector(const Vector& u) {
    if (u.size() != 4) throw Error("BallParams: input vector must have length 4");
    return {u[0], u[1], u[2], u[3]};
}

Vector BallParams::to_vector() const {
    Vector u(4);
    u << y0, v0, rho_ball, r;
    return u;
}

bool BallParams::in_benchmark_domain() const {
    return benchmark_domain().contains(to_vector());
}

BoxDomain benchmark_domain() {
    Vector lo(4), hi(4);
    lo << 0.2, 10.0, 10.0, 0.1;
    hi << 0.4, 20.0, 100.0, 1.0;
    return {lo, hi};
}

double ball_mass(const BallParams& p) {
    return p.rho_ball * 4.0 * kPi * p.r * p.r * p.r / 3.0;
}

double drag_coefficient_lf(const BallParams& p) {
    return 0.5 * Constants::cd_lf * Constants::rho_fluid * kPi * p.r * p.r;
}

double characteristic_time(const BallParams& p) {
    return ball_mass(p) / drag_coefficient_lf(p);
}

double terminal_velocity(const BallParams& p) {
    return -ball_mass(p) * Constants::g / drag_coefficient_lf(p);
}

double drag_coefficient_hf(double speed, double r) {
    const double re = Constants::rho_fluid * 2.0 * r * speed / Constants::eta;
    if (re <= 0.0) return std::numeric_limits<double>::infinity();
    return 24.0 / re + 6.0 / (1.0 + std::sqrt(re)) + 0.4;
}

Vector time_grid(Index n_nodes, double horizon) {
    if (n_nodes < 2) throw Error("time_grid: n_nodes must be >= 2");
    if (!(horizon > 0)) throw Error("time_grid: horizon must be > 0");
    return Vector::LinSpaced(n_nodes, 0.0, horizon);
}

Vector lf_trajectory(const BallParams& p, Index n_nodes, double horizon) {
    const Vector t = time_grid(n_nodes, horizon);
    const double tau = characteristic_time(p);
    const double vinf = terminal_velocity(p);
    Vector y(n_nodes);
    for (Index i = 0; i < n_nodes; ++i)
        y[i] = p.y0 + vinf * t[i] + tau * (p.v0 - vinf) * (1.0 - std::exp(-t[i] / tau));
    return y;
}

Vector hf_trajectory(const BallParams& p, Index n_nodes, double horizon, double ode_tol) {
    if (!(ode_tol > 0)) throw Error("hf_trajectory: ode_tol must be > 0");
    const Vector t = time_grid(n_nodes, horizon);
    const double m = ball_mass(p);
    const double r = p.r;
    const double half_rho_a = 0.5 * Constants::rho_fluid * kPi * r * r;
    // The 24/Re part of Cd contributes a constant-magnitude Stokes-like force
    // 6*pi*eta*r*sign(v); it is ramped linearly below v_eps to keep the RHS
    // continuous through the velocity sign change at the trajectory peak.
    const double stokes = 6.0 * kPi * Constants::eta * r;
    const double v_eps = 1e-9;

    auto rhs = [&](double, const Vector& s) {
        const double v = s[1];
        const double av = std::abs(v);
        const double re = Constants::rho_fluid * 2.0 * r * av / Constants::eta;
        double drag = stokes * (av > v_eps ? (v > 0 ? 1.0 : -1.0) : v / v_eps);
        drag += half_rho_a * (6.0 / (1.0 + std::sqrt(re)) + 0.4) * v;
        Vector ds(2);
        ds << v, -Constants::g - drag / m;
        return ds;
    };

    Vector s0(2);
    s0 << p.y0, p.v0;
    OdeOptions opt;
    opt.rtol = ode_tol;
    opt.atol = std::min(1e-10, ode_tol);
    const Matrix sol = integrate_ode(rhs, s0, t, opt);
    return sol.col(0);
}

Vector apply_ground(const Vector& field) {
    return field.cwiseMax(0.0);
}

Variant variant_from_string(const std::string& s) {
    if (s == "ground") return Variant::ground;
    if (s == "no-ground" || s == "no_ground") return Variant::no_ground;
    throw Error("unknown variant '" + s + "' (expected 'ground' or 'no-ground')");
}

std::string to_string(Variant v) {
    return v == Variant::ground ? "ground" : "no-ground";
}

MultiFidelityDataset generate_case(const NestedDoe& doe, const CaseOptions& opt) {
    if (doe.u1.cols() != 4) throw Error("generate_case: DoE must have 4 input dimensions");

    MultiFidelityDataset ds;
    ds.hf.fidelity = 1;
    ds.lf.fidelity = 2;
    ds.hf.mesh.coords = time_grid(opt.n_nodes, opt.horizon);
    ds.lf.mesh.coords = ds.hf.mesh.coords;

    ds.hf.inputs = doe.u1;
    ds.hf.outputs.resize(doe.u1.rows(), opt.n_nodes);
    for (Index i = 0; i < doe.u1.rows(); ++i) {
        const BallParams p = BallParams::from_vector(doe.u1.row(i));
        try {
            Vector y = hf_trajectory(p, opt.n_nodes, opt.horizon, opt.ode_tol);
            if (opt.variant == Variant::ground) y = apply_ground(y);
            ds.hf.outputs.row(i) = y.transpose();
        } catch (const Error& e) {
            throw Error("hf integration failed for DoE row " + std::to_string(i) + ": " + e.what());
        }
    }

    ds.lf.inputs = doe.u2;
    ds.lf.outputs.resize(doe.u2.rows(), opt.n_nodes);
    for (Index i = 0; i < doe.u2.rows(); ++i) {
        const BallParams p = BallParams::from_vector(doe.u2.row(i));
        Vector y = lf_trajectory(p, opt.n_nodes, opt.horizon);
        if (opt.variant == Variant::ground) y = apply_ground(y);
        ds.lf.outputs.row(i) = y.transpose();
    }

    ds.common_index = match_common_inputs(ds.hf.inputs, ds.lf.inputs);
    validate_dataset(ds);
    return ds;
}

}  // namespace free_fall
}  // namespace mfs
