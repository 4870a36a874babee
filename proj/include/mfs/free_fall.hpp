#pragma once

#include "mfs/dataset.hpp"
#include "mfs/doe.hpp"
#include "mfs/types.hpp"

namespace mfs {
namespace free_fall {

// Ball thrown vertically in water; inputs u = [y0, v0, rho_ball, r].
struct BallParams {
    double y0;        // initial altitude, m
    double v0;        // initial vertical velocity, m/s (upward positive)
    double rho_ball;  // kg/m^3
    double r;         // radius, m

    static BallParams from_vector(const Vector& u);
    Vector to_vector() const;
    bool in_benchmark_domain() const;
};

struct Constants {
    static constexpr double g = 9.81;            // m/s^2
    static constexpr double rho_fluid = 998.3;   // kg/m^3, water at 20 C
    static constexpr double eta = 1.002e-3;      // Pa.s
    static constexpr double cd_lf = 0.4;         // low-fidelity drag coefficient
};

// Benchmark input box: y0 in [0.2,0.4], v0 in [10,20], rho in [10,100], r in [0.1,1].
BoxDomain benchmark_domain();

// Derived quantities: m = rho*4*pi*r^3/3, c = 0.2*pi*rho_fluid*r^2,
// tau = m/c, v_inf = -m*g/c.
double ball_mass(const BallParams& p);
double drag_coefficient_lf(const BallParams& p);  // c above
double characteristic_time(const BallParams& p);
double terminal_velocity(const BallParams& p);

// Velocity-dependent drag coefficient of the high-fidelity model:
// Cd = 24/Re + 6/(1+sqrt(Re)) + 0.4, Re = rho_fluid*(2r)*|v|/eta.
double drag_coefficient_hf(double speed, double r);

// Uniform time grid with n_nodes points on [0, horizon].
Vector time_grid(Index n_nodes, double horizon);

// Closed-form low-fidelity trajectory sampled on the time grid:
// y(t) = y0 + v_inf*t + tau*(v0 - v_inf)*(1 - exp(-t/tau)).
Vector lf_trajectory(const BallParams& p, Index n_nodes, double horizon);

// High-fidelity trajectory: integrates m*ydd + c(|yd|)*yd + m*g = 0 with
// c(v) = 0.5*rho_fluid*pi*r^2*Cd(v), which reduces exactly to the closed form
// when Cd is frozen at 0.4. Integrated with an adaptive embedded Runge-Kutta
// pair at relative tolerance ode_tol.
Vector hf_trajectory(const BallParams& p, Index n_nodes, double horizon,
                     double ode_tol = 1e-8);

// Elementwise max(value, 0); models an absorbing ground at altitude 0.
Vector apply_ground(const Vector& field);

enum class Variant { no_ground, ground };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

struct CaseOptions {
    Variant variant = Variant::no_ground;
    Index n_nodes = 101;
    double horizon = 2.0;  // chosen so a strict subset of LF trajectories reaches the ground
    double ode_tol = 1e-8;
};

// Runs both simulators over a nested DoE and assembles the dataset
// (HF fields on doe.u1, LF fields on doe.u2, shared time-grid mesh).
MultiFidelityDataset generate_case(const NestedDoe& doe, const CaseOptions& opt = {});

}  // namespace free_fall
}  // namespace mfs
