#pragma once

#include "extcone/field.hpp"
#include "extcone/nonlinearity.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace extcone {

using ForcingFn = std::function<double(double, double)>; // f(t, r)

struct EvolveOptions {
    double cfl = 1.0;  // dt = cfl * h; cfl = 1 tracks the light cone exactly
    double T = 8.0;    // target time; negative evolves backward
    std::vector<double> save_times; // t = 0 and t = T are always saved
    int save_every = 0;             // additionally save every k-th step
    double snorm_cap = 1e4;         // blow-up alternative: cap on the discrete S-norm
    bool origin_mode = false;       // evolve down to r = 0 with the regularity condition
    bool track_snorm = true;
};

// Exterior-cone (or whole-space, origin_mode) evolution of the radial wave
// equation d_tt u - Lap u = f + phi(r, u), via the reduction
// v = r^{(N-1)/2} u,  d_tt v - d_rr v + (N-1)(N-3)/(4 r^2) v = r^{(N-1)/2} (f + phi).
// Second-order leapfrog with the zeroth-order term averaged over time levels.
// The computational grid is the grid of `initial`; in cone mode the active
// window sheds one cell per step (characteristic inner boundary), the outer
// boundary is a one-sided outgoing closure.
Trajectory evolve_exterior(const FieldState& initial, const ForcingFn& forcing,
                           const NonlinearitySpec& spec, double R, const EvolveOptions& opt);

// |S^{N-1}| int_{r > rho0} (u_t^2 + u_r^2) r^{N-1} dr, trapezoid plus an
// analytic power-law tail beyond the last grid node.
double exterior_energy(const FieldState& state, double rho0);

struct Extrapolated {
    double value = 0.0;
    double uncertainty = 0.0;
    std::vector<double> times;
    std::vector<double> samples;
};

// E(t) = exterior_energy(state(t), R + |t|) at times T/4, T/2, T (T = horizon),
// Richardson-extrapolated in 1/t.
Extrapolated asymptotic_exterior_energy(const Trajectory& traj, double R);

enum class NormKind { W, Wtilde, S };

// Discrete realization of the W^kappa / W~^kappa / S semi-norms over the
// saved slab; a truncated sup, reported together with the horizon.
double weighted_norm(const Trajectory& traj, NormKind kind, double kappa, double R,
                     const NonlinearitySpec& spec = {});

// sup_{t~, R~} R~^kappa || 1(|x| > R~ + |t - t~|) f ||_{L^1 L^2} on a coarse
// (t~, R~) mesh over the given slab.
double weighted_forcing_norm(const ForcingFn& f, int N, double kappa, double R, double T_slab,
                             double r_max, double h, double dt);

// Decaying solution of Lap u = f on r > R with prescribed u(R), via the
// exterior representation formula (two cumulative integrals plus the
// harmonic tail term). f is sampled on the uniform grid starting at R.
std::vector<double> solve_exterior_poisson(std::span<const double> f, double uR, int N, double R,
                                           double h);

struct HardyCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

// Both sides of the weighted exterior Hardy inequality on a geometric
// R~-mesh; u and its Laplacian sampled on the uniform grid starting at R.
HardyCheck hardy_check(std::span<const double> u, std::span<const double> lap_u, double R,
                       double kappa, int N, double h);

} // namespace extcone
