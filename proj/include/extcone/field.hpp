#pragma once

#include "extcone/errors.hpp"

#include <functional>
#include <vector>

namespace extcone {

// Sampled radial pair (u, du/dt) on a uniform grid r0 + i*h at a fixed time;
// an element of the energy space H_R when the grid starts at R + |t|.
struct FieldState {
    int N = 3;
    double t = 0.0;
    double r0 = 1.0;
    double h = 1.0 / 128;
    std::vector<double> u;
    std::vector<double> ut;

    std::size_t size() const { return u.size(); }
    double radius(std::size_t i) const { return r0 + h * static_cast<double>(i); }
    double r_max() const { return radius(u.empty() ? 0 : u.size() - 1); }

    // Linear interpolation of u / ut at radius r (inside the grid).
    double eval_u(double r) const;
    double eval_ut(double r) const;

    // Radial derivative of u by centered differences (one-sided at the ends).
    std::vector<double> radial_derivative() const;
};

FieldState make_state(int N, double t, double r0, double h, std::size_t n,
                      const std::function<double(double)>& u0,
                      const std::function<double(double)>& u1);

FieldState zero_state(int N, double t, double r0, double h, std::size_t n);

// Energy inner product <(u0,u1),(v0,v1)>_H = |S^{N-1}| int (u0' v0' + u1 v1) r^{N-1} dr
// over r >= rho0, grid part only (no tail correction).
double hpair_inner(const FieldState& a, const FieldState& b, double rho0);
inline double hnorm_sq(const FieldState& a, double rho0) { return hpair_inner(a, a, rho0); }

// Pointwise linear combination a + s*b of states on identical grids.
FieldState axpy_state(const FieldState& a, double s, const FieldState& b);

// Time-indexed sequence of FieldStates produced by the solver.
struct Trajectory {
    int N = 3;
    double R = 1.0;    // exterior region radius
    double h = 0.0;    // grid spacing
    double dt = 0.0;   // time step (dt = cfl * h)
    int order = 2;     // scheme order
    double horizon = 0.0; // largest |t| computed
    std::vector<FieldState> states; // ordered by time

    const FieldState& state_near(double t) const;
    const FieldState& initial() const { return state_near(0.0); }
    const FieldState& final() const { return states.back(); }
};

} // namespace extcone
