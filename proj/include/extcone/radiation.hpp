#pragma once

#include "extcone/field.hpp"
#include "extcone/wavesolver.hpp"

#include <optional>
#include <span>
#include <vector>

namespace extcone {

// Friedlander radiation profile G(rho) on a uniform rho-grid.
// Convention: r^{(N-1)/2} (d_t u, d_r u)(t) -> (G+, -G+)(r - t)   as t -> +inf,
//             r^{(N-1)/2} (d_t u, d_r u)(t) -> (G-, +G-)(r - |t|) as t -> -inf.
struct RadiationProfile {
    int N = 3;
    int direction = +1; // +1 or -1
    double rho0 = 0.0;
    double h = 0.0;
    std::vector<double> G;

    double rho(std::size_t i) const { return rho0 + h * static_cast<double>(i); }
    double rho_max() const { return rho(G.empty() ? 0 : G.size() - 1); }
    double eval(double rho) const; // linear interpolation, 0 outside the grid
    double l2_norm_sq() const;     // int G^2 drho (trapezoid)
};

// Sample G at a sequence of large times (T/4, T/2, T from the trajectory
// horizon) through the outgoing (or incoming) null combination
//   (1/2) r^{(N-1)/2} (d_t -/+ d_r) u (t, rho + |t|),
// then Richardson-extrapolate in 1/T. The trajectory must have been
// computed in the matching time direction with saves at those times.
// The optional window clamps the rho-grid: the 1/T expansion degrades for
// rho comparable to the horizon, so slowly decaying fields (cone tails)
// should be extracted over a bounded window.
RadiationProfile extract_radiation(const Trajectory& traj, int direction,
                                   double rho_lo = -1e300, double rho_hi = 1e300);

// | ||state||_H^2 - 2 |S^{N-1}| ||G||^2 | / ||state||_H^2 (0 for zero states).
double isometry_defect(const FieldState& state0, const RadiationProfile& profile);

// Hilbert transform by the spectral multiplier -i sgn(xi) on the
// zero-padded periodized grid. Throws EdgeLeak when the input has not
// decayed at the grid ends.
std::vector<double> discrete_hilbert(std::span<const double> f, double edge_tol = 1e-6);

// L^2 defect of the odd-N reflection G+(rho) = (-1)^{(N-1)/2} G-(-rho) or the
// even-N relation G+(rho) = (-1)^{N/2} (H G-)(-rho), normalized by ||G+||.
double relation_defect(const RadiationProfile& gplus, const RadiationProfile& gminus, int N);

struct SynthesisOptions {
    double h = 1.0 / 128;
    double T = 0.0;      // 0 -> 16 * (R + support radius of G)
    double rmax_pad = 8.0;
    double cfl = 1.0;
    bool richardson = true; // combine seeds at T and 2T to cancel the O(1/T) ansatz error
};

// Free-wave data at t = 0 whose +infinity radiation profile is G:
// seed u(T, r) = r^{-(N-1)/2} Phi(r - T), d_t u = r^{-(N-1)/2} G(r - T) with
// Phi(rho) = int_rho^inf G, then evolve backward to t = 0 through the origin.
FieldState synthesize_from_radiation(const RadiationProfile& G, int N, double R,
                                     const SynthesisOptions& opt = {});

enum class TimeParity { none, even, odd };

struct ForcingDataOptions {
    double h = 1.0 / 96;
    double T = 48.0;
    double rmax_pad = 8.0;
    double hilbert_tikhonov = 1e-8;
    double hilbert_residual_tol = 1e-4;
    double data_rmax = 0.0; // 0 -> synthesis grid; longer grids carry the
                            // memory tail analytically for far verification
};

struct ForcingDataResult {
    FieldState data;          // (u0, u1) making the forced solution non-radiative for |x| > |t|
    double f_l1l2 = 0.0;      // || 1(|x|>|t|) f ||_{L^1 L^2}
    double parity_residue = 0.0; // discarded opposite-parity component (even N)
    double hilbert_residual = 0.0;
};

// Proposition-style construction: evolve zero data with the cone-masked
// forcing both ways, extract H+-, build the radiation-matching free wave
// (odd-N gluing, or the half-line Hilbert equation solved by regularized
// least squares for even N), and subtract it.
ForcingDataResult nonradiative_data_for_forcing(const ForcingFn& f, int N, TimeParity parity_hint,
                                                const ForcingDataOptions& opt = {});

struct AnnulusOptions {
    double h = 0.0;      // 0 -> (Rp - R) / 24
    double T = 0.0;      // 0 -> 16 * (R + Rp)
    double rmax_pad = 4.0;
    double delta0 = 1.0 / 16; // documented smallness threshold (not enforced)
    int max_iters = 20;
    double rel_tol = 1e-4;
};

struct AnnulusInversion {
    FieldState data; // supported in [R, Rp]
    std::vector<double> residual_history;
    int iterations = 0;
    double sign_psi0 = 0.0; // empirically probed leading-order signs
    double sign_psi1 = 0.0;
};

// Thin-annulus inverse of the data -> radiation-profiles map on H_{R,R'}:
// leading-order guess from the probed +-2 rho^{(1-N)/2} relation, then Neumann
// iteration re-solving the forward map. Throws ContractionFailure when the
// residual fails to halve.
AnnulusInversion annulus_invert(const RadiationProfile& gplus, const RadiationProfile& gminus,
                                int N, double R, double Rp, const AnnulusOptions& opt = {});

// Forward map: free evolution of annulus-supported data, profiles extracted
// in both directions (via the even/odd parity split, two forward runs).
std::pair<RadiationProfile, RadiationProfile> annulus_forward_map(const FieldState& data, double R,
                                                                  double Rp,
                                                                  const AnnulusOptions& opt = {});

struct CompactForcingResult {
    FieldState data; // in H_{R,R'}
    AnnulusInversion inversion;
};

// Unique non-radiative data in H_{R,R'} for a forcing supported in
// R < |x| - |t| < R'.
CompactForcingResult nonradiative_data_compact_forcing(const ForcingFn& f, int N, double R,
                                                       double Rp, const AnnulusOptions& opt = {});

} // namespace extcone
