#pragma once

#include "extcone/nonlinearity.hpp"
#include "extcone/poly.hpp"

#include <vector>

namespace extcone {

// Function sampled on a uniform grid x0 + i*h together with its first
// derivative, extended to negative arguments through a parity tag.
// Evaluation is cubic Hermite on each cell.
struct SampledFunction {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> value;
    std::vector<double> deriv;
    Parity parity = Parity::none;

    double x_max() const { return x0 + h * (value.empty() ? 0 : value.size() - 1); }
    double eval(double x) const;
    double eval_derivative(double x) const;
};

// Quadrature check of int_{-1}^1 (1-s^2)^{-1/2} T_alpha(s)^3 ds, the
// orthogonality that makes the quadratic correction solvable when
// N = 6 mod 4. Exactly zero for every alpha >= 1.
double chebyshev_cube_integral(int alpha);

// Exact even polynomial solving L_N p~ = -phi2 * p_{N/2-1}^2 of degree N-2.
// Unique for N = 4 mod 4; fixed by p~(0) = 0 for N = 6 mod 4.
RationalPoly quadratic_correction_analytic(int N, const Rat& phi2);

// beta* = (int_0^1 |p_2|^3 w) / (2 int_0^1 s p_2' p_2 w), w = (1-s^2)^{-1/2}.
// Closed form 2/(3 pi); the parts are exposed for the quadrature oracle.
double compute_beta_star();
double beta_star_numerator();
double beta_star_denominator();

struct SigmaGrid {
    double eta = 1e-3;   // endpoint margin: samples live on [0, 1-eta]
    std::size_t n = 4096; // sample count
};

// Second solution of the N=6 Chebyshev equation, p~2(0)=0, p~2'(0)=1,
// integrated from 0; odd extension to negative sigma.
SampledFunction compute_tilde_p2(const SigmaGrid& grid = {});

// Non-polynomial quadratic correction for the N=6 power nonlinearity:
// L_6 p~ = 2 beta* s p_2' - |p_2| p_2 with p~(0)=0, even in sigma.
SampledFunction compute_tilde_p_power6(const SigmaGrid& grid = {});

// Nonlinearly corrected resonance phi~ = c~ phi_{N/2-1} + c^2 psi.
struct ResonanceCorrection {
    enum class Kind { analytic, power6, power4_none };

    int N = 4;
    Kind kind = Kind::power4_none;
    RationalPoly tilde_p_poly;        // analytic case
    SampledFunction tilde_p_sampled;  // power6 case
    double beta = 0.0;                // beta* for power6, else 0

    double tilde_p(double s) const;
    double tilde_p_derivative(double s) const;

    static ResonanceCorrection make(int N, const NonlinearitySpec& spec, const SigmaGrid& grid = {});
};

struct TildePhi {
    int N = 4;
    double c_tilde = 0.0;
    double c_hat_sq = 0.0; // |c~| c~ for the N=6 power case, c~^2 otherwise
    double R = 1.0;
    ResonanceCorrection correction;
    RationalPoly p_res; // p_{N/2-1}

    static TildePhi make(int N, double c_tilde, double R, const NonlinearitySpec& spec,
                         const SigmaGrid& grid = {});
};

// r^{1-N/2} [ (c~ + beta c^2 ln(r/R)) p_{N/2-1}(t/r) + c^2 p~(t/r) ].
double eval_tilde_phi(const TildePhi& tp, double t, double r);
double eval_tilde_phi_dt(const TildePhi& tp, double t, double r);
double eval_tilde_phi_dr(const TildePhi& tp, double t, double r);

// Centered finite-difference evaluation of Box(phi~) - phi(phi~).
double residual_tilde_phi(const TildePhi& tp, const NonlinearitySpec& spec, double t, double r,
                          double h);

// Closed form of the same residual from the exact quadratic identities
// (first line of the Box(phi~) display; phi_c = 0 when only phi_2 is present).
double residual_tilde_phi_closed_form(const TildePhi& tp, const NonlinearitySpec& spec, double t,
                                      double r);

} // namespace extcone
