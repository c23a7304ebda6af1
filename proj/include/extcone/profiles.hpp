#pragma once

#include "extcone/dimension.hpp"
#include "extcone/field.hpp"
#include "extcone/poly.hpp"

#include <vector>

namespace extcone {

// Coefficient tuple c in R^{m0+1} with base radius R. Interleaved ordering
// c_{0,0}, c_{1,0}, c_{0,1}, ... : c[m] multiplies the profile phi_m.
struct CoefVector {
    int N = 3;
    std::vector<double> c;
    double R = 1.0;

    static CoefVector make(int N, std::vector<double> c, double R = 1.0);
};

// phi_m(t, r) = r^{-(N-2-m)} p_m(t/r).
double eval_phi_m(int N, int m, double t, double r);

// a_F[c](t, r) = sum_m c_m phi_m(t, r).
double eval_aF(const CoefVector& cv, double t, double r);
double eval_aF_dt(const CoefVector& cv, double t, double r);
double eval_aF_dr(const CoefVector& cv, double t, double r);

// Initial-data pair of a_F: exact power sums
//   u0(r) = sum_{l<=l0} c_{0,l} r^{-(N-2l-2)},  u1(r) = sum_{l<=l1} c_{1,l} r^{-(N-2l-2)}.
double eval_aF_data0(const CoefVector& cv, double r);
double eval_aF_data1(const CoefVector& cv, double r);

// |c|_R: Euclidean norm of (R^{-N/2+1+m} c_m).
double c_norm(const CoefVector& cv);

// Rescaled coefficients c_R with |c_R| = |c|_R (base radius folded in).
CoefVector rescale_coefs(const CoefVector& cv);

// Exterior gradient energy of a_F at t=0 over r > R, from the exact
// closed-form power integrals (includes the |S^{N-1}| factor).
double aF_exterior_energy_exact(const CoefVector& cv, double R);

enum class ProjSpace { H1dot, L2 };

// Power-law projection span and its exact Gram matrix. Entries factor as
// (rational coefficient) * R^{power} with |S^{N-1}| taken out.
struct ProjectionBasis {
    int N = 3;
    double R = 1.0;
    ProjSpace space = ProjSpace::H1dot;
    std::vector<int> exponents;               // powers a in r^{-a}
    std::vector<std::vector<Rat>> gram_coeff; // rational coefficient of each entry
    std::vector<std::vector<int>> gram_power; // power of R of each entry

    std::size_t rank() const { return exponents.size(); }
    double entry(std::size_t i, std::size_t j) const;
};

ProjectionBasis gram_matrix(int N, double R, ProjSpace space);

struct ProjectionResult {
    FieldState projected;
    FieldState residual;
    std::vector<double> coeff_u0; // coefficients on the H^1 span
    std::vector<double> coeff_u1; // coefficients on the L^2 span
};

// Orthogonal projection Pi_{H,R} = (Pi_{H^1,R} u0, Pi_{L^2,R} u1) of a sampled
// pair, with the complementary part. Basis-state integrals use the grid
// quadrature plus an analytic power-law tail correction beyond the last node.
ProjectionResult project(const FieldState& state, double R);

} // namespace extcone
