#pragma once

#include "extcone/poly.hpp"

namespace extcone {

// Operator family L_{N,m} = -(1-s^2) d^2/ds^2 + (N-1-2m) s d/ds - (N-2-m)m
// acting on polynomials in s = t/|x|. L_{N,m} annihilates the degree-m
// profile polynomial p_m, which is what makes r^{-(N-2-m)} p_m(t/r) a
// solution of the radial wave equation away from the origin.

// mu_{N,m,alpha} = alpha^2 + (N-2-2m) alpha - (N-2-m) m; the sigma^alpha
// eigen-coefficient of L_{N,m}. Vanishes at alpha = m.
Rat mu(int N, int m, int alpha);

// Apply L_{N,m} exactly. Preserves parity.
RationalPoly apply_L(int N, int m, const RationalPoly& p);

// Degree-m zero of L_{N,m}, normalized by p_m(0)=1 (m even) or
// p_m'(0)=1 (m odd). Valid for 0 <= m <= m0, and for the resonance index
// m = N/2-1 when N is even. Throws RecurrenceBlocked if a normalization
// denominator degenerates (cannot happen in the allowed range).
RationalPoly build_profile_poly(int N, int m);

// The even-dimension resonance polynomial p_{N/2-1} (a renormalized
// Chebyshev polynomial of the first kind). Throws NotEvenDimension for odd N.
RationalPoly build_resonance_poly(int N);

} // namespace extcone
