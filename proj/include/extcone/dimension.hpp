#pragma once

#include "extcone/errors.hpp"
#include "extcone/rational.hpp"

#include <cmath>

namespace extcone {

// Index bounds and constants attached to a spatial dimension N >= 3.
// m0+1 coefficients parametrize the non-radiative family; l0+1 and l1+1
// are the ranks of the H^1 and L^2 projection spans (l0+l1+2 == m0+1).
struct DimensionConfig {
    int N = 0;
    int m0 = 0;
    int l0 = 0;
    int l1 = 0; // -1 when the L^2 span is empty (N = 3, 4)
    Rat kappaN;  // 1/2 for N odd, 1 for N even
    double sphere_area = 0.0; // |S^{N-1}|

    static DimensionConfig make(int N) {
        if (N < 3) throw DomainError("DimensionConfig: need N >= 3");
        DimensionConfig d;
        d.N = N;
        d.m0 = (N - 3) / 2;
        d.l0 = (N - 3) / 4;
        d.l1 = (N - 5) >= 0 ? (N - 5) / 4 : -1;
        d.kappaN = (N % 2 == 1) ? Rat(1, 2) : Rat(1);
        d.sphere_area = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
        return d;
    }

    bool is_even() const { return N % 2 == 0; }
    // Dimension of the coefficient vector c.
    int family_size() const { return m0 + 1; }
    // The even-dimension resonance index N/2 - 1.
    int resonance_index() const { return N / 2 - 1; }
};

} // namespace extcone
