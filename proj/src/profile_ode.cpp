#include "extcone/profile_ode.hpp"

#include "extcone/dimension.hpp"
#include "extcone/errors.hpp"

#include <string>

namespace extcone {

Rat mu(int N, int m, int alpha) {
    if (N < 3 || m < 0 || alpha < 0) throw DomainError("mu: need N >= 3, m >= 0, alpha >= 0");
    const Rat a{alpha};
    return a * a + Rat(N - 2 - 2 * m) * a - Rat(N - 2 - m) * Rat(m);
}

RationalPoly apply_L(int N, int m, const RationalPoly& p) {
    const RationalPoly p1 = p.derivative();
    const RationalPoly p2 = p1.derivative();
    const RationalPoly sigma2 = RationalPoly::monomial(Rat{1}, 2);
    const RationalPoly sigma = RationalPoly::monomial(Rat{1}, 1);
    RationalPoly out = (sigma2 * p2 - p2) + (sigma * p1) * Rat(N - 1 - 2 * m) - p * (Rat(N - 2 - m) * Rat(m));
    return out;
}

RationalPoly build_profile_poly(int N, int m) {
    const auto dim = DimensionConfig::make(N);
    const bool resonance = dim.is_even() && m == dim.resonance_index();
    if (m < 0 || (m > dim.m0 && !resonance))
        throw DomainError("build_profile_poly: index m=" + std::to_string(m) +
                          " outside the admissible range for N=" + std::to_string(N));

    const int delta = m % 2;
    const int l = (m - delta) / 2;
    std::vector<Rat> coeffs(static_cast<std::size_t>(m) + 1, Rat{0});
    Rat c{1};
    coeffs[static_cast<std::size_t>(delta)] = c;
    for (int j = 0; j + 1 <= l; ++j) {
        const Rat numer = mu(N, m, delta + 2 * j);
        if (numer == 0)
            throw RecurrenceBlocked("build_profile_poly: mu(N=" + std::to_string(N) + ", m=" + std::to_string(m) +
                                    ", alpha=" + std::to_string(delta + 2 * j) + ") vanished below the top degree");
        c = c * numer / (Rat(delta + 2 * j + 2) * Rat(delta + 2 * j + 1));
        coeffs[static_cast<std::size_t>(delta + 2 * (j + 1))] = c;
    }
    return RationalPoly{std::move(coeffs), delta == 0 ? Parity::even : Parity::odd};
}

RationalPoly build_resonance_poly(int N) {
    if (N % 2 != 0) throw NotEvenDimension("build_resonance_poly: N must be even");
    if (N < 4) throw DomainError("build_resonance_poly: need N >= 4");
    return build_profile_poly(N, N / 2 - 1);
}

} // namespace extcone
