#pragma once

#include "extcone/errors.hpp"

#include <array>
#include <cmath>

namespace extcone {

// Adaptive embedded Runge-Kutta (Cash-Karp 4/5) over a fixed-size state.
// Integrates y' = rhs(x, y) from x0 to x1 (x1 > x0), controlling the local
// error against abs_tol + rel_tol*|y|. Throws StepFailure when the step
// size underflows before reaching x1.
template <std::size_t D, class Rhs>
void ode_integrate(Rhs&& rhs, std::array<double, D>& y, double x0, double x1, double abs_tol = 1e-12,
                   double rel_tol = 1e-12) {
    using State = std::array<double, D>;
    if (x1 <= x0) return;

    constexpr double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0, a6 = 7.0 / 8;
    constexpr double b21 = 1.0 / 5;
    constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
    constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27, b54 = 35.0 / 27;
    constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                     b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
    constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594, c6 = 512.0 / 1771;
    constexpr double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384, d4 = c4 - 13525.0 / 55296,
                     d5 = -277.0 / 14336, d6 = c6 - 1.0 / 4;

    double x = x0;
    double h = (x1 - x0) / 64.0;
    const double h_min = (x1 - x0) * 1e-14;

    State k1, k2, k3, k4, k5, k6, yt, y5;
    while (x < x1) {
        if (x + h > x1) h = x1 - x;
        rhs(x, y, k1);
        for (std::size_t i = 0; i < D; ++i) yt[i] = y[i] + h * b21 * k1[i];
        rhs(x + a2 * h, yt, k2);
        for (std::size_t i = 0; i < D; ++i) yt[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
        rhs(x + a3 * h, yt, k3);
        for (std::size_t i = 0; i < D; ++i) yt[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
        rhs(x + a4 * h, yt, k4);
        for (std::size_t i = 0; i < D; ++i)
            yt[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
        rhs(x + a5 * h, yt, k5);
        for (std::size_t i = 0; i < D; ++i)
            yt[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] + b65 * k5[i]);
        rhs(x + a6 * h, yt, k6);

        double err = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            y5[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
            const double e = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
            const double scale = abs_tol + rel_tol * std::abs(y5[i]);
            err = std::max(err, std::abs(e) / scale);
        }

        if (err <= 1.0) {
            x += h;
            y = y5;
            h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-16), -0.2));
        } else {
            h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
            if (h < h_min) throw StepFailure("ode_integrate: step size underflow");
        }
    }
}

} // namespace extcone
