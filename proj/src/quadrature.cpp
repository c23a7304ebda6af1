#include "extcone/quadrature.hpp"

#include "extcone/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace extcone {

double gauss_chebyshev(const std::function<double(double)>& f, double abs_tol, std::size_t max_nodes) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 32; n <= max_nodes; n *= 2) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double x = std::cos(M_PI * (2.0 * k - 1.0) / (2.0 * n));
            acc += f(x);
        }
        const double value = acc * M_PI / static_cast<double>(n);
        if (!std::isnan(prev) && std::abs(value - prev) <= abs_tol) return value;
        prev = value;
    }
    throw QuadratureFailure("gauss_chebyshev: node doubling exhausted before reaching tolerance");
}

double trapezoid_uniform(std::span<const double> y, double h) {
    if (y.size() < 2) return 0.0;
    double acc = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
    return acc * h;
}

PowerFit fit_power_tail(std::span<const double> r, std::span<const double> y, double floor_abs) {
    PowerFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    double sign_acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double a = std::abs(y[i]);
        if (a < floor_abs || r[i] <= 0.0) continue;
        const double lx = std::log(r[i]), ly = std::log(a);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        sign_acc += (y[i] > 0 ? 1.0 : -1.0);
        ++n;
    }
    if (n < 3) return fit;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    if (!std::isfinite(slope) || !std::isfinite(intercept) || std::abs(intercept) > 280.0)
        return fit; // roundoff-floor tails produce unusable fits
    fit.exponent = -slope;
    fit.amplitude = std::exp(intercept) * (sign_acc >= 0 ? 1.0 : -1.0);
    fit.ok = std::isfinite(fit.amplitude);
    return fit;
}

double power_tail_integral(double amp, double p, double w, double r0) {
    const double e = p - w - 1.0;
    if (e <= 0.0) throw TailDivergence("power_tail_integral: non-convergent tail exponent");
    return amp * std::pow(r0, -e) / e;
}

} // namespace extcone
