#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace extcone {

// Gauss-Chebyshev quadrature of int_{-1}^{1} f(s) (1-s^2)^{-1/2} ds.
// The node count doubles until two successive values agree to abs_tol;
// throws QuadratureFailure if max_nodes is exhausted first.
double gauss_chebyshev(const std::function<double(double)>& f, double abs_tol = 1e-10,
                       std::size_t max_nodes = (1u << 20));

// Trapezoid rule on a uniform grid with spacing h.
double trapezoid_uniform(std::span<const double> y, double h);

// Least-squares power-law fit |y| ~ amp * r^{-p} over the given samples
// (log-log regression, samples with |y| below floor_abs are skipped).
struct PowerFit {
    double amplitude = 0.0; // signed: recovered from the dominant sign
    double exponent = 0.0;  // decay rate p in y ~ amplitude * r^{-p}
    bool ok = false;        // false when too few usable samples
};
PowerFit fit_power_tail(std::span<const double> r, std::span<const double> y,
                        double floor_abs = 1e-300);

// int_{r0}^{inf} (amp r^{-p}) r^{w} dr, assuming convergence (p > w+1).
double power_tail_integral(double amp, double p, double w, double r0);

} // namespace extcone
