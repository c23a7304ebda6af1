#include "extcone/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace extcone {

double FieldState::eval_u(double r) const {
    const double x = (r - r0) / h;
    if (x < -1e-9 || x > static_cast<double>(u.size() - 1) + 1e-9)
        throw DomainError("FieldState::eval_u: radius outside the grid");
    const std::size_t i = std::min(static_cast<std::size_t>(std::max(x, 0.0)), u.size() - 2);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * u[i] + w * u[i + 1];
}

double FieldState::eval_ut(double r) const {
    const double x = (r - r0) / h;
    if (x < -1e-9 || x > static_cast<double>(ut.size() - 1) + 1e-9)
        throw DomainError("FieldState::eval_ut: radius outside the grid");
    const std::size_t i = std::min(static_cast<std::size_t>(std::max(x, 0.0)), ut.size() - 2);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * ut[i] + w * ut[i + 1];
}

std::vector<double> FieldState::radial_derivative() const {
    const std::size_t n = u.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    return d;
}

FieldState make_state(int N, double t, double r0, double h, std::size_t n,
                      const std::function<double(double)>& u0, const std::function<double(double)>& u1) {
    FieldState s;
    s.N = N;
    s.t = t;
    s.r0 = r0;
    s.h = h;
    s.u.resize(n);
    s.ut.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.radius(i);
        s.u[i] = u0 ? u0(r) : 0.0;
        s.ut[i] = u1 ? u1(r) : 0.0;
    }
    return s;
}

FieldState zero_state(int N, double t, double r0, double h, std::size_t n) {
    return make_state(N, t, r0, h, n, nullptr, nullptr);
}

double hpair_inner(const FieldState& a, const FieldState& b, double rho0) {
    if (a.size() != b.size() || a.r0 != b.r0 || a.h != b.h)
        throw DomainError("hpair_inner: states live on different grids");
    const auto da = a.radial_derivative();
    const auto db = b.radial_derivative();
    const double sphere = 2.0 * std::pow(M_PI, 0.5 * a.N) / std::tgamma(0.5 * a.N);
    double acc = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a.radius(i);
        if (r < rho0) continue;
        const double w = std::pow(r, a.N - 1);
        const double val = (da[i] * db[i] + a.ut[i] * b.ut[i]) * w;
        // trapezoid: half weight at the first and last contributing nodes
        if (first) {
            acc += 0.5 * val;
            first = false;
        } else if (i + 1 == a.size()) {
            acc += 0.5 * val;
        } else {
            acc += val;
        }
    }
    return sphere * acc * a.h;
}

FieldState axpy_state(const FieldState& a, double s, const FieldState& b) {
    if (a.size() != b.size() || a.r0 != b.r0 || a.h != b.h)
        throw DomainError("axpy_state: states live on different grids");
    FieldState out = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.u[i] += s * b.u[i];
        out.ut[i] += s * b.ut[i];
    }
    return out;
}

const FieldState& Trajectory::state_near(double t) const {
    if (states.empty()) throw DomainError("Trajectory: no saved states");
    const FieldState* best = &states.front();
    double best_d = std::abs(best->t - t);
    for (const auto& s : states) {
        const double d = std::abs(s.t - t);
        if (d < best_d) {
            best = &s;
            best_d = d;
        }
    }
    if (best_d > 0.5 * std::max(dt, 1e-12) + 1e-9 * std::max(1.0, std::abs(t)))
        throw DomainError("Trajectory: no state saved near t = " + std::to_string(t));
    return *best;
}

} // namespace extcone
