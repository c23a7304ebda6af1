#include "extcone/resonance.hpp"

#include "extcone/dimension.hpp"
#include "extcone/errors.hpp"
#include "extcone/ode.hpp"
#include "extcone/profile_ode.hpp"
#include "extcone/quadrature.hpp"

#include <cmath>
#include <string>

namespace extcone {

namespace {

double p2_val(double s) { return 1.0 - 2.0 * s * s; }
double p2_deriv(double s) { return -4.0 * s; }

// Right-hand side of the N=6 power-case correction ODE:
// f = 2 beta s p_2' - |p_2| p_2.
double power6_rhs(double beta, double s) {
    const double p = p2_val(s);
    return 2.0 * beta * s * p2_deriv(s) - std::abs(p) * p;
}

} // namespace

double SampledFunction::eval(double x) const {
    double sign = 1.0;
    if (x < x0) {
        if (parity == Parity::odd) {
            sign = -1.0;
            x = 2.0 * x0 - x;
        } else if (parity == Parity::even) {
            x = 2.0 * x0 - x;
        } else {
            throw DomainError("SampledFunction: evaluation left of the sampled range");
        }
    }
    if (x > x_max() + 0.5 * h) throw DomainError("SampledFunction: evaluation beyond the sampled range");
    const std::size_t n = value.size();
    std::size_t i = static_cast<std::size_t>((x - x0) / h);
    if (i >= n - 1) i = n - 2;
    const double xl = x0 + h * i;
    const double u = (x - xl) / h;
    const double v0 = value[i], v1 = value[i + 1];
    const double m0 = deriv[i] * h, m1 = deriv[i + 1] * h;
    const double u2 = u * u, u3 = u2 * u;
    const double out = (2 * u3 - 3 * u2 + 1) * v0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * v1 +
                       (u3 - u2) * m1;
    return sign * out;
}

double SampledFunction::eval_derivative(double x) const {
    double sign = 1.0;
    if (x < x0) {
        // derivative picks up the opposite sign of the value extension
        if (parity == Parity::odd) {
            x = 2.0 * x0 - x;
        } else if (parity == Parity::even) {
            sign = -1.0;
            x = 2.0 * x0 - x;
        } else {
            throw DomainError("SampledFunction: evaluation left of the sampled range");
        }
    }
    if (x > x_max() + 0.5 * h) throw DomainError("SampledFunction: evaluation beyond the sampled range");
    const std::size_t n = value.size();
    std::size_t i = static_cast<std::size_t>((x - x0) / h);
    if (i >= n - 1) i = n - 2;
    const double xl = x0 + h * i;
    const double u = (x - xl) / h;
    const double v0 = value[i], v1 = value[i + 1];
    const double m0 = deriv[i] * h, m1 = deriv[i + 1] * h;
    const double u2 = u * u;
    const double out = ((6 * u2 - 6 * u) * v0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * v1 +
                        (3 * u2 - 2 * u) * m1) /
                       h;
    return sign * out;
}

double chebyshev_cube_integral(int alpha) {
    if (alpha < 1) throw DomainError("chebyshev_cube_integral: need alpha >= 1 (alpha = 0 gives pi)");
    auto f = [alpha](double s) {
        const double t = std::cos(alpha * std::acos(s));
        return t * t * t;
    };
    return gauss_chebyshev(f, 1e-12);
}

RationalPoly quadratic_correction_analytic(int N, const Rat& phi2) {
    if (N < 4 || N % 2 != 0) throw NotEvenDimension("quadratic_correction_analytic: N must be even, >= 4");
    const RationalPoly p = build_resonance_poly(N);
    const RationalPoly rhs_poly = (p * p) * (-phi2);

    // Solve L_N q = rhs on even polynomials of degree <= N-2. In the even
    // monomial basis the system is upper bidiagonal:
    //   mu_a x_a - (2a+2)(2a+1) x_{a+1} = rhs_a,  mu_a = 4a^2 - (N/2-1)^2.
    const int top = (N - 2) / 2;
    const Rat res_sq = Rat(N / 2 - 1) * Rat(N / 2 - 1);
    std::vector<Rat> x(static_cast<std::size_t>(top) + 2, Rat{0});
    for (int a = top; a >= 0; --a) {
        const Rat mu_a = Rat(4) * Rat(a) * Rat(a) - res_sq;
        const Rat carry = rhs_poly.coeff(2 * a) + Rat(2 * a + 2) * Rat(2 * a + 1) * x[static_cast<std::size_t>(a) + 1];
        if (mu_a == 0) {
            if (carry != 0)
                throw NoSolution("quadratic_correction_analytic: inconsistent system at the resonant power");
            x[static_cast<std::size_t>(a)] = 0; // kernel direction, fixed below by q(0)=0
        } else {
            x[static_cast<std::size_t>(a)] = carry / mu_a;
        }
    }

    std::vector<Rat> coeffs(static_cast<std::size_t>(N - 2) + 1, Rat{0});
    for (int a = 0; a <= top; ++a) coeffs[static_cast<std::size_t>(2 * a)] = x[static_cast<std::size_t>(a)];
    RationalPoly q{std::move(coeffs), Parity::even};

    if (N % 4 == 2) {
        // kernel multiple of p_{N/2-1} fixed by q(0) = 0 (p(0) = 1 here)
        q = q - p * q.coeff(0);
    }

    if (!(apply_L(N, N / 2 - 1, q) + (p * p) * phi2).is_zero())
        throw NoSolution("quadratic_correction_analytic: residual check failed");
    return q;
}

double beta_star_numerator() {
    // int_0^1 |p_2|^3 w ds = (1/2) int_{-1}^1 (even integrand)
    return 0.5 * gauss_chebyshev([](double s) {
        const double p = p2_val(s);
        return std::abs(p) * p * p;
    });
}

double beta_star_denominator() {
    return gauss_chebyshev([](double s) { return s * p2_deriv(s) * p2_val(s); });
}

double compute_beta_star() { return beta_star_numerator() / beta_star_denominator(); }

SampledFunction compute_tilde_p2(const SigmaGrid& grid) {
    if (grid.eta <= 0) throw DomainError("compute_tilde_p2: eta must be positive");
    SampledFunction out;
    out.x0 = 0.0;
    out.parity = Parity::odd;
    out.h = (1.0 - grid.eta) / static_cast<double>(grid.n - 1);
    out.value.resize(grid.n);
    out.deriv.resize(grid.n);

    auto rhs = [](double s, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = y[1];
        dy[1] = (s * y[1] - 4.0 * y[0]) / (1.0 - s * s);
    };
    std::array<double, 2> y{0.0, 1.0};
    out.value[0] = y[0];
    out.deriv[0] = y[1];
    for (std::size_t i = 1; i < grid.n; ++i) {
        ode_integrate(rhs, y, out.h * (i - 1), out.h * i, 1e-13, 1e-13);
        out.value[i] = y[0];
        out.deriv[i] = y[1];
    }
    return out;
}

SampledFunction compute_tilde_p_power6(const SigmaGrid& grid) {
    const double beta = compute_beta_star();

    // State: (tp2, tp2', I1, I2) with I1 = int_0^s tp2 w f, I2 = int_0^s p2 w f;
    // variation of parameters then gives q = p2 I1 - tp2 I2 with q(0) = 0.
    auto rhs = [beta](double s, const std::array<double, 4>& y, std::array<double, 4>& dy) {
        const double w = 1.0 / std::sqrt(1.0 - s * s);
        const double f = power6_rhs(beta, s);
        dy[0] = y[1];
        dy[1] = (s * y[1] - 4.0 * y[0]) / (1.0 - s * s);
        dy[2] = y[0] * w * f;
        dy[3] = p2_val(s) * w * f;
    };

    SampledFunction out;
    out.x0 = 0.0;
    out.parity = Parity::even;
    out.h = (1.0 - grid.eta) / static_cast<double>(grid.n - 1);
    out.value.resize(grid.n);
    out.deriv.resize(grid.n);

    std::array<double, 4> y{0.0, 1.0, 0.0, 0.0};
    out.value[0] = 0.0;
    out.deriv[0] = 0.0;
    for (std::size_t i = 1; i < grid.n; ++i) {
        const double s0 = out.h * (i - 1), s1 = out.h * i;
        try {
            ode_integrate(rhs, y, s0, s1, 1e-13, 1e-13);
        } catch (const StepFailure&) {
            throw QuadratureFailure("compute_tilde_p_power6: endpoint-weighted integrals failed near sigma=1");
        }
        const double s = s1;
        out.value[i] = p2_val(s) * y[2] - y[0] * y[3];
        out.deriv[i] = p2_deriv(s) * y[2] - y[1] * y[3];
    }
    return out;
}

double ResonanceCorrection::tilde_p(double s) const {
    switch (kind) {
        case Kind::analytic: return tilde_p_poly.eval(s);
        case Kind::power6: return tilde_p_sampled.eval(s);
        case Kind::power4_none: return 0.0;
    }
    return 0.0;
}

double ResonanceCorrection::tilde_p_derivative(double s) const {
    switch (kind) {
        case Kind::analytic: return tilde_p_poly.eval_derivative(s);
        case Kind::power6: return tilde_p_sampled.eval_derivative(s);
        case Kind::power4_none: return 0.0;
    }
    return 0.0;
}

ResonanceCorrection ResonanceCorrection::make(int N, const NonlinearitySpec& spec, const SigmaGrid& grid) {
    if (N % 2 != 0) throw NotEvenDimension("ResonanceCorrection: resonances exist in even dimensions only");
    ResonanceCorrection rc;
    rc.N = N;
    if (spec.kind == NonlinearitySpec::Kind::analytic) {
        rc.kind = Kind::analytic;
        Rat phi2{0};
        for (const auto& [k, v] : spec.phi)
            if (k == 2) phi2 = Rat(v);
        rc.tilde_p_poly = quadratic_correction_analytic(N, phi2);
    } else if (spec.kind == NonlinearitySpec::Kind::power && N == 6) {
        rc.kind = Kind::power6;
        rc.tilde_p_sampled = compute_tilde_p_power6(grid);
        rc.beta = compute_beta_star();
    } else if (spec.kind == NonlinearitySpec::Kind::power && N == 4) {
        rc.kind = Kind::power4_none;
    } else {
        throw DomainError("ResonanceCorrection: unsupported (N, nonlinearity) pair");
    }
    return rc;
}

TildePhi TildePhi::make(int N, double c_tilde, double R, const NonlinearitySpec& spec, const SigmaGrid& grid) {
    if (R <= 0) throw DomainError("TildePhi: R must be positive");
    TildePhi tp;
    tp.N = N;
    tp.c_tilde = c_tilde;
    tp.R = R;
    tp.correction = ResonanceCorrection::make(N, spec, grid);
    tp.c_hat_sq = (tp.correction.kind == ResonanceCorrection::Kind::power6)
                      ? std::abs(c_tilde) * c_tilde
                      : c_tilde * c_tilde;
    tp.p_res = build_resonance_poly(N);
    return tp;
}

double eval_tilde_phi(const TildePhi& tp, double t, double r) {
    if (r <= 0 || std::abs(t / r) >= 1.0) throw DomainError("eval_tilde_phi: need r > 0 and |t/r| < 1");
    const double s = t / r;
    const double amp = tp.c_tilde + tp.correction.beta * tp.c_hat_sq * std::log(r / tp.R);
    const double val = amp * tp.p_res.eval(s) + tp.c_hat_sq * tp.correction.tilde_p(s);
    return std::pow(r, 1.0 - 0.5 * tp.N) * val;
}

double eval_tilde_phi_dt(const TildePhi& tp, double t, double r) {
    if (r <= 0 || std::abs(t / r) >= 1.0) throw DomainError("eval_tilde_phi_dt: need r > 0 and |t/r| < 1");
    const double s = t / r;
    const double amp = tp.c_tilde + tp.correction.beta * tp.c_hat_sq * std::log(r / tp.R);
    const double val = amp * tp.p_res.eval_derivative(s) + tp.c_hat_sq * tp.correction.tilde_p_derivative(s);
    return std::pow(r, -0.5 * tp.N) * val;
}

double eval_tilde_phi_dr(const TildePhi& tp, double t, double r) {
    if (r <= 0 || std::abs(t / r) >= 1.0) throw DomainError("eval_tilde_phi_dr: need r > 0 and |t/r| < 1");
    const double s = t / r;
    const double beta_chat = tp.correction.beta * tp.c_hat_sq;
    const double amp = tp.c_tilde + beta_chat * std::log(r / tp.R);
    const double stuff = amp * tp.p_res.eval(s) + tp.c_hat_sq * tp.correction.tilde_p(s);
    const double dstuff_ds = amp * tp.p_res.eval_derivative(s) + tp.c_hat_sq * tp.correction.tilde_p_derivative(s);
    return std::pow(r, -0.5 * tp.N) *
           ((1.0 - 0.5 * tp.N) * stuff + beta_chat * tp.p_res.eval(s) - s * dstuff_ds);
}

double residual_tilde_phi(const TildePhi& tp, const NonlinearitySpec& spec, double t, double r, double h) {
    auto inside = [&](double tt, double rr) { return rr > 0 && std::abs(tt / rr) < 1.0; };
    if (!inside(t + h, r) || !inside(t - h, r) || !inside(t, r - h) || !inside(t, r + h))
        throw DomainError("residual_tilde_phi: finite-difference stencil leaves the cone interior");
    const double c = eval_tilde_phi(tp, t, r);
    const double utt = (eval_tilde_phi(tp, t + h, r) - 2.0 * c + eval_tilde_phi(tp, t - h, r)) / (h * h);
    const double up = eval_tilde_phi(tp, t, r + h);
    const double um = eval_tilde_phi(tp, t, r - h);
    const double urr = (up - 2.0 * c + um) / (h * h);
    const double ur = (up - um) / (2.0 * h);
    const double lap = urr + (tp.N - 1) / r * ur;
    return utt - lap - nonlinearity_eval(spec, tp.N, r, c);
}

double residual_tilde_phi_closed_form(const TildePhi& tp, const NonlinearitySpec& spec, double t, double r) {
    const double s = t / r;
    if (r <= 0 || std::abs(s) >= 1.0) throw DomainError("residual_tilde_phi_closed_form: outside the cone");
    const double ct = tp.c_tilde;
    switch (tp.correction.kind) {
        case ResonanceCorrection::Kind::analytic: {
            double phi2 = 0.0;
            for (const auto& [k, v] : spec.phi)
                if (k == 2) phi2 = v;
            const double p = tp.p_res.eval(s);
            const double q = tp.correction.tilde_p(s);
            const double main = phi2 * std::pow(r, -0.5 * tp.N - 1.0) *
                                (-2.0 * ct * ct * ct * p * q - ct * ct * ct * ct * q * q);
            // higher-order analytic terms phi_c evaluated on phi~ itself
            double phic = 0.0;
            const double u = eval_tilde_phi(tp, t, r);
            for (const auto& [k, v] : spec.phi) {
                if (k <= 2) continue;
                phic += v * std::pow(r, (k - 1) * (0.5 * tp.N - 1.0) - 2.0) * std::pow(u, k);
            }
            return main - phic;
        }
        case ResonanceCorrection::Kind::power6: {
            const double phi_res = ct * tp.p_res.eval(s) / (r * r);
            const double u = eval_tilde_phi(tp, t, r);
            return std::abs(phi_res) * phi_res - std::abs(u) * u;
        }
        case ResonanceCorrection::Kind::power4_none: {
            // direct substitution: Box(c~ phi_1) = 0 so the residual is
            // -|phi~|^2 phi~; the paper's display carries the opposite sign.
            const double u = ct * s / r;
            return -u * u * u;
        }
    }
    return 0.0;
}

double nonlinearity_eval(const NonlinearitySpec& spec, int N, double r, double u) {
    switch (spec.kind) {
        case NonlinearitySpec::Kind::none: return 0.0;
        case NonlinearitySpec::Kind::power: {
            const double e = 4.0 / (N - 2);
            return std::pow(std::abs(u), e) * u;
        }
        case NonlinearitySpec::Kind::analytic: {
            if (std::isfinite(spec.tau) && std::abs(std::pow(r, 0.5 * N - 1.0) * u) >= spec.tau)
                throw ConvergenceRadius("nonlinearity_eval: |r^{N/2-1} u| exceeds the convergence witness");
            double acc = 0.0;
            for (const auto& [k, v] : spec.phi) {
                const double term = v * std::pow(r, (k - 1) * (0.5 * N - 1.0) - 2.0) * std::pow(u, k);
                acc += term;
                if (std::abs(term) < 1e-18 * std::abs(acc)) break;
            }
            return acc;
        }
    }
    return 0.0;
}

} // namespace extcone
