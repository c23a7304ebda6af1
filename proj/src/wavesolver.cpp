#include "extcone/wavesolver.hpp"

#include "extcone/dimension.hpp"
#include "extcone/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace extcone {

namespace {

double sphere_area(int N) { return DimensionConfig::make(N).sphere_area; }

// Discrete S-norm of one time slice, restricted to r >= rlo.
// Power case: int |u|^{2(N+1)/(N-2)} dx; analytic: || r^{(N-6)/4} u ||_{L^4}^2.
double snorm_slice(const FieldState& st, const NonlinearitySpec& spec, double rlo) {
    const int N = st.N;
    double acc = 0.0;
    for (std::size_t j = 0; j < st.size(); ++j) {
        const double r = st.radius(j);
        if (r < rlo) continue;
        const double w = std::pow(r, N - 1);
        if (spec.kind == NonlinearitySpec::Kind::power) {
            acc += std::pow(std::abs(st.u[j]), 2.0 * (N + 1) / (N - 2)) * w;
        } else {
            const double g = std::pow(r, 0.25 * (N - 6)) * st.u[j];
            acc += g * g * g * g * w;
        }
    }
    acc *= st.h * sphere_area(N);
    return spec.kind == NonlinearitySpec::Kind::power ? acc : std::sqrt(acc);
}

Trajectory evolve_forward(const FieldState& initial, const ForcingFn& forcing,
                          const NonlinearitySpec& spec, double R, const EvolveOptions& opt) {
    const int N = initial.N;
    const double h = initial.h;
    if (opt.cfl <= 0.0 || opt.cfl > 1.0)
        throw CFLViolation("evolve_exterior: need 0 < cfl <= 1 for the reduced 1+1 system");
    const double dt = opt.cfl * h;
    const long n_steps = std::max<long>(1, std::lround(opt.T / dt));
    const std::size_t M = initial.size() - 1;

    if (opt.origin_mode && std::abs(initial.r0 - h) > 1e-9 * h)
        throw DomainError("evolve_exterior: origin mode expects the grid to start at r = h");
    if (!opt.origin_mode && static_cast<std::size_t>(n_steps) + 2 > M)
        throw DomainError("evolve_exterior: grid too short for the horizon (the active window vanishes)");

    std::vector<double> rpow(M + 1), inv_pot(M + 1), half_pot(M + 1), radius(M + 1);
    const double pot_coef = 0.25 * (N - 1) * (N - 3);
    for (std::size_t j = 0; j <= M; ++j) {
        const double r = initial.radius(j);
        radius[j] = r;
        rpow[j] = std::pow(r, 0.5 * (N - 1));
        const double a = 0.5 * dt * dt * pot_coef / (r * r);
        half_pot[j] = a;
        inv_pot[j] = 1.0 / (1.0 + a);
    }

    std::vector<double> vprev(M + 1), vcur(M + 1), vnext(M + 1);
    for (std::size_t j = 0; j <= M; ++j) vprev[j] = rpow[j] * initial.u[j];

    auto source = [&](double t, std::size_t j, const std::vector<double>& v) {
        double s = 0.0;
        if (forcing) s += forcing(t, radius[j]);
        if (!spec.is_none()) s += nonlinearity_eval(spec, N, radius[j], v[j] / rpow[j]);
        return rpow[j] * s;
    };

    const double lam2 = opt.cfl * opt.cfl;

    // Taylor seed of the first level (one-time O(dt^3) error).
    {
        const std::size_t jlo = opt.origin_mode ? 0 : 1;
        for (std::size_t j = jlo; j < M; ++j) {
            const double vl = (j == 0) ? 0.0 : vprev[j - 1]; // origin ghost v(0) = 0
            const double lap = lam2 * 0.5 * (vprev[j + 1] - 2.0 * vprev[j] + vl);
            vcur[j] = vprev[j] + dt * rpow[j] * initial.ut[j] + lap - half_pot[j] * vprev[j] +
                      0.5 * dt * dt * source(0.0, j, vprev);
        }
        vcur[M] = vprev[M] - opt.cfl * (vprev[M] - vprev[M - 1]) + dt * rpow[M] * initial.ut[M];
        if (!opt.origin_mode) vcur[0] = vprev[0];
    }

    std::set<long> save_steps{0, n_steps};
    for (double ts : opt.save_times) {
        const long k = std::lround(std::abs(ts) / dt);
        if (k >= 0 && k <= n_steps) save_steps.insert(k);
    }
    if (opt.save_every > 0)
        for (long k = 0; k <= n_steps; k += opt.save_every) save_steps.insert(k);

    Trajectory traj;
    traj.N = N;
    traj.R = R;
    traj.h = h;
    traj.dt = dt;
    traj.horizon = n_steps * dt;

    auto make_saved = [&](long n, const std::vector<double>& v, const std::vector<double>& vt_scaled) {
        const std::size_t jlo = opt.origin_mode ? 0 : static_cast<std::size_t>(n);
        FieldState st;
        st.N = N;
        st.t = n * dt;
        st.r0 = radius[jlo];
        st.h = h;
        st.u.resize(M + 1 - jlo);
        st.ut.resize(M + 1 - jlo);
        for (std::size_t j = jlo; j <= M; ++j) {
            st.u[j - jlo] = v[j] / rpow[j];
            st.ut[j - jlo] = vt_scaled[j] / rpow[j];
        }
        return st;
    };

    if (save_steps.count(0)) {
        std::vector<double> vt0(M + 1);
        for (std::size_t j = 0; j <= M; ++j) vt0[j] = rpow[j] * initial.ut[j];
        traj.states.push_back(make_saved(0, vprev, vt0));
    }

    double s_accum = 0.0;
    std::vector<double> vt_tmp(M + 1, 0.0);

    for (long n = 1; n <= n_steps; ++n) {
        const double t_n = n * dt;
        const std::size_t jlo = opt.origin_mode ? 0 : static_cast<std::size_t>(n + 1);
        for (std::size_t j = std::max<std::size_t>(jlo, opt.origin_mode ? 0 : 1); j < M; ++j) {
            const double vl = (j == 0) ? 0.0 : vcur[j - 1];
            vnext[j] = (2.0 * vcur[j] - (1.0 + half_pot[j]) * vprev[j] +
                        lam2 * (vcur[j + 1] - 2.0 * vcur[j] + vl) + dt * dt * source(t_n, j, vcur)) *
                       inv_pot[j];
        }
        vnext[M] = vcur[M] - opt.cfl * (vcur[M] - vcur[M - 1]);

        if (save_steps.count(n)) {
            for (std::size_t j = (opt.origin_mode ? 0 : static_cast<std::size_t>(n)); j <= M; ++j)
                vt_tmp[j] = (j >= jlo && j < M) ? (vnext[j] - vprev[j]) / (2.0 * dt)
                                                : (vcur[j] - vprev[j]) / dt;
            traj.states.push_back(make_saved(n, vcur, vt_tmp));
        }

        if (opt.track_snorm && !spec.is_none() && n % 8 == 0) {
            FieldState slice;
            slice.N = N;
            slice.t = t_n;
            slice.r0 = radius[0];
            slice.h = h;
            slice.u.resize(M + 1);
            slice.ut.assign(M + 1, 0.0);
            for (std::size_t j = 0; j <= M; ++j) slice.u[j] = vcur[j] / rpow[j];
            s_accum += 8.0 * dt * snorm_slice(slice, spec, R + t_n);
            const double total = spec.kind == NonlinearitySpec::Kind::power
                                     ? std::pow(s_accum, (N - 2.0) / (2.0 * (N + 1.0)))
                                     : std::sqrt(s_accum);
            if (total > opt.snorm_cap)
                throw BlowupDetected("evolve_exterior: discrete S-norm exceeded the configured cap");
        }

        std::swap(vprev, vcur);
        std::swap(vcur, vnext);
    }
    return traj;
}

} // namespace

Trajectory evolve_exterior(const FieldState& initial, const ForcingFn& forcing,
                           const NonlinearitySpec& spec, double R, const EvolveOptions& opt) {
    if (initial.size() < 8) throw DomainError("evolve_exterior: initial grid too small");
    if (opt.T >= 0.0) return evolve_forward(initial, forcing, spec, R, opt);

    // Backward run: the equation is time-reversible; evolve w(s) = u(-s).
    FieldState flipped = initial;
    for (auto& x : flipped.ut) x = -x;
    EvolveOptions o2 = opt;
    o2.T = -opt.T;
    o2.save_times.clear();
    for (double ts : opt.save_times) o2.save_times.push_back(-ts);
    ForcingFn f2;
    if (forcing) f2 = [forcing](double t, double r) { return forcing(-t, r); };
    Trajectory traj = evolve_forward(flipped, f2, spec, R, o2);
    for (auto& st : traj.states) {
        st.t = -st.t;
        for (auto& x : st.ut) x = -x;
    }
    return traj;
}

double exterior_energy(const FieldState& state, double rho0) {
    const int N = state.N;
    const auto ur = state.radial_derivative();
    double acc = 0.0;
    bool first = true;
    for (std::size_t j = 0; j < state.size(); ++j) {
        const double r = state.radius(j);
        if (r < rho0 - 1e-12) continue;
        const double val = (ur[j] * ur[j] + state.ut[j] * state.ut[j]) * std::pow(r, N - 1);
        if (first) {
            acc += 0.5 * val;
            first = false;
        } else if (j + 1 == state.size()) {
            acc += 0.5 * val;
        } else {
            acc += val;
        }
    }
    double energy = acc * state.h;

    // analytic tail: fit the outermost stretch of u_r and u_t to power laws
    // (kept clear of any radiating shell sitting further in)
    const double rmax = state.r_max();
    std::vector<double> rs, urs, uts;
    for (std::size_t j = 0; j < state.size(); ++j) {
        const double r = state.radius(j);
        if (r >= 0.65 * rmax && r >= rho0) {
            rs.push_back(r);
            urs.push_back(ur[j]);
            uts.push_back(state.ut[j]);
        }
    }
    for (const auto& fit : {fit_power_tail(rs, urs), fit_power_tail(rs, uts)}) {
        if (!fit.ok) continue;
        const double margin = 2.0 * fit.exponent - N;
        if (margin > 0.1) energy += fit.amplitude * fit.amplitude * std::pow(rmax, -margin) / margin;
    }
    return sphere_area(N) * energy;
}

Extrapolated asymptotic_exterior_energy(const Trajectory& traj, double R) {
    const double T = traj.horizon;
    if (T <= 0) throw DomainError("asymptotic_exterior_energy: empty trajectory");
    const double sgn = traj.states.back().t >= 0 ? 1.0 : -1.0;

    Extrapolated out;
    for (double frac : {0.25, 0.5, 1.0}) {
        const FieldState& st = traj.state_near(sgn * frac * T);
        out.times.push_back(std::abs(st.t));
        out.samples.push_back(exterior_energy(st, R + std::abs(st.t)));
    }
    const double E1 = out.samples[0], E2 = out.samples[1], E3 = out.samples[2];
    const auto lin = [](double ta, double Ea, double tb, double Eb) {
        const double xa = 1.0 / ta, xb = 1.0 / tb;
        return (Eb * xa - Ea * xb) / (xa - xb);
    };
    const double e12 = lin(out.times[0], E1, out.times[1], E2);
    const double e23 = lin(out.times[1], E2, out.times[2], E3);

    const bool decreasing = E1 >= E2 && E2 >= E3;
    const double q = E2 > 0 ? E3 / E2 : 0.0;
    if (decreasing && q < 0.35) {
        // decay faster than the 1/t model resolves: Aitken on the geometric
        // time sequence, with the limit pinned to [0, E3] (energies decrease)
        const double den = E1 - 2.0 * E2 + E3;
        const double aitken = den != 0.0 ? (E1 * E3 - E2 * E2) / den : 0.0;
        out.value = std::min(std::max(aitken, 0.0), E3);
        out.uncertainty = (q < 1.0) ? E3 * q / (1.0 - q) : E3;
        return out;
    }

    // quadratic-in-1/t model through all three samples
    const double x1 = 1.0 / out.times[0], x2 = 1.0 / out.times[1], x3 = 1.0 / out.times[2];
    const double l1 = (0 - x2) * (0 - x3) / ((x1 - x2) * (x1 - x3));
    const double l2 = (0 - x1) * (0 - x3) / ((x2 - x1) * (x2 - x3));
    const double l3 = (0 - x1) * (0 - x2) / ((x3 - x1) * (x3 - x2));
    out.value = l1 * E1 + l2 * E2 + l3 * E3;
    out.uncertainty = std::abs(e23 - e12);
    if (out.uncertainty > std::abs(E3) + 1e-12)
        throw NonConvergent("asymptotic_exterior_energy: successive extrapolates disagree beyond the signal");
    return out;
}

namespace {

// Suffix H-type energy of one slice evaluated on a geometric R~ mesh.
double sup_weighted_slice(const FieldState& st, double kappa, double rlo, int mode) {
    const int N = st.N;
    const auto ur = st.radial_derivative();
    const std::size_t n = st.size();
    std::vector<double> dens(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = st.radius(j);
        double d = 0.0;
        if (mode != 2) d += ur[j] * ur[j];
        if (mode != 1) d += st.ut[j] * st.ut[j];
        dens[j] = d * std::pow(r, N - 1);
    }
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] + dens[j] * st.h;

    const double sphere = sphere_area(N);
    double best = 0.0;
    double Rt = std::max(rlo, st.r0);
    const double rmax = st.r_max();
    while (Rt < rmax) {
        const std::size_t j = static_cast<std::size_t>(std::ceil((Rt - st.r0) / st.h));
        if (j >= n) break;
        const double e = sphere * suffix[j];
        best = std::max(best, std::pow(st.radius(j), kappa) * std::sqrt(e));
        Rt *= 1.1892; // 16 points per decade of R~
    }
    return best;
}

} // namespace

double weighted_norm(const Trajectory& traj, NormKind kind, double kappa, double R,
                     const NonlinearitySpec& spec) {
    if (kind == NormKind::S) {
        // L^2-in-time (analytic) or plain space-time integral (power) over saves
        std::vector<const FieldState*> sorted;
        for (const auto& s : traj.states) sorted.push_back(&s);
        std::sort(sorted.begin(), sorted.end(),
                  [](const FieldState* a, const FieldState* b) { return a->t < b->t; });
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            const double w = sorted[i + 1]->t - sorted[i]->t;
            acc += 0.5 * w *
                   (snorm_slice(*sorted[i], spec, R + std::abs(sorted[i]->t)) +
                    snorm_slice(*sorted[i + 1], spec, R + std::abs(sorted[i + 1]->t)));
        }
        const int N = traj.N;
        return spec.kind == NonlinearitySpec::Kind::power
                   ? std::pow(acc, (N - 2.0) / (2.0 * (N + 1.0)))
                   : std::sqrt(acc);
    }

    int mode = 0; // 0: full H-norm, 1: H^1 part only, 2: L^2 part only
    if (kind == NormKind::Wtilde) mode = (traj.N % 4 == 0) ? 1 : 2;
    double best = 0.0;
    for (const auto& st : traj.states)
        best = std::max(best, sup_weighted_slice(st, kappa, R + std::abs(st.t), mode));
    return best;
}

double weighted_forcing_norm(const ForcingFn& f, int N, double kappa, double R, double T_slab,
                             double r_max, double h, double dt) {
    const std::size_t nr = static_cast<std::size_t>((r_max - R) / h) + 1;
    const std::size_t nt = static_cast<std::size_t>(2.0 * T_slab / dt) + 1;
    const double sphere = sphere_area(N);

    // suffix L2 norms of each slice: S[t][j] = int_{r_j}^{r_max} f^2 r^{N-1} dr
    std::vector<std::vector<double>> suffix(nt, std::vector<double>(nr + 1, 0.0));
    std::vector<double> times(nt);
    for (std::size_t it = 0; it < nt; ++it) {
        const double t = -T_slab + it * dt;
        times[it] = t;
        auto& S = suffix[it];
        for (std::size_t j = nr; j-- > 0;) {
            const double r = R + j * h;
            const double v = f(t, r);
            S[j] = S[j + 1] + v * v * std::pow(r, N - 1) * h;
        }
    }
    auto l2_beyond = [&](std::size_t it, double rho) {
        if (rho >= r_max) return 0.0;
        const std::size_t j = static_cast<std::size_t>(std::max(0.0, std::ceil((rho - R) / h)));
        return std::sqrt(sphere * suffix[it][std::min(j, nr)]);
    };

    double best = 0.0;
    for (std::size_t a = 0; a < nt; a += std::max<std::size_t>(1, nt / 32)) {
        const double tt = times[a];
        double Rt = R;
        while (Rt < r_max) {
            double acc = 0.0;
            for (std::size_t it = 0; it < nt; ++it)
                acc += dt * l2_beyond(it, Rt + std::abs(times[it] - tt));
            best = std::max(best, std::pow(Rt, kappa) * acc);
            Rt *= 1.1892;
        }
    }
    return best;
}

std::vector<double> solve_exterior_poisson(std::span<const double> f, double uR, int N, double R,
                                           double h) {
    const std::size_t n = f.size();
    if (n < 4) throw DomainError("solve_exterior_poisson: need at least 4 samples");
    std::vector<double> I1(n, 0.0); // int_R^r f s^{N-1} ds
    std::vector<double> I2(n, 0.0); // int_r^{rmax} f s ds
    for (std::size_t j = 1; j < n; ++j) {
        const double ra = R + (j - 1) * h, rb = R + j * h;
        I1[j] = I1[j - 1] + 0.5 * h * (f[j - 1] * std::pow(ra, N - 1) + f[j] * std::pow(rb, N - 1));
    }
    for (std::size_t j = n - 1; j-- > 0;) {
        const double ra = R + j * h, rb = R + (j + 1) * h;
        I2[j] = I2[j + 1] + 0.5 * h * (f[j] * ra + f[j + 1] * rb);
    }

    // tail of int_r^inf f s ds beyond the grid
    const double rmax = R + (n - 1) * h;
    std::vector<double> rs, ys;
    for (std::size_t j = 0; j < n; ++j) {
        const double r = R + j * h;
        if (r >= 0.1 * rmax) {
            rs.push_back(r);
            ys.push_back(f[j]);
        }
    }
    double tail = 0.0;
    const PowerFit fit = fit_power_tail(rs, ys);
    if (fit.ok) {
        if (fit.exponent <= 2.1 && std::abs(fit.amplitude) * std::pow(rmax, -fit.exponent) > 1e-14)
            throw TailDivergence("solve_exterior_poisson: forcing tail integral does not converge");
        if (fit.exponent > 2.1) tail = fit.amplitude * std::pow(rmax, 2.0 - fit.exponent) / (fit.exponent - 2.0);
    }

    const double Iall = I2[0] + tail;
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = R + j * h;
        u[j] = I1[j] / ((2.0 - N) * std::pow(r, N - 2)) + (I2[j] + tail) / (2.0 - N) +
               (uR + Iall / (N - 2.0)) * std::pow(R / r, N - 2);
    }
    return u;
}

HardyCheck hardy_check(std::span<const double> u, std::span<const double> lap_u, double R,
                       double kappa, int N, double h) {
    if (N < 5) throw DomainError("hardy_check: needs N >= 5");
    if (kappa < 0.0 || kappa >= 3.0) throw DomainError("hardy_check: needs 0 <= kappa < 3");
    const std::size_t n = u.size();
    const double sphere = sphere_area(N);

    std::vector<double> d1(n, 0.0), d2(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        d1[j] = (u[j + 1] - u[j - 1]) / (2.0 * h);
        d2[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
    }
    d1[0] = (u[1] - u[0]) / h;
    d2[0] = d2[1];
    d1[n - 1] = (u[n - 1] - u[n - 2]) / h;
    d2[n - 1] = d2[n - 2];

    std::vector<double> s_main(n + 1, 0.0), s_lap(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) {
        const double r = R + j * h;
        const double w = std::pow(r, N - 1);
        const double main = d2[j] * d2[j] + (d1[j] / r) * (d1[j] / r) + (u[j] / (r * r)) * (u[j] / (r * r));
        s_main[j] = s_main[j + 1] + main * w * h;
        s_lap[j] = s_lap[j + 1] + lap_u[j] * lap_u[j] * w * h;
    }

    HardyCheck out;
    double sup_pt = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double r = R + j * h;
        sup_pt = std::max(sup_pt, std::pow(r, 0.5 * (N - 4) + kappa) * std::abs(u[j]));
    }
    double lhs_sup = 0.0, rhs_sup = 0.0;
    const double rmax = R + (n - 1) * h;
    for (double Rt = R; Rt < rmax; Rt *= 1.1892) {
        const std::size_t j = static_cast<std::size_t>(std::ceil((Rt - R) / h));
        if (j >= n) break;
        const double rr = R + j * h;
        lhs_sup = std::max(lhs_sup, std::pow(rr, kappa) * std::sqrt(sphere * s_main[j]));
        rhs_sup = std::max(rhs_sup, std::pow(rr, kappa) * std::sqrt(sphere * s_lap[j]));
    }
    out.lhs = lhs_sup + sup_pt;
    out.rhs = std::pow(R, 0.5 * (N - 4) + kappa) * std::abs(u[0]) + rhs_sup;
    out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
    return out;
}

} // namespace extcone
