#include "extcone/profiles.hpp"

#include "extcone/profile_ode.hpp"
#include "extcone/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace extcone {

namespace {

std::mutex g_poly_mutex;
std::map<std::pair<int, int>, RationalPoly> g_poly_cache;

const RationalPoly& profile_poly(int N, int m) {
    std::scoped_lock lock(g_poly_mutex);
    auto key = std::make_pair(N, m);
    auto it = g_poly_cache.find(key);
    if (it == g_poly_cache.end()) it = g_poly_cache.emplace(key, build_profile_poly(N, m)).first;
    return it->second;
}

std::mutex g_gram_mutex;
std::map<std::tuple<int, double, int>, ProjectionBasis> g_gram_cache;

// Dense SPD solve by Cholesky; returns the 1-norm condition estimate.
struct CholSolve {
    std::vector<std::vector<double>> L;
    std::size_t n = 0;

    explicit CholSolve(const std::vector<std::vector<double>>& A) : L(A), n(A.size()) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = j; i < n; ++i) {
                double s = L[i][j];
                for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
                if (i == j) {
                    if (s <= 0.0) throw IllConditioned("Gram matrix not positive definite");
                    L[j][j] = std::sqrt(s);
                } else {
                    L[i][j] = s / L[j][j];
                }
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < i; ++k) b[i] -= L[i][k] * b[k];
            b[i] /= L[i][i];
        }
        for (std::size_t ii = n; ii-- > 0;) {
            for (std::size_t k = ii + 1; k < n; ++k) b[ii] -= L[k][ii] * b[k];
            b[ii] /= L[ii][ii];
        }
        return b;
    }
};

double one_norm(const std::vector<std::vector<double>>& A) {
    double best = 0.0;
    for (std::size_t j = 0; j < A.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < A.size(); ++i) s += std::abs(A[i][j]);
        best = std::max(best, s);
    }
    return best;
}

} // namespace

CoefVector CoefVector::make(int N, std::vector<double> c, double R) {
    const auto dim = DimensionConfig::make(N);
    if (static_cast<int>(c.size()) != dim.family_size())
        throw DomainError("CoefVector: expected " + std::to_string(dim.family_size()) +
                          " coefficients for N = " + std::to_string(N));
    if (R <= 0) throw DomainError("CoefVector: R must be positive");
    return CoefVector{N, std::move(c), R};
}

double eval_phi_m(int N, int m, double t, double r) {
    if (r <= 0) throw DomainError("eval_phi_m: r must be positive");
    return std::pow(r, -(N - 2 - m)) * profile_poly(N, m).eval(t / r);
}

double eval_aF(const CoefVector& cv, double t, double r) {
    if (r <= 0) throw DomainError("eval_aF: r must be positive");
    double acc = 0.0;
    for (std::size_t m = 0; m < cv.c.size(); ++m)
        if (cv.c[m] != 0.0) acc += cv.c[m] * eval_phi_m(cv.N, static_cast<int>(m), t, r);
    return acc;
}

double eval_aF_dt(const CoefVector& cv, double t, double r) {
    if (r <= 0) throw DomainError("eval_aF_dt: r must be positive");
    const double s = t / r;
    double acc = 0.0;
    for (std::size_t m = 0; m < cv.c.size(); ++m) {
        if (cv.c[m] == 0.0) continue;
        const int mm = static_cast<int>(m);
        acc += cv.c[m] * std::pow(r, -(cv.N - 1 - mm)) * profile_poly(cv.N, mm).eval_derivative(s);
    }
    return acc;
}

double eval_aF_dr(const CoefVector& cv, double t, double r) {
    if (r <= 0) throw DomainError("eval_aF_dr: r must be positive");
    const double s = t / r;
    double acc = 0.0;
    for (std::size_t m = 0; m < cv.c.size(); ++m) {
        if (cv.c[m] == 0.0) continue;
        const int mm = static_cast<int>(m);
        const auto& p = profile_poly(cv.N, mm);
        acc += cv.c[m] * std::pow(r, -(cv.N - 1 - mm)) *
               (-(cv.N - 2 - mm) * p.eval(s) - s * p.eval_derivative(s));
    }
    return acc;
}

double eval_aF_data0(const CoefVector& cv, double r) {
    if (r <= 0) throw DomainError("eval_aF_data0: r must be positive");
    double acc = 0.0;
    for (std::size_t m = 0; m < cv.c.size(); m += 2)
        acc += cv.c[m] * std::pow(r, -(cv.N - 2 - static_cast<int>(m)));
    return acc;
}

double eval_aF_data1(const CoefVector& cv, double r) {
    if (r <= 0) throw DomainError("eval_aF_data1: r must be positive");
    double acc = 0.0;
    for (std::size_t m = 1; m < cv.c.size(); m += 2)
        acc += cv.c[m] * std::pow(r, -(cv.N - 1 - static_cast<int>(m)));
    return acc;
}

double c_norm(const CoefVector& cv) {
    double acc = 0.0;
    for (std::size_t m = 0; m < cv.c.size(); ++m) {
        const double w = std::pow(cv.R, -0.5 * cv.N + 1.0 + static_cast<double>(m));
        acc += w * w * cv.c[m] * cv.c[m];
    }
    return std::sqrt(acc);
}

CoefVector rescale_coefs(const CoefVector& cv) {
    CoefVector out = cv;
    out.R = 1.0;
    for (std::size_t m = 0; m < cv.c.size(); ++m)
        out.c[m] = std::pow(cv.R, -0.5 * cv.N + 1.0 + static_cast<double>(m)) * cv.c[m];
    return out;
}

double aF_exterior_energy_exact(const CoefVector& cv, double R) {
    // At t = 0:  d_r a_F = sum_{m even} -(N-2-m) c_m r^{-(N-1-m)},
    //            d_t a_F = sum_{m odd}  c_m r^{-(N-1-m)}.
    const int N = cv.N;
    const double sphere = DimensionConfig::make(N).sphere_area;
    double acc = 0.0;
    for (std::size_t m = 0; m < cv.c.size(); ++m) {
        for (std::size_t mp = 0; mp < cv.c.size(); ++mp) {
            if ((m % 2) != (mp % 2)) continue;
            double amp = cv.c[m] * cv.c[mp];
            if (m % 2 == 0) amp *= static_cast<double>((N - 2 - static_cast<int>(m)) * (N - 2 - static_cast<int>(mp)));
            const int denom = N - 2 - static_cast<int>(m) - static_cast<int>(mp);
            acc += amp * std::pow(R, -denom) / denom;
        }
    }
    return sphere * acc;
}

double ProjectionBasis::entry(std::size_t i, std::size_t j) const {
    return to_double(gram_coeff[i][j]) * std::pow(R, gram_power[i][j]);
}

ProjectionBasis gram_matrix(int N, double R, ProjSpace space) {
    if (N < 3) throw DomainError("gram_matrix: need N >= 3");
    if (R <= 0) throw DomainError("gram_matrix: R must be positive");
    {
        std::scoped_lock lock(g_gram_mutex);
        auto it = g_gram_cache.find({N, R, static_cast<int>(space)});
        if (it != g_gram_cache.end()) return it->second;
    }
    const auto dim = DimensionConfig::make(N);
    ProjectionBasis basis;
    basis.N = N;
    basis.R = R;
    basis.space = space;
    const int lmax = space == ProjSpace::H1dot ? dim.l0 : dim.l1;
    for (int l = 0; l <= lmax; ++l) basis.exponents.push_back(N - 2 - 2 * l);
    const std::size_t k = basis.exponents.size();
    basis.gram_coeff.assign(k, std::vector<Rat>(k, Rat{0}));
    basis.gram_power.assign(k, std::vector<int>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const int a = basis.exponents[i], b = basis.exponents[j];
            if (space == ProjSpace::H1dot) {
                basis.gram_coeff[i][j] = Rat(a) * Rat(b) / Rat(a + b + 2 - N);
                basis.gram_power[i][j] = N - 2 - a - b;
            } else {
                basis.gram_coeff[i][j] = Rat(1) / Rat(a + b - N);
                basis.gram_power[i][j] = N - a - b;
            }
        }
    }
    std::scoped_lock lock(g_gram_mutex);
    g_gram_cache.emplace(std::make_tuple(N, R, static_cast<int>(space)), basis);
    return basis;
}

namespace {

// Moment of a sampled function against the basis element r^{-a}:
//   H1dot: int_R^rmax u'(r) (-a r^{-a-1}) r^{N-1} dr  (+ analytic tail)
//   L2:    int_R^rmax u(r) r^{-a} r^{N-1} dr          (+ analytic tail)
double basis_moment(const FieldState& st, const std::vector<double>& samples, double R, int a, int N,
                    bool h1dot) {
    double acc = 0.0;
    bool first = true;
    const std::size_t n = st.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = st.radius(i);
        if (r < R - 1e-12) continue;
        const double g = h1dot ? -a * std::pow(r, -a - 1 + N - 1) : std::pow(r, -a + N - 1);
        const double val = samples[i] * g;
        if (first) {
            acc += 0.5 * val;
            first = false;
        } else if (i + 1 == n) {
            acc += 0.5 * val;
        } else {
            acc += val;
        }
    }
    acc *= st.h;

    // analytic tail beyond the last grid node, from a power fit of the last
    // decade of samples; skipped when the fit is unusable or non-convergent
    const double rmax = st.r_max();
    std::vector<double> rs, ys;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = st.radius(i);
        if (r >= 0.1 * rmax) {
            rs.push_back(r);
            ys.push_back(samples[i]);
        }
    }
    const PowerFit fit = fit_power_tail(rs, ys);
    if (fit.ok) {
        if (h1dot) {
            // samples are u'(r) here, already the integrand factor
            const double margin = fit.exponent + a + 1 - N;
            if (margin > 0.1) acc += -a * fit.amplitude * std::pow(rmax, -(margin)) / margin;
        } else {
            const double margin = fit.exponent + a - N;
            if (margin > 0.1) acc += fit.amplitude * std::pow(rmax, -(margin)) / margin;
        }
    }
    return acc;
}

} // namespace

ProjectionResult project(const FieldState& state, double R) {
    if (state.r0 > R + 1e-12)
        throw DomainError("project: state grid does not reach down to the projection radius");

    const auto du = state.radial_derivative();
    const auto basis0 = gram_matrix(state.N, R, ProjSpace::H1dot);
    const auto basis1 = gram_matrix(state.N, R, ProjSpace::L2);

    auto solve_component = [&](const ProjectionBasis& basis, const std::vector<double>& samples,
                               bool h1dot) -> std::vector<double> {
        const std::size_t k = basis.rank();
        if (k == 0) return {};
        std::vector<std::vector<double>> G(k, std::vector<double>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) G[i][j] = basis.entry(i, j);
        CholSolve chol(G);
        // condition estimate via the explicit inverse columns
        std::vector<std::vector<double>> Ginv(k, std::vector<double>(k));
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<double> e(k, 0.0);
            e[j] = 1.0;
            auto col = chol.solve(e);
            for (std::size_t i = 0; i < k; ++i) Ginv[i][j] = col[i];
        }
        if (one_norm(G) * one_norm(Ginv) > 1e6)
            throw IllConditioned("project: Gram solve would lose more than 6 digits");
        std::vector<double> m(k);
        for (std::size_t i = 0; i < k; ++i)
            m[i] = basis_moment(state, samples, R, basis.exponents[i], state.N, h1dot);
        return chol.solve(m);
    };

    ProjectionResult out;
    out.coeff_u0 = solve_component(basis0, du, true);
    out.coeff_u1 = solve_component(basis1, state.ut, false);

    out.projected = state;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double r = state.radius(i);
        double p0 = 0.0, p1 = 0.0;
        for (std::size_t j = 0; j < out.coeff_u0.size(); ++j)
            p0 += out.coeff_u0[j] * std::pow(r, -basis0.exponents[j]);
        for (std::size_t j = 0; j < out.coeff_u1.size(); ++j)
            p1 += out.coeff_u1[j] * std::pow(r, -basis1.exponents[j]);
        out.projected.u[i] = p0;
        out.projected.ut[i] = p1;
    }
    out.residual = axpy_state(state, -1.0, out.projected);
    return out;
}

} // namespace extcone
