#pragma once

#include "extcone/errors.hpp"
#include "extcone/rational.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace extcone {

// Energy-critical nonlinearity: either the pure power |u|^{4/(N-2)} u or an
// analytic sum  sum_k phi_k |x|^{(k-1)(N/2-1)-2} u^k  with k >= 2.
struct NonlinearitySpec {
    enum class Kind { none, power, analytic };

    Kind kind = Kind::none;
    int N = 3;
    std::vector<std::pair<int, double>> phi; // (k, phi_k), analytic case
    double tau = std::numeric_limits<double>::infinity(); // convergence-radius witness

    static NonlinearitySpec none(int N) { return {Kind::none, N, {}, 0.0}; }
    static NonlinearitySpec power(int N) { return {Kind::power, N, {}, 0.0}; }
    static NonlinearitySpec analytic(int N, std::vector<std::pair<int, double>> coeffs,
                                     double tau = std::numeric_limits<double>::infinity()) {
        NonlinearitySpec s{Kind::analytic, N, std::move(coeffs), tau};
        for (std::size_t i = 0; i + 1 < s.phi.size(); ++i)
            if (s.phi[i].first >= s.phi[i + 1].first)
                throw ConfigError("NonlinearitySpec: analytic coefficients must have increasing k");
        return s;
    }

    // delta = 1 for analytic nonlinearities, 4/(N-2) for the power.
    Rat delta() const { return kind == Kind::power ? Rat(4, N - 2) : Rat(1); }

    bool is_none() const { return kind == Kind::none; }
};

double nonlinearity_eval(const NonlinearitySpec& spec, int N, double r, double u);

inline double nonlinearity_eval(const NonlinearitySpec& spec, double r, double u) {
    return nonlinearity_eval(spec, spec.N, r, u);
}

} // namespace extcone
