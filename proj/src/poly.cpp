#include "extcone/poly.hpp"

#include "extcone/errors.hpp"

#include <sstream>

namespace extcone {

namespace {
const Rat kZero{0};
}

RationalPoly::RationalPoly(std::vector<Rat> coeffs, Parity parity)
    : coeffs_(std::move(coeffs)), parity_(parity) {
    trim();
    if (parity_ == Parity::none) {
        retag_parity();
    } else {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            const bool odd_index = (k % 2) == 1;
            if (coeffs_[k] != 0 && odd_index != (parity_ == Parity::odd)) {
                throw DomainError("RationalPoly: coefficient at power " + std::to_string(k) +
                                  " violates declared parity");
            }
        }
    }
}

RationalPoly RationalPoly::constant(const Rat& c) {
    return RationalPoly{{c}, Parity::even};
}

RationalPoly RationalPoly::monomial(const Rat& c, int power) {
    std::vector<Rat> v(static_cast<std::size_t>(power) + 1, Rat{0});
    v.back() = c;
    return RationalPoly{std::move(v), Parity::none};
}

void RationalPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

void RationalPoly::retag_parity() {
    bool has_even = false, has_odd = false;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (coeffs_[k] == 0) continue;
        (k % 2 == 0 ? has_even : has_odd) = true;
    }
    if (has_even && has_odd)
        parity_ = Parity::none;
    else if (has_odd)
        parity_ = Parity::odd;
    else
        parity_ = Parity::even; // convention: the zero polynomial is even
}

const Rat& RationalPoly::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return kZero;
    return coeffs_[static_cast<std::size_t>(k)];
}

RationalPoly RationalPoly::derivative() const {
    if (coeffs_.size() <= 1) return RationalPoly{};
    std::vector<Rat> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * Rat(k);
    return RationalPoly{std::move(d), Parity::none};
}

Rat RationalPoly::eval(const Rat& x) const {
    Rat acc{0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double RationalPoly::eval(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
    return acc;
}

double RationalPoly::eval_derivative(double x) const {
    double acc = 0.0;
    for (int k = degree(); k >= 1; --k) acc = acc * x + k * to_double(coeffs_[static_cast<std::size_t>(k)]);
    return acc;
}

RationalPoly RationalPoly::operator+(const RationalPoly& o) const {
    std::vector<Rat> v(std::max(coeffs_.size(), o.coeffs_.size()), Rat{0});
    for (std::size_t k = 0; k < coeffs_.size(); ++k) v[k] += coeffs_[k];
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) v[k] += o.coeffs_[k];
    return RationalPoly{std::move(v), Parity::none};
}

RationalPoly RationalPoly::operator-(const RationalPoly& o) const {
    std::vector<Rat> v(std::max(coeffs_.size(), o.coeffs_.size()), Rat{0});
    for (std::size_t k = 0; k < coeffs_.size(); ++k) v[k] += coeffs_[k];
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) v[k] -= o.coeffs_[k];
    return RationalPoly{std::move(v), Parity::none};
}

RationalPoly RationalPoly::operator*(const RationalPoly& o) const {
    if (is_zero() || o.is_zero()) return RationalPoly{};
    std::vector<Rat> v(coeffs_.size() + o.coeffs_.size() - 1, Rat{0});
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * o.coeffs_[j];
    return RationalPoly{std::move(v), Parity::none};
}

RationalPoly RationalPoly::operator*(const Rat& s) const {
    std::vector<Rat> v = coeffs_;
    for (auto& c : v) c *= s;
    return RationalPoly{std::move(v), Parity::none};
}

std::string RationalPoly::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (coeffs_[k] == 0) continue;
        if (!first) os << " + ";
        os << coeffs_[k];
        if (k >= 1) os << "*s";
        if (k >= 2) os << "^" << k;
        first = false;
    }
    return os.str();
}

} // namespace extcone
