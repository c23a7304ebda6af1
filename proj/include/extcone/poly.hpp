#pragma once

#include "extcone/rational.hpp"

#include <string>
#include <vector>

namespace extcone {

enum class Parity { even, odd, none };

// Univariate polynomial in sigma = t/|x| with exact rational coefficients
// and a parity tag. Trailing zero coefficients are always trimmed, so
// degree() is exact; the zero polynomial has empty coefficient storage.
class RationalPoly {
  public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<Rat> coeffs, Parity parity = Parity::none);

    static RationalPoly zero() { return RationalPoly{}; }
    static RationalPoly constant(const Rat& c);
    static RationalPoly monomial(const Rat& c, int power);

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    Parity parity() const { return parity_; }

    // Coefficient of sigma^k (zero beyond the stored degree).
    const Rat& coeff(int k) const;
    const std::vector<Rat>& coeffs() const { return coeffs_; }

    RationalPoly derivative() const;

    Rat eval(const Rat& x) const;
    double eval(double x) const;
    double eval_derivative(double x) const;

    RationalPoly operator+(const RationalPoly& o) const;
    RationalPoly operator-(const RationalPoly& o) const;
    RationalPoly operator*(const RationalPoly& o) const;
    RationalPoly operator*(const Rat& s) const;
    bool operator==(const RationalPoly& o) const { return coeffs_ == o.coeffs_; }

    std::string to_string() const;

  private:
    void trim();
    void retag_parity();

    std::vector<Rat> coeffs_; // coeffs_[k] multiplies sigma^k
    Parity parity_ = Parity::even;
};

} // namespace extcone
