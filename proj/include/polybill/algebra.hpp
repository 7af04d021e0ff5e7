#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "polybill/interval.hpp"

namespace polybill {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class CertificationFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integer polynomial, coefficients in ascending degree.
struct IntPoly {
    std::vector<BigInt> c;

    int degree() const;
    const BigInt& leading() const;
    BigInt constant() const { return c.empty() ? BigInt(0) : c[0]; }
    bool is_zero() const { return degree() < 0; }
    void trim();
    std::string str() const;

    friend bool operator==(const IntPoly& a, const IntPoly& b);
};

IntPoly operator+(const IntPoly& a, const IntPoly& b);
IntPoly operator-(const IntPoly& a, const IntPoly& b);
IntPoly operator*(const IntPoly& a, const IntPoly& b);
// Exact quotient in Z[x]; throws std::domain_error when b does not divide a.
IntPoly divide_exact(const IntPoly& a, const IntPoly& b);
double evaluate(const IntPoly& p, double x);
Interval evaluate(const IntPoly& p, const Interval& x);

IntPoly chebyshev_t(int n);
int euler_phi(int n);
// Integer multiple of the minimal polynomial of cos(2 pi / n), built from
// the Chebyshev differences by exact division.
IntPoly psi_tilde(int n);
// Checks the product identity between Chebyshev differences and psi_tilde over the divisors of n.
bool verify_wz_identity(int n);

struct RatPoly {
    std::vector<Rational> c;

    int degree() const;
    void trim();
};

// The field Q(beta) with beta = cos(pi / d), the root of psi_tilde(2d) near cos(pi / d).
class NumberField {
public:
    explicit NumberField(int d);

    int d() const { return d_; }
    const IntPoly& minimal() const { return minimal_; }
    int degree() const { return minimal_.degree(); }
    RatPoly reduce(const RatPoly& p) const;
    // Certified enclosure of beta at the given working precision.
    Interval beta_enclosure(mpfr_prec_t prec) const;

private:
    int d_;
    IntPoly minimal_;
    RatPoly monic_;
};

class AlgebraicNumber {
public:
    AlgebraicNumber(std::shared_ptr<const NumberField> field, RatPoly rep);
    static AlgebraicNumber rational(std::shared_ptr<const NumberField> field, const Rational& q);
    static AlgebraicNumber beta(std::shared_ptr<const NumberField> field);

    const RatPoly& rep() const { return rep_; }
    const NumberField& field() const { return *field_; }
    bool is_zero() const { return rep_.degree() < 0; }

    AlgebraicNumber operator+(const AlgebraicNumber& o) const;
    AlgebraicNumber operator-(const AlgebraicNumber& o) const;
    AlgebraicNumber operator*(const AlgebraicNumber& o) const;
    AlgebraicNumber inverse() const;
    AlgebraicNumber operator/(const AlgebraicNumber& o) const { return *this * o.inverse(); }
    bool operator==(const AlgebraicNumber& o) const { return (*this - o).is_zero(); }

    Interval enclosure(mpfr_prec_t prec) const;
    // Exact zero test, then interval refinement from 64 up to 4096 bits.
    int certified_sign() const;
    int compare(const Rational& q) const;
    double to_double() const;

private:
    std::shared_ptr<const NumberField> field_;
    RatPoly rep_;
};

// Sign of p(cos(pi/d)) from a plain evaluation at the given precision.
int numeric_sign(const IntPoly& p, int d, mpfr_prec_t prec = 512);

// P_n(x) = sum_{j<n} (-1)^{n-j-1} delta_j x^j.
IntPoly orbit_polynomial(const std::vector<int>& deltas, int n);

struct QCertificate {
    IntPoly q;
    bool constant_is_unit = false;
    bool leading_is_small = false;
    // The leading coefficient of q is not a multiple of the leading coefficient of psi_tilde(2d).
    bool leading_obstruction = false;
    bool reduced_nonzero = false;
    int exact_sign = 0;
    int numeric_sign = 0;
    bool signs_agree = false;
    bool certified() const { return reduced_nonzero && signs_agree; }
};

// Q(x) = P_n(x) - x^{n-k} P_k(x) evaluated at beta = cos(pi/d).
QCertificate certify_q_nonzero(int d, int n, int k, const std::vector<int>& deltas);

}  // namespace polybill
