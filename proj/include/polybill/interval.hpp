#pragma once

#include <mpfr.h>

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace polybill {

// Closed interval with MPFR endpoints and outward rounding.
class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 64);
    Interval(const Interval& other);
    Interval(Interval&& other) noexcept;
    Interval& operator=(const Interval& other);
    Interval& operator=(Interval&& other) noexcept;
    ~Interval();

    static Interval point(double v, mpfr_prec_t prec);
    static Interval from_integer(const boost::multiprecision::cpp_int& v, mpfr_prec_t prec);
    static Interval from_rational(const boost::multiprecision::cpp_rational& v, mpfr_prec_t prec);
    static Interval hull(const Interval& a, const Interval& b);

    mpfr_prec_t precision() const { return prec_; }
    const mpfr_t& lower() const { return lo_; }
    const mpfr_t& upper() const { return hi_; }

    bool contains_zero() const;
    // +1 or -1 when the interval excludes zero, 0 otherwise.
    int sign() const;
    bool strictly_inside(const Interval& outer) const;
    Interval midpoint() const;
    double width() const;
    double mid_double() const;
    std::string mid_string(int digits) const;

    Interval operator+(const Interval& o) const;
    Interval operator-(const Interval& o) const;
    Interval operator*(const Interval& o) const;
    // Requires the divisor to exclude zero.
    Interval operator/(const Interval& o) const;
    Interval intersect(const Interval& o) const;

private:
    mpfr_prec_t prec_;
    mpfr_t lo_;
    mpfr_t hi_;
};

}  // namespace polybill
