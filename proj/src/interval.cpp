#include "polybill/interval.hpp"

#include <stdexcept>
#include <vector>

namespace polybill {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) : prec_(other.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : Interval(other) {}

Interval& Interval::operator=(const Interval& other) {
    if (this != &other) {
        prec_ = other.prec_;
        mpfr_set_prec(lo_, prec_);
        mpfr_set_prec(hi_, prec_);
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }
    return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
    std::swap(prec_, other.prec_);
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Interval Interval::point(double v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
}

Interval Interval::from_integer(const cpp_int& v, mpfr_prec_t prec) {
    Interval r(prec);
    std::string s = v.str();
    mpfr_set_str(r.lo_, s.c_str(), 10, MPFR_RNDD);
    mpfr_set_str(r.hi_, s.c_str(), 10, MPFR_RNDU);
    return r;
}

Interval Interval::from_rational(const cpp_rational& v, mpfr_prec_t prec) {
    Interval num = from_integer(boost::multiprecision::numerator(v), prec);
    Interval den = from_integer(boost::multiprecision::denominator(v), prec);
    return num / den;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

int Interval::sign() const {
    if (mpfr_sgn(lo_) > 0) return 1;
    if (mpfr_sgn(hi_) < 0) return -1;
    return 0;
}

bool Interval::strictly_inside(const Interval& outer) const {
    return mpfr_greater_p(lo_, outer.lo_) && mpfr_less_p(hi_, outer.hi_);
}

Interval Interval::midpoint() const {
    Interval r(prec_);
    mpfr_t m;
    mpfr_init2(m, prec_ + 2);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    mpfr_set(r.lo_, m, MPFR_RNDD);
    mpfr_set(r.hi_, m, MPFR_RNDU);
    mpfr_clear(m);
    return r;
}

double Interval::width() const {
    mpfr_t w;
    mpfr_init2(w, prec_);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
}

double Interval::mid_double() const {
    Interval m = midpoint();
    return mpfr_get_d(m.lo_, MPFR_RNDN);
}

std::string Interval::mid_string(int digits) const {
    Interval m = midpoint();
    std::vector<char> buf(digits + 64);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits, m.lo_);
    return std::string(buf.data());
}

Interval Interval::operator+(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::operator-(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
    return r;
}

Interval Interval::operator*(const Interval& o) const {
    mpfr_prec_t p = std::max(prec_, o.prec_);
    Interval r(p);
    mpfr_t c[4];
    const mpfr_t* a[2] = {&lo_, &hi_};
    const mpfr_t* b[2] = {&o.lo_, &o.hi_};
    for (auto& x : c) mpfr_init2(x, p);
    // Lower products rounded down.
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mpfr_mul(c[2 * i + j], *a[i], *b[j], MPFR_RNDD);
    mpfr_set(r.lo_, c[0], MPFR_RNDD);
    for (int k = 1; k < 4; ++k) mpfr_min(r.lo_, r.lo_, c[k], MPFR_RNDD);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mpfr_mul(c[2 * i + j], *a[i], *b[j], MPFR_RNDU);
    mpfr_set(r.hi_, c[0], MPFR_RNDU);
    for (int k = 1; k < 4; ++k) mpfr_max(r.hi_, r.hi_, c[k], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    return r;
}

Interval Interval::operator/(const Interval& o) const {
    if (o.contains_zero()) throw std::domain_error("interval division by an interval containing zero");
    mpfr_prec_t p = std::max(prec_, o.prec_);
    Interval inv(p);
    mpfr_ui_div(inv.lo_, 1, o.hi_, MPFR_RNDD);
    mpfr_ui_div(inv.hi_, 1, o.lo_, MPFR_RNDU);
    return *this * inv;
}

Interval Interval::intersect(const Interval& o) const {
    Interval r(std::max(prec_, o.prec_));
    mpfr_max(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, hi_, o.hi_, MPFR_RNDU);
    if (mpfr_greater_p(r.lo_, r.hi_)) throw std::domain_error("empty interval intersection");
    return r;
}

}  // namespace polybill
