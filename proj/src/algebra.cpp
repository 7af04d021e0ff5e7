#include "polybill/algebra.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace polybill {

int IntPoly::degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (c[i] != 0) return i;
    return -1;
}

const BigInt& IntPoly::leading() const {
    static const BigInt zero = 0;
    int d = degree();
    return d < 0 ? zero : c[d];
}

void IntPoly::trim() { c.resize(degree() + 1); }

std::string IntPoly::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        if (c[i] == 0) continue;
        BigInt a = abs(c[i]);
        os << (c[i] < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        if (a != 1 || i == 0) os << a;
        if (i >= 1) os << "x";
        if (i >= 2) os << "^" << i;
        first = false;
    }
    return os.str();
}

bool operator==(const IntPoly& a, const IntPoly& b) {
    int d = a.degree();
    if (d != b.degree()) return false;
    for (int i = 0; i <= d; ++i)
        if (a.c[i] != b.c[i]) return false;
    return true;
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    IntPoly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
    IntPoly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    IntPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
}

IntPoly divide_exact(const IntPoly& a, const IntPoly& b) {
    int db = b.degree();
    if (db < 0) throw std::domain_error("division by the zero polynomial");
    IntPoly rem = a;
    rem.trim();
    IntPoly q;
    int dq = rem.degree() - db;
    if (dq < 0) {
        if (!rem.is_zero()) throw std::domain_error("inexact polynomial division");
        return q;
    }
    q.c.assign(dq + 1, 0);
    const BigInt& lb = b.c[db];
    for (int k = dq; k >= 0; --k) {
        const BigInt& top = rem.c[k + db];
        if (top == 0) continue;
        if (top % lb != 0) throw std::domain_error("inexact polynomial division");
        BigInt f = top / lb;
        q.c[k] = f;
        for (int i = 0; i <= db; ++i) rem.c[k + i] -= f * b.c[i];
    }
    if (!rem.is_zero()) throw std::domain_error("inexact polynomial division");
    q.trim();
    return q;
}

double evaluate(const IntPoly& p, double x) {
    double acc = 0.0;
    for (int i = p.degree(); i >= 0; --i) acc = acc * x + static_cast<double>(p.c[i]);
    return acc;
}

Interval evaluate(const IntPoly& p, const Interval& x) {
    Interval acc(x.precision());
    for (int i = p.degree(); i >= 0; --i) acc = acc * x + Interval::from_integer(p.c[i], x.precision());
    return acc;
}

IntPoly chebyshev_t(int n) {
    if (n < 0) throw std::invalid_argument("Chebyshev index must be non-negative");
    IntPoly t0{{1}}, t1{{0, 1}};
    if (n == 0) return t0;
    IntPoly two_x{{0, 2}};
    for (int k = 1; k < n; ++k) {
        IntPoly t2 = two_x * t1 - t0;
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    return t1;
}

int euler_phi(int n) {
    if (n < 1) throw std::invalid_argument("Euler phi needs n >= 1");
    int result = n;
    int m = n;
    for (int p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            result -= result / p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

namespace {

IntPoly chebyshev_difference(int n) {
    int s = n / 2;
    if (n % 2 == 1) return chebyshev_t(s + 1) - chebyshev_t(s);
    return chebyshev_t(s + 1) - chebyshev_t(s - 1);
}

}  // namespace

IntPoly psi_tilde(int n) {
    if (n < 1) throw std::invalid_argument("psi_tilde needs n >= 1");
    static std::mutex mu;
    static std::map<int, IntPoly> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    IntPoly denom{{1}};
    for (int d = 1; d < n; ++d)
        if (n % d == 0) denom = denom * psi_tilde(d);
    IntPoly result = divide_exact(chebyshev_difference(n), denom);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(n, result);
    return result;
}

bool verify_wz_identity(int n) {
    IntPoly prod{{1}};
    for (int d = 1; d <= n; ++d)
        if (n % d == 0) prod = prod * psi_tilde(d);
    return prod == chebyshev_difference(n);
}

int RatPoly::degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (c[i] != 0) return i;
    return -1;
}

void RatPoly::trim() { c.resize(degree() + 1); }

namespace {

RatPoly rat_sub(const RatPoly& a, const RatPoly& b) {
    RatPoly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
}

RatPoly rat_mul(const RatPoly& a, const RatPoly& b) {
    RatPoly r;
    if (a.degree() < 0 || b.degree() < 0) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
}

// Quotient and remainder of a by b over Q.
void rat_divmod(const RatPoly& a, const RatPoly& b, RatPoly& q, RatPoly& r) {
    int db = b.degree();
    if (db < 0) throw std::domain_error("division by the zero polynomial");
    r = a;
    r.trim();
    q.c.clear();
    int dq = r.degree() - db;
    if (dq < 0) return;
    q.c.assign(dq + 1, Rational(0));
    for (int k = dq; k >= 0; --k) {
        if (static_cast<int>(r.c.size()) <= k + db || r.c[k + db] == 0) continue;
        Rational f = r.c[k + db] / b.c[db];
        q.c[k] = f;
        for (int i = 0; i <= db; ++i) r.c[k + i] -= f * b.c[i];
    }
    q.trim();
    r.trim();
}

Interval evaluate_rat(const RatPoly& p, const Interval& x) {
    Interval acc(x.precision());
    for (int i = p.degree(); i >= 0; --i) acc = acc * x + Interval::from_rational(p.c[i], x.precision());
    return acc;
}

IntPoly derivative(const IntPoly& p) {
    IntPoly r;
    for (int i = 1; i <= p.degree(); ++i) r.c.push_back(p.c[i] * i);
    r.trim();
    return r;
}

}  // namespace

NumberField::NumberField(int d) : d_(d) {
    if (d < 3) throw std::invalid_argument("number field needs d >= 3");
    minimal_ = psi_tilde(2 * d);
    Rational lead(minimal_.leading());
    for (int i = 0; i <= minimal_.degree(); ++i) monic_.c.push_back(Rational(minimal_.c[i]) / lead);
}

RatPoly NumberField::reduce(const RatPoly& p) const {
    RatPoly q, r;
    rat_divmod(p, monic_, q, r);
    return r;
}

Interval NumberField::beta_enclosure(mpfr_prec_t prec) const {
    IntPoly dp = derivative(minimal_);
    double guess = std::cos(3.14159265358979323846 / d_);
    for (double radius : {1e-12, 1e-10, 1e-8, 1e-6}) {
        Interval x = Interval::hull(Interval::point(guess - radius, prec), Interval::point(guess + radius, prec));
        Interval slope = evaluate(dp, x);
        if (slope.contains_zero()) continue;
        Interval m = x.midpoint();
        Interval newton = m - evaluate(minimal_, m) / slope;
        if (!newton.strictly_inside(x)) continue;
        // Unique root certified; contract until the width stops improving.
        x = newton;
        for (int it = 0; it < 64; ++it) {
            double before = x.width();
            slope = evaluate(dp, x);
            m = x.midpoint();
            x = (m - evaluate(minimal_, m) / slope).intersect(x);
            if (x.width() >= before * 0.5) break;
        }
        return x;
    }
    throw CertificationFailed("interval Newton failed to isolate cos(pi/d)");
}

AlgebraicNumber::AlgebraicNumber(std::shared_ptr<const NumberField> field, RatPoly rep)
    : field_(std::move(field)), rep_(field_->reduce(rep)) {}

AlgebraicNumber AlgebraicNumber::rational(std::shared_ptr<const NumberField> field, const Rational& q) {
    RatPoly p;
    p.c.push_back(q);
    return AlgebraicNumber(std::move(field), p);
}

AlgebraicNumber AlgebraicNumber::beta(std::shared_ptr<const NumberField> field) {
    RatPoly p;
    p.c = {Rational(0), Rational(1)};
    return AlgebraicNumber(std::move(field), p);
}

AlgebraicNumber AlgebraicNumber::operator+(const AlgebraicNumber& o) const {
    RatPoly r;
    r.c.assign(std::max(rep_.c.size(), o.rep_.c.size()), Rational(0));
    for (size_t i = 0; i < rep_.c.size(); ++i) r.c[i] += rep_.c[i];
    for (size_t i = 0; i < o.rep_.c.size(); ++i) r.c[i] += o.rep_.c[i];
    return AlgebraicNumber(field_, r);
}

AlgebraicNumber AlgebraicNumber::operator-(const AlgebraicNumber& o) const {
    return AlgebraicNumber(field_, rat_sub(rep_, o.rep_));
}

AlgebraicNumber AlgebraicNumber::operator*(const AlgebraicNumber& o) const {
    return AlgebraicNumber(field_, rat_mul(rep_, o.rep_));
}

AlgebraicNumber AlgebraicNumber::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    RatPoly m;
    for (const auto& v : field_->minimal().c) m.c.push_back(Rational(v));
    RatPoly r0 = m, r1 = rep_;
    RatPoly s0, s1;
    s1.c = {Rational(1)};
    while (r1.degree() >= 0) {
        RatPoly q, r;
        rat_divmod(r0, r1, q, r);
        RatPoly s = rat_sub(s0, rat_mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    // r0 is a nonzero constant since the modulus is irreducible.
    Rational g = r0.c.at(0);
    for (auto& v : s0.c) v /= g;
    return AlgebraicNumber(field_, s0);
}

Interval AlgebraicNumber::enclosure(mpfr_prec_t prec) const {
    return evaluate_rat(rep_, field_->beta_enclosure(prec));
}

int AlgebraicNumber::certified_sign() const {
    if (is_zero()) return 0;
    for (mpfr_prec_t prec = 64; prec <= 4096; prec *= 2) {
        int s = enclosure(prec).sign();
        if (s != 0) return s;
    }
    throw CertificationFailed("sign not resolved at 4096 bits");
}

int AlgebraicNumber::compare(const Rational& q) const {
    return (*this - AlgebraicNumber::rational(field_, q)).certified_sign();
}

double AlgebraicNumber::to_double() const { return enclosure(64).mid_double(); }

int numeric_sign(const IntPoly& p, int d, mpfr_prec_t prec) {
    mpfr_t x, acc, c;
    mpfr_inits2(prec, x, acc, c, static_cast<mpfr_ptr>(nullptr));
    mpfr_const_pi(x, MPFR_RNDN);
    mpfr_div_ui(x, x, static_cast<unsigned long>(d), MPFR_RNDN);
    mpfr_cos(x, x, MPFR_RNDN);
    mpfr_set_zero(acc, 1);
    for (int i = p.degree(); i >= 0; --i) {
        mpfr_mul(acc, acc, x, MPFR_RNDN);
        mpfr_set_str(c, p.c[i].str().c_str(), 10, MPFR_RNDN);
        mpfr_add(acc, acc, c, MPFR_RNDN);
    }
    int s = mpfr_sgn(acc);
    mpfr_clears(x, acc, c, static_cast<mpfr_ptr>(nullptr));
    return (s > 0) - (s < 0);
}

IntPoly orbit_polynomial(const std::vector<int>& deltas, int n) {
    if (n > static_cast<int>(deltas.size())) throw std::invalid_argument("not enough signs for the orbit polynomial");
    IntPoly p;
    p.c.assign(std::max(n, 1), 0);
    for (int j = 0; j < n; ++j) p.c[j] = ((n - j - 1) % 2 == 0 ? 1 : -1) * deltas[j];
    p.trim();
    return p;
}

QCertificate certify_q_nonzero(int d, int n, int k, const std::vector<int>& deltas) {
    if (!(0 <= k && k < n)) throw std::invalid_argument("need 0 <= k < n");
    QCertificate cert;
    IntPoly shift;
    shift.c.assign(n - k + 1, 0);
    shift.c[n - k] = 1;
    cert.q = orbit_polynomial(deltas, n) - shift * orbit_polynomial(deltas, k);
    auto field = std::make_shared<const NumberField>(d);
    BigInt c0 = cert.q.constant();
    cert.constant_is_unit = (c0 == 1 || c0 == -1);
    BigInt lc = abs(cert.q.leading());
    cert.leading_is_small = (lc == 1 || lc == 2);
    cert.leading_obstruction = !cert.q.is_zero() && (lc % field->minimal().leading() != 0);
    RatPoly rq;
    for (const auto& v : cert.q.c) rq.c.push_back(Rational(v));
    AlgebraicNumber value(field, rq);
    cert.reduced_nonzero = !value.is_zero();
    cert.exact_sign = cert.reduced_nonzero ? value.certified_sign() : 0;
    cert.numeric_sign = numeric_sign(cert.q, d, 512);
    cert.signs_agree = cert.exact_sign == cert.numeric_sign;
    return cert;
}

}  // namespace polybill
