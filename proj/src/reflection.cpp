#include "polybill/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polybill/geometry.hpp"

namespace polybill {

std::vector<double> chebyshev_angles(int n) {
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = 0.5 * kPi * std::cos((2.0 * k + 1.0) * kPi / (2.0 * n));
    return out;
}

ReflectionLaw ReflectionLaw::linear(double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw ReflectionError("linear law needs 0 < sigma < 1");
    ReflectionLaw law;
    law.kind_ = LawKind::Linear;
    law.sigma_ = sigma;
    law.lambda_ = sigma;
    law.increasing_ = true;
    law.name_ = "linear";
    return law;
}

ReflectionLaw ReflectionLaw::sine(double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw ReflectionError("sine law needs 0 < sigma < 1");
    ReflectionLaw law;
    law.kind_ = LawKind::Sine;
    law.sigma_ = sigma;
    law.lambda_ = sigma;
    law.increasing_ = true;
    law.name_ = "sine";
    return law;
}

ReflectionLaw ReflectionLaw::slap() {
    ReflectionLaw law;
    law.kind_ = LawKind::Slap;
    law.name_ = "slap";
    return law;
}

ReflectionLaw ReflectionLaw::custom(Fn f, Fn df, double lambda, bool odd, std::string name) {
    if (!f || !df) throw ReflectionError("custom law needs f and f'");
    if (!(lambda >= 0.0 && lambda < 1.0)) throw ReflectionError("custom law needs 0 <= lambda < 1");
    if (std::abs(f(0.0)) > 1e-12) throw ReflectionError("custom law must satisfy f(0) = 0");
    bool pos = true, neg = true;
    for (double t : chebyshev_angles()) {
        double d = df(t);
        if (!std::isfinite(d) || std::abs(d) > lambda * (1.0 + 1e-9) + 1e-15)
            throw ReflectionError("custom law violates |f'| <= lambda");
        if (odd && std::abs(f(t) + f(-t)) > 1e-12) throw ReflectionError("custom law claimed odd but is not");
        pos = pos && d > 0.0;
        neg = neg && d < 0.0;
    }
    ReflectionLaw law;
    law.kind_ = LawKind::Custom;
    law.lambda_ = lambda;
    law.odd_ = odd;
    law.increasing_ = pos;
    law.decreasing_ = neg;
    law.name_ = std::move(name);
    law.f_ = std::make_shared<Fn>(std::move(f));
    law.df_ = std::make_shared<Fn>(std::move(df));
    return law;
}

double ReflectionLaw::operator()(double theta) const {
    switch (kind_) {
        case LawKind::Linear: return sigma_ * theta;
        case LawKind::Sine: return sigma_ * std::sin(theta);
        case LawKind::Slap: return 0.0;
        case LawKind::Custom: return (*f_)(theta);
    }
    return 0.0;
}

double ReflectionLaw::derivative(double theta) const {
    switch (kind_) {
        case LawKind::Linear: return sigma_;
        case LawKind::Sine: return sigma_ * std::cos(theta);
        case LawKind::Slap: return 0.0;
        case LawKind::Custom: return (*df_)(theta);
    }
    return 0.0;
}

double ReflectionLaw::inverse(double theta) const {
    switch (kind_) {
        case LawKind::Linear: return theta / sigma_;
        case LawKind::Sine: {
            double r = theta / sigma_;
            return (std::abs(r) <= 1.0) ? std::asin(r) : std::nan("");
        }
        case LawKind::Slap: throw ReflectionError("the slap law is not invertible");
        case LawKind::Custom: break;
    }
    if (!is_invertible()) throw ReflectionError("law is not strictly monotone");
    double lo = -0.5 * kPi, hi = 0.5 * kPi;
    double flo = (*this)(lo), fhi = (*this)(hi);
    if (theta < std::min(flo, fhi) || theta > std::max(flo, fhi)) return std::nan("");
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        bool below = (*this)(mid) < theta;
        if (below == increasing_) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double ReflectionLaw::sup_derivative_over_cos() const {
    double best = 0.0;
    for (double t : chebyshev_angles()) best = std::max(best, std::abs(derivative(t)) / std::cos(t));
    return best;
}

double law_distance(const ReflectionLaw& f1, const ReflectionLaw& f2) {
    double best = 0.0;
    for (double t : chebyshev_angles()) best = std::max(best, std::abs(f1.derivative(t) - f2.derivative(t)));
    return best;
}

double rho(const ReflectionLaw& f, double theta) { return std::cos(f(theta)) / std::cos(theta); }

double r_of_eps(const ReflectionLaw& f, double eps) {
    if (!(eps > 0.0 && eps < 0.5 * kPi)) throw std::invalid_argument("r_of_eps needs 0 < eps < pi/2");
    const int n = 4096;
    const double top = 0.5 * kPi - 1e-9;
    double best = std::numeric_limits<double>::infinity();
    for (double sign : {1.0, -1.0}) {
        auto g = [&](double t) { return rho(f, sign * t); };
        const double h = (top - eps) / n;
        int arg = 0;
        double low = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= n; ++i) {
            double v = g(eps + i * h);
            if (v < low) {
                low = v;
                arg = i;
            }
        }
        double a = eps + std::max(arg - 1, 0) * h;
        double b = eps + std::min(arg + 1, n) * h;
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double gc = g(c), gd = g(d);
        for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
            if (gc < gd) {
                b = d;
                d = c;
                gd = gc;
                c = b - inv_phi * (b - a);
                gc = g(c);
            } else {
                a = c;
                c = d;
                gc = gd;
                d = a + inv_phi * (b - a);
                gd = g(d);
            }
        }
        best = std::min({best, low, gc, gd, g(eps)});
    }
    return best;
}

}  // namespace polybill
