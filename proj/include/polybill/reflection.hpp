#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace polybill {

class ReflectionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class LawKind { Linear, Sine, Slap, Custom };

// Reflection law f on [-pi/2, pi/2] with f(0) = 0 and |f'| <= lambda < 1.
class ReflectionLaw {
public:
    using Fn = std::function<double(double)>;

    static ReflectionLaw linear(double sigma);
    static ReflectionLaw sine(double sigma);
    static ReflectionLaw slap();
    // The claimed lambda and oddness are verified on a grid of Chebyshev nodes.
    static ReflectionLaw custom(Fn f, Fn df, double lambda, bool odd, std::string name = "custom");

    double operator()(double theta) const;
    double derivative(double theta) const;
    // Inverse on the range of f; throws for laws that are not strictly monotone.
    double inverse(double theta) const;

    LawKind kind() const { return kind_; }
    double sigma() const { return sigma_; }
    double lambda() const { return lambda_; }
    bool is_odd() const { return odd_; }
    bool is_increasing() const { return increasing_; }
    bool is_invertible() const { return kind_ != LawKind::Slap && (increasing_ || decreasing_); }
    const std::string& name() const { return name_; }

    // sup |f'(theta)| / cos(theta) over the Chebyshev grid.
    double sup_derivative_over_cos() const;

private:
    LawKind kind_ = LawKind::Slap;
    double sigma_ = 0.0;
    double lambda_ = 0.0;
    bool odd_ = true;
    bool increasing_ = false;
    bool decreasing_ = false;
    std::string name_;
    std::shared_ptr<Fn> f_;
    std::shared_ptr<Fn> df_;
};

// N Chebyshev nodes mapped to (-pi/2, pi/2).
std::vector<double> chebyshev_angles(int n = 10000);

// sup |f1' - f2'| over the Chebyshev grid.
double law_distance(const ReflectionLaw& f1, const ReflectionLaw& f2);

// rho(theta) = cos f(theta) / cos theta.
double rho(const ReflectionLaw& f, double theta);

// r(eps) = min of rho over eps <= |theta| < pi/2: grid search on both signs followed by
// golden-section refinement around the best cell.
double r_of_eps(const ReflectionLaw& f, double eps);

}  // namespace polybill
