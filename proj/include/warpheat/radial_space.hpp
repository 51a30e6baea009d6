#pragma once

// Rotationally symmetric metric measure spaces reduced to the area density
// A(r) = V'(r). The radial heat operator is u'' + (A'/A) u'.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace warpheat {

class InvalidBands : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class PoleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

template <class T = double>
struct RadialSpace {
    using Fn = std::function<T(T)>;

    std::string label;
    Fn area;             // A(r)
    Fn volume;           // V(r)
    Fn log_volume;       // log V(r); derived from volume when empty
    Fn drift_exact;      // A'/A when known in closed form
    double small_r_exponent = 0;  // A(r) ~ c r^m at the pole
    T domain_max = std::numeric_limits<T>::infinity();
    // H(0, r, t) for spaces with a closed-form kernel (Euclidean, cones)
    std::function<T(T, T)> exact_kernel;

    double dimension() const { return small_r_exponent + 1; }

    T log_V(T r) const
    {
        using std::log;
        return log_volume ? log_volume(r) : T(log(volume(r)));
    }
};

// Volume of the unit n-ball.
template <class T = double>
T unit_ball_volume(double n)
{
    using std::lgamma;
    using std::exp;
    using std::log;
    const T pi = T(M_PI);
    return exp(T(n / 2) * log(pi) - T(std::lgamma(n / 2 + 1)));
}

template <class T = double>
RadialSpace<T> euclidean(int n)
{
    if (n < 1) throw std::invalid_argument("euclidean: dimension must be positive");
    using std::pow;
    using std::exp;
    const T w = unit_ball_volume<T>(n);
    RadialSpace<T> s;
    s.label = "euclidean-" + std::to_string(n);
    s.area = [w, n](T r) { return T(n * w * pow(r, T(n - 1))); };
    s.volume = [w, n](T r) { return T(w * pow(r, T(n))); };
    s.log_volume = [w, n](T r) { using std::log; return T(log(w) + n * log(r)); };
    s.drift_exact = [n](T r) { return T((n - 1) / r); };
    s.small_r_exponent = n - 1;
    s.exact_kernel = [n](T r, T t) {
        return T(pow(4 * T(M_PI) * t, -T(n) / 2) * exp(-r * r / (4 * t)));
    };
    return s;
}

// C(alpha) = [alpha 2^(alpha-1) Gamma(alpha/2)]^-1
template <class T = double>
T cone_constant(T alpha)
{
    using std::exp;
    using std::log;
    if (!(alpha > 0)) throw std::domain_error("cone_constant: alpha must be positive");
    return exp(-(log(alpha) + (alpha - 1) * log(T(2)) + T(std::lgamma(double(alpha / 2)))));
}

template <class T = double>
T cone_kernel(T alpha, T r, T t)
{
    using std::exp;
    using std::pow;
    if (!(t > 0)) throw std::domain_error("cone_kernel: t must be positive");
    if (r < 0) throw std::domain_error("cone_kernel: r must be nonnegative");
    return cone_constant(alpha) * pow(t, -alpha / 2) * exp(-r * r / (4 * t));
}

// Power-law cone V(r) = r^alpha.
template <class T = double>
RadialSpace<T> cone(T alpha)
{
    if (!(alpha > 0)) throw std::domain_error("cone: alpha must be positive");
    using std::pow;
    RadialSpace<T> s;
    s.label = "cone-" + std::to_string(double(alpha));
    s.area = [alpha](T r) { return T(alpha * pow(r, alpha - 1)); };
    s.volume = [alpha](T r) { return T(pow(r, alpha)); };
    s.log_volume = [alpha](T r) { using std::log; return T(alpha * log(r)); };
    s.drift_exact = [alpha](T r) { return T((alpha - 1) / r); };
    s.small_r_exponent = double(alpha) - 1;
    s.exact_kernel = [alpha](T r, T t) { return cone_kernel(alpha, r, t); };
    return s;
}

// A'/A, analytic when available, otherwise central differences in log r.
template <class T = double>
T drift(const RadialSpace<T>& space, T r)
{
    using std::log;
    using std::exp;
    if (!(r > 0)) throw PoleError("drift: r = 0 is handled by the pole stencil");
    if (r > space.domain_max) throw std::domain_error("drift: r beyond the domain");
    if (space.drift_exact) return space.drift_exact(r);
    const T h = T(1e-4);
    T up = log(space.area(r * exp(h)));
    T dn = log(space.area(r * exp(-h)));
    return (up - dn) / (2 * h * r);
}

// Alternating power-law bands in log r joined by quintic smoothsteps.
struct OscillationSpec {
    std::vector<double> alphas{6, 5, 6, 5, 6};      // exponent on each band
    std::vector<double> log10_bounds{1, 2.5, 4.5, 7};  // band boundaries
    double blend = 0.5;                              // half-width of each blend in ln r
    double log10_domain_max = 12;
};

// exponent alpha(s), s = ln r, and its antiderivative relative to alpha_0
class ExponentProfile {
public:
    explicit ExponentProfile(const OscillationSpec& spec);

    double alpha(double s) const;
    // int_{-inf}^{s} (alpha(sigma) - alpha_0) dsigma
    double excess_integral(double s) const;
    double alpha0() const { return alphas_.front(); }
    double pole_end() const { return centres_.empty() ? 0.0 : centres_.front() - w_; }

private:
    std::vector<double> alphas_, centres_;
    double w_;
};

RadialSpace<double> surrogate_profile(const OscillationSpec& spec);

extern template RadialSpace<double> euclidean<double>(int);
extern template RadialSpace<double> cone<double>(double);
extern template double drift<double>(const RadialSpace<double>&, double);
extern template RadialSpace<long double> euclidean<long double>(int);
extern template RadialSpace<long double> cone<long double>(long double);
extern template long double drift<long double>(const RadialSpace<long double>&, long double);

} // namespace warpheat
