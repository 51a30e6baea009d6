#pragma once

// Kernel bound predicates on computed kernels. Every bound carries an
// unspecified constant, so each check fits the smallest admissible constant
// over the samples and passes when it is finite and positive.

#include "warpheat/radial_heat.hpp"
#include "warpheat/radial_space.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace warpheat {

// H(0, r, t)
template <class T = double>
struct KernelSample {
    T r = 0, t = 0, H = 0;
};

struct BoundReport {
    std::string name;
    double fitted_C = 0;
    double worst_margin = 0;   // min over samples of 1 - value / bound at the fitted constant
    long samples = 0;
    bool pass = false;
};

struct LiYauReport {
    BoundReport upper;   // H <= C / V(sqrt t) exp(-r^2 / ((4 + eps) t))
    BoundReport lower;   // H >= 1 / (C' V(sqrt t)) exp(-r^2 / ((4 - eps) t))
    bool pass() const { return upper.pass && lower.pass; }
};

// Samples of one field at time index j, restricted to r <= r_max_factor sqrt(t)
// and H > 0.
template <class T = double>
std::vector<KernelSample<T>> kernel_samples(const HeatField<T>& field, std::size_t j,
                                            double r_max_factor = 4)
{
    using std::sqrt;
    std::vector<KernelSample<T>> out;
    const T t = field.t.at(j);
    const T r_max = T(r_max_factor) * sqrt(t);
    for (Eigen::Index i = 0; i < field.r.size(); ++i) {
        T r = field.r(i), h = field.u[j](i);
        if (r <= r_max && h > 0) out.push_back({r, t, h});
    }
    return out;
}

namespace detail {

// C = max_k ratio_k; margins are 1 - ratio_k / C, so the worst is 0 at the maximiser
template <class T>
BoundReport fit_upper(const std::string& name, const std::vector<T>& ratios)
{
    BoundReport b;
    b.name = name;
    b.samples = static_cast<long>(ratios.size());
    double c = 0;
    bool finite = !ratios.empty();
    for (const T& q : ratios) {
        double v = static_cast<double>(q);
        if (!std::isfinite(v)) finite = false;
        else c = std::max(c, v);
    }
    b.fitted_C = finite ? c : std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const T& q : ratios) worst = std::min(worst, 1 - static_cast<double>(q) / b.fitted_C);
    b.worst_margin = finite ? worst : -std::numeric_limits<double>::infinity();
    b.pass = finite && c > 0 && std::isfinite(c) && b.worst_margin >= 0;
    return b;
}

} // namespace detail

template <class T = double>
LiYauReport li_yau_check(const std::vector<KernelSample<T>>& samples, const RadialSpace<T>& space,
                         double eps)
{
    using std::exp;
    using std::sqrt;
    if (!(eps > 0 && eps < 2)) throw std::invalid_argument("li_yau_check: eps must lie in (0, 2)");
    std::vector<T> up, lo;
    for (const KernelSample<T>& s : samples) {
        T v = exp(space.log_V(T(sqrt(s.t))));
        T q = s.r * s.r / s.t;
        up.push_back(s.H * v * exp(q / T(4 + eps)));
        lo.push_back(1 / (s.H * v * exp(q / T(4 - eps))));
    }
    LiYauReport rep;
    rep.upper = detail::fit_upper("li_yau_upper", up);
    rep.lower = detail::fit_upper("li_yau_lower", lo);
    return rep;
}

// H <= C V(sqrt t)^-1 exp(-r^2 / (5 t)); ratio k is H V exp(r^2 / 5t)
template <class T = double>
std::vector<T> gaussian_ratios(const std::vector<KernelSample<T>>& samples, const RadialSpace<T>& space)
{
    using std::exp;
    using std::sqrt;
    std::vector<T> q;
    for (const KernelSample<T>& s : samples)
        q.push_back(s.H * exp(space.log_V(T(sqrt(s.t)))) * exp(s.r * s.r / (5 * s.t)));
    return q;
}

template <class T = double>
BoundReport gaussian_upper_check(const std::vector<KernelSample<T>>& samples, const RadialSpace<T>& space)
{
    return detail::fit_upper("gaussian_upper", gaussian_ratios(samples, space));
}

// int_{r > R} u A dr by the trapezoid rule on the field's nodes, at time index j
template <class T = double>
T tail_mass(const HeatField<T>& field, const RadialSpace<T>& space, T radius, std::size_t j)
{
    const Vec<T>& r = field.r;
    const Vec<T>& u = field.u.at(j);
    const Eigen::Index n = r.size();
    if (radius < 0 || radius > r(n - 1)) throw std::domain_error("tail_mass: radius outside the grid");
    auto g = [&](Eigen::Index i) { return u(i) * space.area(r(i)); };
    T acc = 0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (r(i + 1) <= radius) continue;
        T a = r(i), ga = g(i);
        if (a < radius) {
            // enter the first cell at R by linear interpolation of u A
            T w = (radius - a) / (r(i + 1) - a);
            ga = ga + w * (g(i + 1) - ga);
            a = radius;
        }
        acc += (ga + g(i + 1)) / 2 * (r(i + 1) - a);
    }
    return acc;
}

template <class T = double>
T tail_mass(const HeatField<T>& field, const RadialSpace<T>& space, T radius)
{
    return tail_mass(field, space, radius, field.u.size() - 1);
}

} // namespace warpheat
