#include "warpheat/radial_space.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <memory>

namespace warpheat {

template RadialSpace<double> euclidean<double>(int);
template RadialSpace<double> cone<double>(double);
template double drift<double>(const RadialSpace<double>&, double);
template RadialSpace<long double> euclidean<long double>(int);
template RadialSpace<long double> cone<long double>(long double);
template long double drift<long double>(const RadialSpace<long double>&, long double);

namespace {

// quintic smoothstep on [-1, 1] -> [0, 1] and its antiderivative from -1
double smoothstep(double x)
{
    if (x <= -1) return 0;
    if (x >= 1) return 1;
    double y = (x + 1) / 2;
    return y * y * y * (10 - 15 * y + 6 * y * y);
}

double smoothstep_integral(double x)
{
    if (x <= -1) return 0;
    if (x >= 1) return x;
    double y = (x + 1) / 2;
    double y4 = y * y * y * y;
    return 2 * (2.5 * y4 - 3 * y4 * y + y4 * y * y);
}

} // namespace

ExponentProfile::ExponentProfile(const OscillationSpec& spec)
    : alphas_(spec.alphas), w_(spec.blend)
{
    if (spec.alphas.size() != spec.log10_bounds.size() + 1)
        throw InvalidBands("surrogate: need one more exponent than band boundaries");
    if (!(spec.blend > 0)) throw InvalidBands("surrogate: blend width must be positive");
    for (double a : spec.alphas)
        if (!(a > 1)) throw InvalidBands("surrogate: exponents must exceed 1");
    for (double b : spec.log10_bounds) centres_.push_back(b * std::log(10.0));
    for (std::size_t k = 1; k < centres_.size(); ++k)
        if (!(centres_[k] - centres_[k - 1] > 2 * w_))
            throw InvalidBands("surrogate: band boundaries must increase by more than two blend widths");
    if (!centres_.empty() && !(spec.log10_domain_max * std::log(10.0) > centres_.back() + w_))
        throw InvalidBands("surrogate: domain ends inside the last blend");
}

double ExponentProfile::alpha(double s) const
{
    double a = alphas_.front();
    for (std::size_t k = 0; k < centres_.size(); ++k)
        a += (alphas_[k + 1] - alphas_[k]) * smoothstep((s - centres_[k]) / w_);
    return a;
}

double ExponentProfile::excess_integral(double s) const
{
    double acc = 0;
    for (std::size_t k = 0; k < centres_.size(); ++k)
        acc += (alphas_[k + 1] - alphas_[k]) * w_ * smoothstep_integral((s - centres_[k]) / w_);
    return acc;
}

namespace {

// log V tabulated on a uniform grid in s = ln r past the pole region, read
// back by cubic Hermite interpolation with the exact slope A r / V.
struct SurrogateTable {
    ExponentProfile prof;
    double s0, hs, s_max;
    std::vector<double> log_v;

    explicit SurrogateTable(const OscillationSpec& spec)
        : prof(spec), s0(prof.pole_end()), hs(1e-3),
          s_max(spec.log10_domain_max * std::log(10.0))
    {
        const double a0 = prof.alpha0();
        const int n = static_cast<int>(std::ceil((s_max - s0) / hs));
        log_v.resize(n + 1);
        log_v[0] = a0 * s0;
        // V grows, so accumulate V e^{-a0 s} to keep the integrand near 1
        double acc = 1.0;  // V(s0) e^{-a0 s0}
        using Quad = boost::math::quadrature::gauss<double, 7>;
        for (int i = 0; i < n; ++i) {
            double a = s0 + i * hs, b = a + hs;
            double part = Quad::integrate(
                [&](double s) { return std::exp(log_area(s) + s - a0 * b); }, a, b);
            acc = acc * std::exp(a0 * (a - b)) + part;
            log_v[i + 1] = a0 * b + std::log(acc);
        }
    }

    double log_area(double s) const
    {
        const double a0 = prof.alpha0();
        return std::log(a0) + (a0 - 1) * s + prof.excess_integral(s);
    }

    double log_volume(double s) const
    {
        const double a0 = prof.alpha0();
        if (s <= s0) return a0 * s;
        if (s > s_max + 1e-12) throw std::domain_error("surrogate: radius beyond the domain");
        double x = (s - s0) / hs;
        int i = std::min(static_cast<int>(x), static_cast<int>(log_v.size()) - 2);
        double u = x - i;
        double sa = s0 + i * hs, sb = sa + hs;
        double ya = log_v[i], yb = log_v[i + 1];
        double da = std::exp(log_area(sa) + sa - ya) * hs;
        double db = std::exp(log_area(sb) + sb - yb) * hs;
        double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * ya + (u3 - 2 * u2 + u) * da + (-2 * u3 + 3 * u2) * yb +
               (u3 - u2) * db;
    }
};

} // namespace

RadialSpace<double> surrogate_profile(const OscillationSpec& spec)
{
    auto table = std::make_shared<const SurrogateTable>(spec);
    RadialSpace<double> s;
    s.label = "surrogate";
    s.area = [table](double r) { return std::exp(table->log_area(std::log(r))); };
    s.log_volume = [table](double r) { return table->log_volume(std::log(r)); };
    s.volume = [table](double r) { return r > 0 ? std::exp(table->log_volume(std::log(r))) : 0.0; };
    s.drift_exact = [table](double r) { return (table->prof.alpha(std::log(r)) - 1) / r; };
    s.small_r_exponent = spec.alphas.front() - 1;
    s.domain_max = std::exp(table->s_max);
    return s;
}

} // namespace warpheat
