#include "doctest.h"

#include "warpheat/bounds.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>

using namespace warpheat;

namespace {

// exact heat kernel samples on r <= 4 sqrt t
std::vector<KernelSample<double>> exact_samples(const RadialSpace<double>& s, double t)
{
    std::vector<KernelSample<double>> out;
    for (int i = 0; i <= 200; ++i) {
        double r = 4 * std::sqrt(t) * i / 200;
        out.push_back({r, t, s.exact_kernel(r, t)});
    }
    return out;
}

const HeatField<double>& euclid_field()
{
    static const HeatField<double> f = kernel_field(euclidean<double>(3), 1.0, SolverConfig{});
    return f;
}

} // namespace

TEST_CASE("two-sided Gaussian bounds")
{
    const RadialSpace<double> r3 = euclidean<double>(3);
    SUBCASE("exact Euclidean kernel")
    {
        // H V(sqrt t) = C0 exp(-q/4); both ratios peak at q = 0
        const double c0 = cone_constant(3.0), eps = 0.1;
        LiYauReport r = li_yau_check(exact_samples(r3, 2.0), r3, eps);
        CHECK(r.pass());
        CHECK(r.upper.fitted_C == doctest::Approx(c0).epsilon(1e-12));
        CHECK(r.lower.fitted_C == doctest::Approx(1 / c0).epsilon(1e-12));
        CHECK(r.lower.worst_margin == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.upper.worst_margin == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.upper.samples == 201);
    }
    SUBCASE("diagonal samples only")
    {
        std::vector<KernelSample<double>> diag;
        for (double t : {0.5, 1.0, 7.0}) diag.push_back({0.0, t, r3.exact_kernel(0.0, t)});
        LiYauReport r = li_yau_check(diag, r3, 0.1);
        CHECK(r.upper.fitted_C * r.lower.fitted_C == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("computed kernels")
    {
        for (double a : {5.0, 6.0}) {
            HeatField<double> f = kernel_field(cone(a), 1.0, SolverConfig{});
            CHECK(li_yau_check(kernel_samples(f, 0), cone(a), 0.1).pass());
        }
        CHECK(li_yau_check(kernel_samples(euclid_field(), 0), r3, 0.1).pass());
    }
    SUBCASE("eps range")
    {
        CHECK_THROWS_AS(li_yau_check(exact_samples(r3, 1.0), r3, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(li_yau_check(exact_samples(r3, 1.0), r3, 2.0), std::invalid_argument);
    }
    SUBCASE("empty sample set fails")
    {
        CHECK_FALSE(li_yau_check({}, r3, 0.1).pass());
    }
}

TEST_CASE("Gaussian upper bound")
{
    const RadialSpace<double> r3 = euclidean<double>(3);
    for (double a : {5.0, 6.0}) {
        HeatField<double> f = kernel_field(cone(a), 1.0, SolverConfig{});
        BoundReport b = gaussian_upper_check(kernel_samples(f, 0), cone(a));
        CHECK(b.pass);
        // the exp(-q/4 + q/5) factor peaks at q = 0
        CHECK(b.fitted_C == doctest::Approx(cone_constant(a)).epsilon(0.01));
    }
    std::vector<KernelSample<double>> s = exact_samples(r3, 1.0);
    BoundReport base = gaussian_upper_check(s, r3);
    CHECK(base.pass);
    CHECK(base.fitted_C == doctest::Approx(cone_constant(3.0)).epsilon(1e-12));
    // doubling H at q = 16 raises that ratio to 2 C0 exp(-16/20)
    s.back().H *= 2;
    CHECK(gaussian_ratios(s, r3).back() == doctest::Approx(2 * cone_constant(3.0) * std::exp(-0.8)).epsilon(1e-12));
    // doubling at q = 4 (r = 2) inflates the ratio there by 2 exp(-0.2) relative to C0
    std::vector<KernelSample<double>> s2 = exact_samples(r3, 1.0);
    s2[100].H *= 2;
    CHECK(s2[100].r == doctest::Approx(2.0));
    BoundReport inflated = gaussian_upper_check(s2, r3);
    CHECK(inflated.fitted_C == doctest::Approx(2 * std::exp(-0.2) * cone_constant(3.0)).epsilon(1e-12));
}

TEST_CASE("tail mass")
{
    const RadialSpace<double> r3 = euclidean<double>(3);
    const HeatField<double>& f = euclid_field();
    const double total = tail_mass(f, r3, 0.0);
    CHECK(total <= 1.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
    double prev = total;
    for (double R = 0.5; R <= 10; R += 0.5) {
        double m = tail_mass(f, r3, R);
        CHECK(m <= prev);
        prev = m;
    }
    // |x|^2 / (2t) is chi-squared with 3 degrees of freedom
    boost::math::chi_squared chi3(3);
    const double exact = boost::math::cdf(boost::math::complement(chi3, 18.0));
    CHECK(tail_mass(f, r3, 6.0) == doctest::Approx(exact).epsilon(0.01));
    CHECK(exact == doctest::Approx(4.40e-4).epsilon(0.01));
    for (double R : {2.0, 3.0, 4.0})
        CHECK(tail_mass(f, r3, 2 * R) / tail_mass(f, r3, R) < std::exp(-R * R / 5));
    CHECK_THROWS_AS(tail_mass(f, r3, -1.0), std::domain_error);
    CHECK_THROWS_AS(tail_mass(f, r3, 1e6), std::domain_error);
}

TEST_CASE("diagonal bracket")
{
    // C'^-1 <= V(sqrt t) H(0, 0, t) <= C on the computed kernel
    const RadialSpace<double> r3 = euclidean<double>(3);
    std::vector<KernelSample<double>> s = kernel_samples(euclid_field(), 0);
    LiYauReport r = li_yau_check(s, r3, 0.1);
    const double v = std::exp(r3.log_V(1.0)) * euclid_field().u[0](0);
    CHECK(1 / r.lower.fitted_C <= v * (1 + 1e-12));
    CHECK(v <= r.upper.fitted_C * (1 + 1e-12));
    CHECK(kernel_samples(euclid_field(), 0, 2.0).size() < s.size());
}
