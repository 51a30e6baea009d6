#include "doctest.h"

#include "warpheat/blowdown.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace warpheat;
using S = Precise130;

namespace {

double d(const S& x) { return to_double(x); }

const ConstructionParams<S>& params()
{
    static const ConstructionParams<S> p = [] {
        Schedule s;
        s.n_bands = 4;
        return generate_params<S>(s);
    }();
    return p;
}

const WarpProfile<S>& profile()
{
    static const WarpProfile<S> prof = smooth_c2(assemble_c1(params()));
    return prof;
}

// vol(S^7) int_lo^hi f^3 h^4 dr by adaptive Gauss-Kronrod in double
double volume_quadrature(double lo, double hi)
{
    auto dens = [](double r) {
        S lr = log(S(r));
        return std::exp(d(S(3 * profile().f(lr).log_value + 4 * profile().h(lr).log_value)));
    };
    return std::pow(M_PI, 4) / 3 *
           boost::math::quadrature::gauss_kronrod<double, 61>::integrate(dens, lo, hi, 15, 1e-14);
}

} // namespace

TEST_CASE("rescaled profiles")
{
    LogVolume<double> c5 = log_volume_of(cone(5.0));
    for (double lt : {-3.0, 0.0, 12.0})
        for (double r : {0.25, 0.7, 1.0, 3.0}) {
            CHECK(rescaled_profile(c5, lt, r) == doctest::Approx(std::pow(r, 5)).epsilon(1e-12));
        }
    LogVolume<double> sur = log_volume_of(surrogate_profile(OscillationSpec{}));
    CHECK(rescaled_profile(sur, 17.3, 1.0) == 1.0);
    // sqrt t = 10^3.5 sits in the middle of an alpha = 6 band
    const double lt = 2 * 3.5 * std::log(10.0);
    for (double r : {0.5, 0.8, 1.4, 2.0})
        CHECK(rescaled_profile(sur, lt, r) == doctest::Approx(std::pow(r, 6)).epsilon(0.02));
    CHECK_THROWS_AS(rescaled_profile(c5, 0.0, 0.0), std::domain_error);
}

TEST_CASE("fitted exponents")
{
    SUBCASE("cone gives its exponent")
    {
        BlowdownSequence<double> seq{"cone", {0.0, 5.0, 30.0}};
        for (const ExponentFit& f : limit_exponent(log_volume_of(cone(5.5)), seq, default_samples())) {
            CHECK(f.exponent == doctest::Approx(5.5).epsilon(1e-12));
            CHECK(f.residual < 1e-12);
        }
    }
    SUBCASE("example profile along both sequences")
    {
        auto [t, tt] = example_sequences(params());
        LogVolume<S> lv = WarpVolume<S>(profile()).evaluator();
        const double target = 8 - 3 * d(params().eta1), target_tilde = 8 - 3 * d(params().eta2);
        CHECK(target == doctest::Approx(6.2));
        CHECK(target_tilde == doctest::Approx(6.188));
        std::vector<ExponentFit> a = limit_exponent(lv, t, default_samples());
        std::vector<ExponentFit> b = limit_exponent(lv, tt, default_samples());
        REQUIRE(a.size() == 2);
        REQUIRE(b.size() == 2);
        CHECK(std::abs(a.back().exponent - target) < 1e-3);
        CHECK(std::abs(b.back().exponent - target_tilde) < 1e-3);
        CHECK(a.back().residual < 1e-6);
        CHECK(std::abs(a.back().exponent - b.back().exponent) > 10 * std::max(a.back().residual, b.back().residual));
    }
    SUBCASE("argument checks")
    {
        BlowdownSequence<double> bad{"bad", {1.0, 1.0}};
        CHECK_THROWS(limit_exponent(log_volume_of(cone(5.0)), bad, default_samples()));
        BlowdownSequence<double> ok{"ok", {1.0}};
        CHECK_THROWS(limit_exponent(log_volume_of(cone(5.0)), ok, {0.1, 1.0}));
        CHECK_THROWS(default_samples(1));
    }
}

TEST_CASE("example sequences")
{
    const auto& p = params();
    auto [t, tt] = example_sequences(p);
    CHECK(t.label == "t");
    CHECK(tt.label == "t_tilde");
    REQUIRE(t.log_t.size() == 2);
    REQUIRE(tt.log_t.size() == 2);
    CHECK(d(S(t.log_t[0] - 2 * (1 - p.eps[0]) * p.log_b[1])) == 0.0);
    CHECK(d(S(tt.log_t[1] - 2 * (1 - p.eps[3]) * p.log_b[4])) == 0.0);
    // t_0 < t~_0 < t_1 < t~_1
    CHECK(t.log_t[0] < tt.log_t[0]);
    CHECK(tt.log_t[0] < t.log_t[1]);
    CHECK(t.log_t[1] < tt.log_t[1]);
    // log t_i / (2 log b_{2i+1}) = 1 - eps_{2i} -> 1
    S prev = 1;
    for (std::size_t i = 0; i < t.log_t.size(); ++i) {
        S gap = 1 - t.log_t[i] / (2 * p.log_b[2 * i + 1]);
        CHECK(gap > 0);
        CHECK(gap < prev);
        CHECK(std::abs(d(S(gap / p.eps[2 * i] - 1))) < 1e-30);
        prev = gap;
    }
}

TEST_CASE("consistency criterion")
{
    auto s = default_samples();
    ConsistencyResult same = consistency_check(power_law(1, 6.2), power_law(1, 6.2), s);
    CHECK(same.consistent);
    CHECK(same.residual == 0.0);
    CHECK(consistency_check(power_law(1, 6.2), power_law(3.7, 6.2), s).consistent);
    ConsistencyResult diff = consistency_check(power_law(1, 6.2), power_law(1, 6.188), s);
    CHECK_FALSE(diff.consistent);
    CHECK(diff.residual == doctest::Approx(0.012 * std::log(4.0) / 2 * 2).epsilon(1e-6));
    CHECK(diff.drift_residual > 0);
    ConsistencyResult rev = consistency_check(power_law(1, 6.188), power_law(1, 6.2), s);
    CHECK(rev.residual == doctest::Approx(diff.residual).epsilon(1e-12));
    CHECK(rev.consistent == diff.consistent);
    LimitProfile flat{[](double) { return 0.0; }, [](double) { return 0.0; }};
    CHECK_THROWS_AS(consistency_check(flat, power_law(1, 6), s), DegenerateProfile);
}

TEST_CASE("volume ratio")
{
    for (int n : {3, 8})
        for (double r : {0.1, 1.0, 100.0})
            CHECK(volume_ratio(log_volume_of(euclidean<double>(n)), n, r) ==
                  doctest::Approx(unit_ball_volume<double>(n)).epsilon(1e-12));
    LogVolume<double> c5 = log_volume_of(cone(5.0));
    CHECK(volume_ratio(c5, 6, 1e6) < 1e-5);
    CHECK(volume_ratio(c5, 6, 1e12) < volume_ratio(c5, 6, 1e6));
    LogVolume<double> sur = log_volume_of(surrogate_profile(OscillationSpec{}));
    double prev = std::numeric_limits<double>::infinity();
    for (double lr = -1; lr <= 11; lr += 0.01) {
        double v = volume_ratio(sur, 6, std::pow(10.0, lr));
        CHECK(v <= prev * (1 + 1e-12));
        prev = v;
    }
}

TEST_CASE("warped volume")
{
    const WarpVolume<S> vol(profile());
    const double b0 = std::exp(d(profile().log_b0()));
    SUBCASE("flat region")
    {
        for (double r : {0.5, 3.0, b0 / 4}) {
            double ref = std::pow(M_PI, 4) / 24 * std::pow(r, 8);
            CHECK(std::exp(d(vol(S(std::log(r))))) == doctest::Approx(ref).epsilon(1e-13));
        }
    }
    SUBCASE("matches adaptive quadrature across the cap and first band")
    {
        const double flat = std::pow(M_PI, 4) / 24 * std::pow(b0 / 4, 8);
        for (double r : {b0, 2 * b0}) {
            double ref = flat + volume_quadrature(b0 / 4, r);
            CAPTURE(r);
            CHECK(std::exp(d(vol(S(log(S(r)))))) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
    SUBCASE("increasing")
    {
        S prev = vol(S(0));
        for (int k = 1; k <= 400; ++k) {
            S lr = vol.log_r_max() * k / 400;
            S v = vol(lr);
            CHECK(v > prev);
            prev = v;
        }
        CHECK_THROWS_AS(vol(S(vol.log_r_max() + 1)), OutOfRange);
    }
}

TEST_CASE("oscillation demo")
{
    CHECK(band_exponent(OscillationSpec{}, 3.5) == 6);
    CHECK(band_exponent(OscillationSpec{}, 1.75) == 5);
    auto [a, b] = default_demo_sequences();
    DemoConfig cfg;
    SUBCASE("single exponent reduces to a cone")
    {
        OscillationSpec one;
        one.alphas = {6};
        one.log10_bounds = {};
        DemoReport r = oscillation_demo(one, {a, b}, cfg);
        REQUIRE(r.clusters.size() == 2);
        for (double c : r.clusters) CHECK(c == doctest::Approx(1.0 / 384).epsilon(0.01));
    }
    SUBCASE("default spec separates the two clusters")
    {
        DemoReport r = oscillation_demo(OscillationSpec{}, {a, b}, cfg);
        REQUIRE(r.clusters.size() == 2);
        CHECK(r.clusters[0] == doctest::Approx(1.0 / 384).epsilon(0.10));
        CHECK(r.clusters[1] == doctest::Approx(cone_constant(5.0)).epsilon(0.10));
        CHECK(r.clusters[0] < r.clusters[1]);
        CHECK(r.pass());
        DemoReport s = oscillation_demo(OscillationSpec{}, {b, a}, cfg);
        REQUIRE(s.clusters.size() == 2);
        CHECK(s.clusters[0] == r.clusters[1]);
        CHECK(s.clusters[1] == r.clusters[0]);
        CHECK(s.labels[0] == "alpha2");
    }
}
