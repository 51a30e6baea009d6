#include "doctest.h"

#include "warpheat/dirichlet_spectral.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace warpheat;

namespace {

const SpectralDecomposition<double>& ball3()
{
    static const SpectralDecomposition<double> s = eigensolve(euclidean<double>(3), 1.0, 64, 2000);
    return s;
}

// A = r^2 without the 4 pi, so phi_j(0) = sqrt(2) j pi
RadialSpace<double> bare_r2()
{
    RadialSpace<double> s;
    s.label = "r2";
    s.area = [](double r) { return r * r; };
    s.volume = [](double r) { return r * r * r / 3; };
    s.drift_exact = [](double r) { return 2 / r; };
    s.small_r_exponent = 2;
    return s;
}

SpectralDecomposition<double> truncate(SpectralDecomposition<double> s, int count)
{
    s.lambda.conservativeResize(count);
    s.phi.conservativeResize(Eigen::NoChange, count);
    return s;
}

} // namespace

TEST_CASE("ball eigenpairs")
{
    const auto& s = ball3();
    REQUIRE(s.count() == 64);
    for (int j = 1; j <= 10; ++j) {
        CAPTURE(j);
        CHECK(s.lambda(j - 1) == doctest::Approx(std::pow(j * M_PI, 2)).epsilon(0.005));
        // phi_j = sin(j pi r) / (r sqrt(2 pi)) up to sign
        const double sign = s.phi(0, j - 1) > 0 ? 1 : -1;
        double worst = 0;
        for (double x : {0.05, 0.2, 0.37, 0.6, 0.81, 0.95}) {
            double ref = std::sin(j * M_PI * x) / (x * std::sqrt(2 * M_PI));
            worst = std::max(worst, std::abs(sign * s.phi_at(j - 1, x) - ref));
        }
        CHECK(worst < 0.005 * j * M_PI / std::sqrt(2 * M_PI));
    }
    for (Eigen::Index j = 1; j < s.count(); ++j) CHECK(s.lambda(j) >= s.lambda(j - 1));
    CHECK(s.orthonormality_residual() < 1e-8);
    CHECK(s.phi(s.r.size() - 1, 0) == 0.0);
}

TEST_CASE("interval eigenvalues")
{
    RadialSpace<double> line;
    line.area = [](double) { return 1.0; };
    line.volume = [](double r) { return r; };
    line.drift_exact = [](double) { return 0.0; };
    line.small_r_exponent = 0;
    SpectralDecomposition<double> s = eigensolve(line, 1.0, 10, 2000);
    for (int j = 1; j <= 10; ++j)
        CHECK(s.lambda(j - 1) == doctest::Approx(std::pow((j - 0.5) * M_PI, 2)).epsilon(0.005));
    CHECK(s.orthonormality_residual() < 1e-8);
}

TEST_CASE("eigensolve arguments")
{
    CHECK_THROWS(eigensolve(euclidean<double>(3), 1.0, 0, 100));
    CHECK_THROWS(eigensolve(euclidean<double>(3), 1.0, 30, 100));
}

TEST_CASE("expansion kernel")
{
    const auto& s = ball3();
    SUBCASE("symmetric")
    {
        for (double t : {0.01, 0.1})
            CHECK(kernel(s, 0.2, 0.7, t).value == kernel(s, 0.7, 0.2, t).value);
    }
    SUBCASE("large time: first mode dominates")
    {
        const double t = 0.3;
        double lead = std::exp(-s.lambda(0) * t) * s.phi_at(0, 0.5) * s.phi_at(0, 0.5);
        double k = kernel(s, 0.5, 0.5, t).value;
        CHECK(std::abs(k - lead) / lead < std::exp(-(s.lambda(1) - s.lambda(0)) * t));
    }
    SUBCASE("agrees with the time-stepped ball kernel")
    {
        SolverConfig c;
        c.step_factor = 1e-3;
        HeatField<double> f = ball_kernel(euclidean<double>(3), 1.0, 0.5, {0.02}, 2000, c);
        Eigen::Index mid = 1000;
        REQUIRE(f.r(mid) == doctest::Approx(0.5));
        CHECK(f.u.back()(mid) == doctest::Approx(kernel(s, 0.5, 0.5, 0.02).value).epsilon(0.02));
        double scale = f.u.back().maxCoeff(), worst = 0;
        for (Eigen::Index i = 100; i < 1900; i += 50)
            worst = std::max(worst, std::abs(f.u.back()(i) - kernel(s, f.r(i), 0.5, 0.02).value));
        CHECK(worst < 0.02 * scale);
    }
    SUBCASE("too small a time is refused")
    {
        CHECK_THROWS_AS(kernel(s, 0.5, 0.5, 1e-6), TruncationError);
    }
    SUBCASE("tail bound covers the truncation difference")
    {
        SpectralDecomposition<double> half = truncate(s, 32);
        for (double t : {2e-4, 5e-4, 1e-3}) {
            CAPTURE(t);
            KernelValue<double> k32 = kernel(half, 0.3, 0.3, t, 1e300);
            KernelValue<double> k64 = kernel(s, 0.3, 0.3, t, 1e300);
            CHECK(k32.tail_bound >= std::abs(k32.value - k64.value));
        }
    }
    SUBCASE("column matches pointwise values")
    {
        Vec<double> col = kernel_column(s, 0.0, 0.05);
        for (Eigen::Index i : {0, 200, 900})
            CHECK(col(i) == doctest::Approx(kernel(s, s.r(i), 0.0, 0.05).value).epsilon(1e-12));
    }
}

TEST_CASE("eigenvalue growth")
{
    const auto& s = ball3();
    SpectralBound w = weyl_check(s, 3.0);
    CHECK(w.pass);
    CHECK(w.count == 64);
    CHECK(w.c_high == doctest::Approx(M_PI * M_PI).epsilon(0.01));
    CHECK(w.c_low > 0);
    SUBCASE("parabolic scaling on a cone")
    {
        auto c5 = cone(5.0);
        SpectralDecomposition<double> a = eigensolve(c5, 1.0, 10, 800);
        SpectralDecomposition<double> b = eigensolve(c5, 2.0, 10, 800);
        for (int j = 0; j < 10; ++j) CHECK(b.lambda(j) == doctest::Approx(a.lambda(j) / 4).epsilon(1e-10));
    }
}

TEST_CASE("sup norm growth")
{
    SpectralDecomposition<double> s = eigensolve(bare_r2(), 1.0, 16, 2000);
    for (int j = 1; j <= 8; ++j) {
        CHECK(s.sup_phi(j - 1) == doctest::Approx(std::sqrt(2.0) * j * M_PI).epsilon(0.01));
        CHECK(std::abs(s.phi(0, j - 1)) == s.sup_phi(j - 1));
    }
    SpectralBound b = linf_check(s, 3.0);
    CHECK(b.pass);
    CHECK(std::isfinite(b.c_high));
    SpectralBound fine = linf_check(eigensolve(bare_r2(), 1.0, 16, 4000), 3.0);
    CHECK(fine.c_high == doctest::Approx(b.c_high).epsilon(0.05));
}

TEST_CASE("gradient bound")
{
    SpectralDecomposition<double> s = eigensolve(euclidean<double>(3), 1.0, 16, 2000);
    SpectralBound b = gradient_bound_check(s);
    CHECK(b.pass);
    CHECK(b.c_high > 0);
    CHECK(b.c_high < 10);
    SpectralDecomposition<double> scaled = s;
    scaled.phi *= 3.0;
    CHECK(gradient_bound_check(scaled).c_high == doctest::Approx(b.c_high).epsilon(1e-12));
    SpectralBound fine = gradient_bound_check(eigensolve(euclidean<double>(3), 1.0, 16, 4000));
    CHECK(fine.c_high == doctest::Approx(b.c_high).epsilon(0.10));
}

TEST_CASE("annulus mass")
{
    const auto& s = ball3();
    CHECK(annulus_mass(s, 0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(annulus_mass(s, 5, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double r) { return 2 * std::sin(M_PI * r) * std::sin(M_PI * r); }, 0.9, 1.0);
    CHECK(ref == doctest::Approx(0.00645).epsilon(0.002));
    CHECK(annulus_mass(s, 0, 0.1) == doctest::Approx(ref).epsilon(0.01));
    double prev = 0;
    for (double d : {0.01, 0.05, 0.1, 0.3, 0.6, 1.0}) {
        double m = annulus_mass(s, 2, d);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("comparison with the global kernel")
{
    GlobalCompareConfig cfg;
    cfg.count = 48;
    cfg.spacing = 0.01;
    SUBCASE("identical radii give identical kernels")
    {
        GlobalCompareReport r = global_compare<double>(euclidean<double>(3), {4.0, 4.0}, 1.0, cfg);
        REQUIRE(r.rows.size() == 2);
        CHECK(r.rows[0].h_ball == r.rows[1].h_ball);
        CHECK(r.rows[0].diff_sup == r.rows[1].diff_sup);
        CHECK(r.global_exact);
    }
    SUBCASE("ball kernels increase to the global kernel")
    {
        GlobalCompareReport r = global_compare<double>(euclidean<double>(3), {3.0, 4.0, 5.0}, 1.0, cfg);
        CHECK(r.monotone);
        for (const auto& row : r.rows) {
            CHECK(row.h_ball <= row.h_global);
            CHECK(row.diff_sup >= 0);
        }
        CHECK(r.rows[0].diff_sup > r.rows[1].diff_sup);
        CHECK(r.rows[1].diff_sup > r.rows[2].diff_sup);
        CHECK(std::isfinite(r.fitted_c));
    }
    SUBCASE("radii must not decrease")
    {
        CHECK_THROWS(global_compare<double>(euclidean<double>(3), {4.0, 3.0}, 1.0, cfg));
    }
}
