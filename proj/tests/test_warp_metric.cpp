#include "doctest.h"

#include "warpheat/warp_metric.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>

using namespace warpheat;
using S = Precise130;

namespace {

Schedule four_bands()
{
    Schedule s;
    s.n_bands = 4;
    return s;
}

const ConstructionParams<S>& params()
{
    static const ConstructionParams<S> p = generate_params<S>(four_bands());
    return p;
}

double d(const S& x) { return to_double(x); }

// log f-bar on band k at its left end, from the band formulas
S log_min_fbar(const ConstructionParams<S>& p, int k)
{
    if (k % 2 == 0) return p.log_beta[k] - p.omega[k] * p.log_b[k + 1] + (1 - p.eta1) * p.log_b[k];
    return p.log_beta[k] + p.omega[k] * p.log_b[k + 1] + (1 - p.eta2) * p.log_b[k];
}

// one-sided difference quotients of log f in log r
S left_slope(const WarpProfile<S>& prof, Which w, const S& s, const S& h)
{
    return (prof.eval_c1(w, s).log_value - prof.eval_c1(w, S(s - h)).log_value) / h;
}

S right_slope(const WarpProfile<S>& prof, Which w, int band, const S& s, const S& h)
{
    const auto& bands = w == Which::f ? prof.f_bands : prof.h_bands;
    return (bands[band].eval(S(s + h)).log_value - bands[band].eval(s).log_value) / h;
}

} // namespace

TEST_CASE("exponent ratio of the default schedule")
{
    const Schedule s;
    CHECK((1 - s.eta2) / (1 - s.eta1) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK((1 - s.eta2) / (1 - s.eta1) >= 0.99 - 1e-12);
    CHECK(check_assumptions(params(), params().n_bands).find("A1").pass);
}

TEST_CASE("b0 lower bound forced by b0^eta1 >= 7")
{
    // solve b^0.6 = 7 by bracketing, independently of the generator
    auto g = [](double b) { return std::pow(b, 0.6) - 7; };
    boost::uintmax_t iters = 100;
    auto [lo, hi] = boost::math::tools::toms748_solve(g, 1.0, 100.0,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
    const double b0_min = (lo + hi) / 2;
    CHECK(b0_min == doctest::Approx(25.62).epsilon(2e-4));
    CHECK(d(params().b(0)) >= b0_min * (1 - 1e-12));

    Schedule low = four_bands();
    low.b0_power = 6.5;
    try {
        generate_params<S>(low);
        FAIL("expected an infeasible schedule");
    } catch (const InfeasibleSchedule& e) {
        CHECK(e.assumption() == "A7");
    }
}

TEST_CASE("eta2 = 0.9 is infeasible and names Assumption 1")
{
    Schedule s = four_bands();
    s.eta2 = 0.9;
    CHECK((1 - s.eta2) / (1 - s.eta1) == doctest::Approx(0.25));
    try {
        generate_params<S>(s);
        FAIL("expected an infeasible schedule");
    } catch (const InfeasibleSchedule& e) {
        CHECK(e.assumption() == "A1");
    }
}

TEST_CASE("generate_params rejects short schedules and too little precision")
{
    Schedule s = four_bands();
    s.n_bands = 3;
    CHECK_THROWS_AS(generate_params<S>(s), std::invalid_argument);
    s.n_bands = 5;
    CHECK_THROWS_AS(generate_params<S>(s), PrecisionError);
}

TEST_CASE("check_assumptions")
{
    SUBCASE("defaults pass every entry")
    {
        CheckReport r = check_assumptions(params(), params().n_bands);
        CHECK(r.all_pass());
        for (const CheckEntry& e : r.entries) {
            CAPTURE(e.id);
            CHECK(e.pass);
            CHECK(e.evaluated > 0);
        }
    }
    SUBCASE("eps0 = 0.5 breaks Assumption 10")
    {
        ConstructionParams<S> p = params();
        p.eps0 = p.eps[0] = S(0.5);
        const double rhs = 0.25 * 0.6 * 0.4 * std::exp(-0.6 * d(p.log_b[0]) - d(S(p.omega[0] * p.log_b[1])));
        CHECK(0.5 > rhs);
        CheckReport r = check_assumptions(p, p.n_bands);
        CHECK_FALSE(r.find("A10").pass);
    }
    SUBCASE("empty parameters with count 0 pass vacuously")
    {
        CheckReport r = check_assumptions(ConstructionParams<S>{}, 0);
        CHECK(r.all_pass());
        for (const CheckEntry& e : r.entries) CHECK(e.vacuous);
    }
}

TEST_CASE("eval_bar")
{
    const auto& p = params();
    const S L1 = p.log_b[1];
    const S tiny = S("1e-60");
    SUBCASE("first derivatives of f-bar and h-bar agree across b1")
    {
        for (Which w : {Which::f, Which::h}) {
            Jet<S> left = eval_bar(p, w, L1);
            Jet<S> right = eval_bar(p, w, S(L1 + tiny));
            // log f' = log f + log p - log r
            S dl = left.log_value + log(left.p) - (right.log_value + log(right.p));
            CHECK(std::abs(d(dl)) < 1e-10);
        }
    }
    SUBCASE("f-bar on the first band is beta0 b1^-omega0 r^(1-eta1)")
    {
        S s = (p.log_b[0] + p.log_b[1]) / 2;
        S expect = p.log_beta[0] - p.omega[0] * p.log_b[1] + (1 - p.eta1) * s;
        CHECK(std::abs(d(S(eval_bar(p, Which::f, s).log_value - expect))) < 1e-30);
        CHECK(d(eval_bar(p, Which::f, s).p) == doctest::Approx(0.4).epsilon(1e-15));
    }
    SUBCASE("out of range")
    {
        CHECK_THROWS_AS(eval_bar(p, Which::f, p.log_b[0]), OutOfRange);
        CHECK_THROWS_AS(eval_bar(p, Which::f, S(p.log_b.back() + 1)), OutOfRange);
    }
}

TEST_CASE("jump offsets")
{
    const auto& p = params();
    JumpOffsets<S> j = jump_offsets(p);
    const S b0 = p.b(0);
    SUBCASE("tau0 closed form")
    {
        S x = p.beta(0) * exp(-p.omega[0] * p.log_b[1]) * exp(-p.eta1 * p.log_b[0]);
        S tau0 = b0 / 4 * (3 - (3 + p.eta1) * x);
        CHECK(j.tau[0].sign == 1);
        CHECK(std::abs(d(S(j.tau[0].value() / tau0 - 1))) < 1e-30);
        CHECK(d(tau0) < 0.75 * d(b0));
        // tau0 is the gap between the cap and f-bar at b0
        InnerCap<S> cap = inner_cap(p);
        S gap = cap.eval(Which::f, p.log_b[0]).value() - detail::bar_band(p, Which::f, 0).eval(p.log_b[0]).value();
        CHECK(std::abs(d(S(gap / tau0 - 1))) < 1e-30);
    }
    SUBCASE("sign pattern")
    {
        for (int l = 1; l < p.n_bands; ++l) {
            CAPTURE(l);
            CHECK(j.tau[l].sign == (l % 2 == 1 ? -1 : 1));
            CHECK(j.delta[l].sign == (l % 2 == 1 ? -1 : 1));
        }
        CHECK(j.delta[0].sign == 1);
        CHECK(d(j.delta[0].value()) <= 0.75 * d(b0));
    }
    SUBCASE("|tau_i| <= b_i^{-(eta2-eta1)/2} min f-bar on later bands")
    {
        const S dd = p.eta2 - p.eta1;
        for (int i = 1; i < p.n_bands; ++i)
            for (int k = i + 1; k < p.n_bands; ++k) {
                CAPTURE(i);
                CAPTURE(k);
                CHECK(j.tau[i].log_abs <= -dd / 2 * p.log_b[i] + log_min_fbar(p, k));
            }
    }
    SUBCASE("cumulative sums")
    {
        for (int k = 1; k < p.n_bands; ++k) {
            SignedLog<S> z = j.tau[0];
            for (int l = 1; l <= k; ++l) z = z + j.tau[l];
            CHECK(z.sign == j.zeta[k].sign);
            CHECK(std::abs(d(S(z.log_abs - j.zeta[k].log_abs))) < 1e-25);
        }
    }
}

TEST_CASE("inner cap")
{
    const auto& p = params();
    InnerCap<S> cap = inner_cap(p);
    SUBCASE("identity up to b0/2")
    {
        for (double frac : {1e-6, 0.01, 0.3, 0.5}) {
            S s = log(S(cap.b0 * frac));
            Jet<S> j = cap.eval(Which::f, s);
            CHECK(j.log_value == s);
            CHECK(j.p == 1);
        }
    }
    SUBCASE("C2 = C1 / 3")
    {
        CHECK(std::abs(d(S(cap.c2 * 3 / cap.c1 - 1))) < 1e-12);
    }
    SUBCASE("cap derivative at b0 matches the outer band")
    {
        S expect = exp(p.log_beta[0] - p.omega[0] * p.log_b[1] - p.eta1 * p.log_b[0]) * (1 - p.eta1);
        CHECK(std::abs(d(S(cap.eval(Which::f, p.log_b[0]).d1(p.log_b[0]) / expect - 1))) < 1e-25);
        WarpProfile<S> prof = assemble_c1(p);
        CHECK(std::abs(d(S(prof.f_bands[0].eval(p.log_b[0]).d1(p.log_b[0]) / expect - 1))) < 1e-25);
    }
    SUBCASE("C1 has the closed form")
    {
        S c1 = (1 - p.beta(0) * exp(-p.omega[0] * p.log_b[1] - p.eta1 * p.log_b[0]) * (1 - p.eta1)) / cap.b0;
        CHECK(std::abs(d(S(cap.c1 / c1 - 1))) < 1e-25);
        CHECK(cap.c1 > 0);
    }
}

TEST_CASE("assemble_c1")
{
    const auto& p = params();
    WarpProfile<S> prof = assemble_c1(p);
    const S h = S("1e-20");
    SUBCASE("equals the cap on [0, b0]")
    {
        for (double frac : {0.1, 0.5, 0.75, 1.0}) {
            S s = p.log_b[0] + log(S(frac));
            CHECK(prof.f(s).log_value == prof.cap.eval(Which::f, s).log_value);
            CHECK(prof.h(s).log_value == prof.cap.eval(Which::h, s).log_value);
        }
    }
    SUBCASE("value and slope continuous at every joint")
    {
        for (int i = 0; i < p.n_bands; ++i) {
            const S s = p.log_b[i];
            for (Which w : {Which::f, Which::h}) {
                CAPTURE(i);
                const auto& bands = w == Which::f ? prof.f_bands : prof.h_bands;
                S left = prof.eval_c1(w, s).log_value;
                S right = bands[i].eval(s).log_value;
                CHECK(std::abs(d(S(left - right))) < 1e-10);
                S pl = left_slope(prof, w, s, h);
                S pr = right_slope(prof, w, i, s, h);
                CHECK(std::abs(d(S((pl - pr) / pr))) < 1e-10);
            }
        }
    }
    SUBCASE("h above f beyond b0")
    {
        for (int k = 0; k < p.n_bands; ++k)
            for (int j = 1; j <= 64; ++j) {
                S s = prof.f_bands[k].log_lo + (prof.f_bands[k].log_hi - prof.f_bands[k].log_lo) * j / 64;
                CHECK(prof.h(s).log_value > prof.f(s).log_value);
            }
    }
    SUBCASE("offsets are the cumulative jumps")
    {
        JumpOffsets<S> j = jump_offsets(p);
        for (int k = 0; k < p.n_bands; ++k) {
            CHECK(prof.f_bands[k].offset.sign == j.zeta[k].sign);
            CHECK(prof.h_bands[k].offset.sign == j.xi[k].sign);
        }
    }
}

TEST_CASE("smooth_c2")
{
    const auto& p = params();
    WarpProfile<S> c1 = assemble_c1(p);
    SUBCASE("zero-width windows leave the profile unchanged")
    {
        auto spec = default_windows(c1);
        for (auto& w : spec) w.second = 0;
        WarpProfile<S> out = smooth_c2(c1, spec);
        CHECK(out.windows.empty());
        for (int k = 0; k < p.n_bands; ++k) {
            S s = p.log_b[k];
            CHECK(out.f(s).log_value == c1.f(s).log_value);
            CHECK(out.h(s).q == c1.h(s).q);
        }
    }
    WarpProfile<S> sm = smooth_c2(c1);
    REQUIRE(sm.windows.size() == default_windows(c1).size());
    SUBCASE("second derivative continuous at both window edges")
    {
        for (const auto& w : sm.windows)
            for (Which which : {Which::f, Which::h}) {
                for (const S& edge : {w.log_lo, w.log_hi}) {
                    // log |f''| + 2 log r = log f + log |q| on both sides
                    Jet<S> in = w.eval(which, edge);
                    Jet<S> out = c1.eval_c1(which, edge);
                    if (out.q == 0) {
                        CHECK(std::abs(d(in.q)) < 1e-30);
                        continue;
                    }
                    S lhs = log(abs(in.q)) + in.log_value;
                    S rhs = log(abs(out.q)) + out.log_value;
                    CHECK(std::abs(d(S(lhs - rhs))) < 1e-20);
                }
            }
    }
    SUBCASE("drift at the right edge within the quadrature bound")
    {
        for (const auto& w : sm.windows)
            for (Which which : {Which::f, Which::h}) {
                auto [drift, bound] = w.drift(which);
                CHECK(abs(drift) <= bound);
            }
    }
    SUBCASE("identity outside windows")
    {
        for (int k = 0; k < p.n_bands; ++k) {
            CHECK(sm.f_bands[k].log_coef == c1.f_bands[k].log_coef);
            CHECK(sm.h_bands[k].exponent == c1.h_bands[k].exponent);
            S s = (p.log_b[k] + p.log_b[k + 1]) / 2;
            REQUIRE(sm.window_at(s) == nullptr);
            CHECK(sm.f(s).log_value == c1.f(s).log_value);
            CHECK(sm.h(s).p == c1.h(s).p);
        }
        S s = log(S(c1.cap.b0 / 4));
        CHECK(sm.f(s).log_value == s);
    }
    SUBCASE("overlapping windows rejected")
    {
        auto spec = default_windows(c1);
        spec.push_back(spec[2]);
        CHECK_THROWS_AS(smooth_c2(c1, spec), OverlappingWindows);
        std::vector<std::pair<S, double>> wide = {{p.log_b[1], 0.6}};
        CHECK_THROWS_AS(smooth_c2(c1, wide), OverlappingWindows);
    }
}

TEST_CASE("verify_claims")
{
    const auto& p = params();
    CheckReport r = verify_claims(p);
    CHECK(r.all_pass());
    JumpOffsets<S> j = jump_offsets(p);
    SUBCASE("|delta_0| <= 3 (b0/b1) min h-bar on band j >= 1")
    {
        for (int k = 1; k < p.n_bands; ++k) {
            S min_h = detail::bar_band(p, Which::h, k).eval(p.log_b[k]).log_value;
            CHECK(j.delta[0].log_abs <= log(S(3)) + p.log_b[0] - p.log_b[1] + min_h);
        }
    }
    SUBCASE("|delta_i| <= 4 eps_{i-1} min h-bar for 1 <= i <= j")
    {
        for (int i = 1; i < p.n_bands; ++i)
            for (int k = i; k < p.n_bands; ++k) {
                S min_h = detail::bar_band(p, Which::h, k).eval(p.log_b[k]).log_value;
                CHECK(j.delta[i].log_abs <= log(4 * p.eps[i - 1]) + min_h + S(1e-12));
            }
    }
    SUBCASE("|tau_i| <= (eta2-eta1)/(1-eta2) min f-bar on band i")
    {
        for (int i = 1; i < p.n_bands; ++i)
            CHECK(j.tau[i].log_abs <= log((p.eta2 - p.eta1) / (1 - p.eta2)) + log_min_fbar(p, i) + S(1e-12));
    }
    SUBCASE("fewer than three bands reports nothing")
    {
        ConstructionParams<S> q = p;
        q.n_bands = 2;
        for (const CheckEntry& e : verify_claims(q).entries) CHECK(e.vacuous);
    }
}

TEST_CASE("params round trip through text")
{
    const auto& p = params();
    ConstructionParams<S> q = read_params<S>(write_params(p));
    REQUIRE(q.n_bands == p.n_bands);
    for (int i = 0; i <= p.n_bands; ++i) {
        CHECK(std::abs(d(S((q.log_b[i] - p.log_b[i]) / p.log_b[i]))) < 1e-120);
        CHECK(std::abs(d(S((q.eps[i] - p.eps[i]) / p.eps[i]))) < 1e-120);
    }
    for (int i = 0; i < p.n_bands; ++i)
        CHECK(std::abs(d(S((q.log_alpha[i] - p.log_alpha[i]) / p.log_alpha[i]))) < 1e-120);
    CHECK(check_assumptions(q, q.n_bands).all_pass());
    CHECK_THROWS_AS(read_params<S>("n_bands = 1\nbogus = 2\n"), std::invalid_argument);
}
