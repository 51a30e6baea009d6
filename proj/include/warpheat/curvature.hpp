#pragma once

// Ricci curvature of dr^2 + f^2 k1 + h^2 k2 (S^3 -> S^7 -> S^4 fibration).
// Components are carried as r^2 Rc in (sign, log|.|) form: on the example the
// unscaled values under- and overflow every floating format.

#include "warpheat/numeric.hpp"
#include "warpheat/warp_metric.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace warpheat {

// Fibre part: Rc|k1 = 2/f^2 + 4 f^2/h^4, Rc|k2 = 6 (2h^2 - f^2)/h^4.
template <class S>
std::pair<S, S> ricci_fiber(const S& f, const S& h)
{
    if (!(f > 0) || !(h > 0)) throw std::domain_error("ricci_fiber: f and h must be positive");
    S h2 = h * h;
    S h4 = h2 * h2;
    return {S(2 / (f * f) + 4 * f * f / h4), S(6 * (2 * h2 - f * f) / h4)};
}

template <class S>
struct CurvatureSample {
    S log_r = 0;
    SignedLog<S> rc_k1, rc_k2, rc_rad;  // r^2 times the Ricci component
    bool finite = true;                 // false if f, h or a derivative is not a finite positive jet

    // Unscaled components; only meaningful when they fit the scalar range.
    S k1() const { using std::exp; return rc_k1.value() * exp(-2 * log_r); }
    S k2() const { using std::exp; return rc_k2.value() * exp(-2 * log_r); }
    S rad() const { using std::exp; return rc_rad.value() * exp(-2 * log_r); }
};

namespace detail {

// c * exp(log_mag) when logged, c * x otherwise.
template <class S>
struct Term {
    double c = 0;
    S x = 0;
    bool logged = false;
};

template <class S>
Term<S> lterm(double c, const S& log_mag) { return {c, log_mag, true}; }

template <class S>
Term<S> vterm(double c, const S& x) { return {c, x, false}; }

template <class S, std::size_t N>
SignedLog<S> combine(const std::array<Term<S>, N>& terms)
{
    using std::abs;
    using std::exp;
    using std::log;
    // Small magnitudes are summed directly so exact cancellations (flat space)
    // stay exactly zero.
    bool small = true;
    for (const auto& t : terms)
        if (t.logged && (t.x > 600 || t.x < -600)) small = false;
    if (small) {
        S acc = 0;
        for (const auto& t : terms) acc += t.logged ? S(t.c * exp(t.x)) : S(t.c * t.x);
        return SignedLog<S>::from_value(acc);
    }
    // plain terms fit the scalar, so they cost one log between them
    S plain = 0;
    for (const auto& t : terms)
        if (!t.logged) plain += t.c * t.x;
    const bool has_plain = plain != 0;
    S top = has_plain ? S(log(abs(plain))) : S(0);
    bool any = has_plain;
    for (const auto& t : terms)
        if (t.logged && t.c != 0 && (!any || t.x > top)) {
            top = t.x;
            any = true;
        }
    if (!any) return {};
    S acc = has_plain ? S(plain * exp(-top)) : S(0);
    for (const auto& t : terms)
        if (t.logged && t.c != 0) acc += t.c * exp(t.x - top);
    return SignedLog<S>::from_value(acc) * SignedLog<S>::from_log(1, top);
}

} // namespace detail

// Ricci components multiplied by r^2, written with a = log(f/r), p = r f'/f, q = r^2 f''/f:
//   r^2 Rc|k1 = 2 e^{-2a_f} - 2 p_f^2 - q_f + 4 e^{2a_f - 4a_h} - 4 p_f p_h
//   r^2 Rc|k2 = 12 e^{-2a_h} - 6 e^{2a_f - 4a_h} - q_h - 3 p_h^2 - 3 p_f p_h
//   r^2 Rc(n,n) = -3 q_f - 4 q_h
template <class S>
CurvatureSample<S> ricci_from_jets(const S& log_r, const Jet<S>& f, const Jet<S>& h)
{
    using detail::lterm;
    using detail::vterm;
    using boost::multiprecision::isfinite;
    using std::isfinite;
    S af = f.log_value - log_r;
    S ah = h.log_value - log_r;
    S mixed = 2 * af - 4 * ah;
    S pfph = f.p * h.p;
    CurvatureSample<S> c;
    c.log_r = log_r;
    c.rc_k1 = detail::combine<S, 5>({lterm<S>(2, S(-2 * af)), vterm<S>(-2, S(f.p * f.p)),
                                     vterm<S>(-1, f.q), lterm<S>(4, mixed), vterm<S>(-4, pfph)});
    c.rc_k2 = detail::combine<S, 5>({lterm<S>(12, S(-2 * ah)), lterm<S>(-6, mixed),
                                     vterm<S>(-1, h.q), vterm<S>(-3, S(h.p * h.p)),
                                     vterm<S>(-3, pfph)});
    c.rc_rad = detail::combine<S, 2>({vterm<S>(-3, f.q), vterm<S>(-4, h.q)});
    for (const S* x : {&f.log_value, &f.p, &f.q, &h.log_value, &h.p, &h.q})
        if (!isfinite(*x)) c.finite = false;
    return c;
}

// Closed-form test profiles: f and h given as jet functions of log r.
template <class S>
struct AnalyticProfile {
    std::function<Jet<S>(const S&)> f_jet, h_jet;
    S log_r_min = -std::numeric_limits<double>::infinity();
    S log_r_max = std::numeric_limits<double>::infinity();

    Jet<S> f(const S& s) const { return f_jet(s); }
    Jet<S> h(const S& s) const { return h_jet(s); }
    bool in_domain(const S& s) const { return s > log_r_min && s <= log_r_max; }
};

template <class S>
AnalyticProfile<S> flat_profile()
{
    auto j = [](const S& s) { return Jet<S>{s, S(1), S(0)}; };
    return {j, j};
}

template <class S>
bool in_domain(const WarpProfile<S>& p, const S& s)
{
    return s <= p.log_r_max();
}

template <class S>
bool in_domain(const AnalyticProfile<S>& p, const S& s)
{
    return p.in_domain(s);
}

template <class S, class Profile>
CurvatureSample<S> ricci_at(const Profile& prof, const S& log_r)
{
    if (!in_domain(prof, log_r)) throw OutOfRange("ricci_at: log_r outside the profile");
    return ricci_from_jets(log_r, prof.f(log_r), prof.h(log_r));
}

// ---------------------------------------------------------------------------
// certification

struct SamplePlan {
    int per_band = 4096;       // log-uniform samples per band
    int window_factor = 10;    // window samples = window_factor * per_band
    int bands = -1;            // certify the cap and bands 0..bands-1; -1 for all
    double tolerance = 0.0;    // pass iff every sample >= -tolerance (on r^2 Rc)
    bool left_refine = true;   // extra per_band samples geometric in the distance to b_k
    double cap_floor = 1e-3;   // cap samples start at cap_floor * b_0
};

struct ComponentMin {
    int band = -1;
    std::string component;
    int sign = 0;
    double log_abs = 0;       // natural log of |r^2 Rc| at the minimum
    double min_value = 0;     // r^2 Rc at the minimum, saturated to the double range
    double argmin_log_r = 0;
    long samples = 0;
    long nonfinite = 0;       // samples where the profile itself broke down (f or h <= 0)
};

struct CertificationReport {
    std::vector<ComponentMin> rows;
    bool pass = true;
    long samples = 0;
};

inline const std::array<const char*, 3> kComponents = {"rc_k1", "rc_k2", "rc_rad"};

namespace detail {

template <class S>
struct MinTracker {
    std::array<SignedLog<S>, 3> best;
    std::array<S, 3> where;
    std::array<bool, 3> seen{false, false, false};
    long count = 0;
    long nonfinite = 0;
    S first_nonfinite = 0;

    void add(const CurvatureSample<S>& c)
    {
        ++count;
        if (!c.finite) {
            if (nonfinite++ == 0) first_nonfinite = c.log_r;
            return;
        }
        const SignedLog<S>* v[3] = {&c.rc_k1, &c.rc_k2, &c.rc_rad};
        for (int i = 0; i < 3; ++i)
            if (!seen[i] || *v[i] < best[i]) {
                best[i] = *v[i];
                where[i] = c.log_r;
                seen[i] = true;
            }
    }

    ComponentMin row(int band, int i, double tolerance, bool& pass) const
    {
        ComponentMin r;
        r.band = band;
        r.component = kComponents[i];
        r.samples = count;
        r.nonfinite = nonfinite;
        if (nonfinite > 0) {
            r.min_value = std::numeric_limits<double>::quiet_NaN();
            r.log_abs = std::numeric_limits<double>::quiet_NaN();
            r.argmin_log_r = to_double(first_nonfinite);
            pass = false;
        } else if (seen[i]) {
            r.sign = best[i].sign;
            r.log_abs = r.sign == 0 ? 0.0 : to_double(best[i].log_abs);
            r.min_value = best[i].to_double();
            r.argmin_log_r = to_double(where[i]);
            if (!(r.sign >= 0 || (tolerance > 0 && r.log_abs <= std::log(tolerance)))) pass = false;
        }
        return r;
    }
};

} // namespace detail

template <class S>
CertificationReport certify_nonneg(const WarpProfile<S>& prof, const SamplePlan& plan)
{
    using std::exp;
    using std::log;
    const int nb = plan.bands < 0 ? static_cast<int>(prof.f_bands.size())
                                  : std::min<int>(plan.bands, prof.f_bands.size());
    const S log_end = nb == 0 ? prof.log_b0() : prof.f_bands[nb - 1].log_hi;
    std::vector<detail::MinTracker<S>> trackers(nb + 1);
    auto visit = [&](const S& s) {
        if (s > log_end) return;
        int k = prof.band_index(s);
        trackers[k + 1].add(ricci_at(prof, s));
    };
    const int P = plan.per_band;
    // cap
    {
        S lo = prof.log_b0() + log(S(plan.cap_floor));
        S hi = prof.log_b0();
        for (int j = 0; j < P; ++j) visit(S(lo + (hi - lo) * (j + 1) / P));
    }
    for (int k = 0; k < nb; ++k) {
        const S lo = prof.f_bands[k].log_lo;
        const S hi = prof.f_bands[k].log_hi;
        const S span = hi - lo;
        for (int j = 1; j <= P; ++j) visit(S(lo + span * j / P));
        if (plan.left_refine) {
            // distance to b_k from 1e-9 b_k up to the whole band, geometric
            S d0 = log(S(1e-9));
            S d1 = log(span);
            for (int j = 0; j < P; ++j) visit(S(lo + exp(d0 + (d1 - d0) * j / (P - 1))));
        }
    }
    for (const auto& w : prof.windows) {
        if (w.log_lo > log_end) continue;
        const int M = plan.window_factor * P;
        S U = exp(w.log_hi - w.log_lo);
        for (int j = 0; j <= M; ++j) {
            // uniform in r across the window
            S u = 1 + (U - 1) * j / M;
            visit(S(w.log_lo + log(u)));
        }
    }

    CertificationReport rep;
    for (int b = 0; b <= nb; ++b) {
        rep.samples += trackers[b].count;
        for (int i = 0; i < 3; ++i) rep.rows.push_back(trackers[b].row(b - 1, i, plan.tolerance, rep.pass));
    }
    return rep;
}

// Generic sample list, used for closed-form profiles.
template <class S, class Profile>
CertificationReport certify_nonneg(const Profile& prof, const std::vector<S>& log_r,
                                   double tolerance = 0.0)
{
    detail::MinTracker<S> t;
    for (const S& s : log_r) t.add(ricci_at(prof, s));
    CertificationReport rep;
    rep.samples = t.count;
    for (int i = 0; i < 3; ++i) rep.rows.push_back(t.row(0, i, tolerance, rep.pass));
    return rep;
}

} // namespace warpheat
