#pragma once

// Doubly warped metric g = dr^2 + f^2 k1 + h^2 k2 on R^8 built from power-law
// bands (b_k, b_{k+1}], an inner cap on [0, b_0], constant jump corrections
// that make the profile C^1, and linear-f'' smoothing windows.

#include "warpheat/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace warpheat {

class InfeasibleSchedule : public std::runtime_error {
public:
    InfeasibleSchedule(std::string assumption, const std::string& what)
        : std::runtime_error(what), assumption_(std::move(assumption)) {}
    const std::string& assumption() const { return assumption_; }

private:
    std::string assumption_;
};

class NonpositiveConstant : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Exact decimal conversion so that 0.6 means 6/10 in the wide type.
template <class S>
S from_decimal(double x)
{
    if constexpr (std::is_floating_point_v<S>) {
        return static_cast<S>(x);
    } else {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, x);
        return S(std::string(buf, res.ptr));
    }
}

// Generation config. eps_i = eps0^(2^i); b_0^eta1 = b0_power; even radii
// log b_{2i+2} = kappa * eps_{2i+1}^(-3/2); b_1 and the odd radii are solved
// from the cap matching (A13) and the alpha matching so that
// alpha_{2i} = 1/(1 + 3 eps_{2i}).
struct Schedule {
    double eta1 = 0.6;
    double eta2 = 0.604;
    double eps0 = 1e-7;
    double omega0 = 1e-6;
    int n_bands = 8;
    double b0_power = 8.0;
    double kappa = 0.1;
    double beta_even_gap = 0.01;  // beta_{2i} = 1 - gap * 2^-i
    double beta_odd = 0.005;      // beta_{2i+1} = beta_odd * 2^-i
};

template <class S>
struct ConstructionParams {
    S eta1 = 0, eta2 = 0, eps0 = 0;
    int n_bands = 0;
    std::vector<S> log_b;      // n_bands + 1 radii b_0 .. b_n
    std::vector<S> eps;        // n_bands + 1 entries, the last only enters sums
    std::vector<S> omega;      // n_bands
    std::vector<S> log_alpha;  // n_bands
    std::vector<S> log_beta;   // n_bands
    S delta_sum = 0;           // sum of eps_l
    S tau_sum = 0;             // sum_{l>=1} b_l^{-(eta2-eta1)/2}

    S alpha(int i) const { using std::exp; return exp(log_alpha[i]); }
    S beta(int i) const { using std::exp; return exp(log_beta[i]); }
    S b(int i) const { using std::exp; return exp(log_b[i]); }
};

// ---------------------------------------------------------------------------
// assumption checks

struct CheckEntry {
    std::string id;
    std::string text;
    bool pass = true;
    bool vacuous = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    int worst_index = -1;
    int evaluated = 0;
};

struct CheckReport {
    std::vector<CheckEntry> entries;

    bool all_pass() const
    {
        return std::all_of(entries.begin(), entries.end(),
                           [](const CheckEntry& e) { return e.pass; });
    }
    const CheckEntry* first_failure() const
    {
        for (const auto& e : entries)
            if (!e.pass) return &e;
        return nullptr;
    }
    const CheckEntry& find(const std::string& id) const
    {
        for (const auto& e : entries)
            if (e.id == id) return e;
        throw std::out_of_range("no report entry " + id);
    }
};

namespace detail {

class Recorder {
public:
    explicit Recorder(CheckReport& r) : report_(r) {}

    CheckEntry& entry(const std::string& id, const std::string& text)
    {
        for (auto& e : report_.entries)
            if (e.id == id) return e;
        report_.entries.push_back(CheckEntry{id, text});
        return report_.entries.back();
    }

    // margin >= -tol passes; margins are log-ratios or relative slacks.
    template <class S>
    void record(const std::string& id, const std::string& text, int index,
                const S& margin, double tol = 0.0, bool strict = false)
    {
        CheckEntry& e = entry(id, text);
        double m = to_double(margin);
        bool ok = strict ? (margin > 0) : (m >= -tol);
        if (m != m) ok = false;
        e.vacuous = false;
        ++e.evaluated;
        if (!ok) e.pass = false;
        if (m < e.worst_margin || e.worst_index < 0) {
            e.worst_margin = m;
            e.worst_index = index;
        }
    }

private:
    CheckReport& report_;
};

template <class S>
S rel_residual(const S& lhs, const S& rhs)
{
    using std::abs;
    using std::max;
    S scale = max(S(1), max(abs(lhs), abs(rhs)));
    return abs(lhs - rhs) / scale;
}

} // namespace detail

inline constexpr double kRecursionTol = 1e-12;
inline constexpr double kEqualityTol = 1e-12;

// Finite-index form of the construction's assumptions A1-A22 (there is no
// A12 or A16). Limits are checked as monotone approach over the generated
// indices; A22 is checked through
// x_i = eps_i log b_i and y_i = eps_i^2 log b_{i+1} (must decrease to 0) and
// z_i = eps_i log b_{i+1} (must grow without bound).
template <class S>
CheckReport check_assumptions(const ConstructionParams<S>& p, int count)
{
    using std::exp;
    using std::log;
    CheckReport report;
    detail::Recorder rec(report);
    const char* names[][2] = {
        {"A1", "exponent window and beta monotonicity"},
        {"A2", "omega strictly decreasing below (eta2-eta1)/100"},
        {"A3", "beta matching at odd and even joints"},
        {"A4", "alpha monotonicity and limits"},
        {"A5", "b increasing, eps decreasing"},
        {"A6", "alpha matching at odd and even joints"},
        {"A7", "b_0^eta1 >= 7"},
        {"A8", "alpha_0 b_0^eta1 > (b_1/b_0)^eps_0"},
        {"A9", "eps_2i < (1/alpha_2i - 1)/2"},
        {"A10", "eps_0 < eta1(1-eta1) b_0^-eta1 b_1^-omega_0 / 4"},
        {"A11", "b_2i^eta1 > alpha_{2i-1}^-1 (1+eps_2i)/(1-eps_{2i-1})"},
        {"A13", "cap matching, C2 = C1/3"},
        {"A14", "b_{2k+1}^{1-(eta1+eta2)/2} <= b_{2k+2}^{1-eta2}"},
        {"A15", "delta < 1 and tau < 1"},
        {"A17", "eps_2i < omega_2i"},
        {"A18", "offset budget below eta1^3, b_1^{2 eta1} lower bound"},
        {"A19", "eps_0 <= eta1(1-eta1)(1 - 3b_0/b_1 - 4 delta)/10"},
        {"A20", "b_1^eta1 >= 100/(1 - 4 delta)"},
        {"A21", "3 b_0/b_1 + 4 delta <= eta1"},
        {"A22", "b_i^eps_i -> 1, b_{i+1}^{eps_i^2} -> 1, b_{i+1}^eps_i -> inf"},
    };
    for (auto& n : names) rec.entry(n[0], n[1]);
    if (count <= 0) return report;

    const int n = std::min(count, p.n_bands);
    const S& e1 = p.eta1;
    const S& e2 = p.eta2;
    const S d = e2 - e1;
    auto L = [&](int i) -> const S& { return p.log_b[i]; };
    auto lr = [](const S& a, const S& b) { using std::log; return S(log(b / a)); };

    // A1
    {
        S ratio = (1 - e2) / (1 - e1);
        rec.record("A1", "", 0, S((ratio - S(99) / 100) / ratio), kEqualityTol);
        rec.record("A1", "", 0, S(1 - p.eps0 - ratio), 0.0, true);
        rec.record("A1", "", 0, S(1 - e2), 0.0, true);
        rec.record("A1", "", 0, d, 0.0, true);
        rec.record("A1", "", 0, S(e1 - (1 + p.eps0) / 2), 0.0, true);
        if (n >= 1) rec.record("A1", "", 0, S(p.log_beta[0] - log(S(99) / 100)), kEqualityTol);
        if (n >= 2) rec.record("A1", "", 1, S(log(S(1) / 100) - p.log_beta[1]), kEqualityTol);
        for (int i = 0; i + 2 < n; ++i)
            rec.record("A1", "", i, S(i % 2 == 0 ? p.log_beta[i + 2] - p.log_beta[i]
                                                : p.log_beta[i] - p.log_beta[i + 2]),
                       0.0, true);
        for (int i = 0; i < n; i += 2) rec.record("A1", "", i, S(-p.log_beta[i]), 0.0, true);
    }
    // A2
    rec.record("A2", "", 0, lr(p.omega[0], d / 100), 0.0, true);
    for (int i = 0; i < n; ++i) {
        rec.record("A2", "", i, p.omega[i], 0.0, true);
        if (i + 1 < n) rec.record("A2", "", i, lr(p.omega[i + 1], p.omega[i]), 0.0, true);
    }
    // A3: beta matching in log form
    for (int k = 1; k < n; ++k) {
        S lhs, rhs;
        if (k % 2 == 1) {
            lhs = log((1 - e1) / (1 - e2)) + p.log_beta[k - 1] - p.log_beta[k];
            rhs = p.omega[k] * L(k + 1) - (d - p.omega[k - 1]) * L(k);
        } else {
            lhs = log((1 - e2) / (1 - e1)) + p.log_beta[k - 1] - p.log_beta[k];
            rhs = (d - p.omega[k - 1]) * L(k) - p.omega[k] * L(k + 1);
        }
        rec.record("A3", "", k, S(kRecursionTol - detail::rel_residual(lhs, rhs)));
    }
    // A4
    {
        if (n >= 1) rec.record("A4", "", 0, S(p.log_alpha[0] - log(S(99) / 100)), kEqualityTol);
        if (n >= 2) rec.record("A4", "", 1, S(log(S(1) / 100) - p.log_alpha[1]), kEqualityTol);
        for (int i = 0; i + 2 < n; ++i)
            rec.record("A4", "", i, S(i % 2 == 0 ? p.log_alpha[i + 2] - p.log_alpha[i]
                                                 : p.log_alpha[i] - p.log_alpha[i + 2]),
                       0.0, true);
        for (int i = 0; i < n; i += 2) rec.record("A4", "", i, S(-p.log_alpha[i]), 0.0, true);
    }
    // A5
    rec.record("A5", "", 0, L(0), 0.0, true);
    for (int i = 0; i < n; ++i) rec.record("A5", "", i, S(L(i + 1) - L(i)), 0.0, true);
    rec.record("A5", "", 0, lr(p.eps[0], S(1)), 0.0, true);
    for (int i = 0; i < n; ++i) rec.record("A5", "", i, lr(p.eps[i + 1], p.eps[i]), 0.0, true);
    // A6: alpha matching in log form
    for (int k = 1; k < n; ++k) {
        S lhs, rhs;
        if (k % 2 == 1) {
            lhs = p.log_alpha[k - 1] - p.log_alpha[k];
            rhs = log((1 - p.eps[k]) / (1 + p.eps[k - 1])) + p.eps[k] * (L(k + 1) - L(k));
        } else {
            lhs = p.log_alpha[k] - p.log_alpha[k - 1];
            rhs = log((1 - p.eps[k - 1]) / (1 + p.eps[k])) + p.eps[k] * (L(k + 1) - L(k));
        }
        rec.record("A6", "", k, S(kRecursionTol - detail::rel_residual(lhs, rhs)));
    }
    // A7, A8, A10
    rec.record("A7", "", 0, S(e1 * L(0) - log(S(7))), kEqualityTol);
    rec.record("A8", "", 0, S(p.log_alpha[0] + e1 * L(0) - p.eps[0] * (L(1) - L(0))), 0.0, true);
    rec.record("A10", "", 0,
               S(log(e1 * (1 - e1) / 4) - e1 * L(0) - p.omega[0] * L(1) - log(p.eps[0])), 0.0,
               true);
    // A9, A17 (even indices)
    for (int i = 0; i < n; i += 2) {
        S gap = expm1_(S(-p.log_alpha[i])) / 2;
        rec.record("A9", "", i, lr(p.eps[i], gap), 0.0, true);
        rec.record("A17", "", i, lr(p.eps[i], p.omega[i]), 0.0, true);
    }
    // A11
    for (int k = 2; k <= n && k - 1 < n; k += 2) {
        S rhs = -p.log_alpha[k - 1] + log((1 + p.eps[k]) / (1 - p.eps[k - 1]));
        rec.record("A11", "", k, S(e1 * L(k) - rhs), 0.0, true);
    }
    // A13: alpha_0 (1+eps_0)(b_0/b_1)^eps_0 = 2/3 + beta_0 b_1^-omega_0 b_0^-eta1 (1-eta1)/3
    {
        S lhs = exp(p.log_alpha[0] - p.eps[0] * (L(1) - L(0))) * (1 + p.eps[0]);
        S rhs = S(2) / 3 + exp(p.log_beta[0] - p.omega[0] * L(1) - e1 * L(0)) * (1 - e1) / 3;
        rec.record("A13", "", 0, S(kEqualityTol - detail::rel_residual(lhs, rhs)));
    }
    // A14
    for (int k = 0; 2 * k + 2 <= n; ++k)
        rec.record("A14", "", 2 * k + 1,
                   S((1 - e2) * L(2 * k + 2) - (1 - (e1 + e2) / 2) * L(2 * k + 1)), 0.0);
    // A15
    rec.record("A15", "", 0, S(1 - p.delta_sum), 0.0, true);
    rec.record("A15", "", 0, S(1 - p.tau_sum), 0.0, true);
    // A18 - A21
    {
        S b0_b1 = exp(L(0) - L(1));
        S budget = S(2) * exp(L(0) - (1 - e1 - p.omega[0]) * L(1)) + d / (1 - e2) + p.tau_sum;
        S slack = 1 - 3 * b0_b1 - 4 * p.delta_sum;
        rec.record("A18", "", 0, lr(budget, S(e1 * e1 * e1)), 0.0, true);
        rec.record("A18", "", 0, S(2 * e1 * L(1) - log(S(2) + 20 / slack)), 0.0, true);
        rec.record("A19", "", 0, lr(p.eps[0], S(e1 * (1 - e1) * slack / 10)), kEqualityTol);
        rec.record("A20", "", 0, S(e1 * L(1) - log(S(100) / (1 - 4 * p.delta_sum))),
                   kEqualityTol);
        rec.record("A21", "", 0, S(e1 - 3 * b0_b1 - 4 * p.delta_sum), kEqualityTol);
    }
    // A22
    {
        auto x = [&](int i) { return S(p.eps[i] * L(i)); };
        auto y = [&](int i) { return S(p.eps[i] * p.eps[i] * L(i + 1)); };
        auto z = [&](int i) { return S(p.eps[i] * L(i + 1)); };
        for (int i = 0; i + 1 < n; ++i) {
            rec.record("A22", "", i, lr(x(i + 1), x(i)), 0.0, true);
            rec.record("A22", "", i, lr(y(i + 1), y(i)), 0.0, true);
        }
        for (int i = 0; i + 2 < n; ++i) rec.record("A22", "", i, lr(z(i), z(i + 2)), 0.0, true);
        if (n >= 1) {
            rec.record("A22", "", n - 1, S(-log(x(n - 1)) - log(S(1e6))), 0.0, true);
            rec.record("A22", "", n - 1, S(-log(y(n - 1)) - log(S(1e6))), 0.0, true);
            rec.record("A22", "", n - 1, S(log(z(n - 1)) - log(S(1e6))), 0.0, true);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// parameter generation

// enforce = false skips the assumption checks; used to build deliberately
// inadmissible profiles.
template <class S>
ConstructionParams<S> generate_params(const Schedule& sched, bool enforce = true)
{
    using std::exp;
    using std::log;
    using std::abs;
    if (sched.n_bands < 4) throw std::invalid_argument("schedule needs at least 4 bands");
    const int n = sched.n_bands;
    ConstructionParams<S> p;
    p.eta1 = from_decimal<S>(sched.eta1);
    p.eta2 = from_decimal<S>(sched.eta2);
    p.eps0 = from_decimal<S>(sched.eps0);
    p.n_bands = n;
    const S& e1 = p.eta1;
    const S& e2 = p.eta2;
    const S d = e2 - e1;

    if (enforce) {
        S ratio = (1 - e2) / (1 - e1);
        if (!(e2 > e1 && e2 < 1 && e1 > (1 + p.eps0) / 2 && ratio < 1 - p.eps0 &&
              (ratio - S(99) / 100) / ratio >= -kEqualityTol))
            throw InfeasibleSchedule(
                "A1", "infeasible schedule: A1 fails, need 1 > eta2 > eta1 > (1+eps0)/2 "
                      "and 99/100 <= (1-eta2)/(1-eta1) < 1-eps0");
    }
    const S om0 = from_decimal<S>(sched.omega0);
    if (enforce && !(om0 > 0 && om0 < d / 100))
        throw InfeasibleSchedule("A2", "infeasible schedule: A2 needs omega0 < (eta2-eta1)/100");

    p.eps.resize(n + 1);
    p.eps[0] = p.eps0;
    for (int i = 1; i <= n; ++i) p.eps[i] = p.eps[i - 1] * p.eps[i - 1];
    p.log_b.assign(n + 1, S(0));
    p.omega.assign(n, S(0));
    p.log_alpha.assign(n, S(0));
    p.log_beta.assign(n, S(0));

    const S kappa = from_decimal<S>(sched.kappa);
    const S gap = from_decimal<S>(sched.beta_even_gap);
    const S bodd = from_decimal<S>(sched.beta_odd);
    auto beta_target = [&](int k) {
        S scale = exp(-S(k / 2) * log(S(2)));
        return k % 2 == 0 ? S(log1p_(S(-gap * scale))) : S(log(bodd * scale));
    };
    auto alpha_target = [&](int k) { return S(-log1p_(S(3 * p.eps[k]))); };
    auto& L = p.log_b;

    L[0] = log(from_decimal<S>(sched.b0_power)) / e1;
    p.omega[0] = om0;
    p.log_alpha[0] = alpha_target(0);
    p.log_beta[0] = beta_target(0);

    // A13 fixes b_1 once alpha_0, beta_0, omega_0 are chosen:
    // log alpha_0 + log(1+eps_0) + eps_0 (L_0 - L_1) = log(2/3 + beta_0 b_1^-omega_0 b_0^-eta1 (1-eta1)/3)
    {
        S l1 = L[0] + 1 / p.eps0;
        S tol = exp(-S(scalar_digits10<S>() - 10) * log(S(10)));
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            // Newton on g(l) = L_0 + (log alpha_0 + log(1+eps_0) - rhs(l))/eps_0 - l
            S e = exp(p.log_beta[0] - om0 * l1 - e1 * L[0]) * (1 - e1) / 3;
            S rhs = log(S(2) / 3 + e);
            S g = L[0] + (p.log_alpha[0] + log1p_(p.eps0) - rhs) / p.eps0 - l1;
            S dg = om0 * e / (S(2) / 3 + e) / p.eps0 - 1;
            S next = l1 - g / dg;
            if (abs(next - l1) <= tol * abs(next)) {
                l1 = next;
                converged = true;
                break;
            }
            l1 = next;
        }
        if (!converged || !(l1 > L[0]))
            throw InfeasibleSchedule("A13", "infeasible schedule: no b_1 satisfies A13");
        L[1] = l1;
    }

    for (int k = 1; k < n; ++k) {
        if (k % 2 == 1) {
            L[k + 1] = kappa * exp(S(-1.5) * log(p.eps[k]));
            p.log_alpha[k] = p.log_alpha[k - 1] - log((1 - p.eps[k]) / (1 + p.eps[k - 1])) -
                             p.eps[k] * (L[k + 1] - L[k]);
            p.log_beta[k] = beta_target(k);
            p.omega[k] = (log((1 - e1) / (1 - e2)) + p.log_beta[k - 1] - p.log_beta[k] +
                          (d - p.omega[k - 1]) * L[k]) /
                         L[k + 1];
        } else {
            p.log_alpha[k] = alpha_target(k);
            L[k + 1] = L[k] + (p.log_alpha[k] - p.log_alpha[k - 1] -
                               log((1 - p.eps[k - 1]) / (1 + p.eps[k]))) /
                                  p.eps[k];
            p.log_beta[k] = beta_target(k);
            p.omega[k] = ((d - p.omega[k - 1]) * L[k] - log((1 - e2) / (1 - e1)) -
                          p.log_beta[k - 1] + p.log_beta[k]) /
                         L[k + 1];
        }
        if (!(L[k + 1] > L[k]))
            throw InfeasibleSchedule("A5", "infeasible schedule: radii stop increasing at index " +
                                               std::to_string(k + 1));
    }

    // Recursions subtract numbers of size log b_n; keep 40 digits beyond that.
    {
        using std::log10;
        double need = to_double(S(log10(L[n]))) + 40.0;
        if (!(need <= scalar_digits10<S>()))
            throw PrecisionError("scalar type has " + std::to_string(scalar_digits10<S>()) +
                                 " digits, " + std::to_string(n) + " bands need " +
                                 std::to_string(static_cast<int>(std::ceil(need))));
    }

    p.delta_sum = 0;
    for (int i = 0; i <= n; ++i) p.delta_sum += p.eps[i];
    p.tau_sum = 0;
    for (int i = 1; i <= n; ++i) p.tau_sum += exp(-d / 2 * L[i]);

    if (!enforce) return p;
    CheckReport rep = check_assumptions(p, n);
    if (const CheckEntry* bad = rep.first_failure())
        throw InfeasibleSchedule(bad->id, "infeasible schedule: " + bad->id + " fails at index " +
                                              std::to_string(bad->worst_index) + " (" + bad->text +
                                              ")");
    return p;
}

// ---------------------------------------------------------------------------
// evaluation

enum class Which { f, h };

// Value and scaled derivatives at r: log f, p = r f'/f, q = r^2 f''/f.
template <class S>
struct Jet {
    S log_value = 0;
    S p = 0;
    S q = 0;

    S value() const { using std::exp; return exp(log_value); }
    S d1(const S& log_r) const { using std::exp; return p * exp(log_value - log_r); }
    S d2(const S& log_r) const { using std::exp; return q * exp(log_value - 2 * log_r); }
};

// c r^e + offset on (exp(log_lo), exp(log_hi)].
template <class S>
struct PowerBand {
    S log_lo = 0, log_hi = 0;
    S log_coef = 0, exponent = 0;
    SignedLog<S> offset;

    Jet<S> eval(const S& log_r) const
    {
        using std::exp;
        using std::log;
        S lead = log_coef + exponent * log_r;
        S rho = offset.sign == 0 ? S(0) : S(offset.sign * exp(offset.log_abs - lead));
        S one_rho = 1 + rho;
        Jet<S> j;
        j.log_value = lead + log1p_(rho);
        j.p = exponent / one_rho;
        j.q = exponent * (exponent - 1) / one_rho;
        return j;
    }
};

namespace detail {

template <class S>
int band_of(const std::vector<S>& log_b, const S& log_r)
{
    // (b_k, b_{k+1}] half-open on the left
    auto it = std::lower_bound(log_b.begin(), log_b.end(), log_r);
    return static_cast<int>(it - log_b.begin()) - 1;
}

template <class S>
PowerBand<S> bar_band(const ConstructionParams<S>& p, Which w, int k)
{
    PowerBand<S> b;
    b.log_lo = p.log_b[k];
    b.log_hi = p.log_b[k + 1];
    const bool even = k % 2 == 0;
    if (w == Which::f) {
        if (even) {
            b.log_coef = p.log_beta[k] - p.omega[k] * p.log_b[k + 1];
            b.exponent = 1 - p.eta1;
        } else {
            b.log_coef = p.log_beta[k] + p.omega[k] * p.log_b[k + 1];
            b.exponent = 1 - p.eta2;
        }
    } else {
        if (even) {
            b.log_coef = p.log_alpha[k] - p.eps[k] * p.log_b[k + 1];
            b.exponent = 1 + p.eps[k];
        } else {
            b.log_coef = p.log_alpha[k] + p.eps[k] * p.log_b[k + 1];
            b.exponent = 1 - p.eps[k];
        }
    }
    return b;
}

} // namespace detail

// f-bar or h-bar on (b_0, b_n].
template <class S>
Jet<S> eval_bar(const ConstructionParams<S>& p, Which w, const S& log_r)
{
    if (!(log_r > p.log_b.front()) || log_r > p.log_b.back())
        throw OutOfRange("eval_bar: log_r outside (log b_0, log b_n]");
    int k = detail::band_of(p.log_b, log_r);
    return detail::bar_band(p, w, k).eval(log_r);
}

template <class S>
struct JumpOffsets {
    std::vector<SignedLog<S>> tau, delta, zeta, xi;
};

template <class S>
JumpOffsets<S> jump_offsets(const ConstructionParams<S>& p)
{
    using std::exp;
    using std::log;
    const int n = p.n_bands;
    const S d = p.eta2 - p.eta1;
    const S ld = log(d / (1 - p.eta1));
    auto L = [&](int i) -> const S& { return p.log_b[i]; };
    JumpOffsets<S> j;
    j.tau.resize(n);
    j.delta.resize(n);
    {
        S b0 = exp(L(0));
        S X = exp(p.log_beta[0] - p.omega[0] * L(1) - p.eta1 * L(0));
        S Y = exp(p.log_alpha[0] - p.eps[0] * (L(1) - L(0)));
        j.tau[0] = SignedLog<S>::from_value(S(b0 / 4 * (3 - (3 + p.eta1) * X)));
        j.delta[0] = SignedLog<S>::from_value(S(b0 / 4 * (3 - (3 - p.eps[0]) * Y)));
    }
    for (int l = 1; l < n; ++l) {
        if (l % 2 == 1) {
            j.tau[l] = SignedLog<S>::from_log(
                -1, ld + p.log_beta[l] + p.omega[l] * L(l + 1) + (1 - p.eta2) * L(l));
            j.delta[l] = SignedLog<S>::from_log(
                -1, p.log_alpha[l - 1] + L(l) + log((p.eps[l] + p.eps[l - 1]) / (1 - p.eps[l])));
        } else {
            j.tau[l] = SignedLog<S>::from_log(
                1, ld + p.log_beta[l - 1] + (1 - p.eta2 + p.omega[l - 1]) * L(l));
            j.delta[l] = SignedLog<S>::from_log(
                1, p.log_alpha[l - 1] + L(l) + log((p.eps[l] + p.eps[l - 1]) / (1 + p.eps[l])));
        }
    }
    j.zeta.resize(n);
    j.xi.resize(n);
    for (int k = 0; k < n; ++k) {
        j.zeta[k] = k == 0 ? j.tau[0] : j.zeta[k - 1] + j.tau[k];
        j.xi[k] = k == 0 ? j.delta[0] : j.xi[k - 1] + j.delta[k];
    }
    return j;
}

// f~, h~ on [0, b_0]: r up to b_0/2, then r - C (r - b_0/2)^2.
template <class S>
struct InnerCap {
    S b0 = 0, c1 = 0, c2 = 0;

    Jet<S> eval(Which w, const S& log_r) const
    {
        using std::exp;
        using std::log;
        S r = exp(log_r);
        const S& c = w == Which::f ? c1 : c2;
        Jet<S> j;
        if (r <= b0 / 2) {
            j.log_value = log_r;
            j.p = 1;
            j.q = 0;
            return j;
        }
        S x = r - b0 / 2;
        S v = r - c * x * x;
        j.log_value = log(v);
        j.p = r * (1 - 2 * c * x) / v;
        j.q = r * r * (-2 * c) / v;
        return j;
    }
};

template <class S>
InnerCap<S> inner_cap(const ConstructionParams<S>& p)
{
    using std::exp;
    InnerCap<S> cap;
    cap.b0 = exp(p.log_b[0]);
    S X = exp(p.log_beta[0] - p.omega[0] * p.log_b[1] - p.eta1 * p.log_b[0]);
    S Y = exp(p.log_alpha[0] - p.eps[0] * (p.log_b[1] - p.log_b[0]));
    cap.c1 = (1 - X * (1 - p.eta1)) / cap.b0;
    cap.c2 = (1 - Y * (1 + p.eps[0])) / cap.b0;
    if (!(cap.c1 > 0) || !(cap.c2 > 0))
        throw NonpositiveConstant("inner cap: C1 and C2 must be positive");
    return cap;
}

// Linear-f'' window on [r_L, r_R] = [b(1-theta), b(1+theta)]. Edge jets are
// the one-sided values of the unsmoothed profile.
template <class S>
struct SmoothingWindow {
    S log_center = 0, log_lo = 0, log_hi = 0;
    Jet<S> f_left, f_right, h_left, h_right;
    // cached: U = r_R/r_L, and r_L^2 f''_R / f_L for f and h
    S U = 1, qb_f = 0, qb_h = 0;

    void prepare()
    {
        using std::exp;
        U = exp(log_hi - log_lo);
        qb_f = f_right.q * exp(f_right.log_value - f_left.log_value) / (U * U);
        qb_h = h_right.q * exp(h_right.log_value - h_left.log_value) / (U * U);
    }

    Jet<S> eval(Which w, const S& log_r) const
    {
        using std::exp;
        using std::log;
        const Jet<S>& a = w == Which::f ? f_left : h_left;
        S u = exp(log_r - log_lo);
        S wl = U - 1;  // window width / r_L
        S x = (u - 1) / wl;
        S dq = (w == Which::f ? qb_f : qb_h) - a.q;
        S val = 1 + wl * a.p * x + wl * wl * (a.q * x * x / 2 + dq * x * x * x / 6);
        S d1 = a.p + wl * (a.q * x + dq * x * x / 2);
        S d2 = a.q + dq * x;
        Jet<S> j;
        j.log_value = a.log_value + log(val);
        j.p = u * d1 / val;
        j.q = u * u * d2 / val;
        return j;
    }

    // (f_smoothed - f)/f_L at the right edge, and the bound (W/2)^2 |f''_R - f''_L| / f_L.
    std::pair<S, S> drift(Which w) const
    {
        using std::exp;
        using std::abs;
        const Jet<S>& a = w == Which::f ? f_left : h_left;
        const Jet<S>& b = w == Which::f ? f_right : h_right;
        S wl = U - 1;
        S dq = (w == Which::f ? qb_f : qb_h) - a.q;
        S val = 1 + wl * a.p + wl * wl * (a.q / 2 + dq / 6);
        S drift = val - exp(b.log_value - a.log_value);
        S bound = wl * wl / 4 * abs(dq);
        return {drift, bound};
    }
};

template <class S>
struct WarpProfile {
    InnerCap<S> cap;
    std::vector<PowerBand<S>> f_bands, h_bands;
    std::vector<SmoothingWindow<S>> windows;  // sorted, disjoint

    S log_r_max() const { return f_bands.back().log_hi; }
    S log_b0() const { return f_bands.front().log_lo; }

    // -1 for the cap [0, b_0], otherwise the band index.
    int band_index(const S& log_r) const
    {
        if (log_r <= log_b0()) return -1;
        auto it = std::lower_bound(f_bands.begin(), f_bands.end(), log_r,
                                   [](const PowerBand<S>& b, const S& v) { return b.log_hi < v; });
        return static_cast<int>(it - f_bands.begin());
    }

    // Unsmoothed C^1 profile.
    Jet<S> eval_c1(Which w, const S& log_r) const
    {
        int k = band_index(log_r);
        if (k < 0) return cap.eval(w, log_r);
        if (k >= static_cast<int>(f_bands.size()))
            throw OutOfRange("profile: log_r beyond the last band");
        return (w == Which::f ? f_bands : h_bands)[k].eval(log_r);
    }

    const SmoothingWindow<S>* window_at(const S& log_r) const
    {
        auto it = std::upper_bound(
            windows.begin(), windows.end(), log_r,
            [](const S& v, const SmoothingWindow<S>& win) { return v < win.log_lo; });
        if (it == windows.begin()) return nullptr;
        --it;
        return log_r <= it->log_hi ? &*it : nullptr;
    }

    Jet<S> eval(Which w, const S& log_r) const
    {
        if (log_r > log_r_max()) throw OutOfRange("profile: log_r beyond the last band");
        if (const SmoothingWindow<S>* win = window_at(log_r)) return win->eval(w, log_r);
        return eval_c1(w, log_r);
    }
    Jet<S> f(const S& log_r) const { return eval(Which::f, log_r); }
    Jet<S> h(const S& log_r) const { return eval(Which::h, log_r); }
};

template <class S>
WarpProfile<S> assemble_c1(const ConstructionParams<S>& p)
{
    WarpProfile<S> prof;
    prof.cap = inner_cap(p);
    JumpOffsets<S> j = jump_offsets(p);
    for (int k = 0; k < p.n_bands; ++k) {
        PowerBand<S> fb = detail::bar_band(p, Which::f, k);
        PowerBand<S> hb = detail::bar_band(p, Which::h, k);
        fb.offset = j.zeta[k];
        hb.offset = j.xi[k];
        prof.f_bands.push_back(fb);
        prof.h_bands.push_back(hb);
    }
    return prof;
}

struct WindowSpec {
    double log_center;   // natural log of the joint radius
    double half_width;   // relative half-width theta, window [b(1-theta), b(1+theta)]
};

// Joints b_0/2, b_0, b_1, ..., b_{n-1} with theta_i = min(1e-3, 2^-i).
template <class S>
std::vector<std::pair<S, double>> default_windows(const WarpProfile<S>& prof)
{
    using std::log;
    std::vector<std::pair<S, double>> out;
    out.emplace_back(S(log(prof.cap.b0 / 2)), 1e-3);
    for (std::size_t i = 0; i < prof.f_bands.size(); ++i)
        out.emplace_back(prof.f_bands[i].log_lo, std::min(1e-3, std::ldexp(1.0, -static_cast<int>(i))));
    return out;
}

class OverlappingWindows : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <class S>
WarpProfile<S> smooth_c2(const WarpProfile<S>& in, const std::vector<std::pair<S, double>>& spec)
{
    using std::log;
    WarpProfile<S> out = in;
    out.windows.clear();
    // joints of the unsmoothed profile, used for the "inside two pieces" rule
    std::vector<S> joints;
    joints.push_back(S(log(in.cap.b0 / 2)));
    for (const auto& b : in.f_bands) joints.push_back(b.log_lo);
    joints.push_back(in.log_r_max());

    for (const auto& [center, theta] : spec) {
        if (theta <= 0) continue;
        if (theta >= 0.5) throw OverlappingWindows("window half-width must be below 1/2");
        SmoothingWindow<S> w;
        w.log_center = center;
        w.log_lo = center + log1p_(S(-theta));
        w.log_hi = center + log1p_(S(theta));
        auto it = std::find(joints.begin(), joints.end(), center);
        if (it == joints.end() || it + 1 == joints.end())
            throw OverlappingWindows("window centre is not an interior joint");
        S prev = it == joints.begin() ? S(-std::numeric_limits<double>::infinity()) : *(it - 1);
        if (!(w.log_lo > prev) || !(w.log_hi < *(it + 1)))
            throw OverlappingWindows("window leaves its two adjacent pieces");
        w.f_left = in.eval_c1(Which::f, w.log_lo);
        w.f_right = in.eval_c1(Which::f, w.log_hi);
        w.h_left = in.eval_c1(Which::h, w.log_lo);
        w.h_right = in.eval_c1(Which::h, w.log_hi);
        w.prepare();
        out.windows.push_back(w);
    }
    std::sort(out.windows.begin(), out.windows.end(),
              [](const SmoothingWindow<S>& a, const SmoothingWindow<S>& b) {
                  return a.log_lo < b.log_lo;
              });
    for (std::size_t i = 1; i < out.windows.size(); ++i)
        if (!(out.windows[i].log_lo > out.windows[i - 1].log_hi))
            throw OverlappingWindows("smoothing windows overlap");
    return out;
}

template <class S>
WarpProfile<S> smooth_c2(const WarpProfile<S>& in)
{
    return smooth_c2(in, default_windows(in));
}

// ---------------------------------------------------------------------------
// claims

namespace detail {

// log of inf over band k of f-bar (resp. h-bar): the left end, both are increasing.
template <class S>
S log_min_bar(const ConstructionParams<S>& p, Which w, int k)
{
    return bar_band(p, w, k).eval(p.log_b[k]).log_value;
}

} // namespace detail

// Jump-size claims (tau 1.1-1.3, delta 1.1-1.2) and the resulting offset
// bounds, all as log-margins log(rhs) - log(lhs).
template <class S>
CheckReport verify_claims(const ConstructionParams<S>& p)
{
    using std::exp;
    using std::log;
    CheckReport report;
    detail::Recorder rec(report);
    rec.entry("tau 1.1", "|tau_0| <= 2 b_0 b_1^{eta1+omega0-1} min f-bar on band j >= 1");
    rec.entry("tau 1.2", "|tau_i| <= (eta2-eta1)/(1-eta2) min f-bar on band i");
    rec.entry("tau 1.3", "|tau_i| <= b_i^{-(eta2-eta1)/2} min f-bar on band j > i");
    rec.entry("delta 1.1", "|delta_0| <= 3 (b_0/b_1) min h-bar on band j >= 1");
    rec.entry("delta 1.2", "|delta_i| <= 4 eps_{i-1} min h-bar on band j >= i");
    rec.entry("zeta bound", "|zeta_k| <= (2 b_0 b_1^{eta1+omega0-1} + (eta2-eta1)/(1-eta2) + tau) min f-bar");
    rec.entry("xi bound", "|xi_k| <= (3 b_0/b_1 + 4 delta) min h-bar");
    const int n = p.n_bands;
    if (n < 3) return report;
    JumpOffsets<S> j = jump_offsets(p);
    const S d = p.eta2 - p.eta1;
    const S L0 = p.log_b[0], L1 = p.log_b[1];
    std::vector<S> mf(n), mh(n);
    for (int k = 0; k < n; ++k) {
        mf[k] = detail::log_min_bar(p, Which::f, k);
        mh[k] = detail::log_min_bar(p, Which::h, k);
    }
    const S c11 = log(S(2)) + L0 - (1 - p.eta1 - p.omega[0]) * L1;
    for (int jj = 1; jj < n; ++jj) {
        rec.record("tau 1.1", "", jj, S(c11 + mf[jj] - j.tau[0].log_abs));
        rec.record("delta 1.1", "", jj, S(log(S(3)) + L0 - L1 + mh[jj] - j.delta[0].log_abs));
    }
    for (int i = 1; i < n; ++i) {
        rec.record("tau 1.2", "", i, S(log(d / (1 - p.eta2)) + mf[i] - j.tau[i].log_abs),
                   kEqualityTol);
        for (int jj = i + 1; jj < n; ++jj)
            rec.record("tau 1.3", "", i, S(-d / 2 * p.log_b[i] + mf[jj] - j.tau[i].log_abs),
                       kEqualityTol);
        for (int jj = i; jj < n; ++jj)
            rec.record("delta 1.2", "", i,
                       S(log(4 * p.eps[i - 1]) + mh[jj] - j.delta[i].log_abs), kEqualityTol);
    }
    const S zb = log(S(exp(c11) + d / (1 - p.eta2) + p.tau_sum));
    const S xb = log(S(3 * exp(L0 - L1) + 4 * p.delta_sum));
    for (int k = 0; k < n; ++k) {
        if (j.zeta[k].sign != 0 && k > 0)
            rec.record("zeta bound", "", k, S(zb + mf[k] - j.zeta[k].log_abs), kEqualityTol);
        if (j.xi[k].sign != 0 && k > 0)
            rec.record("xi bound", "", k, S(xb + mh[k] - j.xi[k].log_abs), kEqualityTol);
    }
    return report;
}

// ---------------------------------------------------------------------------
// key = value serialization

template <class S>
std::string write_params(const ConstructionParams<S>& p)
{
    const int digits = std::max(17, scalar_digits10<S>() + 3);
    std::ostringstream out;
    auto put = [&](const std::string& k, const S& v) {
        out << k << " = " << to_string_sci(v, digits) << '\n';
    };
    out << "precision_digits = " << scalar_digits10<S>() << '\n';
    put("eta1", p.eta1);
    put("eta2", p.eta2);
    put("eps0", p.eps0);
    out << "n_bands = " << p.n_bands << '\n';
    for (int i = 0; i <= p.n_bands; ++i) put("log_b." + std::to_string(i), p.log_b[i]);
    for (int i = 0; i <= p.n_bands; ++i) put("eps." + std::to_string(i), p.eps[i]);
    for (int i = 0; i < p.n_bands; ++i) put("omega." + std::to_string(i), p.omega[i]);
    // alpha_3 = exp(-1e27) is below every floating exponent range
    for (int i = 0; i < p.n_bands; ++i) put("log_alpha." + std::to_string(i), p.log_alpha[i]);
    for (int i = 0; i < p.n_bands; ++i) put("log_beta." + std::to_string(i), p.log_beta[i]);
    return out.str();
}

template <class S>
ConstructionParams<S> read_params(const std::string& text)
{
    using std::exp;
    using std::log;
    std::istringstream in(text);
    std::string line;
    ConstructionParams<S> p;
    std::vector<std::pair<std::string, std::string>> kv;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw std::invalid_argument("params: missing '=' in: " + line);
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    auto has = [&](const std::string& k) {
        for (auto& [a, b] : kv)
            if (a == k) return true;
        return false;
    };
    auto get_str = [&](const std::string& k) -> const std::string& {
        for (auto& [a, b] : kv)
            if (a == k) return b;
        throw std::invalid_argument("params: missing key " + k);
    };
    auto get = [&](const std::string& k) -> S {
        const std::string& v = get_str(k);
        try {
            if constexpr (std::is_floating_point_v<S>) return static_cast<S>(std::stod(v));
            else return S(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("params: bad number for " + k + ": " + v);
        }
    };
    // log_alpha.i / log_beta.i, or the plain values alpha.i / beta.i
    auto get_log = [&](const std::string& name, int i) -> S {
        using std::log;
        std::string k = "log_" + name + "." + std::to_string(i);
        if (has(k)) return get(k);
        return log(get(name + "." + std::to_string(i)));
    };
    p.n_bands = std::stoi(get_str("n_bands"));
    if (p.n_bands < 1) throw std::invalid_argument("params: n_bands must be positive");
    p.eta1 = get("eta1");
    p.eta2 = get("eta2");
    p.eps0 = get("eps0");
    const int n = p.n_bands;
    for (int i = 0; i <= n; ++i) p.log_b.push_back(get("log_b." + std::to_string(i)));
    for (int i = 0; i <= n; ++i) p.eps.push_back(get("eps." + std::to_string(i)));
    for (int i = 0; i < n; ++i) p.omega.push_back(get("omega." + std::to_string(i)));
    for (int i = 0; i < n; ++i) p.log_alpha.push_back(get_log("alpha", i));
    for (int i = 0; i < n; ++i) p.log_beta.push_back(get_log("beta", i));
    for (auto& [k, v] : kv) {
        bool known = k == "precision_digits" || k == "eta1" || k == "eta2" || k == "eps0" ||
                     k == "n_bands";
        for (const char* pre :
             {"log_b.", "eps.", "omega.", "alpha.", "beta.", "log_alpha.", "log_beta."})
            if (k.rfind(pre, 0) == 0) known = true;
        if (!known) throw std::invalid_argument("params: unknown key " + k);
    }
    const S d = p.eta2 - p.eta1;
    for (int i = 0; i <= n; ++i) p.delta_sum += p.eps[i];
    for (int i = 1; i <= n; ++i) p.tau_sum += exp(-d / 2 * p.log_b[i]);
    return p;
}

} // namespace warpheat
