#pragma once

// Scalar plumbing shared by the log-domain modules. The construction's radii
// are doubly exponential, so radii and coefficients live as natural logs and
// signed quantities as (sign, log|x|) pairs. Scalars are either double or an
// MPFR-backed boost::multiprecision type.

#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/log1p.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace warpheat {

template <unsigned Digits>
using Precise = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<Digits>,
    boost::multiprecision::et_off>;

// Tiers used by the command line front end: up to 4, 5, 8 and 10 bands.
using Precise130 = Precise<130>;
using Precise200 = Precise<200>;
using Precise1500 = Precise<1500>;
using Precise6000 = Precise<6000>;

template <class S>
constexpr int scalar_digits10()
{
    return std::numeric_limits<S>::digits10;
}

class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class S>
S log1p_(const S& x)
{
    return boost::math::log1p(x);
}

template <class S>
S expm1_(const S& x)
{
    return boost::math::expm1(x);
}

template <class S>
double to_double(const S& x)
{
    return static_cast<double>(x);
}

// log(e^a + e^b)
template <class S>
S log_add(const S& a, const S& b)
{
    using std::exp;
    if (a < b) return log_add(b, a);
    return a + log1p_(S(exp(b - a)));
}

// log(e^a - e^b), requires a > b
template <class S>
S log_sub(const S& a, const S& b)
{
    using std::exp;
    if (!(a > b)) throw std::domain_error("log_sub: non-positive difference");
    return a + log1p_(S(-exp(b - a)));
}

template <class S>
struct SignedLog {
    int sign = 0;
    S log_abs = 0;

    static SignedLog from_value(const S& x)
    {
        using std::abs;
        using std::log;
        SignedLog r;
        if (x > 0) r.sign = 1;
        else if (x < 0) r.sign = -1;
        if (r.sign != 0) r.log_abs = log(abs(x));
        return r;
    }

    static SignedLog from_log(int sign, const S& log_abs)
    {
        SignedLog r;
        r.sign = sign;
        r.log_abs = sign == 0 ? S(0) : log_abs;
        return r;
    }

    S value() const
    {
        using std::exp;
        if (sign == 0) return S(0);
        return sign > 0 ? S(exp(log_abs)) : S(-exp(log_abs));
    }

    // Saturates to +-inf or 0 outside the double range.
    double to_double() const
    {
        if (sign == 0) return 0.0;
        double la = warpheat::to_double(log_abs);
        if (la > 709.0) return sign * std::numeric_limits<double>::infinity();
        if (la < -745.0) return 0.0;
        return sign * std::exp(la);
    }

    SignedLog operator-() const
    {
        SignedLog r = *this;
        r.sign = -r.sign;
        return r;
    }

    SignedLog& operator*=(const SignedLog& o)
    {
        sign *= o.sign;
        log_abs = sign == 0 ? S(0) : S(log_abs + o.log_abs);
        return *this;
    }
};

template <class S>
SignedLog<S> operator*(SignedLog<S> a, const SignedLog<S>& b)
{
    a *= b;
    return a;
}

template <class S>
SignedLog<S> operator+(const SignedLog<S>& a, const SignedLog<S>& b)
{
    using std::exp;
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const SignedLog<S>& big = a.log_abs >= b.log_abs ? a : b;
    const SignedLog<S>& small = a.log_abs >= b.log_abs ? b : a;
    S ratio = exp(small.log_abs - big.log_abs);
    if (big.sign == small.sign)
        return SignedLog<S>::from_log(big.sign, big.log_abs + log1p_(ratio));
    if (ratio == 1) return SignedLog<S>{};
    return SignedLog<S>::from_log(big.sign, big.log_abs + log1p_(S(-ratio)));
}

template <class S>
SignedLog<S> operator-(const SignedLog<S>& a, const SignedLog<S>& b)
{
    return a + (-b);
}

template <class S>
bool operator<(const SignedLog<S>& a, const SignedLog<S>& b)
{
    if (a.sign != b.sign) return a.sign < b.sign;
    if (a.sign == 0) return false;
    return a.sign > 0 ? a.log_abs < b.log_abs : a.log_abs > b.log_abs;
}

// Sum of sign_k * exp(l_k) without leaving the log domain.
template <class S, class Range>
SignedLog<S> signed_log_sum(const Range& terms)
{
    using std::exp;
    using std::log;
    bool any = false;
    S top = 0;
    for (const SignedLog<S>& t : terms) {
        if (t.sign == 0) continue;
        if (!any || t.log_abs > top) top = t.log_abs;
        any = true;
    }
    if (!any) return {};
    S acc = 0;
    for (const SignedLog<S>& t : terms)
        if (t.sign != 0) acc += t.sign * exp(t.log_abs - top);
    return SignedLog<S>::from_value(acc) * SignedLog<S>::from_log(1, top);
}

template <class S>
std::string to_string_sci(const S& x, int digits)
{
    if constexpr (std::is_floating_point_v<S>) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*e", digits - 1, static_cast<double>(x));
        return buf;
    } else {
        return x.str(digits - 1, std::ios_base::scientific);
    }
}

} // namespace warpheat
