#pragma once

// Blow-down analysis of radial volume profiles: rescaled profiles
// V(sqrt(t) r)/V(sqrt(t)), fitted growth exponents along sequences of scales,
// the drift consistency criterion for two limit profiles, and the
// normalized-diagonal oscillation demo on the surrogate space.
//
// The doubly warped profile is evaluated through log V in the wide scalar:
// on a power band f^3 h^4 is a sum of 20 powers of r, integrated exactly;
// the inner cap and the smoothing windows are polynomials in r, integrated by
// 12-point Gauss-Legendre (exact up to degree 23).

#include "warpheat/numeric.hpp"
#include "warpheat/radial_heat.hpp"
#include "warpheat/radial_space.hpp"
#include "warpheat/warp_metric.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace warpheat {

class DegenerateProfile : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// log V as a function of log r
template <class S>
using LogVolume = std::function<S(const S&)>;

enum class SequenceSource { construction, user };

template <class S>
struct BlowdownSequence {
    std::string label;
    std::vector<S> log_t;   // strictly increasing
    SequenceSource source = SequenceSource::user;
    bool unbounded = true;  // the intended sequence tends to infinity
};

template <class S>
void validate(const BlowdownSequence<S>& seq)
{
    if (seq.log_t.empty()) throw std::invalid_argument("blowdown sequence: empty");
    for (std::size_t i = 1; i < seq.log_t.size(); ++i)
        if (!(seq.log_t[i] > seq.log_t[i - 1]))
            throw std::invalid_argument("blowdown sequence: log_t must increase strictly");
}

// 33 log-uniform samples in [0.25, 4]
inline std::vector<double> default_samples(int count = 33, double lo = 0.25, double hi = 4)
{
    if (count < 2 || !(lo > 0) || !(hi > lo)) throw std::invalid_argument("samples: bad range");
    std::vector<double> s(count);
    for (int k = 0; k < count; ++k)
        s[k] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (count - 1));
    return s;
}

// log of V(sqrt(t) r) / V(sqrt(t))
template <class S>
S log_rescaled_profile(const LogVolume<S>& log_v, const S& log_t, const S& log_r)
{
    const S half = log_t / 2;
    return log_v(half + log_r) - log_v(half);
}

template <class S>
double rescaled_profile(const LogVolume<S>& log_v, const S& log_t, double r)
{
    if (!(r > 0)) throw std::domain_error("rescaled_profile: r must be positive");
    using std::log;
    return std::exp(to_double(log_rescaled_profile(log_v, log_t, S(log(S(r))))));
}

struct ExponentFit {
    double log_t = 0;          // saturates to inf beyond the double range
    std::string log_t_text;    // exact value, 17 significant digits
    double exponent = 0;   // least-squares slope of log V ratio against log r
    double residual = 0;   // rms deviation from the fitted line
};

template <class S>
std::vector<ExponentFit> limit_exponent(const LogVolume<S>& log_v, const BlowdownSequence<S>& seq,
                                        const std::vector<double>& samples)
{
    using std::log;
    validate(seq);
    for (double r : samples)
        if (!(r >= 0.25 && r <= 4)) throw std::invalid_argument("limit_exponent: samples must lie in [0.25, 4]");
    if (samples.size() < 2) throw std::invalid_argument("limit_exponent: need two samples");
    const std::size_t m = samples.size();
    std::vector<double> x(m);
    double xbar = 0;
    for (std::size_t k = 0; k < m; ++k) xbar += x[k] = std::log(samples[k]);
    xbar /= m;
    std::vector<ExponentFit> out;
    for (const S& lt : seq.log_t) {
        const S half = lt / 2;
        const S base = log_v(half);
        std::vector<double> y(m);
        double ybar = 0;
        for (std::size_t k = 0; k < m; ++k)
            ybar += y[k] = to_double(S(log_v(S(half + log(S(samples[k])))) - base));
        ybar /= m;
        double sxy = 0, sxx = 0;
        for (std::size_t k = 0; k < m; ++k) {
            sxy += (x[k] - xbar) * (y[k] - ybar);
            sxx += (x[k] - xbar) * (x[k] - xbar);
        }
        ExponentFit f;
        f.log_t = to_double(lt);
        f.log_t_text = to_string_sci(lt, 17);
        f.exponent = sxy / sxx;
        double ss = 0;
        for (std::size_t k = 0; k < m; ++k) {
            double e = y[k] - ybar - f.exponent * (x[k] - xbar);
            ss += e * e;
        }
        f.residual = std::sqrt(ss / m);
        out.push_back(f);
    }
    return out;
}

// V(r) / r^n
template <class S>
double volume_ratio(const LogVolume<S>& log_v, double n, double r)
{
    using std::log;
    if (!(r > 0)) throw std::domain_error("volume_ratio: r must be positive");
    S lr = log(S(r));
    return std::exp(to_double(S(log_v(lr) - n * lr)));
}

template <class T>
LogVolume<T> log_volume_of(const RadialSpace<T>& space)
{
    return [space](const T& log_r) {
        using std::exp;
        return space.log_V(T(exp(log_r)));
    };
}

// log t_i = 2 (1 - eps_{2i}) log b_{2i+1}, log t~_i = 2 (1 - eps_{2i+1}) log b_{2i+2},
// for every i the parameter set covers.
template <class S>
std::pair<BlowdownSequence<S>, BlowdownSequence<S>> example_sequences(const ConstructionParams<S>& p)
{
    BlowdownSequence<S> a, b;
    a.label = "t";
    b.label = "t_tilde";
    a.source = b.source = SequenceSource::construction;
    for (int i = 0; 2 * i + 1 <= p.n_bands; ++i)
        a.log_t.push_back(2 * (1 - p.eps[2 * i]) * p.log_b[2 * i + 1]);
    for (int i = 0; 2 * i + 2 <= p.n_bands; ++i)
        b.log_t.push_back(2 * (1 - p.eps[2 * i + 1]) * p.log_b[2 * i + 2]);
    return {a, b};
}

// log V of the smoothed doubly warped profile on R^8, V(r) = vol(S^7) int_0^r f^3 h^4.
template <class S>
class WarpVolume {
public:
    explicit WarpVolume(const WarpProfile<S>& prof) : prof_(prof)
    {
        using std::log;
        log_vol_s7_ = log(S(boost::math::constants::pi<S>())) * 4 - log(S(3));
        knots_.push_back(prof_.log_b0() - log(S(2)));
        knots_.push_back(prof_.log_b0());
        for (const PowerBand<S>& b : prof_.f_bands) knots_.push_back(b.log_hi);
        for (const SmoothingWindow<S>& w : prof_.windows) {
            knots_.push_back(w.log_lo);
            knots_.push_back(w.log_hi);
        }
        std::sort(knots_.begin(), knots_.end());
        knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
        // everything below the first knot is the flat region f = h = r
        if (const SmoothingWindow<S>* w = prof_.window_at(knots_.front()))
            knots_.front() = std::min(knots_.front(), w->log_lo);
        cum_.push_back(SignedLog<S>::from_log(1, origin_piece(knots_.front())));
        for (std::size_t j = 0; j + 1 < knots_.size(); ++j)
            cum_.push_back(cum_.back() + piece(knots_[j], knots_[j + 1]));
    }

    S log_r_max() const { return knots_.back(); }

    S operator()(const S& log_r) const
    {
        if (log_r > knots_.back()) throw OutOfRange("volume: log_r beyond the last band");
        if (log_r <= knots_.front()) return origin_piece(log_r);
        auto it = std::lower_bound(knots_.begin(), knots_.end(), log_r);
        std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
        return (cum_[j] + piece(knots_[j], log_r)).log_abs;
    }

    LogVolume<S> evaluator() const
    {
        return [self = *this](const S& log_r) { return self(log_r); };
    }

private:
    WarpProfile<S> prof_;
    S log_vol_s7_;
    std::vector<S> knots_;
    std::vector<SignedLog<S>> cum_;  // log V at each knot

    // V on the flat region, vol(S^7) r^8 / 8
    S origin_piece(const S& log_r) const
    {
        using std::log;
        return log_vol_s7_ + 8 * log_r - log(S(8));
    }

    SignedLog<S> piece(const S& lo, const S& hi) const
    {
        const S mid = (lo + hi) / 2;
        if (prof_.window_at(mid) || prof_.band_index(mid) < 0) return gauss_piece(lo, hi);
        return band_piece(prof_.band_index(mid), lo, hi);
    }

    // int_lo^hi f^3 h^4 dr for polynomial f, h
    SignedLog<S> gauss_piece(const S& lo, const S& hi) const
    {
        using std::exp;
        using std::log;
        using Rule = boost::math::quadrature::gauss<double, 12>;
        // r = r_lo (1 + W (x + 1) / 2) with W = r_hi / r_lo - 1, kept in logs
        const S width = expm1_(S(hi - lo));
        std::vector<SignedLog<S>> terms;
        auto add = [&](double x, double w) {
            S lr = lo + log1p_(S(width * (x + 1) / 2));
            S dens = 3 * prof_.f(lr).log_value + 4 * prof_.h(lr).log_value;
            terms.push_back(SignedLog<S>::from_log(1, dens + log(S(w))));
        };
        const auto& xs = Rule::abscissa();
        const auto& ws = Rule::weights();
        for (std::size_t k = 0; k < xs.size(); ++k) {
            add(xs[k], ws[k]);
            if (xs[k] != 0) add(-xs[k], ws[k]);
        }
        return signed_log_sum<S>(terms) * SignedLog<S>::from_log(1, log_vol_s7_ + lo + log(S(width / 2)));
    }

    // (c_f r^e_f + o_f)^3 (c_h r^e_h + o_h)^4 expanded into 20 powers
    SignedLog<S> band_piece(int k, const S& lo, const S& hi) const
    {
        using std::log;
        const PowerBand<S>& fb = prof_.f_bands[k];
        const PowerBand<S>& hb = prof_.h_bands[k];
        static const int c3[4] = {1, 3, 3, 1};
        static const int c4[5] = {1, 4, 6, 4, 1};
        std::vector<SignedLog<S>> terms;
        for (int a = 0; a <= 3; ++a) {
            if (a > 0 && fb.offset.sign == 0) break;
            for (int b = 0; b <= 4; ++b) {
                if (b > 0 && hb.offset.sign == 0) break;
                int sign = (a % 2 && fb.offset.sign < 0 ? -1 : 1) * (b % 2 && hb.offset.sign < 0 ? -1 : 1);
                S coef = log(S(c3[a] * c4[b])) + (3 - a) * fb.log_coef + (4 - b) * hb.log_coef;
                if (a > 0) coef += a * fb.offset.log_abs;
                if (b > 0) coef += b * hb.offset.log_abs;
                S q = (3 - a) * fb.exponent + (4 - b) * hb.exponent + 1;
                // (hi^q - lo^q) / q
                S mag = q * hi + log(S(-expm1_(S(q * (lo - hi))))) - log(q);
                terms.push_back(SignedLog<S>::from_log(sign, coef + mag));
            }
        }
        return signed_log_sum<S>(terms) * SignedLog<S>::from_log(1, log_vol_s7_);
    }
};

// Limit profiles for the consistency criterion: value and first two derivatives.
struct LimitProfile {
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

// c r^alpha
LimitProfile power_law(double c, double alpha);

struct ConsistencyResult {
    bool consistent = false;
    double residual = 0;        // max |log h' - log h~' - mean|
    double drift_residual = 0;  // max |h''/h' - h~''/h~'|
};

// h''/h' = h~''/h~' at every sample, tested as h'/h~' constant within tolerance.
ConsistencyResult consistency_check(const LimitProfile& h, const LimitProfile& h_tilde,
                                    const std::vector<double>& samples, double tolerance = 1e-6);

// ---------------------------------------------------------------------------
// oscillation demo

struct DemoSequence {
    std::string label;
    std::vector<double> log_t;
};

// alpha_1 sequence at sqrt(t) = 10^{0, 3.5, 8.5}, alpha_2 sequence at 10^{1.75, 5.75}
std::pair<DemoSequence, DemoSequence> default_demo_sequences();

struct DemoConfig {
    SolverConfig solver;
    double error_probe_t = 1;  // time of the single-cone error runs
    int threads = 1;
};

struct DemoRow {
    std::string seq_label;
    int i = 0;
    double log_t = 0;
    double normalized_diag = 0;
    double target_constant = 0;
    double rel_dev = 0;
};

struct DemoReport {
    std::vector<DemoRow> rows;
    std::vector<std::string> labels;      // one per sequence
    std::vector<double> clusters;         // mean normalized diagonal per sequence
    std::vector<double> targets;          // C(alpha) of the band each sequence sits in
    double cone_error = 0;                // worst |computed - C(alpha)| over the cone runs
    double separation = 0;                // |cluster_2 - cluster_1|
    bool clusters_within_10pct = false;
    bool ordered = false;                 // cluster_1 < cluster_2
    bool separated = false;               // separation > 5 * cone_error
    bool pass() const { return clusters_within_10pct && ordered && separated; }
};

// exponent of the surrogate band containing radius 10^log10_r
double band_exponent(const OscillationSpec& spec, double log10_r);

DemoReport oscillation_demo(const OscillationSpec& spec, const std::vector<DemoSequence>& seqs,
                            const DemoConfig& cfg);

} // namespace warpheat
