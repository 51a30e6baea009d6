#include "warpheat/blowdown.hpp"
#include "warpheat/parallel.hpp"

#include <cmath>
#include <map>

namespace warpheat {

LimitProfile power_law(double c, double alpha)
{
    if (!(c > 0)) throw std::domain_error("power_law: coefficient must be positive");
    return {[c, alpha](double r) { return c * alpha * std::pow(r, alpha - 1); },
            [c, alpha](double r) { return c * alpha * (alpha - 1) * std::pow(r, alpha - 2); }};
}

ConsistencyResult consistency_check(const LimitProfile& h, const LimitProfile& h_tilde,
                                    const std::vector<double>& samples, double tolerance)
{
    if (samples.empty()) throw std::invalid_argument("consistency_check: no samples");
    std::vector<double> diff;
    ConsistencyResult res;
    for (double r : samples) {
        double a = h.d1(r), b = h_tilde.d1(r);
        if (!(a > 0) || !(b > 0))
            throw DegenerateProfile("consistency_check: h' must be positive at every sample");
        diff.push_back(std::log(a) - std::log(b));
        res.drift_residual = std::max(res.drift_residual, std::abs(h.d2(r) / a - h_tilde.d2(r) / b));
    }
    double mean = 0;
    for (double d : diff) mean += d;
    mean /= diff.size();
    for (double d : diff) res.residual = std::max(res.residual, std::abs(d - mean));
    res.consistent = res.residual < tolerance;
    return res;
}

std::pair<DemoSequence, DemoSequence> default_demo_sequences()
{
    const double ln10 = std::log(10.0);
    DemoSequence a{"alpha1", {}}, b{"alpha2", {}};
    for (double e : {0.0, 3.5, 8.5}) a.log_t.push_back(2 * e * ln10);
    for (double e : {1.75, 5.75}) b.log_t.push_back(2 * e * ln10);
    return {a, b};
}

double band_exponent(const OscillationSpec& spec, double log10_r)
{
    std::size_t k = 0;
    while (k < spec.log10_bounds.size() && log10_r > spec.log10_bounds[k]) ++k;
    return spec.alphas.at(k);
}

DemoReport oscillation_demo(const OscillationSpec& spec, const std::vector<DemoSequence>& seqs,
                            const DemoConfig& cfg)
{
    const RadialSpace<double> space = surrogate_profile(spec);
    DemoReport rep;
    std::vector<DemoRow> rows;
    std::map<double, double> cone_runs;  // alpha -> computed normalized diagonal
    for (const DemoSequence& s : seqs) {
        if (s.log_t.empty()) throw std::invalid_argument("oscillation_demo: empty sequence");
        for (std::size_t i = 0; i < s.log_t.size(); ++i) {
            DemoRow row;
            row.seq_label = s.label;
            row.i = static_cast<int>(i);
            row.log_t = s.log_t[i];
            double alpha = band_exponent(spec, s.log_t[i] / 2 / std::log(10.0));
            row.target_constant = cone_constant(alpha);
            cone_runs[alpha] = 0;
            rows.push_back(row);
        }
    }
    std::vector<double> alphas;
    for (const auto& kv : cone_runs) alphas.push_back(kv.first);
    std::vector<double> cone_vals(alphas.size());
    const int n_rows = static_cast<int>(rows.size());
    parallel_for(n_rows + static_cast<int>(alphas.size()), cfg.threads, [&](int k) {
        if (k < n_rows) {
            rows[k].normalized_diag = normalized_diag(space, std::exp(rows[k].log_t), cfg.solver);
        } else {
            double a = alphas[k - n_rows];
            cone_vals[k - n_rows] = normalized_diag(cone(a), cfg.error_probe_t, cfg.solver);
        }
    });
    for (std::size_t k = 0; k < alphas.size(); ++k)
        rep.cone_error = std::max(rep.cone_error, std::abs(cone_vals[k] - cone_constant(alphas[k])));
    for (DemoRow& row : rows) row.rel_dev = (row.normalized_diag - row.target_constant) / row.target_constant;
    rep.rows = rows;

    rep.clusters_within_10pct = true;
    for (const DemoSequence& s : seqs) {
        double sum = 0, target = 0;
        int n = 0;
        for (const DemoRow& row : rows)
            if (row.seq_label == s.label) {
                sum += row.normalized_diag;
                target = row.target_constant;
                ++n;
            }
        rep.labels.push_back(s.label);
        rep.clusters.push_back(sum / n);
        rep.targets.push_back(target);
        if (!(std::abs(sum / n - target) < 0.1 * target)) rep.clusters_within_10pct = false;
    }
    if (rep.clusters.size() >= 2) {
        double dc = rep.clusters[1] - rep.clusters[0];
        double dt = rep.targets[1] - rep.targets[0];
        rep.separation = std::abs(dc);
        rep.ordered = dt != 0 && (dc > 0) == (dt > 0);
        rep.separated = rep.separation > 5 * rep.cone_error;
    }
    return rep;
}

} // namespace warpheat
