#include "commands.hpp"

#include "warpheat/blowdown.hpp"
#include "warpheat/bounds.hpp"
#include "warpheat/curvature.hpp"
#include "warpheat/dirichlet_spectral.hpp"
#include "warpheat/output.hpp"
#include "warpheat/parallel.hpp"
#include "warpheat/warp_metric.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

namespace warpheat::cli {

namespace {

std::string path(const std::string& dir, const std::string& name) { return dir + "/" + name; }

void write_text(const std::string& file, const std::string& text)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + file + " for writing");
    out << text;
    if (!out) throw IoError("write failed on " + file);
}

// Runs f<S>() in the narrowest scalar tier that covers the band count,
// widening on PrecisionError.
template <class F>
int with_tier(int n_bands, F&& f)
{
    int first = n_bands <= 4 ? 0 : n_bands <= 5 ? 1 : n_bands <= 8 ? 2 : 3;
    for (int tier = first; tier < 4; ++tier) {
        try {
            switch (tier) {
            case 0: return f.template operator()<Precise130>();
            case 1: return f.template operator()<Precise200>();
            case 2: return f.template operator()<Precise1500>();
            default: return f.template operator()<Precise6000>();
            }
        } catch (const PrecisionError& e) {
            if (tier == 3) throw;
            std::cerr << "warpheat: " << e.what() << "; retrying with a wider scalar\n";
        }
    }
    return no_convergence;
}

void write_report(const std::string& file, const std::vector<const CheckReport*>& reports)
{
    CsvWriter csv(file, {"check", "description", "pass", "worst_margin", "worst_index", "evaluated"});
    for (const CheckReport* r : reports)
        for (const CheckEntry& e : r->entries)
            csv.row({e.id, e.text, long(e.pass), e.worst_margin, long(e.worst_index), long(e.evaluated)});
    csv.close();
}

int infeasible(const InfeasibleSchedule& e, const std::string& out)
{
    CsvWriter csv(path(out, "assumptions.csv"),
                  {"check", "description", "pass", "worst_margin", "worst_index", "evaluated"});
    csv.row({e.assumption(), std::string(e.what()), 0L, -INFINITY, -1L, 0L});
    csv.close();
    std::cerr << "warpheat: Assumption " << e.assumption().substr(1) << " (" << e.assumption()
              << ") fails: " << e.what() << '\n';
    return check_failed;
}

RadialSpace<double> heat_space(const RunConfig& cfg)
{
    ProfileChoice p = cfg.profile_choice();
    switch (p.kind) {
    case ProfileKind::euclidean: return euclidean<double>(static_cast<int>(p.parameter));
    case ProfileKind::cone: return cone<double>(p.parameter);
    case ProfileKind::surrogate: return surrogate_profile(cfg.oscillation());
    case ProfileKind::example: break;
    }
    throw ConfigError("profile 'example' has doubly exponential radii and cannot be time-stepped; "
                      "use 'surrogate' for heat runs");
}

// C(alpha), omega(n) (4 pi)^(-n/2), or nan when the space has no single limit constant
double limit_constant(const RunConfig& cfg)
{
    ProfileChoice p = cfg.profile_choice();
    if (p.kind == ProfileKind::euclidean)
        return unit_ball_volume<double>(p.parameter) * std::pow(4 * M_PI, -p.parameter / 2);
    if (p.kind == ProfileKind::cone) return cone_constant(p.parameter);
    return NAN;
}

} // namespace

int cmd_params(const RunConfig& cfg, const std::string& out)
{
    return with_tier(cfg.n_bands, [&]<class S>() -> int {
        ConstructionParams<S> p;
        try {
            p = generate_params<S>(cfg.schedule());
        } catch (const InfeasibleSchedule& e) {
            return infeasible(e, out);
        }
        CheckReport a = check_assumptions(p, p.n_bands);
        CheckReport c = verify_claims(p);
        write_text(path(out, "params.txt"), write_params(p));
        write_report(path(out, "assumptions.csv"), {&a, &c});
        const CheckEntry* bad = a.first_failure();
        if (!bad) bad = c.first_failure();
        if (bad) {
            std::cerr << "warpheat: check " << bad->id << " fails (" << bad->text << ")\n";
            return check_failed;
        }
        return ok;
    });
}

int cmd_certify(const RunConfig& cfg, const std::string& out)
{
    if (cfg.profile_choice().kind != ProfileKind::example)
        throw ConfigError("certify runs on profile = example");
    return with_tier(cfg.n_bands, [&]<class S>() -> int {
        ConstructionParams<S> p;
        try {
            p = generate_params<S>(cfg.schedule());
        } catch (const InfeasibleSchedule& e) {
            return infeasible(e, out);
        }
        WarpProfile<S> prof = smooth_c2(assemble_c1(p));
        SamplePlan plan;
        plan.per_band = cfg.samples_per_band;
        plan.bands = cfg.certify_bands;
        plan.window_factor = cfg.window_factor;
        plan.tolerance = cfg.slack;
        CertificationReport rep = certify_nonneg(prof, plan);
        CsvWriter csv(path(out, "certification.csv"),
                      {"band_index", "component", "min_value", "argmin_log_r", "samples", "min_sign",
                       "min_log_abs", "nonfinite", "pass"});
        for (const ComponentMin& m : rep.rows) {
            bool pass = m.nonfinite == 0 &&
                        (m.sign >= 0 || (cfg.slack > 0 && m.log_abs <= std::log(cfg.slack)));
            csv.row({long(m.band), m.component, m.min_value, m.argmin_log_r, m.samples, long(m.sign),
                     m.log_abs, m.nonfinite, long(pass)});
        }
        csv.close();
        if (!rep.pass) {
            std::cerr << "warpheat: curvature certification failed\n";
            return check_failed;
        }
        return ok;
    });
}

int cmd_solve(const RunConfig& cfg, const std::string& out)
{
    const RadialSpace<double> space = heat_space(cfg);
    const SolverConfig solver = cfg.solver();
    const std::size_t nt = cfg.times.size();
    std::vector<HeatField<double>> fields(nt);
    parallel_for(static_cast<int>(nt), cfg.threads,
                 [&](int k) { fields[k] = kernel_field(space, cfg.times[k], solver); });

    const double target = limit_constant(cfg);
    CsvWriter diag(path(out, "diagonal.csv"), {"t", "V_sqrt_t", "H_diag", "normalized", "limit_constant", "rel_dev"});
    Series curve{"V(sqrt t) H(0,0,t)", {}, {}};
    for (std::size_t k = 0; k < nt; ++k) {
        const double t = cfg.times[k];
        const double h = fields[k].u.back()(0);
        const double v = std::exp(space.log_V(std::sqrt(t)));
        const double nd = v * h;
        diag.row({t, v, h, nd, target, (nd - target) / target});
        curve.x.push_back(std::log(t));
        curve.y.push_back(nd);
    }
    diag.close();

    const HeatField<double>& last = fields.back();
    CsvWriter field(path(out, "field.csv"), {"r", "t", "u"});
    for (Eigen::Index i = 0; i < last.r.size(); ++i) field.row({last.r(i), last.t.back(), last.u.back()(i)});
    field.close();

    // bound suite over every computed time
    std::vector<KernelSample<double>> samples;
    for (const HeatField<double>& f : fields) {
        auto s = kernel_samples(f, 0);
        samples.insert(samples.end(), s.begin(), s.end());
    }
    LiYauReport ly = li_yau_check(samples, space, 0.1);
    BoundReport g = gaussian_upper_check(samples, space);
    CsvWriter bounds(path(out, "bounds.csv"), {"bound", "fitted_C", "worst_margin", "samples"});
    for (const BoundReport* b : {&ly.upper, &ly.lower, &g})
        bounds.row({b->name, b->fitted_C, b->worst_margin, b->samples});
    bounds.close();
    CsvWriter tails(path(out, "tail_mass.csv"), {"t", "radius", "tail_mass"});
    for (const HeatField<double>& f : fields)
        for (double c : {2.0, 4.0, 6.0}) {
            double R = c * std::sqrt(f.t.back());
            if (R <= f.r(f.r.size() - 1)) tails.row({f.t.back(), R, tail_mass(f, space, R)});
        }
    tails.close();

    SvgPlot plot;
    plot.title = "Normalized heat kernel diagonal, " + space.label;
    plot.x_label = "log t";
    plot.y_label = "V(sqrt t) H(0,0,t)";
    plot.series.push_back(curve);
    if (std::isfinite(target)) plot.references.push_back({target, "limit constant"});
    plot.write(path(out, "diagonal.svg"));

    if (!ly.pass() || !g.pass) {
        std::cerr << "warpheat: a kernel bound failed to fit a finite constant\n";
        return check_failed;
    }
    return ok;
}

namespace {

template <class T>
int spectral_run(const RadialSpace<double>& space, const RadialSpace<T>& wide, const RunConfig& cfg,
                 const std::string& out)
{
    const double n = space.dimension();
    SpectralDecomposition<double> spec = eigensolve(space, cfg.radius, cfg.eigen_count, cfg.eigen_cells);
    CsvWriter csv(path(out, "spectra.csv"), {"j", "lambda", "sup_phi", "annulus_mass_0p1R", "lambda_R2"});
    for (Eigen::Index j = 0; j < spec.count(); ++j)
        csv.row({long(j + 1), spec.lambda(j), spec.sup_phi(j), annulus_mass(spec, j, 0.1 * cfg.radius),
                 spec.lambda(j) * cfg.radius * cfg.radius});
    csv.close();

    std::vector<SpectralBound> checks = {weyl_check(spec, n), linf_check(spec, n), gradient_bound_check(spec)};
    bool pass = true;
    CsvWriter b(path(out, "spectral_bounds.csv"), {"bound", "c_low", "c_high", "count", "pass"});
    for (const SpectralBound& s : checks) {
        b.row({s.name, s.c_low, s.c_high, long(s.count), long(s.pass)});
        pass = pass && s.pass;
    }
    const double resid = spec.orthonormality_residual();
    b.row({std::string("orthonormality_residual"), 0.0, resid, long(spec.count()), long(resid < 1e-8)});
    pass = pass && resid < 1e-8;
    b.close();

    CsvWriter k(path(out, "spectral_kernel.csv"), {"r", "H_R", "t"});
    Vec<double> col = kernel_column(spec, 0.0, cfg.spectral_t);
    for (Eigen::Index i = 0; i < col.size(); ++i) k.row({spec.r(i), col(i), cfg.spectral_t});
    k.close();

    GlobalCompareConfig gc;
    gc.count = cfg.compare_count;
    gc.spacing = cfg.compare_spacing;
    gc.solver = cfg.solver();
    std::vector<T> radii(cfg.compare_radii.begin(), cfg.compare_radii.end());
    GlobalCompareReport rep = global_compare(wide, radii, T(cfg.compare_t), gc);
    CsvWriter g(path(out, "global_compare.csv"),
                {"radius", "h_ball", "h_global", "diff0", "diff_sup", "envelope", "gauss"});
    for (const GlobalCompareRow& r : rep.rows)
        g.row({r.radius, r.h_ball, r.h_global, r.diff0, r.diff_sup, r.envelope, r.gauss});
    g.close();
    CsvWriter s(path(out, "global_summary.csv"),
                {"monotone", "worst_violation", "fitted_c", "fitted_c_gauss", "decay_consistent",
                 "noise_floor", "global_exact"});
    s.row({long(rep.monotone), rep.worst_violation, rep.fitted_c, rep.fitted_c_gauss,
           long(rep.decay_consistent), rep.noise_floor, long(rep.global_exact)});
    s.close();
    if (!pass || !rep.monotone || !rep.decay_consistent) {
        std::cerr << "warpheat: a spectral check failed\n";
        return check_failed;
    }
    return ok;
}

} // namespace

int cmd_spectral(const RunConfig& cfg, const std::string& out)
{
    const RadialSpace<double> space = heat_space(cfg);
    ProfileChoice p = cfg.profile_choice();
    // the global comparison resolves differences near 1e-10 H, so closed-form
    // spaces run it in extended precision
    if (p.kind == ProfileKind::euclidean)
        return spectral_run(space, euclidean<long double>(static_cast<int>(p.parameter)), cfg, out);
    if (p.kind == ProfileKind::cone)
        return spectral_run(space, cone<long double>(p.parameter), cfg, out);
    return spectral_run(space, space, cfg, out);
}

int cmd_blowdown(const RunConfig& cfg, const std::string& out)
{
    const std::vector<double> samples = default_samples(cfg.fit_samples);
    CsvWriter csv(path(out, "blowdown.csv"),
                  {"seq_label", "i", "log_t", "exponent", "target_exponent", "abs_error", "fit_residual"});
    std::vector<double> last_fit;
    auto emit = [&](const std::string& label, const std::vector<ExponentFit>& fits,
                    const std::vector<double>& targets) {
        for (std::size_t i = 0; i < fits.size(); ++i)
            csv.row({label, long(i), fits[i].log_t_text, fits[i].exponent, targets[i],
                     std::abs(fits[i].exponent - targets[i]), fits[i].residual});
        last_fit.push_back(fits.back().exponent);
    };

    ProfileChoice p = cfg.profile_choice();
    int status = ok;
    if (p.kind == ProfileKind::example) {
        status = with_tier(cfg.n_bands, [&]<class S>() -> int {
            ConstructionParams<S> params;
            try {
                params = generate_params<S>(cfg.schedule());
            } catch (const InfeasibleSchedule& e) {
                return infeasible(e, out);
            }
            WarpVolume<S> vol(smooth_c2(assemble_c1(params)));
            auto [a, b] = example_sequences(params);
            LogVolume<S> lv = vol.evaluator();
            emit(a.label, limit_exponent(lv, a, samples), std::vector<double>(a.log_t.size(), 8 - 3 * cfg.eta1));
            emit(b.label, limit_exponent(lv, b, samples), std::vector<double>(b.log_t.size(), 8 - 3 * cfg.eta2));
            return ok;
        });
        if (status != ok) return status;
    } else {
        const RadialSpace<double> space = heat_space(cfg);
        LogVolume<double> lv = log_volume_of(space);
        auto target = [&](double log10_sqrt_t) {
            if (p.kind == ProfileKind::surrogate) return band_exponent(cfg.oscillation(), log10_sqrt_t);
            return p.parameter;
        };
        for (const auto& [label, seq] : {std::pair{std::string("a"), cfg.sequence_a},
                                         std::pair{std::string("b"), cfg.sequence_b}}) {
            BlowdownSequence<double> s;
            s.label = label;
            std::vector<double> targets;
            for (double x : seq) {
                s.log_t.push_back(2 * x * std::log(10.0));
                targets.push_back(target(x));
            }
            emit(label, limit_exponent(lv, s, samples), targets);
        }
    }
    csv.close();

    ConsistencyResult c = consistency_check(power_law(1, last_fit[0]), power_law(1, last_fit[1]), samples,
                                            cfg.consistency_tolerance);
    CsvWriter cc(path(out, "consistency.csv"), {"exponent_a", "exponent_b", "consistent", "residual", "drift_residual"});
    cc.row({last_fit[0], last_fit[1], long(c.consistent), c.residual, c.drift_residual});
    cc.close();
    return ok;
}

int cmd_demo_oscillation(const RunConfig& cfg, const std::string& out)
{
    const OscillationSpec spec = cfg.oscillation();
    std::vector<DemoSequence> seqs(2);
    seqs[0].label = "alpha1";
    seqs[1].label = "alpha2";
    for (double x : cfg.sequence_a) seqs[0].log_t.push_back(2 * x * std::log(10.0));
    for (double x : cfg.sequence_b) seqs[1].log_t.push_back(2 * x * std::log(10.0));
    DemoConfig dc;
    dc.solver = cfg.solver();
    dc.error_probe_t = cfg.error_probe_t;
    dc.threads = cfg.threads;
    DemoReport rep = oscillation_demo(spec, seqs, dc);

    CsvWriter csv(path(out, "demo_report.csv"),
                  {"seq_label", "i", "log_t", "normalized_diag", "target_constant", "rel_dev"});
    for (const DemoRow& r : rep.rows)
        csv.row({r.seq_label, long(r.i), r.log_t, r.normalized_diag, r.target_constant, r.rel_dev});
    csv.close();
    CsvWriter sum(path(out, "demo_summary.csv"),
                  {"seq_label", "cluster", "target_constant", "rel_dev", "cone_error", "separation", "pass"});
    for (std::size_t k = 0; k < rep.clusters.size(); ++k)
        sum.row({rep.labels[k], rep.clusters[k], rep.targets[k], (rep.clusters[k] - rep.targets[k]) / rep.targets[k],
                 rep.cone_error, rep.separation, long(rep.pass())});
    sum.close();

    SvgPlot plot;
    plot.title = "Normalized diagonal along two blow-down sequences";
    plot.x_label = "log10 sqrt(t)";
    plot.y_label = "V(sqrt t) H(0,0,t)";
    const char* colors[] = {"#1f77b4", "#ff7f0e"};
    const char* ref_colors[] = {"#2ca02c", "#d62728"};
    for (std::size_t k = 0; k < seqs.size(); ++k) {
        Series s{rep.labels[k], {}, {}, colors[k % 2]};
        for (const DemoRow& r : rep.rows)
            if (r.seq_label == rep.labels[k]) {
                s.x.push_back(r.log_t / 2 / std::log(10.0));
                s.y.push_back(r.normalized_diag);
            }
        plot.series.push_back(s);
        char label[64];
        std::snprintf(label, sizeof label, "C = %.6g", rep.targets[k]);
        plot.references.push_back({rep.targets[k], label, ref_colors[k % 2]});
    }
    plot.write(path(out, "demo_oscillation.svg"));
    if (!rep.pass()) {
        std::cerr << "warpheat: oscillation clusters are not resolved\n";
        return check_failed;
    }
    return ok;
}

} // namespace warpheat::cli
