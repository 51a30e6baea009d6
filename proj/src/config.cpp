#include "warpheat/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace warpheat {

namespace {

std::string trim(std::string s)
{
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
}

double parse_double(const std::string& key, const std::string& v)
{
    errno = 0;
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
        throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v)
{
    errno = 0;
    char* end = nullptr;
    long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE || x < -1000000000L || x > 1000000000L)
        throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
    return static_cast<int>(x);
}

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// closed or open interval bounds for range checks
struct Range {
    double lo, hi;
    bool lo_open = false, hi_open = false;

    bool contains(double x) const
    {
        return (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
    }
    std::string str() const
    {
        return std::string(lo_open ? "(" : "[") + fmt(lo) + ", " + fmt(hi) + (hi_open ? ")" : "]");
    }
};

struct Field {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(const RunConfig&)> check;
};

template <class M>
Field real(const std::string& key, M RunConfig::*m, Range r)
{
    return {key,
            [=](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); },
            [=](const RunConfig& c) { return fmt(c.*m); },
            [=](const RunConfig& c) {
                if (!r.contains(c.*m)) throw ConfigError("config: " + key + " = " + fmt(c.*m) + " outside " + r.str());
            }};
}

Field integer(const std::string& key, int RunConfig::*m, Range r)
{
    return {key,
            [=](RunConfig& c, const std::string& v) { c.*m = parse_int(key, v); },
            [=](const RunConfig& c) { return std::to_string(c.*m); },
            [=](const RunConfig& c) {
                if (!r.contains(c.*m))
                    throw ConfigError("config: " + key + " = " + std::to_string(c.*m) + " outside " + r.str());
            }};
}

Field list(const std::string& key, std::vector<double> RunConfig::*m, Range r, std::size_t min_len,
           bool increasing)
{
    return {key,
            [=](RunConfig& c, const std::string& v) {
                std::vector<double> xs;
                std::stringstream in(v);
                std::string item;
                while (std::getline(in, item, ',')) xs.push_back(parse_double(key, trim(item)));
                c.*m = xs;
            },
            [=](const RunConfig& c) {
                std::string s;
                for (std::size_t k = 0; k < (c.*m).size(); ++k) s += (k ? ", " : "") + fmt((c.*m)[k]);
                return s;
            },
            [=](const RunConfig& c) {
                const std::vector<double>& xs = c.*m;
                if (xs.size() < min_len)
                    throw ConfigError("config: " + key + " needs at least " + std::to_string(min_len) + " entries");
                for (std::size_t k = 0; k < xs.size(); ++k) {
                    if (!r.contains(xs[k]))
                        throw ConfigError("config: " + key + " entry " + fmt(xs[k]) + " outside " + r.str());
                    if (increasing && k > 0 && !(xs[k] > xs[k - 1]))
                        throw ConfigError("config: " + key + " must increase strictly");
                }
            }};
}

Field text(const std::string& key, std::string RunConfig::*m, std::function<void(const std::string&)> check)
{
    return {key,
            [=](RunConfig& c, const std::string& v) { c.*m = v; },
            [=](const RunConfig& c) { return c.*m; },
            [=](const RunConfig& c) { check(c.*m); }};
}

const std::vector<Field>& fields()
{
    using R = RunConfig;
    const double big = 1e300;
    static const std::vector<Field> f = {
        text("profile", &R::profile, [](const std::string& v) { ProfileChoice::parse(v); }),
        text("out_dir", &R::out_dir, [](const std::string&) {}),
        integer("threads", &R::threads, {1, 256}),
        real("slack", &R::slack, {0, 1e-6}),
        real("eta1", &R::eta1, {0, 1, true, true}),
        real("eta2", &R::eta2, {0, 1, true, true}),
        real("eps0", &R::eps0, {0, 0.1, true, false}),
        real("omega0", &R::omega0, {0, 0.1, true, false}),
        integer("n_bands", &R::n_bands, {4, 10}),
        real("b0_power", &R::b0_power, {1, 1e6, true, false}),
        real("kappa", &R::kappa, {0, 1e3, true, false}),
        real("beta_even_gap", &R::beta_even_gap, {0, 1, true, true}),
        real("beta_odd", &R::beta_odd, {0, 1, true, true}),
        integer("samples_per_band", &R::samples_per_band, {16, 1e6}),
        integer("certify_bands", &R::certify_bands, {-1, 10}),
        integer("window_factor", &R::window_factor, {1, 100}),
        integer("grid_points", &R::grid_points, {16, 1 << 22}),
        real("step_factor", &R::step_factor, {0, 1, true, false}),
        real("seed_factor", &R::seed_factor, {0, 0.01, true, false}),
        real("theta", &R::theta, {0.5, 1}),
        real("outer_factor", &R::outer_factor, {2, 1e3}),
        list("times", &R::times, {0, big, true, false}, 1, true),
        list("surrogate_alphas", &R::surrogate_alphas, {1, 100, true, false}, 1, false),
        list("surrogate_bounds", &R::surrogate_bounds, {-10, 100}, 0, true),
        real("surrogate_blend", &R::surrogate_blend, {0, 10, true, false}),
        real("surrogate_domain", &R::surrogate_domain, {0, 300, true, false}),
        real("radius", &R::radius, {0, 1e6, true, false}),
        integer("eigen_count", &R::eigen_count, {1, 4096}),
        integer("eigen_cells", &R::eigen_cells, {16, 1 << 20}),
        real("spectral_t", &R::spectral_t, {0, big, true, false}),
        list("compare_radii", &R::compare_radii, {0, 1e4, true, false}, 1, true),
        real("compare_t", &R::compare_t, {0, big, true, false}),
        real("compare_spacing", &R::compare_spacing, {0, 1, true, false}),
        integer("compare_count", &R::compare_count, {1, 4096}),
        integer("fit_samples", &R::fit_samples, {2, 1000}),
        real("consistency_tolerance", &R::consistency_tolerance, {0, 1, true, false}),
        list("sequence_a", &R::sequence_a, {-100, 300}, 1, true),
        list("sequence_b", &R::sequence_b, {-100, 300}, 1, true),
        real("error_probe_t", &R::error_probe_t, {0, big, true, false}),
    };
    return f;
}

const Field& field(const std::string& key)
{
    for (const Field& f : fields())
        if (f.key == key) return f;
    throw ConfigError("config: unknown key '" + key + "'");
}

} // namespace

ProfileChoice ProfileChoice::parse(const std::string& text)
{
    ProfileChoice c;
    auto number = [&](const std::string& rest) {
        errno = 0;
        char* end = nullptr;
        double x = std::strtod(rest.c_str(), &end);
        if (rest.empty() || *end != '\0' || !std::isfinite(x) || !(x > 0))
            throw ConfigError("config: bad profile '" + text + "'");
        return x;
    };
    if (text == "example") c.kind = ProfileKind::example;
    else if (text == "surrogate") c.kind = ProfileKind::surrogate;
    else if (text.rfind("euclidean-", 0) == 0) {
        c.kind = ProfileKind::euclidean;
        c.parameter = number(text.substr(10));
        if (c.parameter != std::floor(c.parameter) || c.parameter > 64)
            throw ConfigError("config: euclidean dimension must be an integer in [1, 64]");
    } else if (text.rfind("cone-", 0) == 0) {
        c.kind = ProfileKind::cone;
        c.parameter = number(text.substr(5));
        if (c.parameter > 64) throw ConfigError("config: cone exponent must lie in (0, 64]");
    } else {
        throw ConfigError("config: profile must be example, surrogate, euclidean-N or cone-ALPHA, got '" + text + "'");
    }
    return c;
}

std::string ProfileChoice::str() const
{
    switch (kind) {
    case ProfileKind::example: return "example";
    case ProfileKind::surrogate: return "surrogate";
    case ProfileKind::euclidean: return "euclidean-" + fmt(parameter);
    case ProfileKind::cone: return "cone-" + fmt(parameter);
    }
    return "";
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    const Field& f = field(key);
    f.set(*this, value);
    f.check(*this);
}

void RunConfig::validate() const
{
    for (const Field& f : fields()) f.check(*this);
    if (!(eta1 < eta2)) throw ConfigError("config: eta1 must be below eta2");
    if (surrogate_alphas.size() != surrogate_bounds.size() + 1)
        throw ConfigError("config: surrogate_alphas needs one more entry than surrogate_bounds");
}

RunConfig RunConfig::parse(const std::string& content)
{
    RunConfig c;
    std::istringstream in(content);
    std::string line;
    std::vector<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        for (const std::string& s : seen)
            if (s == key) throw ConfigError("config: duplicate key '" + key + "'");
        seen.push_back(key);
        c.set(key, trim(line.substr(eq + 1)));
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string RunConfig::serialize() const
{
    std::string s;
    for (const Field& f : fields()) s += f.key + " = " + f.get(*this) + "\n";
    return s;
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    return a.serialize() == b.serialize();
}

Schedule RunConfig::schedule() const
{
    Schedule s;
    s.eta1 = eta1;
    s.eta2 = eta2;
    s.eps0 = eps0;
    s.omega0 = omega0;
    s.n_bands = n_bands;
    s.b0_power = b0_power;
    s.kappa = kappa;
    s.beta_even_gap = beta_even_gap;
    s.beta_odd = beta_odd;
    return s;
}

SolverConfig RunConfig::solver() const
{
    SolverConfig s;
    s.grid_points = grid_points;
    s.step_factor = step_factor;
    s.seed_factor = seed_factor;
    s.theta = theta;
    s.outer_factor = outer_factor;
    return s;
}

OscillationSpec RunConfig::oscillation() const
{
    OscillationSpec s;
    s.alphas = surrogate_alphas;
    s.log10_bounds = surrogate_bounds;
    s.blend = surrogate_blend;
    s.log10_domain_max = surrogate_domain;
    return s;
}

} // namespace warpheat
