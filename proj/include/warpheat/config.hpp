#pragma once

// Run configuration: a line-oriented "key = value" file, '#' comments.
// Unknown keys are rejected, every numeric key is range-checked, and
// serialize() writes a file that parses back to an identical config.

#include "warpheat/radial_heat.hpp"
#include "warpheat/radial_space.hpp"
#include "warpheat/warp_metric.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace warpheat {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProfileKind { example, surrogate, euclidean, cone };

struct ProfileChoice {
    ProfileKind kind = ProfileKind::euclidean;
    double parameter = 3;   // dimension n or cone exponent alpha

    static ProfileChoice parse(const std::string& text);
    std::string str() const;
};

struct RunConfig {
    std::string profile = "euclidean-3";
    std::string out_dir;            // empty: flag, then WARPHEAT_OUT, then "out"
    int threads = 1;
    double slack = 0;               // certification admits r^2 Rc >= -slack

    // construction schedule
    double eta1 = 0.6, eta2 = 0.604, eps0 = 1e-7, omega0 = 1e-6;
    int n_bands = 4;
    double b0_power = 8, kappa = 0.1, beta_even_gap = 0.01, beta_odd = 0.005;

    // certification
    int samples_per_band = 4096;
    int certify_bands = 4;          // -1 for all generated bands
    int window_factor = 10;

    // heat solver
    int grid_points = 8192;
    double step_factor = 0.01, seed_factor = 1e-4, theta = 0.5, outer_factor = 12;
    std::vector<double> times{0.5, 1, 2, 4};

    // surrogate profile
    std::vector<double> surrogate_alphas{6, 5, 6, 5, 6};
    std::vector<double> surrogate_bounds{1, 2.5, 4.5, 7};
    double surrogate_blend = 0.5, surrogate_domain = 12;

    // spectral
    double radius = 1;
    int eigen_count = 10, eigen_cells = 2000;
    double spectral_t = 0.02;
    std::vector<double> compare_radii{4, 6, 8};
    double compare_t = 1, compare_spacing = 0.002;
    int compare_count = 64;

    // blow-down and the oscillation demo; sequences as log10 sqrt(t)
    int fit_samples = 33;
    double consistency_tolerance = 1e-6;
    std::vector<double> sequence_a{0, 3.5, 8.5};
    std::vector<double> sequence_b{1.75, 5.75};
    double error_probe_t = 1;

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    // key = value override, same checks as the file
    void set(const std::string& key, const std::string& value);
    std::string serialize() const;
    void validate() const;

    ProfileChoice profile_choice() const { return ProfileChoice::parse(profile); }
    Schedule schedule() const;
    SolverConfig solver() const;
    OscillationSpec oscillation() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

} // namespace warpheat
