#pragma once

// Radial heat equation u_t = (A u')' / A by vertex-centred finite volumes:
// node i owns the shell between the neighbouring face midpoints, cell masses
// are exact volume differences, and the pole needs no special stencil because
// the innermost cell is the ball B(r_{1/2}) with zero flux through r = 0.
// Time stepping is theta-weighted (Crank-Nicolson by default) with geometric
// steps dt = c t and implicit Euler half steps at startup.

#include "warpheat/radial_space.hpp"
#include "warpheat/tridiagonal.hpp"

#include <vector>

namespace warpheat {

class SeedTimeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
    int grid_points = 8192;
    double step_factor = 0.01;    // dt = step_factor * t
    double seed_factor = 1e-4;    // t_seed = seed_factor * t
    double theta = 0.5;           // 1/2 is Crank-Nicolson, 1 implicit Euler
    int startup_steps = 2;        // leading steps done as two implicit half steps
    double outer_factor = 12;     // absorbing boundary at outer_factor * sqrt(t_max)
    double outer_radius = 0;      // fixed outer radius when positive (ball problems)
    bool reflecting = false;      // zero-flux outer boundary instead
    double mass_tolerance = 1e-10;
};

template <class T = double>
struct RadialGrid {
    Vec<T> r;       // nodes r_0 = 0 < ... < r_N = R
    Vec<T> mass;    // cell volumes, size N+1 (the last is zero when absorbing)
    Vec<T> cond;    // A(r_{i+1/2}) / (r_{i+1} - r_i), size N
    bool reflecting = false;

    Eigen::Index unknowns() const { return reflecting ? r.size() : r.size() - 1; }
};

// dr/dxi = h0 + (h_max - h0) r / (r + ell), h0 = ell / 8, fine near the pole
// and uniform in the far field.
template <class T = double>
RadialGrid<T> graded_grid(const RadialSpace<T>& space, int n, T outer, T ell, bool reflecting);

template <class T = double>
RadialGrid<T> uniform_grid(const RadialSpace<T>& space, int n, T outer, bool reflecting);

template <class T = double>
struct HeatField {
    Vec<T> r;
    Vec<T> weights;          // cell masses, so that sum weights * u = int u dV
    std::vector<T> t;
    std::vector<Vec<T>> u;   // u[j](i) = u(r_i, t_j)

    T mass(std::size_t j) const { return weights.dot(u[j]); }
};

// Evolves nodal data u0 from t0 to each of the increasing output times.
template <class T = double>
HeatField<T> evolve(const RadialGrid<T>& grid, Vec<T> u0, T t0, const std::vector<T>& times,
                    const SolverConfig& cfg);

// Initial profile given as a function of r at time t0; graded grid with the
// pole scale sqrt(t0) (R_out / 64 when t0 = 0).
template <class T = double>
HeatField<T> solve(const RadialSpace<T>& space, const std::function<T(T)>& init, T t0,
                   const std::vector<T>& times, const SolverConfig& cfg);

// Full run behind kernel_diag: the field at t seeded by a flat Gaussian at t_seed.
template <class T = double>
HeatField<T> kernel_field(const RadialSpace<T>& space, T t, const SolverConfig& cfg);

// H(0, 0, t)
template <class T = double>
T kernel_diag(const RadialSpace<T>& space, T t, const SolverConfig& cfg);

// V(sqrt t) H(0, 0, t)
template <class T = double>
T normalized_diag(const RadialSpace<T>& space, T t, const SolverConfig& cfg);

// Dirichlet kernel on the ball B(R) from a unit point mass at the node nearest y,
// on a uniform n-cell grid; returns the field x -> K_R(x, y, t).
template <class T = double>
HeatField<T> ball_kernel(const RadialSpace<T>& space, T radius, T y, const std::vector<T>& times,
                         int n, const SolverConfig& cfg);

extern template RadialGrid<double> graded_grid<double>(const RadialSpace<double>&, int, double,
                                                        double, bool);
extern template RadialGrid<double> uniform_grid<double>(const RadialSpace<double>&, int, double,
                                                         bool);
extern template HeatField<double> evolve<double>(const RadialGrid<double>&, Vec<double>, double,
                                                 const std::vector<double>&, const SolverConfig&);
extern template HeatField<double> solve<double>(const RadialSpace<double>&,
                                                const std::function<double(double)>&, double,
                                                const std::vector<double>&, const SolverConfig&);
extern template HeatField<double> kernel_field<double>(const RadialSpace<double>&, double,
                                                       const SolverConfig&);
extern template double kernel_diag<double>(const RadialSpace<double>&, double, const SolverConfig&);
extern template double normalized_diag<double>(const RadialSpace<double>&, double,
                                               const SolverConfig&);
extern template HeatField<double> ball_kernel<double>(const RadialSpace<double>&, double, double,
                                                      const std::vector<double>&, int,
                                                      const SolverConfig&);
extern template RadialGrid<long double> graded_grid<long double>(const RadialSpace<long double>&, int, long double,
                                                        long double, bool);
extern template RadialGrid<long double> uniform_grid<long double>(const RadialSpace<long double>&, int, long double,
                                                         bool);
extern template HeatField<long double> evolve<long double>(const RadialGrid<long double>&, Vec<long double>, long double,
                                                 const std::vector<long double>&, const SolverConfig&);
extern template HeatField<long double> solve<long double>(const RadialSpace<long double>&,
                                                const std::function<long double(long double)>&, long double,
                                                const std::vector<long double>&, const SolverConfig&);
extern template HeatField<long double> kernel_field<long double>(const RadialSpace<long double>&, long double,
                                                       const SolverConfig&);
extern template long double kernel_diag<long double>(const RadialSpace<long double>&, long double, const SolverConfig&);
extern template long double normalized_diag<long double>(const RadialSpace<long double>&, long double,
                                               const SolverConfig&);
extern template HeatField<long double> ball_kernel<long double>(const RadialSpace<long double>&, long double, long double,
                                                      const std::vector<long double>&, int,
                                                      const SolverConfig&);

} // namespace warpheat
