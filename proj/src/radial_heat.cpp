#include "warpheat/radial_heat.hpp"

#include <algorithm>
#include <cmath>

namespace warpheat {

namespace {

template <class T>
RadialGrid<T> finish_grid(const RadialSpace<T>& space, Vec<T> r, bool reflecting)
{
    const Eigen::Index n = r.size() - 1;
    if (r(n) > space.domain_max * (1 + 1e-12))
        throw std::domain_error("grid: outer radius beyond the space's domain");
    RadialGrid<T> g;
    g.reflecting = reflecting;
    g.r = std::move(r);
    g.mass.setZero(n + 1);
    g.cond.resize(n);
    T v_prev = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        T face = (g.r(i) + g.r(i + 1)) / 2;
        T v = space.volume(face);
        g.mass(i) = v - v_prev;
        v_prev = v;
        g.cond(i) = space.area(face) / (g.r(i + 1) - g.r(i));
    }
    if (reflecting) g.mass(n) = space.volume(g.r(n)) - v_prev;
    for (Eigen::Index i = 0; i < g.unknowns(); ++i)
        if (!(g.mass(i) > 0)) throw SolverFailure("grid: nonpositive cell volume");
    return g;
}

} // namespace

template <class T>
RadialGrid<T> graded_grid(const RadialSpace<T>& space, int n, T outer, T ell, bool reflecting)
{
    using std::log1p;
    using std::sqrt;
    if (n < 4) throw std::invalid_argument("graded_grid: need at least 4 cells");
    if (!(outer > 0) || !(ell > 0)) throw std::invalid_argument("graded_grid: bad scales");
    const T h0 = ell / 8;
    // xi(r) = r/hm + ell (1 - h0/hm)/hm log(1 + hm r/(h0 ell)), xi(R) = n
    auto xi = [&](T r, T hm) { return r / hm + ell * (1 - h0 / hm) / hm * log1p(hm * r / (h0 * ell)); };
    T lo = std::min(h0, outer / n), hi = outer;
    for (int it = 0; it < 200; ++it) {
        T hm = sqrt(lo * hi);
        if (xi(outer, hm) > n) lo = hm;
        else hi = hm;
    }
    const T hm = sqrt(lo * hi);
    const T scale = xi(outer, hm) / n;
    Vec<T> r(n + 1);
    r(0) = 0;
    r(n) = outer;
    T a = 0;
    for (int i = 1; i < n; ++i) {
        T target = i * scale;
        T b = outer;
        for (int it = 0; it < 200; ++it) {
            T m = (a + b) / 2;
            if (xi(m, hm) < target) a = m;
            else b = m;
            if (b - a <= 1e-15 * b) break;
        }
        r(i) = (a + b) / 2;
    }
    return finish_grid(space, std::move(r), reflecting);
}

template <class T>
RadialGrid<T> uniform_grid(const RadialSpace<T>& space, int n, T outer, bool reflecting)
{
    if (n < 4) throw std::invalid_argument("uniform_grid: need at least 4 cells");
    Vec<T> r = Vec<T>::LinSpaced(n + 1, T(0), outer);
    return finish_grid(space, std::move(r), reflecting);
}

template <class T>
HeatField<T> evolve(const RadialGrid<T>& grid, Vec<T> u0, T t0, const std::vector<T>& times,
                    const SolverConfig& cfg)
{
    using std::abs;
    using std::max;
    const Eigen::Index n = grid.unknowns();
    const Eigen::Index nodes = grid.r.size();
    if (u0.size() != nodes) throw std::invalid_argument("evolve: initial data size mismatch");
    if (!(cfg.theta >= 0.5 && cfg.theta <= 1)) throw std::invalid_argument("evolve: theta in [1/2, 1]");
    T prev = t0;
    for (T t : times) {
        if (!(t > prev)) throw std::invalid_argument("evolve: output times must increase past t0");
        prev = t;
    }

    // K u: (K u)_i = sum over faces of cond * (u_i - u_j); Dirichlet node N is 0
    const Vec<T> M = grid.mass.head(n);
    Vec<T> kd = Vec<T>::Zero(n), ko = Vec<T>::Zero(n);  // ko(i) couples i and i+1
    for (Eigen::Index i = 0; i + 1 < nodes; ++i) {
        if (i < n) kd(i) += grid.cond(i);
        if (i + 1 < n) {
            kd(i + 1) += grid.cond(i);
            ko(i) = -grid.cond(i);
        }
    }
    auto apply_k = [&](const Vec<T>& v) {
        Vec<T> out = kd.cwiseProduct(v);
        out.head(n - 1) += ko.head(n - 1).cwiseProduct(v.tail(n - 1));
        out.tail(n - 1) += ko.head(n - 1).cwiseProduct(v.head(n - 1));
        return out;
    };
    Vec<T> sub(n), sup(n), dia(n);
    auto step = [&](Vec<T>& v, T dt, T th) {
        dia = M + th * dt * kd;
        sub(0) = 0;
        sub.tail(n - 1) = th * dt * ko.head(n - 1);
        sup.head(n - 1) = th * dt * ko.head(n - 1);
        sup(n - 1) = 0;
        Vec<T> rhs = M.cwiseProduct(v);
        if (th < 1) rhs -= (1 - th) * dt * apply_k(v);
        v = thomas_solve<T>(sub, dia, sup, rhs);
    };

    HeatField<T> field;
    field.r = grid.r;
    field.weights = grid.mass;
    Vec<T> v = u0.head(n);
    const T floor_t = grid.r(1) * grid.r(1);
    T mass_ref = M.dot(v);
    const T mass_scale = max(abs(mass_ref), M.dot(v.cwiseAbs()));
    T tau = t0;
    int steps = 0;
    for (T target : times) {
        while (tau < target) {
            T dt = T(cfg.step_factor) * max(tau, floor_t);
            const bool last = tau + dt >= target * (1 - 1e-13);
            if (last) dt = target - tau;
            if (steps < cfg.startup_steps) {
                step(v, dt / 2, T(1));
                step(v, dt / 2, T(1));
            } else {
                step(v, dt, T(cfg.theta));
            }
            tau = last ? target : tau + dt;
            ++steps;
            T m = M.dot(v);
            if (!std::isfinite(double(m)))
                throw SolverFailure("evolve: solution is no longer finite");
            if (m > mass_ref + T(cfg.mass_tolerance) * mass_scale)
                throw SolverFailure("evolve: discrete mass increased");
            mass_ref = std::min(mass_ref, m);
        }
        Vec<T> full = Vec<T>::Zero(nodes);
        full.head(n) = v;
        field.t.push_back(target);
        field.u.push_back(std::move(full));
    }
    return field;
}

template <class T>
HeatField<T> solve(const RadialSpace<T>& space, const std::function<T(T)>& init, T t0,
                   const std::vector<T>& times, const SolverConfig& cfg)
{
    using std::sqrt;
    if (times.empty()) throw std::invalid_argument("solve: no output times");
    const T outer = cfg.outer_radius > 0 ? T(cfg.outer_radius)
                                         : T(T(cfg.outer_factor) * sqrt(times.back()));
    const T ell = t0 > 0 ? T(sqrt(t0)) : outer / 64;
    RadialGrid<T> g = graded_grid(space, cfg.grid_points, outer, ell, cfg.reflecting);
    Vec<T> u0(g.r.size());
    for (Eigen::Index i = 0; i < u0.size(); ++i) {
        u0(i) = init(g.r(i));
        if (u0(i) < 0) throw std::invalid_argument("solve: initial data must be nonnegative");
    }
    if (!g.reflecting) u0(u0.size() - 1) = 0;
    return evolve(g, std::move(u0), t0, times, cfg);
}

template <class T>
HeatField<T> kernel_field(const RadialSpace<T>& space, T t, const SolverConfig& cfg)
{
    using std::exp;
    using std::sqrt;
    if (!(t > 0)) throw std::domain_error("kernel_diag: t must be positive");
    const T ts = T(cfg.seed_factor) * t;
    if (!(ts > 0) || ts > t / 100) throw SeedTimeError("kernel_diag: seed time must be at most t/100");
    const T outer = cfg.outer_radius > 0 ? T(cfg.outer_radius) : T(T(cfg.outer_factor) * sqrt(t));
    RadialGrid<T> g = graded_grid(space, cfg.grid_points, outer, T(sqrt(ts)), cfg.reflecting);
    Vec<T> u0(g.r.size());
    for (Eigen::Index i = 0; i < u0.size(); ++i) u0(i) = exp(-g.r(i) * g.r(i) / (4 * ts));
    if (!g.reflecting) u0(u0.size() - 1) = 0;
    u0 /= g.mass.dot(u0);
    return evolve(g, std::move(u0), ts, std::vector<T>{t}, cfg);
}

template <class T>
T kernel_diag(const RadialSpace<T>& space, T t, const SolverConfig& cfg)
{
    return kernel_field(space, t, cfg).u.back()(0);
}

template <class T>
T normalized_diag(const RadialSpace<T>& space, T t, const SolverConfig& cfg)
{
    using std::exp;
    using std::sqrt;
    T h = kernel_diag(space, t, cfg);
    return exp(space.log_V(T(sqrt(t)))) * h;
}

template <class T>
HeatField<T> ball_kernel(const RadialSpace<T>& space, T radius, T y, const std::vector<T>& times,
                         int n, const SolverConfig& cfg)
{
    if (!(y >= 0 && y < radius)) throw std::invalid_argument("ball_kernel: y must lie in [0, R)");
    RadialGrid<T> g = uniform_grid(space, n, radius, false);
    Eigen::Index k = static_cast<Eigen::Index>(std::lround(double(y / radius) * n));
    k = std::min<Eigen::Index>(k, n - 1);
    Vec<T> u0 = Vec<T>::Zero(g.r.size());
    u0(k) = 1 / g.mass(k);
    return evolve(g, std::move(u0), T(0), times, cfg);
}

template RadialGrid<double> graded_grid<double>(const RadialSpace<double>&, int, double, double,
                                                 bool);
template RadialGrid<double> uniform_grid<double>(const RadialSpace<double>&, int, double, bool);
template HeatField<double> evolve<double>(const RadialGrid<double>&, Vec<double>, double,
                                          const std::vector<double>&, const SolverConfig&);
template HeatField<double> solve<double>(const RadialSpace<double>&,
                                         const std::function<double(double)>&, double,
                                         const std::vector<double>&, const SolverConfig&);
template HeatField<double> kernel_field<double>(const RadialSpace<double>&, double,
                                                const SolverConfig&);
template double kernel_diag<double>(const RadialSpace<double>&, double, const SolverConfig&);
template double normalized_diag<double>(const RadialSpace<double>&, double, const SolverConfig&);
template HeatField<double> ball_kernel<double>(const RadialSpace<double>&, double, double,
                                               const std::vector<double>&, int,
                                               const SolverConfig&);
template RadialGrid<long double> graded_grid<long double>(const RadialSpace<long double>&, int, long double, long double,
                                                 bool);
template RadialGrid<long double> uniform_grid<long double>(const RadialSpace<long double>&, int, long double, bool);
template HeatField<long double> evolve<long double>(const RadialGrid<long double>&, Vec<long double>, long double,
                                          const std::vector<long double>&, const SolverConfig&);
template HeatField<long double> solve<long double>(const RadialSpace<long double>&,
                                         const std::function<long double(long double)>&, long double,
                                         const std::vector<long double>&, const SolverConfig&);
template HeatField<long double> kernel_field<long double>(const RadialSpace<long double>&, long double,
                                                const SolverConfig&);
template long double kernel_diag<long double>(const RadialSpace<long double>&, long double, const SolverConfig&);
template long double normalized_diag<long double>(const RadialSpace<long double>&, long double, const SolverConfig&);
template HeatField<long double> ball_kernel<long double>(const RadialSpace<long double>&, long double, long double,
                                               const std::vector<long double>&, int,
                                               const SolverConfig&);

} // namespace warpheat
