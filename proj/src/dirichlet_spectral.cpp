#include "warpheat/dirichlet_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpheat {

template <class T>
T SpectralDecomposition<T>::phi_at(Eigen::Index j, T x) const
{
    if (x < 0 || x > radius) throw std::domain_error("phi_at: x outside the ball");
    auto it = std::upper_bound(r.data(), r.data() + r.size(), x);
    Eigen::Index i = std::clamp<Eigen::Index>(it - r.data() - 1, 0, r.size() - 2);
    T w = (x - r(i)) / (r(i + 1) - r(i));
    return (1 - w) * phi(i, j) + w * phi(i + 1, j);
}

template <class T>
T SpectralDecomposition<T>::orthonormality_residual() const
{
    Mat gram = phi.transpose() * weights.asDiagonal() * phi;
    return (gram - Mat::Identity(count(), count())).cwiseAbs().maxCoeff();
}

template <class T>
SpectralDecomposition<T> eigensolve(const RadialSpace<T>& space, T radius, int count, int cells)
{
    using std::sqrt;
    if (!(radius > 0) || radius > space.domain_max) throw std::domain_error("eigensolve: bad radius");
    if (count < 1 || count > cells / 4)
        throw std::invalid_argument("eigensolve: J must be between 1 and a quarter of the grid size");
    RadialGrid<T> g = uniform_grid(space, cells, radius, false);
    const Eigen::Index n = g.unknowns();
    const Vec<T> M = g.mass.head(n);
    const Vec<T> s = M.cwiseSqrt().cwiseInverse();
    SymTridiagonal<T> tri;
    tri.d = Vec<T>::Zero(n);
    tri.e.resize(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        tri.d(i) += g.cond(i);
        if (i > 0) tri.d(i) += g.cond(i - 1);
    }
    tri.d = tri.d.cwiseProduct(s).cwiseProduct(s);
    for (Eigen::Index i = 0; i + 1 < n; ++i) tri.e(i) = -g.cond(i) * s(i) * s(i + 1);

    SpectralDecomposition<T> out;
    out.radius = radius;
    out.dimension = space.dimension();
    out.r = g.r;
    out.weights = g.mass;
    out.volume = space.volume;
    out.lambda.resize(count);
    out.phi = SpectralDecomposition<T>::Mat::Zero(n + 1, count);
    for (int j = 0; j < count; ++j) {
        T lam = tri.eigenvalue(j);
        Vec<T> y = tri.eigenvector(lam);
        // guard against drift toward earlier vectors for close eigenvalues
        for (int k = 0; k < j; ++k) {
            Vec<T> yk = out.phi.col(k).head(n).cwiseProduct(M.cwiseSqrt());
            y -= yk.dot(y) * yk;
        }
        y.normalize();
        if (!std::isfinite(double(lam)) || !y.allFinite())
            throw SolverFailure("eigensolve: eigenpair did not converge");
        out.lambda(j) = lam;
        out.phi.col(j).head(n) = y.cwiseProduct(s);
    }
    return out;
}

template <class T>
Vec<T> kernel_column(const SpectralDecomposition<T>& spec, T y, T t)
{
    Vec<T> coef(spec.count());
    for (Eigen::Index j = 0; j < spec.count(); ++j)
        coef(j) = std::exp(-spec.lambda(j) * t) * spec.phi_at(j, y);
    return spec.phi * coef;
}

template <class T>
T truncation_tail(const SpectralDecomposition<T>& spec, T t)
{
    using std::exp;
    using std::log;
    using std::pow;
    const double n = spec.dimension;
    const double J = double(spec.count());
    const double lam = double(spec.lambda(spec.count() - 1)) * double(t);
    const double c = linf_check(spec, n).c_high;
    if (!(lam > 0)) return std::numeric_limits<T>::infinity();
    // the summand peaks near j = J (n^2 / (2 lambda_J t))^{n/2}
    const double peak = J * pow(n * n / (2 * lam), n / 2);
    if (peak > 1e7) return std::numeric_limits<T>::infinity();
    double acc = 0;
    for (double j = J + 1; j < 1e8; j += 1) {
        double lt = -lam * pow(j / J, 2 / n) + 2 * log(c) + n * log(j);
        double term = exp(lt);
        acc += term;
        if (j > peak && term <= 1e-18 * acc) break;
        if (j > peak && acc == 0 && lt < -800) break;
    }
    return T(acc);
}

template <class T>
KernelValue<T> kernel(const SpectralDecomposition<T>& spec, T x, T y, T t, double rel_tol)
{
    using std::abs;
    if (!(t > 0)) throw std::domain_error("kernel: t must be positive");
    KernelValue<T> k;
    for (Eigen::Index j = 0; j < spec.count(); ++j)
        k.value += std::exp(-spec.lambda(j) * t) * (spec.phi_at(j, x) * spec.phi_at(j, y));
    k.tail_bound = truncation_tail(spec, t);
    if (!(k.tail_bound <= rel_tol * abs(k.value)))
        throw TruncationError("kernel: t too small for the truncation level J");
    return k;
}

template <class T>
SpectralBound weyl_check(const SpectralDecomposition<T>& spec, double n)
{
    SpectralBound b;
    b.name = "weyl";
    b.count = int(spec.count());
    const double R2 = double(spec.radius * spec.radius);
    b.c_low = std::numeric_limits<double>::infinity();
    bool nondecreasing = true;
    for (Eigen::Index i = 0; i < spec.count(); ++i) {
        double j = double(i + 1);
        double l = double(spec.lambda(i)) * R2;
        b.c_low = std::min(b.c_low, l / std::pow(j, 1 / n));
        b.c_high = std::max(b.c_high, l / (j * j));
        if (i > 0 && spec.lambda(i) < spec.lambda(i - 1)) nondecreasing = false;
    }
    b.pass = nondecreasing && std::isfinite(b.c_low) && std::isfinite(b.c_high) && b.c_low > 0 &&
             b.c_high > 0;
    return b;
}

template <class T>
SpectralBound linf_check(const SpectralDecomposition<T>& spec, double n)
{
    SpectralBound b;
    b.name = "linf";
    b.count = int(spec.count());
    for (Eigen::Index i = 0; i < spec.count(); ++i)
        b.c_high = std::max(b.c_high, double(spec.sup_phi(i)) / std::pow(double(i + 1), n / 2));
    b.pass = std::isfinite(b.c_high) && b.c_high > 0;
    return b;
}

template <class T>
SpectralBound gradient_bound_check(const SpectralDecomposition<T>& spec)
{
    SpectralBound b;
    b.name = "gradient";
    b.count = int(spec.count());
    const double half = double(spec.radius) / 2;
    for (Eigen::Index j = 0; j < spec.count(); ++j) {
        double scale = (1 / half + double(spec.lambda(j))) * double(spec.sup_phi(j));
        for (Eigen::Index i = 0; i + 1 < spec.r.size(); ++i) {
            if ((spec.r(i) + spec.r(i + 1)) / 2 > half) break;
            double g = std::abs(double((spec.phi(i + 1, j) - spec.phi(i, j)) / (spec.r(i + 1) - spec.r(i))));
            b.c_high = std::max(b.c_high, g / scale);
        }
    }
    b.pass = std::isfinite(b.c_high) && b.c_high > 0;
    return b;
}

template <class T>
T annulus_mass(const SpectralDecomposition<T>& spec, Eigen::Index j, T delta)
{
    using std::max;
    using std::min;
    if (j < 0 || j >= spec.count()) throw std::out_of_range("annulus_mass: index out of range");
    const T R = spec.radius;
    const T lo = max(T(0), T(R - delta));
    const Eigen::Index n = spec.r.size() - 1;
    T acc = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        T a = i == 0 ? T(0) : T((spec.r(i - 1) + spec.r(i)) / 2);
        T b = (spec.r(i) + spec.r(i + 1)) / 2;
        if (b <= lo) continue;
        T part = i == 0 && lo <= 0 ? spec.weights(i)
                                   : T(spec.volume(b) - spec.volume(max(a, lo)));
        T frac = min(T(1), part / spec.weights(i));
        acc += frac * spec.weights(i) * spec.phi(i, j) * spec.phi(i, j);
    }
    return acc;
}

template <class T>
GlobalCompareReport global_compare(const RadialSpace<T>& space, const std::vector<T>& radii, T t,
                                   const GlobalCompareConfig& cfg)
{
    using std::exp;
    using std::pow;
    if (radii.empty()) throw std::invalid_argument("global_compare: no radii");
    for (std::size_t k = 1; k < radii.size(); ++k)
        if (radii[k] < radii[k - 1]) throw std::invalid_argument("global_compare: radii must not decrease");
    const double n = space.dimension();
    GlobalCompareReport rep;
    rep.global_exact = bool(space.exact_kernel);

    std::function<T(T)> global;
    HeatField<T> field;
    if (space.exact_kernel) {
        global = [&](T x) { return space.exact_kernel(x, t); };
    } else {
        field = kernel_field(space, t, cfg.solver);
        global = [&](T x) {
            const Vec<T>& r = field.r;
            auto it = std::upper_bound(r.data(), r.data() + r.size(), x);
            Eigen::Index i = std::clamp<Eigen::Index>(it - r.data() - 1, 0, r.size() - 2);
            T w = (x - r(i)) / (r(i + 1) - r(i));
            return (1 - w) * field.u[0](i) + w * field.u[0](i + 1);
        };
    }
    const T h0 = global(T(0));

    std::vector<Vec<T>> cols;
    std::vector<Vec<T>> xs;
    for (T R : radii) {
        int cells = std::max(8, int(std::lround(double(R) / cfg.spacing)));
        SpectralDecomposition<T> coarse = eigensolve(space, R, cfg.count, cells);
        Vec<T> col = kernel_column(coarse, T(0), t);
        if (cfg.richardson) {
            SpectralDecomposition<T> fine = eigensolve(space, R, cfg.count, 2 * cells);
            Vec<T> cf = kernel_column(fine, T(0), t);
            Vec<T> ext(col.size());
            for (Eigen::Index i = 0; i < col.size(); ++i) ext(i) = (4 * cf(2 * i) - col(i)) / 3;
            rep.noise_floor = std::max(rep.noise_floor, double(std::abs(ext(0) - cf(0))));
            col = ext;
        }
        GlobalCompareRow row;
        row.radius = double(R);
        row.h_ball = double(col(0));
        row.h_global = double(h0);
        row.diff0 = double(h0 - col(0));
        for (Eigen::Index i = 0; i < col.size(); ++i)
            row.diff_sup = std::max(row.diff_sup, double(global(coarse.r(i)) - col(i)));
        row.gauss = double(exp(-R * R / (5 * t)));
        row.envelope = std::max(row.gauss, double(pow(R, -T(n))));
        rep.rows.push_back(row);
        cols.push_back(std::move(col));
        xs.push_back(coarse.r);
    }

    // pointwise ordering on the shared nodes of the smaller ball, then against H
    auto violate = [&](double v) {
        rep.worst_violation = std::max(rep.worst_violation, v);
        if (v > cfg.monotone_tol) rep.monotone = false;
    };
    for (std::size_t k = 0; k + 1 < cols.size(); ++k) {
        const Eigen::Index m = cols[k].size();
        for (Eigen::Index i = 0; i < m && i < cols[k + 1].size(); ++i)
            violate(double((cols[k](i) - cols[k + 1](i)) / h0));
    }
    for (Eigen::Index i = 0; i < cols.back().size(); ++i)
        violate(double((cols.back()(i) - global(xs.back()(i))) / h0));

    const auto& first = rep.rows.front();
    const double c0 = first.diff_sup / first.gauss;
    for (const auto& row : rep.rows) {
        rep.fitted_c = std::max(rep.fitted_c, row.diff_sup / row.envelope);
        rep.fitted_c_gauss = std::max(rep.fitted_c_gauss, row.diff_sup / row.gauss);
        if (row.diff_sup > c0 * row.gauss * (1 + 1e-9) + rep.noise_floor) rep.decay_consistent = false;
    }
    return rep;
}

template struct SpectralDecomposition<double>;
template SpectralDecomposition<double> eigensolve<double>(const RadialSpace<double>&, double, int,
                                                          int);
template KernelValue<double> kernel<double>(const SpectralDecomposition<double>&, double, double,
                                            double, double);
template Vec<double> kernel_column<double>(const SpectralDecomposition<double>&, double, double);
template double truncation_tail<double>(const SpectralDecomposition<double>&, double);
template SpectralBound weyl_check<double>(const SpectralDecomposition<double>&, double);
template SpectralBound linf_check<double>(const SpectralDecomposition<double>&, double);
template SpectralBound gradient_bound_check<double>(const SpectralDecomposition<double>&);
template double annulus_mass<double>(const SpectralDecomposition<double>&, Eigen::Index, double);
template GlobalCompareReport global_compare<double>(const RadialSpace<double>&,
                                                    const std::vector<double>&, double,
                                                    const GlobalCompareConfig&);
template struct SpectralDecomposition<long double>;
template SpectralDecomposition<long double> eigensolve<long double>(const RadialSpace<long double>&, long double, int,
                                                          int);
template KernelValue<long double> kernel<long double>(const SpectralDecomposition<long double>&, long double, long double,
                                            long double, double);
template Vec<long double> kernel_column<long double>(const SpectralDecomposition<long double>&, long double, long double);
template long double truncation_tail<long double>(const SpectralDecomposition<long double>&, long double);
template SpectralBound weyl_check<long double>(const SpectralDecomposition<long double>&, double);
template SpectralBound linf_check<long double>(const SpectralDecomposition<long double>&, double);
template SpectralBound gradient_bound_check<long double>(const SpectralDecomposition<long double>&);
template long double annulus_mass<long double>(const SpectralDecomposition<long double>&, Eigen::Index, long double);
template GlobalCompareReport global_compare<long double>(const RadialSpace<long double>&,
                                                    const std::vector<long double>&, long double,
                                                    const GlobalCompareConfig&);

} // namespace warpheat
