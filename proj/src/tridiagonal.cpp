#include "warpheat/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpheat {

template <class T>
Vec<T> thomas_solve(const Vec<T>& sub, const Vec<T>& diag, const Vec<T>& sup, const Vec<T>& rhs)
{
    using std::abs;
    const Eigen::Index n = diag.size();
    if (sub.size() != n || sup.size() != n || rhs.size() != n)
        throw std::invalid_argument("thomas_solve: size mismatch");
    Vec<T> c(n), x(n);
    T piv = diag(0);
    if (piv == 0) throw SolverFailure("thomas_solve: zero pivot");
    c(0) = sup(0) / piv;
    x(0) = rhs(0) / piv;
    for (Eigen::Index i = 1; i < n; ++i) {
        piv = diag(i) - sub(i) * c(i - 1);
        if (piv == 0 || !std::isfinite(double(piv))) throw SolverFailure("thomas_solve: zero pivot");
        c(i) = i + 1 < n ? sup(i) / piv : T(0);
        x(i) = (rhs(i) - sub(i) * x(i - 1)) / piv;
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c(i) * x(i + 1);
    return x;
}

template <class T>
Eigen::Index SymTridiagonal<T>::count_below(T x) const
{
    // LDL^T pivots of (A - x I); the count of negative pivots is the Sturm count
    const Eigen::Index n = d.size();
    const T tiny = std::numeric_limits<T>::min() / std::numeric_limits<T>::epsilon();
    Eigen::Index count = 0;
    T q = d(0) - x;
    if (q < 0) ++count;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (q == 0) q = tiny;
        q = d(i) - x - e(i - 1) * e(i - 1) / q;
        if (q < 0) ++count;
    }
    return count;
}

template <class T>
T SymTridiagonal<T>::eigenvalue(Eigen::Index k, T rel_tol) const
{
    using std::abs;
    using std::max;
    const Eigen::Index n = d.size();
    if (k < 0 || k >= n) throw std::out_of_range("eigenvalue: index out of range");
    // Gershgorin interval
    T lo = d(0), hi = d(0);
    for (Eigen::Index i = 0; i < n; ++i) {
        T rad = (i > 0 ? abs(e(i - 1)) : T(0)) + (i + 1 < n ? abs(e(i)) : T(0));
        lo = std::min(lo, T(d(i) - rad));
        hi = max(hi, T(d(i) + rad));
    }
    const T abs_floor = std::numeric_limits<T>::epsilon() * max(abs(lo), abs(hi));
    for (int it = 0; it < 400; ++it) {
        T mid = (lo + hi) / 2;
        if (count_below(mid) > k) hi = mid;
        else lo = mid;
        if (hi - lo <= max(rel_tol * max(abs(lo), abs(hi)), abs_floor)) break;
    }
    return (lo + hi) / 2;
}

template <class T>
Vec<T> SymTridiagonal<T>::eigenvector(T lambda) const
{
    const Eigen::Index n = d.size();
    // shift slightly off the eigenvalue so the factorization stays regular
    T scale = std::max(std::abs(lambda), T(1));
    T shift = lambda - scale * T(1e-13);
    Vec<T> sub(n), dia(n), sup(n);
    sub(0) = 0;
    sup(n - 1) = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        dia(i) = d(i) - shift;
        if (i > 0) sub(i) = e(i - 1);
        if (i + 1 < n) sup(i) = e(i);
    }
    Vec<T> v = Vec<T>::Ones(n) / std::sqrt(T(n));
    for (int it = 0; it < 4; ++it) {
        v = thomas_solve<T>(sub, dia, sup, v);
        v.normalize();
    }
    // fix the sign so the vector is positive at the first entry
    if (v(0) < 0) v = -v;
    return v;
}

template Vec<double> thomas_solve<double>(const Vec<double>&, const Vec<double>&,
                                          const Vec<double>&, const Vec<double>&);
template struct SymTridiagonal<double>;
template Vec<long double> thomas_solve<long double>(const Vec<long double>&, const Vec<long double>&,
                                          const Vec<long double>&, const Vec<long double>&);
template struct SymTridiagonal<long double>;

} // namespace warpheat
