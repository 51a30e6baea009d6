#pragma once

// Symmetric and general tridiagonal kernels: Thomas elimination for the
// implicit time steps, Sturm bisection plus inverse iteration for the lowest
// eigenpairs of the symmetrized Sturm-Liouville matrix.

#include <Eigen/Core>

#include <stdexcept>

namespace warpheat {

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Solves sub(i) x(i-1) + diag(i) x(i) + sup(i) x(i+1) = rhs(i); sub(0) and
// sup(n-1) are ignored. Throws on a vanishing pivot.
template <class T>
Vec<T> thomas_solve(const Vec<T>& sub, const Vec<T>& diag, const Vec<T>& sup, const Vec<T>& rhs);

// Symmetric tridiagonal matrix: diagonal d, off-diagonal e (size n-1).
template <class T>
struct SymTridiagonal {
    Vec<T> d, e;

    Eigen::Index size() const { return d.size(); }
    // number of eigenvalues strictly below x
    Eigen::Index count_below(T x) const;
    // k-th smallest eigenvalue (k = 0, 1, ...) by bisection
    T eigenvalue(Eigen::Index k, T rel_tol = T(4e-16)) const;
    // unit eigenvector for an accurate eigenvalue, by inverse iteration
    Vec<T> eigenvector(T lambda) const;
};

extern template Vec<double> thomas_solve<double>(const Vec<double>&, const Vec<double>&,
                                                 const Vec<double>&, const Vec<double>&);
extern template struct SymTridiagonal<double>;
extern template Vec<long double> thomas_solve<long double>(const Vec<long double>&, const Vec<long double>&,
                                                 const Vec<long double>&, const Vec<long double>&);
extern template struct SymTridiagonal<long double>;

} // namespace warpheat
