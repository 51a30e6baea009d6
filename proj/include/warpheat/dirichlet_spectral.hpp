#pragma once

// Dirichlet eigenpairs of -(A phi')' = lambda A phi on B(R) with the same
// lumped finite-volume discretization as the heat solver. The generalized
// problem K phi = lambda M phi is symmetrized as M^-1/2 K M^-1/2, so the
// eigenvectors are exactly M-orthonormal.

#include "warpheat/radial_heat.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace warpheat {

class TruncationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

template <class T = double>
struct SpectralDecomposition {
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

    T radius = 0;
    double dimension = 0;   // n in the Weyl and sup-norm growth bounds
    Vec<T> r;               // nodes 0 .. N, r_N = R carries phi = 0
    Vec<T> weights;         // cell volumes
    Vec<T> lambda;          // J eigenvalues, increasing
    Mat phi;                // (N+1) x J, columns M-orthonormal
    std::function<T(T)> volume;

    Eigen::Index count() const { return lambda.size(); }
    T sup_phi(Eigen::Index j) const { return phi.col(j).cwiseAbs().maxCoeff(); }
    // phi_j at radius x by linear interpolation between nodes
    T phi_at(Eigen::Index j, T x) const;
    // sum_k M phi_j phi_k - delta_jk, max abs entry
    T orthonormality_residual() const;
};

template <class T = double>
SpectralDecomposition<T> eigensolve(const RadialSpace<T>& space, T radius, int count, int cells);

template <class T = double>
struct KernelValue {
    T value = 0;
    T tail_bound = 0;   // bound on the omitted terms j > J
};

// sum_j exp(-lambda_j t) phi_j(x) phi_j(y); throws TruncationError when the
// tail bound exceeds rel_tol * |value|.
template <class T = double>
KernelValue<T> kernel(const SpectralDecomposition<T>& spec, T x, T y, T t, double rel_tol = 1e-6);

// x -> H_R(x, y, t) on the decomposition's nodes
template <class T = double>
Vec<T> kernel_column(const SpectralDecomposition<T>& spec, T y, T t);

// Tail bound: sum_{j>J} exp(-lambda_J (j/J)^{2/n} t) (c j^{n/2})^2 with c from linf_check.
template <class T = double>
T truncation_tail(const SpectralDecomposition<T>& spec, T t);

struct SpectralBound {
    std::string name;
    double c_low = 0;    // fitted lower constant (Weyl lower bound only)
    double c_high = 0;   // fitted upper constant
    bool pass = false;   // constants finite and positive, plus the check's own side conditions
    int count = 0;
};

// c1 R^-2 j^{1/n} <= lambda_j <= c2 R^-2 j^2
template <class T = double>
SpectralBound weyl_check(const SpectralDecomposition<T>& spec, double n);

// sup |phi_j| <= c j^{n/2}
template <class T = double>
SpectralBound linf_check(const SpectralDecomposition<T>& spec, double n);

// |phi_j'(x)| <= c (r^-1 + lambda_j) sup_{B(2r)} |phi_j| for x in B(r), 2r = R
template <class T = double>
SpectralBound gradient_bound_check(const SpectralDecomposition<T>& spec);

// int_{R - delta}^{R} phi_j^2 dV, cells split in proportion to volume
template <class T = double>
T annulus_mass(const SpectralDecomposition<T>& spec, Eigen::Index j, T delta);

struct GlobalCompareConfig {
    int count = 64;          // eigenpairs per ball
    double spacing = 0.002;  // grid spacing h shared by every radius
    bool richardson = true;  // combine h and h/2 as (4 H_{h/2} - H_h) / 3
    double monotone_tol = 1e-10;  // relative slack for the pointwise ordering
    SolverConfig solver;     // global kernel when no closed form exists
};

struct GlobalCompareRow {
    double radius = 0;
    double h_ball = 0;       // H_R(0, 0, t)
    double h_global = 0;     // H(0, 0, t)
    double diff0 = 0;        // (H - H_R)(0, 0, t)
    double diff_sup = 0;     // sup_x (H - H_R)(x, 0, t) over the ball's nodes
    double envelope = 0;     // max(exp(-R^2/5t), R^-n)
    double gauss = 0;        // exp(-R^2/5t)
};

struct GlobalCompareReport {
    std::vector<GlobalCompareRow> rows;
    bool monotone = true;         // H_R1 <= H_R2 <= H pointwise
    double worst_violation = 0;   // largest relative ordering violation
    double fitted_c = 0;          // max diff_sup / envelope
    double fitted_c_gauss = 0;    // max diff_sup / exp(-R^2/5t)
    bool decay_consistent = true; // diff_sup(R) <= c_0 exp(-R^2/5t) + noise with c_0 from the first R
    double noise_floor = 0;       // estimated discretization error of H_R
    bool global_exact = false;    // H from a closed form rather than the solver
};

template <class T = double>
GlobalCompareReport global_compare(const RadialSpace<T>& space, const std::vector<T>& radii, T t,
                                   const GlobalCompareConfig& cfg);

extern template struct SpectralDecomposition<double>;
extern template SpectralDecomposition<double> eigensolve<double>(const RadialSpace<double>&, double,
                                                                 int, int);
extern template KernelValue<double> kernel<double>(const SpectralDecomposition<double>&, double,
                                                   double, double, double);
extern template Vec<double> kernel_column<double>(const SpectralDecomposition<double>&, double,
                                                  double);
extern template double truncation_tail<double>(const SpectralDecomposition<double>&, double);
extern template SpectralBound weyl_check<double>(const SpectralDecomposition<double>&, double);
extern template SpectralBound linf_check<double>(const SpectralDecomposition<double>&, double);
extern template SpectralBound gradient_bound_check<double>(const SpectralDecomposition<double>&);
extern template double annulus_mass<double>(const SpectralDecomposition<double>&, Eigen::Index,
                                            double);
extern template GlobalCompareReport global_compare<double>(const RadialSpace<double>&,
                                                           const std::vector<double>&, double,
                                                           const GlobalCompareConfig&);
extern template struct SpectralDecomposition<long double>;
extern template SpectralDecomposition<long double> eigensolve<long double>(const RadialSpace<long double>&, long double,
                                                                 int, int);
extern template KernelValue<long double> kernel<long double>(const SpectralDecomposition<long double>&, long double,
                                                   long double, long double, double);
extern template Vec<long double> kernel_column<long double>(const SpectralDecomposition<long double>&, long double,
                                                  long double);
extern template long double truncation_tail<long double>(const SpectralDecomposition<long double>&, long double);
extern template SpectralBound weyl_check<long double>(const SpectralDecomposition<long double>&, double);
extern template SpectralBound linf_check<long double>(const SpectralDecomposition<long double>&, double);
extern template SpectralBound gradient_bound_check<long double>(const SpectralDecomposition<long double>&);
extern template long double annulus_mass<long double>(const SpectralDecomposition<long double>&, Eigen::Index,
                                            long double);
extern template GlobalCompareReport global_compare<long double>(const RadialSpace<long double>&,
                                                           const std::vector<long double>&, long double,
                                                           const GlobalCompareConfig&);

} // namespace warpheat
