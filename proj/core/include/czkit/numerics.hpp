#ifndef CZKIT_NUMERICS_HPP_
#define CZKIT_NUMERICS_HPP_

#include <Eigen/Dense>
#include <limits>

namespace czkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Factors of M = U * diag(S) * V^T, singular values sorted descending.
struct SvdResult {
    Matrix U;
    Vector S;
    Matrix V;
};

SvdResult svd(const Matrix& M);

/// Number of singular values above tol * sigma_max. Zero matrix has rank 0.
int rank_of(const Matrix& M, double tol = 1e-9);

/// min objective^T x  s.t.  eq_lhs x = eq_rhs,  lower <= x <= upper.
/// Bounds may be +-infinity.
struct LpProblem {
    Vector objective;
    Matrix eq_lhs;
    Vector eq_rhs;
    Vector lower;
    Vector upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Vector point;
    /// Equality-constraint multipliers, valid when status == Optimal:
    /// d(value)/d(eq_rhs_i) = dual(i).
    Vector dual;
};

/// Bounded-variable primal simplex with Bland's rule. Deterministic.
/// Throws std::invalid_argument on dimension mismatch.
LpResult solve_lp(const LpProblem& p);

}  // namespace czkit

#endif
