#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "czkit/numerics.hpp"
#include "helpers.hpp"

using czkit::kInf;
using czkit::LpProblem;
using czkit::LpResult;
using czkit::LpStatus;
using czkit::Matrix;
using czkit::Vector;

namespace {

Matrix diag3(double a, double b, double c) {
    Vector d(3);
    d << a, b, c;
    return Matrix(d.asDiagonal());
}

bool is_orthogonal(const Matrix& Q) {
    return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff() < 1e-9;
}

}  // namespace

TEST_CASE("svd of a singular diagonal matrix") {
    const Matrix E = diag3(1, 1, 0);
    const czkit::SvdResult r = czkit::svd(E);
    REQUIRE(r.S.size() == 3);
    CHECK(r.S(0) == doctest::Approx(1.0));
    CHECK(r.S(1) == doctest::Approx(1.0));
    CHECK(r.S(2) == doctest::Approx(0.0));
    CHECK(is_orthogonal(r.U));
    CHECK(is_orthogonal(r.V));
    const Matrix rec = r.U * r.S.asDiagonal() * r.V.transpose();
    CHECK((rec - E).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(czkit::rank_of(E) == 2);
}

TEST_CASE("svd reconstructs random matrices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 5);
        const int c = 1 + static_cast<int>(rng() % 5);
        const Matrix M = czt::random_matrix(rng, r, c, 3.0);
        const czkit::SvdResult s = czkit::svd(M);
        CHECK(is_orthogonal(s.U));
        CHECK(is_orthogonal(s.V));
        const Matrix rec =
            s.U.leftCols(s.S.size()) * s.S.asDiagonal() * s.V.leftCols(s.S.size()).transpose();
        CHECK((rec - M).cwiseAbs().maxCoeff() < 1e-9);
        for (Eigen::Index i = 0; i + 1 < s.S.size(); ++i) CHECK(s.S(i) >= s.S(i + 1));
    }
}

TEST_CASE("svd rejects non-finite input") {
    Matrix M = Matrix::Zero(2, 2);
    M(0, 0) = std::nan("");
    CHECK_THROWS_AS(czkit::svd(M), std::invalid_argument);
}

TEST_CASE("rank_of") {
    CHECK(czkit::rank_of(Matrix::Zero(3, 3)) == 0);
    CHECK(czkit::rank_of(Matrix::Identity(4, 4)) == 4);
    std::mt19937_64 rng(3);
    const Vector u = czt::random_vector(rng, 4), v = czt::random_vector(rng, 3);
    CHECK(czkit::rank_of(u * v.transpose()) == 1);
    CHECK_THROWS_AS(czkit::rank_of(Matrix::Identity(2, 2), 0.0), std::invalid_argument);
}

TEST_CASE("lp without equality rows optimizes against bounds") {
    LpProblem p;
    p.objective = Vector::Ones(1);
    p.eq_lhs = Matrix::Zero(0, 1);
    p.eq_rhs = Vector::Zero(0);
    p.lower = Vector::Constant(1, -1.0);
    p.upper = Vector::Constant(1, 2.0);
    const LpResult r = czkit::solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(-1.0));
    CHECK(r.point(0) == doctest::Approx(-1.0));
}

TEST_CASE("lp simple equality problem with dual") {
    LpProblem p;
    p.objective = Vector::Ones(2);
    p.eq_lhs = Matrix::Ones(1, 2);
    p.eq_rhs = Vector::Ones(1);
    p.lower = Vector::Zero(2);
    p.upper = Vector::Ones(2);
    const LpResult r = czkit::solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(1.0));
    // d(value)/d(rhs) = 1: raising the sum requirement costs one unit.
    CHECK(r.dual(0) == doctest::Approx(1.0));
}

TEST_CASE("lp infeasible and unbounded detection") {
    LpProblem p;
    p.objective = Vector::Zero(1);
    p.eq_lhs = Matrix::Ones(1, 1);
    p.eq_rhs = Vector::Constant(1, 2.0);
    p.lower = Vector::Zero(1);
    p.upper = Vector::Ones(1);
    CHECK(czkit::solve_lp(p).status == LpStatus::Infeasible);

    LpProblem q;
    q.objective = Vector::Constant(1, -1.0);
    q.eq_lhs = Matrix::Zero(0, 1);
    q.eq_rhs = Vector::Zero(0);
    q.lower = Vector::Zero(1);
    q.upper = Vector::Constant(1, kInf);
    CHECK(czkit::solve_lp(q).status == LpStatus::Unbounded);

    LpProblem s;  // min -x, x - y = 0, x,y >= 0
    s.objective = Vector::Zero(2);
    s.objective(0) = -1.0;
    s.eq_lhs = Matrix::Zero(1, 2);
    s.eq_lhs(0, 0) = 1.0;
    s.eq_lhs(0, 1) = -1.0;
    s.eq_rhs = Vector::Zero(1);
    s.lower = Vector::Zero(2);
    s.upper = Vector::Constant(2, kInf);
    CHECK(czkit::solve_lp(s).status == LpStatus::Unbounded);
}

TEST_CASE("lp inflation margin hand case") {
    // min delta s.t. xi = 2, |xi| <= 1 + delta, written with slack rows:
    // xi - delta + s1 = 1, -xi - delta + s2 = 1. Expected margin: 1.
    LpProblem p;
    p.objective = Vector::Zero(4);
    p.objective(1) = 1.0;
    p.eq_lhs = Matrix::Zero(3, 4);
    p.eq_lhs(0, 0) = 1.0;
    p.eq_lhs(1, 0) = 1.0;
    p.eq_lhs(1, 1) = -1.0;
    p.eq_lhs(1, 2) = 1.0;
    p.eq_lhs(2, 0) = -1.0;
    p.eq_lhs(2, 1) = -1.0;
    p.eq_lhs(2, 3) = 1.0;
    p.eq_rhs.resize(3);
    p.eq_rhs << 2.0, 1.0, 1.0;
    p.lower.resize(4);
    p.lower << -kInf, -1.0, 0.0, 0.0;
    p.upper = Vector::Constant(4, kInf);
    const LpResult r = czkit::solve_lp(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.point(0) == doctest::Approx(2.0));
}

namespace {

// Exact optimum by vertex enumeration: fix n - m variables at bounds, solve
// the remaining square system, keep feasible candidates.
double enumerate_optimum(const LpProblem& p) {
    const int n = static_cast<int>(p.objective.size());
    const int m = static_cast<int>(p.eq_lhs.rows());
    double best = kInf;
    std::vector<int> idx(n);
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (__builtin_popcount(mask) != n - m) continue;  // mask = fixed vars
        std::vector<int> fixed, rest;
        for (int j = 0; j < n; ++j) (mask >> j & 1 ? fixed : rest).push_back(j);
        for (int corners = 0; corners < (1 << (n - m)); ++corners) {
            Vector x(n);
            for (size_t t = 0; t < fixed.size(); ++t) {
                x(fixed[t]) = (corners >> t & 1) ? p.upper(fixed[t]) : p.lower(fixed[t]);
            }
            if (m > 0) {
                Matrix S(m, m);
                for (int t = 0; t < m; ++t) S.col(t) = p.eq_lhs.col(rest[t]);
                Vector rhs = p.eq_rhs;
                for (int f : fixed) rhs -= p.eq_lhs.col(f) * x(f);
                Eigen::FullPivLU<Matrix> lu(S);
                if (!lu.isInvertible()) continue;
                const Vector xr = lu.solve(rhs);
                for (int t = 0; t < m; ++t) x(rest[t]) = xr(t);
            }
            bool ok = true;
            for (int j = 0; j < n; ++j) {
                if (x(j) < p.lower(j) - 1e-9 || x(j) > p.upper(j) + 1e-9) ok = false;
            }
            if (m > 0 && (p.eq_lhs * x - p.eq_rhs).cwiseAbs().maxCoeff() > 1e-8) ok = false;
            if (ok) best = std::min(best, p.objective.dot(x));
        }
    }
    return best;
}

// Lagrangian dual bound g(y) = y^T b + sum_j min over [lo_j, up_j] of
// (c_j - (A^T y)_j) x_j; equals the optimum exactly at an optimal dual.
double dual_bound(const LpProblem& p, const Vector& y) {
    double g = y.dot(p.eq_rhs);
    const Vector rc = p.objective - p.eq_lhs.transpose() * y;
    for (int j = 0; j < static_cast<int>(rc.size()); ++j) {
        g += rc(j) >= 0.0 ? rc(j) * p.lower(j) : rc(j) * p.upper(j);
    }
    return g;
}

}  // namespace

TEST_CASE("lp agrees with vertex enumeration and strong duality") {
    std::mt19937_64 rng(11);
    int solved = 0;
    while (solved < 40) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int m = static_cast<int>(rng() % (std::min(n, 2) + 1));
        LpProblem p;
        p.objective = czt::random_vector(rng, n, 2.0);
        p.eq_lhs = czt::random_matrix(rng, m, n, 2.0);
        p.lower = czt::random_vector(rng, n, 2.0).cwiseAbs() * -1.0;
        p.upper = czt::random_vector(rng, n, 2.0).cwiseAbs();
        const Vector x0 = 0.5 * (p.lower + p.upper) +
                          0.4 * (p.upper - p.lower).cwiseProduct(czt::random_vector(rng, n, 1.0));
        p.eq_rhs = p.eq_lhs * x0;  // feasible by construction

        const LpResult r = czkit::solve_lp(p);
        REQUIRE(r.status == LpStatus::Optimal);
        const double exact = enumerate_optimum(p);
        CHECK(r.value == doctest::Approx(exact).epsilon(1e-7));
        // Primal feasibility of the returned point.
        if (m > 0) CHECK((p.eq_lhs * r.point - p.eq_rhs).cwiseAbs().maxCoeff() < 1e-7);
        for (int j = 0; j < n; ++j) {
            CHECK(r.point(j) >= p.lower(j) - 1e-9);
            CHECK(r.point(j) <= p.upper(j) + 1e-9);
        }
        // Strong duality through the Lagrangian bound.
        CHECK(std::abs(dual_bound(p, r.dual) - r.value) < 1e-6 * (1.0 + std::abs(r.value)));
        ++solved;
    }
}

TEST_CASE("lp is deterministic") {
    std::mt19937_64 rng(5);
    LpProblem p;
    p.objective = czt::random_vector(rng, 6, 1.0);
    p.eq_lhs = czt::random_matrix(rng, 2, 6, 1.0);
    p.lower = Vector::Constant(6, -1.0);
    p.upper = Vector::Constant(6, 1.0);
    p.eq_rhs = p.eq_lhs * czt::random_vector(rng, 6, 0.5);
    const LpResult a = czkit::solve_lp(p);
    const LpResult b = czkit::solve_lp(p);
    REQUIRE(a.status == LpStatus::Optimal);
    REQUIRE(b.status == LpStatus::Optimal);
    CHECK(a.value == b.value);
    CHECK((a.point - b.point).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.dual - b.dual).cwiseAbs().maxCoeff() == 0.0);
}
