#include "czkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace czkit {

SvdResult svd(const Matrix& M) {
    if (!M.allFinite()) {
        throw std::invalid_argument("svd: matrix has non-finite entries");
    }
    Eigen::JacobiSVD<Matrix> dec(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdResult r;
    r.U = dec.matrixU();
    r.S = dec.singularValues();
    r.V = dec.matrixV();
    // Eigen pads the singular value vector only up to min(rows, cols); the
    // reconstruction below expects exactly that length, which is what we get.
    const double scale = M.rows() == 0 || M.cols() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
    const Matrix rec = r.U.leftCols(r.S.size()) * r.S.asDiagonal() * r.V.leftCols(r.S.size()).transpose();
    if ((rec - M).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + scale)) {
        throw std::runtime_error("svd: reconstruction check failed (non-convergence)");
    }
    return r;
}

int rank_of(const Matrix& M, double tol) {
    if (tol <= 0.0) {
        throw std::invalid_argument("rank_of: tol must be positive");
    }
    if (M.rows() == 0 || M.cols() == 0) return 0;
    const Vector s = svd(M).S;
    const double smax = s.size() > 0 ? s(0) : 0.0;
    if (smax == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol * smax) ++r;
    }
    return r;
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;
constexpr int kMaxIter = 200000;

// Column-oriented view of the working problem: structural columns 0..n-1,
// artificial columns n..n+m-1 (signed unit columns).
struct Tableau {
    const Matrix* A;         // m x n structural part
    std::vector<double> art_sign;  // m artificial column signs
    int n, m;

    Vector col(int j) const {
        if (j < n) return A->col(j);
        Vector e = Vector::Zero(m);
        e(j - n) = art_sign[j - n];
        return e;
    }
    double col_dot(const Vector& y, int j) const {
        if (j < n) return y.dot(A->col(j));
        return y(j - n) * art_sign[j - n];
    }
};

}  // namespace

LpResult solve_lp(const LpProblem& p) {
    const int n = static_cast<int>(p.objective.size());
    const int m = static_cast<int>(p.eq_lhs.rows());
    if (p.eq_lhs.cols() != n && !(m == 0 && p.eq_lhs.cols() == 0)) {
        throw std::invalid_argument("solve_lp: eq_lhs column count mismatch");
    }
    if (static_cast<int>(p.eq_rhs.size()) != m) {
        throw std::invalid_argument("solve_lp: eq_rhs size mismatch");
    }
    if (static_cast<int>(p.lower.size()) != n || static_cast<int>(p.upper.size()) != n) {
        throw std::invalid_argument("solve_lp: bound size mismatch");
    }

    LpResult res;
    for (int j = 0; j < n; ++j) {
        if (p.lower(j) > p.upper(j)) {
            res.status = LpStatus::Infeasible;
            return res;
        }
    }

    // No equality rows: optimize each variable against its own bounds.
    if (m == 0) {
        Vector x(n);
        double val = 0.0;
        for (int j = 0; j < n; ++j) {
            const double c = p.objective(j);
            if (c > kCostTol) {
                if (std::isinf(p.lower(j))) { res.status = LpStatus::Unbounded; return res; }
                x(j) = p.lower(j);
            } else if (c < -kCostTol) {
                if (std::isinf(p.upper(j))) { res.status = LpStatus::Unbounded; return res; }
                x(j) = p.upper(j);
            } else {
                x(j) = std::isfinite(p.lower(j)) ? p.lower(j)
                     : std::isfinite(p.upper(j)) ? p.upper(j) : 0.0;
            }
            val += c * x(j);
        }
        res.status = LpStatus::Optimal;
        res.value = val;
        res.point = x;
        res.dual = Vector::Zero(0);
        return res;
    }

    // Row equilibration: unit inf-norm rows keep pivot/cost tolerances
    // meaningful when constraint scales differ by orders of magnitude. The
    // duals are rescaled back on exit.
    Matrix As = p.eq_lhs;
    Vector bs = p.eq_rhs;
    Vector row_scale = Vector::Ones(m);
    for (int i = 0; i < m; ++i) {
        const double s = As.row(i).cwiseAbs().maxCoeff();
        if (s > 0.0) {
            row_scale(i) = 1.0 / s;
            As.row(i) *= row_scale(i);
            bs(i) *= row_scale(i);
        }
    }

    const int total = n + m;
    Tableau tab{&As, {}, n, m};
    tab.art_sign.assign(m, 1.0);

    // Bounds for all columns; artificials get [0, inf) in phase 1, then [0, 0].
    Vector lo(total), hi(total);
    lo.head(n) = p.lower;
    hi.head(n) = p.upper;
    lo.tail(m).setZero();
    hi.tail(m).setConstant(kInf);

    // Nonbasic start values: nearest finite bound (0 for free columns).
    std::vector<char> basic(total, 0);
    Vector nbval = Vector::Zero(total);
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(lo(j))) nbval(j) = lo(j);
        else if (std::isfinite(hi(j))) nbval(j) = hi(j);
        else nbval(j) = 0.0;
    }

    Vector r = bs - As * nbval.head(n);
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        tab.art_sign[i] = (r(i) >= 0.0) ? 1.0 : -1.0;
        basis[i] = n + i;
        basic[n + i] = 1;
    }

    Vector cost = Vector::Zero(total);
    cost.tail(m).setOnes();  // phase 1
    int phase = 1;

    Eigen::FullPivLU<Matrix> lu;
    Matrix B(m, m);
    auto refactor = [&]() {
        for (int i = 0; i < m; ++i) B.col(i) = tab.col(basis[i]);
        lu.compute(B);
    };
    refactor();

    Vector xB(m);
    auto compute_xB = [&]() {
        Vector rhs = bs;
        for (int j = 0; j < total; ++j) {
            if (!basic[j] && nbval(j) != 0.0) rhs -= tab.col(j) * nbval(j);
        }
        xB = lu.solve(rhs);
        // One step of iterative refinement keeps the basic solution accurate
        // even when the basis is moderately ill-conditioned.
        xB += lu.solve(rhs - B * xB);
    };
    compute_xB();

    Vector y(m);
    int iter = 0;
    int degen_streak = 0;  // consecutive (near-)zero-length steps
    const double feas_tol = 1e-8 * (1.0 + bs.cwiseAbs().maxCoeff());

    while (true) {
        if (++iter > kMaxIter) {
            throw std::runtime_error("solve_lp: iteration limit exceeded");
        }
        // Duals and reduced costs.
        Vector cB(m);
        for (int i = 0; i < m; ++i) cB(i) = cost(basis[i]);
        y = lu.transpose().solve(cB);
        const Vector y_res = cB - B.transpose() * y;
        const Vector y_fix = lu.transpose().solve(y_res);
        y += y_fix;
        const double dtol = kCostTol * (1.0 + y.cwiseAbs().maxCoeff());

        // Entering column: Dantzig (most attractive reduced cost) for speed
        // and numerical quality; after a long degenerate streak switch to
        // Bland's rule (first eligible index), which excludes cycling.
        const bool bland = degen_streak > 40;
        struct Candidate {
            int j;
            int dir;
            double score;
        };
        std::vector<Candidate> cands;
        for (int j = 0; j < total; ++j) {
            if (basic[j]) continue;
            if (lo(j) == hi(j)) continue;  // fixed column can never improve
            const double d = cost(j) - tab.col_dot(y, j);
            if (d < -dtol && nbval(j) < hi(j)) cands.push_back({j, +1, -d});
            else if (d > dtol && nbval(j) > lo(j)) cands.push_back({j, -1, d});
            if (bland && !cands.empty()) break;
        }
        if (!bland) {
            std::stable_sort(cands.begin(), cands.end(),
                             [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
        }

        // Pivot admission: first insist on a comfortably sized leaving pivot
        // (it keeps the basis well-conditioned); only if no candidate can
        // progress that way, fall back to anything above the bare tolerance.
        bool progressed = false;
        for (const double min_pivot : {1e-7, kPivotTol}) {
        for (const Candidate& cand : cands) {
            const int enter = cand.j;
            const int dir = cand.dir;
            const Vector w = lu.solve(tab.col(enter));

            // Ratio test: entering moves by t*dir from nbval(enter); basic i
            // moves at rate -dir*w(i). Ties are broken by the largest pivot
            // magnitude (smallest basis index under Bland's rule).
            const double t_own = (dir > 0)
                ? (std::isfinite(hi(enter)) ? hi(enter) - nbval(enter) : kInf)
                : (std::isfinite(lo(enter)) ? nbval(enter) - lo(enter) : kInf);
            double t_best = t_own;
            int leave = -1;         // index into basis, -1 means bound flip
            double leave_to = 0.0;  // bound the leaving variable lands on
            for (int i = 0; i < m; ++i) {
                const double rate = -dir * w(i);
                double t, lim;
                if (rate < -kPivotTol) {
                    lim = lo(basis[i]);
                    if (std::isinf(lim)) continue;
                    t = (xB(i) - lim) / (-rate);
                } else if (rate > kPivotTol) {
                    lim = hi(basis[i]);
                    if (std::isinf(lim)) continue;
                    t = (lim - xB(i)) / rate;
                } else {
                    continue;
                }
                t = std::max(t, 0.0);
                const double window = 1e-12 + 1e-9 * t;
                if (t < t_best - window) {
                    t_best = t;
                    leave = i;
                    leave_to = lim;
                } else if (t <= t_best + window && leave >= 0) {
                    const bool better = bland ? basis[i] < basis[leave]
                                              : std::abs(w(i)) > std::abs(w(leave));
                    if (better) {
                        leave = i;
                        leave_to = lim;
                    }
                } else if (t <= t_best + window && leave < 0 && t < t_own) {
                    leave = i;
                    leave_to = lim;
                }
            }

            if (std::isinf(t_best)) {
                if (phase == 1) continue;  // skip the inconsistent column
                res.status = LpStatus::Unbounded;
                return res;
            }
            if (leave >= 0 && std::abs(w(leave)) < min_pivot) continue;

            if (leave < 0) {
                // Bound flip: entering variable crosses to its opposite bound.
                nbval(enter) += dir * t_best;
            } else {
                const int out = basis[leave];
                basic[out] = 0;
                nbval(out) = leave_to;
                basis[leave] = enter;
                basic[enter] = 1;
                refactor();
            }
            compute_xB();
            degen_streak = (t_best > 1e-10) ? 0 : degen_streak + 1;
            progressed = true;
            break;
        }
        if (progressed) break;
        }
        if (progressed) continue;

        // Optimal for the current phase.
        if (phase == 1) {
            double infeas = 0.0;
            for (int i = 0; i < m; ++i) {
                if (basis[i] >= n) infeas += std::abs(xB(i));
            }
            if (infeas > feas_tol) {
                res.status = LpStatus::Infeasible;
                return res;
            }
            // Pin artificials and switch costs.
            for (int i = 0; i < m; ++i) hi(n + i) = 0.0;
            for (int j = n; j < total; ++j) nbval(j) = 0.0;
            cost.setZero();
            cost.head(n) = p.objective;
            phase = 2;
            compute_xB();
            continue;
        }

        Vector x(n);
        for (int j = 0; j < n; ++j) x(j) = basic[j] ? 0.0 : nbval(j);
        for (int i = 0; i < m; ++i) {
            if (basis[i] < n) x(basis[i]) = xB(i);
        }
        // Verify the claimed optimum: a near-singular basis can corrupt the
        // solves silently, so never report an infeasible point as optimal.
        const double resid = (As * x - bs).cwiseAbs().maxCoeff();
        bool in_bounds = true;
        for (int j = 0; j < n; ++j) {
            const double slack = 1e-7 * (1.0 + std::abs(x(j)));
            if (x(j) < p.lower(j) - slack || x(j) > p.upper(j) + slack) in_bounds = false;
        }
        if (resid > 100.0 * feas_tol || !in_bounds) {
            throw std::runtime_error("solve_lp: solution failed verification (ill-conditioned basis)");
        }
        // Clamp residual bound violations so the reported optimum never
        // overshoots what any feasible point could achieve.
        for (int j = 0; j < n; ++j) x(j) = std::min(std::max(x(j), p.lower(j)), p.upper(j));
        res.status = LpStatus::Optimal;
        res.point = x;
        res.value = p.objective.dot(x);
        res.dual = (y.array() * row_scale.array()).matrix();
        return res;
    }
}

}  // namespace czkit
