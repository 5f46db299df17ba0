#include "czkit/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace czkit {

ReductionLimits ReductionLimits::unlimited() {
    return {std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
}

ConstrainedZonotope eliminate_constraint(const ConstrainedZonotope& Z) {
    const int nc = Z.num_constraints();
    const int ng = Z.num_generators();
    if (nc == 0) throw std::invalid_argument("eliminate_constraint: set has no constraints");

    // Pick (row r, factor j): solving row r for xi_j gives
    //   xi_j = (b_r - sum_{l != j} A_rl xi_l) / A_rj,
    // whose interval range over the factor box is mid +- rad. Substitution is
    // exact when that range stays inside [-1, 1]; otherwise the enclosure
    // grows roughly by the excess times the dropped generator's length.
    int best_r = -1, best_j = -1;
    double best_score = kInf;
    for (int r = 0; r < nc; ++r) {
        const double row_max = Z.A.row(r).cwiseAbs().maxCoeff();
        if (row_max <= 0.0) continue;
        for (int j = 0; j < ng; ++j) {
            const double a = Z.A(r, j);
            if (std::abs(a) < 1e-10 * row_max) continue;
            const double mid = Z.b(r) / a;
            double rad = 0.0;
            for (int l = 0; l < ng; ++l) {
                if (l != j) rad += std::abs(Z.A(r, l) / a);
            }
            const double excess = std::max(0.0, std::abs(mid) + rad - 1.0);
            const double score = excess * Z.G.col(j).norm();
            if (score < best_score - 1e-15) {
                best_score = score;
                best_r = r;
                best_j = j;
            }
        }
    }

    if (best_r < 0) {
        // Every remaining row is numerically zero: drop one consistent row.
        ConstrainedZonotope out = Z;
        Matrix A(nc - 1, ng);
        Vector b(nc - 1);
        int k = 0;
        for (int r = 0; r < nc; ++r) {
            if (r == 0) continue;
            A.row(k) = Z.A.row(r);
            b(k) = Z.b(r);
            ++k;
        }
        out.A = A;
        out.b = b;
        return out;
    }

    const int r = best_r, j = best_j;
    const double inv = 1.0 / Z.A(r, j);
    ConstrainedZonotope out;
    out.c = Z.c + Z.G.col(j) * (Z.b(r) * inv);
    out.G.resize(Z.dim(), ng - 1);
    out.A.resize(nc - 1, ng - 1);
    out.b.resize(nc - 1);
    int col = 0;
    for (int l = 0; l < ng; ++l) {
        if (l == j) continue;
        out.G.col(col) = Z.G.col(l) - Z.G.col(j) * (Z.A(r, l) * inv);
        int row = 0;
        for (int s = 0; s < nc; ++s) {
            if (s == r) continue;
            out.A(row, col) = Z.A(s, l) - Z.A(s, j) * (Z.A(r, l) * inv);
            ++row;
        }
        ++col;
    }
    int row = 0;
    for (int s = 0; s < nc; ++s) {
        if (s == r) continue;
        out.b(row) = Z.b(s) - Z.A(s, j) * (Z.b(r) * inv);
        ++row;
    }
    return out;
}

namespace {

Matrix drop_column(const Matrix& G, int r) {
    Matrix out(G.rows(), G.cols() - 1);
    out.leftCols(r) = G.leftCols(r);
    out.rightCols(G.cols() - 1 - r) = G.rightCols(G.cols() - 1 - r);
    return out;
}

// Absorb column r into the rest: with Ghat x = g_r, every point
// Ghat xi + g_r xi_r equals Ghat (xi + x xi_r), so scaling column i of Ghat
// by 1 + |x_i| yields an enclosure. x is chosen by an LP minimizing the added
// segment lengths sum_i |x_i| * ||ghat_i||. Returns false if g_r is outside
// the range of Ghat.
bool absorb_column(const Matrix& G, int r, Matrix& out) {
    const Matrix Ghat = drop_column(G, r);
    const int n = static_cast<int>(G.rows());
    const int m = static_cast<int>(Ghat.cols());

    LpProblem lp;  // variables: x+ then x-
    lp.objective.resize(2 * m);
    for (int i = 0; i < m; ++i) {
        const double w = std::max(Ghat.col(i).norm(), 1e-12);
        lp.objective(i) = w;
        lp.objective(m + i) = w;
    }
    lp.eq_lhs.resize(n, 2 * m);
    lp.eq_lhs.leftCols(m) = Ghat;
    lp.eq_lhs.rightCols(m) = -Ghat;
    lp.eq_rhs = G.col(r);
    lp.lower = Vector::Zero(2 * m);
    lp.upper = Vector::Constant(2 * m, kInf);
    LpResult res;
    try {
        res = solve_lp(lp);
    } catch (const std::runtime_error&) {
        return false;  // numerically hopeless column: let the caller box instead
    }
    if (res.status != LpStatus::Optimal) return false;

    // The enclosure argument needs Ghat x = g_r to hold essentially exactly;
    // a sloppy LP solution would silently shave points off the set.
    const Vector xnet = res.point.head(m) - res.point.tail(m);
    const double err = (Ghat * xnet - G.col(r)).cwiseAbs().maxCoeff();
    if (err > 1e-9 * (1.0 + G.col(r).cwiseAbs().maxCoeff())) return false;

    out = Ghat;
    for (int i = 0; i < m; ++i) {
        out.col(i) *= 1.0 + std::abs(xnet(i));
    }
    return true;
}

// Plain-zonotope generator reduction: repeatedly remove the shortest
// generator, redistributing it onto the remaining ones. Falls back to boxing
// the shortest generators into axis-aligned ones when no generator can be
// redistributed (rank-deficient remainder).
Matrix reduce_zonotope_generators(Matrix G, int target) {
    const int n = static_cast<int>(G.rows());
    while (static_cast<int>(G.cols()) > target) {
        const int ng = static_cast<int>(G.cols());
        std::vector<int> order(ng);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return G.col(a).squaredNorm() < G.col(b).squaredNorm();
        });
        bool removed = false;
        Matrix next;
        for (int r : order) {
            if (absorb_column(G, r, next)) {
                G = std::move(next);
                removed = true;
                break;
            }
        }
        if (removed) continue;

        // Fallback: box the shortest generators into n axis-aligned columns.
        const int keep = std::max(target - n, 0);
        Matrix out(n, keep + n);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return G.col(a).squaredNorm() > G.col(b).squaredNorm();
        });
        for (int k = 0; k < keep; ++k) out.col(k) = G.col(order[k]);
        Vector boxed = Vector::Zero(n);
        for (int k = keep; k < ng; ++k) boxed += G.col(order[k]).cwiseAbs();
        out.rightCols(n) = Matrix(boxed.asDiagonal());
        return out;
    }
    return G;
}

}  // namespace

ConstrainedZonotope reduce_generators(const ConstrainedZonotope& Z, int target) {
    if (Z.num_generators() <= target) return Z;
    const int nc = Z.num_constraints();
    if (nc == 0) {
        if (target < Z.dim()) throw std::invalid_argument("reduce_generators: target below dimension");
        ConstrainedZonotope out = Z;
        out.G = reduce_zonotope_generators(Z.G, target);
        out.A = Matrix::Zero(0, out.G.cols());
        return out;
    }

    // Reduce the lifted zonotope {[G; A], [c; -b]} and split back.
    const int n = Z.dim();
    if (target < n + nc) throw std::invalid_argument("reduce_generators: target below lifted dimension");
    Matrix lift(n + nc, Z.num_generators());
    lift << Z.G, Z.A;
    const Matrix red = reduce_zonotope_generators(lift, target);
    ConstrainedZonotope out;
    out.G = red.topRows(n);
    out.c = Z.c;
    out.A = red.bottomRows(nc);
    out.b = Z.b;
    return out;
}

ConstrainedZonotope drop_zero_generators(const ConstrainedZonotope& Z) {
    const int ng = Z.num_generators();
    std::vector<int> keep;
    keep.reserve(ng);
    for (int j = 0; j < ng; ++j) {
        if (Z.G.col(j).cwiseAbs().maxCoeff() > 0.0 ||
            (Z.num_constraints() > 0 && Z.A.col(j).cwiseAbs().maxCoeff() > 0.0)) {
            keep.push_back(j);
        }
    }
    if (static_cast<int>(keep.size()) == ng) return Z;
    ConstrainedZonotope out;
    out.c = Z.c;
    out.b = Z.b;
    out.G.resize(Z.dim(), keep.size());
    out.A.resize(Z.num_constraints(), keep.size());
    for (size_t k = 0; k < keep.size(); ++k) {
        out.G.col(k) = Z.G.col(keep[k]);
        if (Z.num_constraints() > 0) out.A.col(k) = Z.A.col(keep[k]);
    }
    return out;
}

ConstrainedZonotope reduce(const ConstrainedZonotope& Z, const ReductionLimits& lim) {
    if (Z.num_generators() <= lim.max_generators && Z.num_constraints() <= lim.max_constraints) {
        return Z;
    }
    ConstrainedZonotope out = drop_zero_generators(Z);
    while (out.num_constraints() > lim.max_constraints) {
        out = eliminate_constraint(out);
    }
    if (out.num_generators() > lim.max_generators) {
        out = reduce_generators(out, lim.max_generators);
    }
    return out;
}

}  // namespace czkit
