#include "czkit/setops.hpp"

#include <cmath>
#include <stdexcept>

namespace czkit {

namespace {

LpProblem xi_problem(const ConstrainedZonotope& Z, const Vector& objective, double slack) {
    const int ng = Z.num_generators();
    LpProblem p;
    p.objective = objective;
    p.eq_lhs = Z.A;
    p.eq_rhs = Z.b;
    p.lower = Vector::Constant(ng, -1.0 - slack);
    p.upper = Vector::Constant(ng, 1.0 + slack);
    return p;
}

}  // namespace

ConstrainedZonotope ConstrainedZonotope::point(const Vector& p) {
    ConstrainedZonotope z;
    z.G = Matrix::Zero(p.size(), 0);
    z.c = p;
    z.A = Matrix::Zero(0, 0);
    z.b = Vector::Zero(0);
    return z;
}

ConstrainedZonotope ConstrainedZonotope::zonotope(const Matrix& G, const Vector& c) {
    ConstrainedZonotope z;
    z.G = G;
    z.c = c;
    z.A = Matrix::Zero(0, G.cols());
    z.b = Vector::Zero(0);
    z.check();
    return z;
}

ConstrainedZonotope ConstrainedZonotope::box(const Vector& lower, const Vector& upper) {
    const int n = static_cast<int>(lower.size());
    if (upper.size() != n) throw std::invalid_argument("box: bound size mismatch");
    ConstrainedZonotope z;
    z.c = 0.5 * (lower + upper);
    z.G = Matrix(((upper - lower) / 2.0).asDiagonal());
    z.A = Matrix::Zero(0, n);
    z.b = Vector::Zero(0);
    return z;
}

void ConstrainedZonotope::check() const {
    if (G.rows() != c.size()) throw std::invalid_argument("ConstrainedZonotope: G rows != c size");
    if (A.rows() != b.size()) throw std::invalid_argument("ConstrainedZonotope: A rows != b size");
    if (A.rows() > 0 && A.cols() != G.cols()) {
        throw std::invalid_argument("ConstrainedZonotope: A cols != G cols");
    }
    if (!G.allFinite() || !c.allFinite() || !A.allFinite() || !b.allFinite()) {
        throw std::invalid_argument("ConstrainedZonotope: non-finite entries");
    }
}

ConstrainedZonotope linear_map(const Matrix& R, const ConstrainedZonotope& Z) {
    if (R.cols() != Z.dim()) throw std::invalid_argument("linear_map: dimension mismatch");
    ConstrainedZonotope out;
    out.G = R * Z.G;
    out.c = R * Z.c;
    out.A = Z.A;
    out.b = Z.b;
    return out;
}

ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& Z, const ConstrainedZonotope& W) {
    if (Z.dim() != W.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
    const int gz = Z.num_generators(), gw = W.num_generators();
    const int cz = Z.num_constraints(), cw = W.num_constraints();
    ConstrainedZonotope out;
    out.G.resize(Z.dim(), gz + gw);
    out.G << Z.G, W.G;
    out.c = Z.c + W.c;
    out.A = Matrix::Zero(cz + cw, gz + gw);
    out.A.topLeftCorner(cz, gz) = Z.A;
    out.A.bottomRightCorner(cw, gw) = W.A;
    out.b.resize(cz + cw);
    out.b << Z.b, W.b;
    return out;
}

ConstrainedZonotope generalized_intersection(const ConstrainedZonotope& Z, const Matrix& R,
                                             const ConstrainedZonotope& Y) {
    if (R.cols() != Z.dim() || R.rows() != Y.dim()) {
        throw std::invalid_argument("generalized_intersection: dimension mismatch");
    }
    const int gz = Z.num_generators(), gy = Y.num_generators();
    const int cz = Z.num_constraints(), cy = Y.num_constraints();
    ConstrainedZonotope out;
    out.G = Matrix::Zero(Z.dim(), gz + gy);
    out.G.leftCols(gz) = Z.G;
    out.c = Z.c;
    out.A = Matrix::Zero(cz + cy + Y.dim(), gz + gy);
    out.A.topLeftCorner(cz, gz) = Z.A;
    out.A.block(cz, gz, cy, gy) = Y.A;
    out.A.bottomLeftCorner(Y.dim(), gz) = R * Z.G;
    out.A.bottomRightCorner(Y.dim(), gy) = -Y.G;
    out.b.resize(cz + cy + Y.dim());
    out.b << Z.b, Y.b, Y.c - R * Z.c;
    return out;
}

ConstrainedZonotope cartesian_product(const ConstrainedZonotope& Z, const ConstrainedZonotope& W) {
    const int n = Z.dim() + W.dim();
    const int gz = Z.num_generators(), gw = W.num_generators();
    const int cz = Z.num_constraints(), cw = W.num_constraints();
    ConstrainedZonotope out;
    out.G = Matrix::Zero(n, gz + gw);
    out.G.topLeftCorner(Z.dim(), gz) = Z.G;
    out.G.bottomRightCorner(W.dim(), gw) = W.G;
    out.c.resize(n);
    out.c << Z.c, W.c;
    out.A = Matrix::Zero(cz + cw, gz + gw);
    out.A.topLeftCorner(cz, gz) = Z.A;
    out.A.bottomRightCorner(cw, gw) = W.A;
    out.b.resize(cz + cw);
    out.b << Z.b, W.b;
    return out;
}

bool contains_point(const ConstrainedZonotope& Z, const Vector& p, double tol) {
    if (p.size() != Z.dim()) throw std::invalid_argument("contains_point: dimension mismatch");
    const int ng = Z.num_generators();
    LpProblem lp;
    lp.objective = Vector::Zero(ng);
    lp.eq_lhs = Matrix(Z.dim() + Z.num_constraints(), ng);
    lp.eq_lhs << Z.G, Z.A;
    lp.eq_rhs = Vector(Z.dim() + Z.num_constraints());
    lp.eq_rhs << p - Z.c, Z.b;
    lp.lower = Vector::Constant(ng, -1.0 - tol);
    lp.upper = Vector::Constant(ng, 1.0 + tol);
    return solve_lp(lp).status == LpStatus::Optimal;
}

bool is_empty(const ConstrainedZonotope& Z, double tol) {
    if (Z.num_constraints() == 0) return false;
    const LpProblem lp = xi_problem(Z, Vector::Zero(Z.num_generators()), tol);
    return solve_lp(lp).status != LpStatus::Optimal;
}

IntervalBox interval_hull(const ConstrainedZonotope& Z) {
    IntervalBox box;
    box.lower.resize(Z.dim());
    box.upper.resize(Z.dim());
    for (int i = 0; i < Z.dim(); ++i) {
        const Vector g = Z.G.row(i).transpose();
        const LpResult lo = solve_lp(xi_problem(Z, g, 0.0));
        const LpResult hi = solve_lp(xi_problem(Z, -g, 0.0));
        if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal) {
            throw std::runtime_error("interval_hull: empty constrained zonotope");
        }
        box.lower(i) = Z.c(i) + lo.value;
        box.upper(i) = Z.c(i) - hi.value;
    }
    return box;
}

double radius(const ConstrainedZonotope& Z) {
    const IntervalBox h = interval_hull(Z);
    return 0.5 * (h.upper - h.lower).maxCoeff();
}

double support(const ConstrainedZonotope& Z, const Vector& dir) {
    if (dir.size() != Z.dim()) throw std::invalid_argument("support: dimension mismatch");
    const Vector g = Z.G.transpose() * dir;
    const LpResult r = solve_lp(xi_problem(Z, -g, 0.0));
    if (r.status != LpStatus::Optimal) throw std::runtime_error("support: empty constrained zonotope");
    return dir.dot(Z.c) - r.value;
}

Vector support_point(const ConstrainedZonotope& Z, const Vector& dir) {
    if (dir.size() != Z.dim()) throw std::invalid_argument("support_point: dimension mismatch");
    const Vector g = Z.G.transpose() * dir;
    const LpResult r = solve_lp(xi_problem(Z, -g, 0.0));
    if (r.status != LpStatus::Optimal) throw std::runtime_error("support_point: empty constrained zonotope");
    return Z.c + Z.G * r.point;
}

VolumeEstimate mc_volume(const ConstrainedZonotope& Z, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("mc_volume: samples must be >= 1");
    const IntervalBox h = interval_hull(Z);
    double hull_vol = 1.0;
    for (int i = 0; i < Z.dim(); ++i) hull_vol *= h.upper(i) - h.lower(i);
    if (hull_vol <= 0.0) return {0.0, 0.0};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int hits = 0;
    Vector p(Z.dim());
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < Z.dim(); ++i) {
            p(i) = h.lower(i) + (h.upper(i) - h.lower(i)) * unit(rng);
        }
        if (contains_point(Z, p)) ++hits;
    }
    const double frac = static_cast<double>(hits) / samples;
    VolumeEstimate v;
    v.estimate = hull_vol * frac;
    v.std_error = hull_vol * std::sqrt(frac * (1.0 - frac) / samples);
    return v;
}

namespace {

// Hit-and-run state for the xi-slice {A xi = b, ||xi||_inf <= 1}.
struct SliceSampler {
    Vector xi;
    Matrix null_basis;  // columns span ker(A)

    explicit SliceSampler(const ConstrainedZonotope& Z) {
        const int ng = Z.num_generators();
        const LpResult feas = solve_lp(xi_problem(Z, Vector::Zero(ng), 0.0));
        if (feas.status != LpStatus::Optimal) {
            throw std::runtime_error("sample_points: empty constrained zonotope");
        }
        xi = feas.point;
        if (Z.num_constraints() == 0) {
            null_basis = Matrix::Identity(ng, ng);
        } else {
            Eigen::FullPivLU<Matrix> lu(Z.A);
            null_basis = lu.kernel();
            if (lu.dimensionOfKernel() == 0) null_basis = Matrix::Zero(ng, 0);
        }
    }

    void step(std::mt19937_64& rng) {
        if (null_basis.cols() == 0) return;  // unique feasible point
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector g(null_basis.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = gauss(rng);
        Vector d = null_basis * g;
        const double nd = d.norm();
        if (nd < 1e-14) return;
        d /= nd;
        double tlo = -kInf, thi = kInf;
        for (Eigen::Index i = 0; i < xi.size(); ++i) {
            if (std::abs(d(i)) < 1e-14) continue;
            const double a = (-1.0 - xi(i)) / d(i);
            const double b = (1.0 - xi(i)) / d(i);
            tlo = std::max(tlo, std::min(a, b));
            thi = std::min(thi, std::max(a, b));
        }
        if (!(thi > tlo)) return;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        xi += (tlo + (thi - tlo) * unit(rng)) * d;
        xi = xi.cwiseMax(-1.0).cwiseMin(1.0);
    }
};

}  // namespace

Vector sample_point(const ConstrainedZonotope& Z, std::mt19937_64& rng) {
    if (Z.num_constraints() == 0) {
        std::uniform_real_distribution<double> sym(-1.0, 1.0);
        Vector xi(Z.num_generators());
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = sym(rng);
        return Z.c + Z.G * xi;
    }
    SliceSampler s(Z);
    for (int i = 0; i < 20 + 4 * Z.num_generators(); ++i) s.step(rng);
    return Z.c + Z.G * s.xi;
}

std::vector<Vector> sample_points(const ConstrainedZonotope& Z, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Vector> out;
    out.reserve(count);
    if (Z.num_constraints() == 0) {
        std::uniform_real_distribution<double> sym(-1.0, 1.0);
        Vector xi(Z.num_generators());
        for (int s = 0; s < count; ++s) {
            for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = sym(rng);
            out.push_back(Z.c + Z.G * xi);
        }
        return out;
    }
    SliceSampler s(Z);
    for (int i = 0; i < 50 + 4 * Z.num_generators(); ++i) s.step(rng);
    for (int k = 0; k < count; ++k) {
        for (int i = 0; i < 5; ++i) s.step(rng);
        out.push_back(Z.c + Z.G * s.xi);
    }
    return out;
}

}  // namespace czkit
