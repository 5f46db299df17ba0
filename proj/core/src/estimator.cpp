#include "czkit/estimator.hpp"

#include <random>
#include <stdexcept>

namespace czkit {

void DescriptorModel::check() const {
    const int nn = n();
    auto expect = [](const Matrix& M, int r, int c, const char* name) {
        if (M.rows() != r || M.cols() != c) {
            throw std::invalid_argument(std::string("DescriptorModel: bad shape for ") + name);
        }
        if (!M.allFinite()) {
            throw std::invalid_argument(std::string("DescriptorModel: non-finite entries in ") + name);
        }
    };
    expect(A, nn, nn, "A");
    expect(B, nn, n_u(), "B");
    expect(Bw, nn, n_w(), "Bw");
    expect(C, n_y(), nn, "C");
    expect(D, n_y(), n_u(), "D");
    expect(Dv, n_y(), n_v(), "Dv");
    if (E.rows() != nn || E.cols() != nn) {
        throw std::invalid_argument("DescriptorModel: E must be square");
    }
}

SvdTransform decompose(const DescriptorModel& m, double tol) {
    m.check();
    const int n = m.n();
    const SvdResult e = svd(m.E);
    const int nz = rank_of(m.E, tol);

    SvdTransform t;
    t.n_z = nz;
    // T = (V^T)^{-1} = V since V is orthogonal.
    t.T = e.V;
    t.Tinv = e.V.transpose();
    t.SigmaTilde = Matrix(e.S.head(nz).asDiagonal());

    // blkdiag(SigmaTilde^{-1}, I) U^{-1} applied to A T, B, Bw.
    Matrix scale = Matrix::Identity(n, n);
    for (int i = 0; i < nz; ++i) scale(i, i) = 1.0 / e.S(i);
    const Matrix Uinv = e.U.transpose();
    const Matrix At = scale * Uinv * m.A * t.T;
    const Matrix Bt = scale * Uinv * m.B;
    const Matrix Bwt = scale * Uinv * m.Bw;
    t.Atilde = At.topRows(nz);
    t.Acheck = At.bottomRows(n - nz);
    t.Btilde = Bt.topRows(nz);
    t.Bcheck = Bt.bottomRows(n - nz);
    t.BwTilde = Bwt.topRows(nz);
    t.BwCheck = Bwt.bottomRows(n - nz);
    return t;
}

namespace {

/// (y - D u) + (-Dv) V, the output-consistent set intersected against C T z.
ConstrainedZonotope measurement_set(const DescriptorModel& m, const UncertaintyBounds& bounds,
                                    const Vector& u, const Vector& y) {
    ConstrainedZonotope Y = linear_map(-m.Dv, bounds.V);
    Y.c += y - m.D * u;
    return Y;
}

}  // namespace

ConstrainedZonotope initial_set(const DescriptorModel& m, const SvdTransform& t,
                                const UncertaintyBounds& bounds, const Vector& u0,
                                const Vector& y0) {
    // Xhat_0 = {x in X0 : C x + D u0 + Dv v = y0, v in V}.
    const ConstrainedZonotope Xhat0 =
        generalized_intersection(bounds.X0, m.C, measurement_set(m, bounds, u0, y0));
    const ConstrainedZonotope Z0 = linear_map(t.Tinv, Xhat0);

    // Append w_0 columns and the time-0 static constraint row.
    const ConstrainedZonotope& W = bounds.W;
    const int g0 = Z0.num_generators(), gw = W.num_generators();
    const int c0 = Z0.num_constraints(), cw = W.num_constraints();
    const int ns = m.n() - t.n_z;

    ConstrainedZonotope out;
    out.c = Z0.c;
    out.G = Matrix::Zero(m.n(), g0 + gw);
    out.G.leftCols(g0) = Z0.G;
    out.A = Matrix::Zero(c0 + cw + ns, g0 + gw);
    out.A.topLeftCorner(c0, g0) = Z0.A;
    out.A.block(c0, g0, cw, gw) = W.A;
    out.A.bottomLeftCorner(ns, g0) = t.Acheck * Z0.G;
    out.A.bottomRightCorner(ns, gw) = t.BwCheck * W.G;
    out.b.resize(c0 + cw + ns);
    out.b.head(c0) = Z0.b;
    out.b.segment(c0, cw) = W.b;
    out.b.tail(ns) = -t.Acheck * Z0.c - t.BwCheck * W.c - t.Bcheck * u0;

    if (is_empty(out)) {
        throw std::runtime_error("initial_set: measurement inconsistent with priors");
    }
    return out;
}

ConstrainedZonotope predict(const ConstrainedZonotope& Zhat_prev, const SvdTransform& t,
                            const UncertaintyBounds& bounds, const Vector& u_prev,
                            const Vector& u_now) {
    const int n = static_cast<int>(t.T.rows());
    const int nz = t.n_z;
    const int ns = n - nz;
    const ConstrainedZonotope& W = bounds.W;
    const ConstrainedZonotope Za = linear_map(t.Tinv, bounds.Xa);
    const Matrix Ga_check = Za.G.bottomRows(ns);
    const Vector ca_check = Za.c.tail(ns);

    const int gh = Zhat_prev.num_generators(), gw = W.num_generators(), ga = Za.num_generators();
    const int ch = Zhat_prev.num_constraints(), cw = W.num_constraints(), ca = Za.num_constraints();

    const Matrix AG = t.Atilde * Zhat_prev.G;  // n_z x gh
    const Matrix BwGw = t.BwTilde * W.G;       // n_z x gw
    const Vector c_dyn = t.Atilde * Zhat_prev.c + t.Btilde * u_prev + t.BwTilde * W.c;

    ConstrainedZonotope out;
    out.c.resize(n);
    out.c.head(nz) = c_dyn;
    out.c.tail(ns) = ca_check;

    // Factor blocks: [xi_{k-1}, delta_{k-1}, xi_a, delta_k].
    out.G = Matrix::Zero(n, gh + gw + ga + gw);
    out.G.topLeftCorner(nz, gh) = AG;
    out.G.block(0, gh, nz, gw) = BwGw;
    out.G.block(nz, gh + gw, ns, ga) = Ga_check;

    const Matrix Acheck_dyn = t.Acheck.leftCols(nz);    // acts on the dynamic rows
    const Matrix Acheck_stat = t.Acheck.rightCols(ns);  // acts on the static rows

    out.A = Matrix::Zero(ch + cw + ca + cw + ns, gh + gw + ga + gw);
    out.A.topLeftCorner(ch, gh) = Zhat_prev.A;
    out.A.block(ch, gh, cw, gw) = W.A;
    out.A.block(ch + cw, gh + gw, ca, ga) = Za.A;
    out.A.block(ch + cw + ca, gh + gw + ga, cw, gw) = W.A;
    const int rs = ch + cw + ca + cw;  // static rows, shifted to time k
    out.A.block(rs, 0, ns, gh) = Acheck_dyn * AG;
    out.A.block(rs, gh, ns, gw) = Acheck_dyn * BwGw;
    out.A.block(rs, gh + gw, ns, ga) = Acheck_stat * Ga_check;
    out.A.block(rs, gh + gw + ga, ns, gw) = t.BwCheck * W.G;

    out.b.resize(ch + cw + ca + cw + ns);
    out.b.head(ch) = Zhat_prev.b;
    out.b.segment(ch, cw) = W.b;
    out.b.segment(ch + cw, ca) = Za.b;
    out.b.segment(ch + cw + ca, cw) = W.b;
    out.b.tail(ns) = -t.Acheck * out.c - t.Bcheck * u_now - t.BwCheck * W.c;
    return out;
}

ConstrainedZonotope update(const ConstrainedZonotope& Zbar, const SvdTransform& t,
                           const DescriptorModel& m, const UncertaintyBounds& bounds,
                           const Vector& u_now, const Vector& y_now) {
    return generalized_intersection(Zbar, m.C * t.T, measurement_set(m, bounds, u_now, y_now));
}

EstimatorState make_initial_state(const DescriptorModel& m, const SvdTransform& t,
                                  const UncertaintyBounds& bounds, const Vector& u0,
                                  const Vector& y0, const ReductionLimits& lim) {
    EstimatorState s;
    s.k = 0;
    s.Zhat = reduce(initial_set(m, t, bounds, u0, y0), lim);
    s.Xhat = linear_map(t.T, s.Zhat);
    return s;
}

EstimatorState step(const EstimatorState& state, const SvdTransform& t,
                    const DescriptorModel& m, const UncertaintyBounds& bounds,
                    const Vector& u_prev, const Vector& u_now, const Vector& y_now,
                    const ReductionLimits& lim) {
    const ConstrainedZonotope Zbar = predict(state.Zhat, t, bounds, u_prev, u_now);
    ConstrainedZonotope Zhat = update(Zbar, t, m, bounds, u_now, y_now);
    if (is_empty(Zhat)) {
        throw std::runtime_error("step: empty update (measurement inconsistent with bounds)");
    }
    EstimatorState next;
    next.k = state.k + 1;
    next.Zhat = reduce(Zhat, lim);
    next.Xhat = linear_map(t.T, next.Zhat);
    return next;
}

Trajectory simulate_truth(const DescriptorModel& m, const SvdTransform& t,
                          const UncertaintyBounds& bounds, const Vector& x0,
                          const std::vector<Vector>& useq, int horizon, std::uint64_t seed) {
    const int n = m.n();
    const int nz = t.n_z;
    const int ns = n - nz;
    if (static_cast<int>(useq.size()) < horizon + 1) {
        throw std::invalid_argument("simulate_truth: input sequence shorter than horizon + 1");
    }

    Eigen::FullPivLU<Matrix> stat_lu;
    if (ns > 0) {
        stat_lu.compute(t.Acheck.rightCols(ns));
        if (!stat_lu.isInvertible()) {
            throw std::runtime_error(
                "simulate_truth: static block of Acheck is singular; the static components are "
                "not uniquely determined by the dynamic ones (regularity violated)");
        }
    }

    std::mt19937_64 rng(seed);
    auto solve_static = [&](const Vector& z_dyn, const Vector& u, const Vector& w) -> Vector {
        if (ns == 0) return Vector::Zero(0);
        const Vector rhs =
            -(t.Acheck.leftCols(nz) * z_dyn + t.Bcheck * u + t.BwCheck * w);
        return stat_lu.solve(rhs);
    };

    Trajectory traj;
    traj.states.reserve(horizon + 1);
    traj.outputs.reserve(horizon + 1);

    Vector z(n);
    const Vector z_dyn0 = (t.Tinv * x0).head(nz);
    Vector w = sample_point(bounds.W, rng);
    z.head(nz) = z_dyn0;
    z.tail(ns) = solve_static(z_dyn0, useq[0], w);
    for (int k = 0; k <= horizon; ++k) {
        if (k > 0) {
            const Vector z_dyn_next = t.Atilde * z + t.Btilde * useq[k - 1] + t.BwTilde * w;
            w = sample_point(bounds.W, rng);
            z.head(nz) = z_dyn_next;
            z.tail(ns) = solve_static(z_dyn_next, useq[k], w);
        }
        const Vector v = sample_point(bounds.V, rng);
        traj.states.push_back(t.T * z);
        traj.outputs.push_back(m.C * t.T * z + m.D * useq[k] + m.Dv * v);
    }
    return traj;
}

ConstrainedZonotope relax_to_zonotope(const ConstrainedZonotope& Z, int max_generators) {
    ConstrainedZonotope out = drop_zero_generators(Z);
    while (out.num_constraints() > 0) {
        out = eliminate_constraint(out);
    }
    if (out.num_generators() > max_generators) {
        out = reduce_generators(out, max_generators);
    }
    return out;
}

EstimatorState zonotope_baseline_step(const EstimatorState& state, const SvdTransform& t,
                                      const DescriptorModel& m, const UncertaintyBounds& bounds,
                                      const Vector& u_prev, const Vector& u_now,
                                      const Vector& y_now, const ReductionLimits& lim) {
    EstimatorState next = step(state, t, m, bounds, u_prev, u_now, y_now, lim);
    next.Zhat = relax_to_zonotope(next.Zhat, lim.max_generators);
    next.Xhat = linear_map(t.T, next.Zhat);
    return next;
}

}  // namespace czkit
