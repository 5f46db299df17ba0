#include "czkit/afd.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace czkit {

void ModelBank::check() const {
    if (models.empty()) throw std::invalid_argument("ModelBank: no models");
    const DescriptorModel& first = models.front();
    for (const DescriptorModel& m : models) {
        m.check();
        if (m.n() != first.n() || m.n_u() != first.n_u() || m.n_w() != first.n_w() ||
            m.n_y() != first.n_y() || m.n_v() != first.n_v()) {
            throw std::invalid_argument("ModelBank: models disagree on dimensions");
        }
    }
    if (X0.dim() != first.n() || Xa.dim() != first.n()) {
        throw std::invalid_argument("ModelBank: X0/Xa dimension mismatch");
    }
    if (W.dim() != first.n_w()) throw std::invalid_argument("ModelBank: W dimension mismatch");
    if (V.dim() != first.n_v()) throw std::invalid_argument("ModelBank: V dimension mismatch");
    if (static_cast<int>(U_box.lower.size()) != first.n_u() ||
        static_cast<int>(U_box.upper.size()) != first.n_u()) {
        throw std::invalid_argument("ModelBank: U_box dimension mismatch");
    }
}

std::vector<AugmentedModel> augment(const ModelBank& bank, double tol) {
    bank.check();
    std::vector<AugmentedModel> out;
    out.reserve(bank.models.size());
    for (const DescriptorModel& m : bank.models) {
        const SvdTransform t = decompose(m, tol);
        AugmentedModel am;
        am.model = &m;
        am.T = t.T;
        am.Tinv = t.Tinv;
        am.n_z = t.n_z;
        am.AzTilde.resize(t.n_z, m.n() + m.n_w());
        am.AzTilde << t.Atilde, t.BwTilde;
        am.AzCheck.resize(m.n() - t.n_z, m.n() + m.n_w());
        am.AzCheck << t.Acheck, t.BwCheck;
        am.Btilde = t.Btilde;
        am.Bcheck = t.Bcheck;
        am.F = Matrix::Zero(m.n_y(), m.n() + m.n_w());
        am.F.leftCols(m.n()) = m.C * t.T;
        am.Za = cartesian_product(linear_map(t.Tinv, bank.Xa), bank.W);
        am.Z0base = cartesian_product(linear_map(t.Tinv, bank.X0), bank.W);
        out.push_back(std::move(am));
    }
    return out;
}

ConstrainedZonotope initial_feasible_set(const AugmentedModel& am, const Vector& u0) {
    const ConstrainedZonotope& Z = am.Z0base;
    const int nc = Z.num_constraints();
    const int ns = am.static_dim();
    ConstrainedZonotope out;
    out.G = Z.G;
    out.c = Z.c;
    out.A.resize(nc + ns, Z.num_generators());
    out.A.topRows(nc) = Z.A;
    out.A.bottomRows(ns) = am.AzCheck * Z.G;
    out.b.resize(nc + ns);
    out.b.head(nc) = Z.b;
    out.b.tail(ns) = -am.AzCheck * Z.c - am.Bcheck * u0;
    return out;
}

Vector InputSequence::flat() const {
    const int nu = u.empty() ? 0 : static_cast<int>(u.front().size());
    Vector f(static_cast<Eigen::Index>(u.size()) * nu);
    for (size_t k = 0; k < u.size(); ++k) f.segment(k * nu, nu) = u[k];
    return f;
}

InputSequence InputSequence::zeros(int N, int n_u) {
    InputSequence s;
    s.u.assign(N + 1, Vector::Zero(n_u));
    return s;
}

InputSequence InputSequence::from_flat(const Vector& flat, int N, int n_u) {
    if (flat.size() != static_cast<Eigen::Index>(N + 1) * n_u) {
        throw std::invalid_argument("InputSequence: flat vector has wrong length");
    }
    InputSequence s;
    s.u.reserve(N + 1);
    for (int k = 0; k <= N; ++k) s.u.push_back(flat.segment(k * n_u, n_u));
    return s;
}

ConstrainedZonotope reach_recursive(const AugmentedModel& am, const ConstrainedZonotope& Z0,
                                    const InputSequence& useq) {
    const int d = am.state_dim();
    const int nz = am.n_z;
    const int na = d - nz;  // non-dynamic components of the augmented state
    const Matrix Ga_check = am.Za.G.bottomRows(na);
    const Vector ca_check = am.Za.c.tail(na);

    ConstrainedZonotope Z = Z0;
    for (int k = 1; k <= useq.horizon(); ++k) {
        const int gp = Z.num_generators(), cp = Z.num_constraints();
        const int ga = am.Za.num_generators(), ca = am.Za.num_constraints();
        ConstrainedZonotope next;
        next.c.resize(d);
        next.c.head(nz) = am.AzTilde * Z.c + am.Btilde * useq.u[k - 1];
        next.c.tail(na) = ca_check;
        next.G = Matrix::Zero(d, gp + ga);
        next.G.topLeftCorner(nz, gp) = am.AzTilde * Z.G;
        next.G.bottomRightCorner(na, ga) = Ga_check;
        const int ns = am.static_dim();
        next.A.resize(cp + ca + ns, gp + ga);
        next.A.setZero();
        next.A.topLeftCorner(cp, gp) = Z.A;
        next.A.block(cp, gp, ca, ga) = am.Za.A;
        next.A.bottomRows(ns) = am.AzCheck * next.G;
        next.b.resize(cp + ca + ns);
        next.b.head(cp) = Z.b;
        next.b.segment(cp, ca) = am.Za.b;
        next.b.tail(ns) = -am.AzCheck * next.c - am.Bcheck * useq.u[k];
        Z = std::move(next);
    }
    return Z;
}

ReachTensors build_tensors(const AugmentedModel& am, int N) {
    const int d = am.state_dim();
    const int nz = am.n_z;
    const int na = d - nz;
    const int ns = am.static_dim();
    const int nu = static_cast<int>(am.Btilde.cols());
    const int nU = (N + 1) * nu;

    ReachTensors t;
    t.N = N;

    Matrix S = Matrix::Zero(d, d);
    S.topRows(nz) = am.AzTilde;
    Vector drift = Vector::Zero(d);
    drift.tail(na) = am.Za.c.tail(na);
    Matrix Blift = Matrix::Zero(d, nu);
    Blift.topRows(nz) = am.Btilde;

    std::vector<Matrix> Spow(N + 1);
    Spow[0] = Matrix::Identity(d, d);
    for (int k = 1; k <= N; ++k) Spow[k] = S * Spow[k - 1];

    t.H.resize(N + 1);
    t.H[0] = Matrix::Zero(d, nU);
    for (int h = 1; h <= N; ++h) {
        Matrix Hh = Matrix::Zero(d, nU);
        for (int m = 1; m <= h; ++m) {
            Hh.middleCols((m - 1) * nu, nu) = Spow[h - m] * Blift;
        }
        t.H[h] = std::move(Hh);
    }
    t.Hbar.resize((N + 1) * d, nU);
    t.Q.resize((N + 1) * d, d);
    t.p.resize((N + 1) * d);
    Vector acc = Vector::Zero(d);
    for (int l = 0; l <= N; ++l) {
        t.Hbar.middleRows(l * d, d) = t.H[l];
        t.Q.middleRows(l * d, d) = Spow[l];
        t.p.segment(l * d, d) = acc;
        if (l < N) acc += Spow[l] * drift;
    }

    // Constraint block sizes: block 0 carries the initial-set constraints,
    // blocks 1..N the admissible-set constraints, each followed by the static
    // rows shifted to that time.
    const int c0 = am.Z0base.num_constraints();
    const int ca = am.Za.num_constraints();
    const int r0 = c0 + ns;
    const int ra = ca + ns;
    const int rows = r0 + N * ra;

    t.beta = Vector::Zero(rows);
    t.beta.head(c0) = am.Z0base.b;
    t.Upsilon = Matrix::Zero(rows, (N + 1) * d);
    t.Gamma = Matrix::Zero(rows, nU);
    for (int l = 0; l <= N; ++l) {
        const int row0 = (l == 0) ? 0 : r0 + (l - 1) * ra;
        const int blk = (l == 0) ? r0 : ra;
        if (l > 0) t.beta.segment(row0, ca) = am.Za.b;
        t.Upsilon.block(row0 + blk - ns, l * d, ns, d) = -am.AzCheck;
        t.Gamma.block(row0 + blk - ns, l * nu, ns, nu) = -am.Bcheck;
    }
    t.alpha = t.beta + t.Upsilon * t.p;
    t.Lambda = t.Upsilon * t.Q;
    t.Omega = t.Gamma + t.Upsilon * t.Hbar;

    t.c_free = Spow[N] * am.Z0base.c + t.p.tail(d);
    t.b_free = t.alpha + t.Lambda * am.Z0base.c;

    // Input-independent reach blocks by the same recursion.
    Matrix G = am.Z0base.G;
    Matrix A(c0 + ns, G.cols());
    A.topRows(c0) = am.Z0base.A;
    A.bottomRows(ns) = am.AzCheck * G;
    const Matrix Ga_check = am.Za.G.bottomRows(na);
    for (int k = 1; k <= N; ++k) {
        const int gp = static_cast<int>(G.cols());
        const int cp = static_cast<int>(A.rows());
        const int ga = am.Za.num_generators();
        Matrix Gn = Matrix::Zero(d, gp + ga);
        Gn.topLeftCorner(nz, gp) = am.AzTilde * G;
        Gn.bottomRightCorner(na, ga) = Ga_check;
        Matrix An = Matrix::Zero(cp + ca + ns, gp + ga);
        An.topLeftCorner(cp, gp) = A;
        An.block(cp, gp, ca, ga) = am.Za.A;
        An.bottomRows(ns) = am.AzCheck * Gn;
        G = std::move(Gn);
        A = std::move(An);
    }
    t.G_N = std::move(G);
    t.A_N = std::move(A);
    return t;
}

ConstrainedZonotope output_reach(const AugmentedModel& am, const ConstrainedZonotope& ZN,
                                 const Vector& uN, const ConstrainedZonotope& V) {
    const DescriptorModel& m = *am.model;
    ConstrainedZonotope Y = minkowski_sum(linear_map(am.F, ZN), linear_map(m.Dv, V));
    Y.c += m.D * uN;
    return Y;
}

std::vector<SeparationProblem> separation_problems(const std::vector<AugmentedModel>& ams,
                                                   const ConstrainedZonotope& V, int N,
                                                   bool reduce_avoidance) {
    const int nm = static_cast<int>(ams.size());
    const int nu = nm > 0 ? static_cast<int>(ams.front().Btilde.cols()) : 0;
    const int nU = (N + 1) * nu;

    struct PerModel {
        ReachTensors t;
        Matrix GY, AY;
        Vector cY0, bY0;
    };
    std::vector<PerModel> pm(nm);
    for (int i = 0; i < nm; ++i) {
        const DescriptorModel& m = *ams[i].model;
        pm[i].t = build_tensors(ams[i], N);
        const int gN = static_cast<int>(pm[i].t.G_N.cols());
        const int cN = static_cast<int>(pm[i].t.A_N.rows());
        pm[i].GY.resize(m.n_y(), gN + V.num_generators());
        pm[i].GY << ams[i].F * pm[i].t.G_N, m.Dv * V.G;
        pm[i].AY = Matrix::Zero(cN + V.num_constraints(), gN + V.num_generators());
        pm[i].AY.topLeftCorner(cN, gN) = pm[i].t.A_N;
        pm[i].AY.bottomRightCorner(V.num_constraints(), V.num_generators()) = V.A;
        pm[i].cY0 = ams[i].F * pm[i].t.c_free + m.Dv * V.c;
        pm[i].bY0.resize(cN + V.num_constraints());
        pm[i].bY0.head(cN) = pm[i].t.b_free;
        pm[i].bY0.tail(V.num_constraints()) = V.b;
    }

    std::vector<SeparationProblem> out;
    for (int i = 0; i < nm; ++i) {
        for (int j = i + 1; j < nm; ++j) {
            const DescriptorModel& mi = *ams[i].model;
            const DescriptorModel& mj = *ams[j].model;
            SeparationProblem sp;
            sp.i = i;
            sp.j = j;

            const int ny = mi.n_y();
            const int rbi = static_cast<int>(pm[i].bY0.size());
            const int rbj = static_cast<int>(pm[j].bY0.size());
            sp.Nmat = Matrix::Zero(ny + rbi + rbj, nU);
            sp.Nmat.topRows(ny) = ams[j].F * pm[j].t.H[N] - ams[i].F * pm[i].t.H[N];
            sp.Nmat.block(0, N * nu, ny, nu) += mj.D - mi.D;
            sp.Nmat.block(ny, 0, pm[i].t.Omega.rows(), nU) = pm[i].t.Omega;
            sp.Nmat.block(ny + rbi, 0, pm[j].t.Omega.rows(), nU) = pm[j].t.Omega;

            const int gi = static_cast<int>(pm[i].GY.cols());
            const int gj = static_cast<int>(pm[j].GY.cols());
            const int ci = static_cast<int>(pm[i].AY.rows());
            const int cj = static_cast<int>(pm[j].AY.rows());
            Matrix Gy = Matrix::Zero(ny + ci + cj, gi + gj);
            Gy.topLeftCorner(ny, gi) = pm[i].GY;
            Gy.topRightCorner(ny, gj) = -pm[j].GY;
            Gy.block(ny, 0, ci, gi) = pm[i].AY;
            Gy.block(ny + ci, gi, cj, gj) = pm[j].AY;
            Vector cy(ny + ci + cj);
            cy.head(ny) = pm[i].cY0 - pm[j].cY0;
            cy.segment(ny, ci) = -pm[i].bY0;
            cy.tail(cj) = -pm[j].bY0;

            if (reduce_avoidance) {
                const int dim_y = static_cast<int>(Gy.rows());
                ConstrainedZonotope z = ConstrainedZonotope::zonotope(Gy, cy);
                z = reduce_generators(z, 2 * dim_y);
                Gy = z.G;
                cy = z.c;
            }
            sp.Gy = std::move(Gy);
            sp.cy = std::move(cy);
            out.push_back(std::move(sp));
        }
    }
    return out;
}

std::vector<SeparationCertificate> verify_input(const std::vector<SeparationProblem>& problems,
                                                const InputSequence& useq) {
    const Vector uflat = useq.flat();
    std::vector<SeparationCertificate> out;
    out.reserve(problems.size());
    for (const SeparationProblem& sp : problems) {
        if (sp.Nmat.cols() != uflat.size()) {
            throw std::invalid_argument("verify_input: input sequence length mismatch");
        }
        const Vector p = sp.Nmat * uflat;
        const int dy = static_cast<int>(sp.Gy.rows());
        const int ng = static_cast<int>(sp.Gy.cols());

        // min delta  s.t.  Gy xi = p - cy,  |xi_i| <= 1 + delta,
        // with slack rows  xi_i - delta + s+_i = 1,  -xi_i - delta + s-_i = 1.
        const int nvar = ng + 1 + 2 * ng;
        LpProblem lp;
        lp.objective = Vector::Zero(nvar);
        lp.objective(ng) = 1.0;
        lp.eq_lhs = Matrix::Zero(dy + 2 * ng, nvar);
        lp.eq_lhs.topLeftCorner(dy, ng) = sp.Gy;
        for (int i = 0; i < ng; ++i) {
            lp.eq_lhs(dy + i, i) = 1.0;
            lp.eq_lhs(dy + i, ng) = -1.0;
            lp.eq_lhs(dy + i, ng + 1 + i) = 1.0;
            lp.eq_lhs(dy + ng + i, i) = -1.0;
            lp.eq_lhs(dy + ng + i, ng) = -1.0;
            lp.eq_lhs(dy + ng + i, ng + 1 + ng + i) = 1.0;
        }
        lp.eq_rhs = Vector::Ones(dy + 2 * ng);
        lp.eq_rhs.head(dy) = p - sp.cy;
        lp.lower = Vector::Constant(nvar, -kInf);
        lp.lower(ng) = -1.0;
        lp.lower.tail(2 * ng).setZero();
        lp.upper = Vector::Constant(nvar, kInf);

        const LpResult r = solve_lp(lp);
        SeparationCertificate cert;
        cert.i = sp.i;
        cert.j = sp.j;
        cert.lp_status = r.status;
        if (r.status == LpStatus::Optimal) {
            cert.delta_hat = r.value;
            cert.xi = r.point.head(ng);
            cert.grad_u = sp.Nmat.transpose() * r.dual.head(dy);
        } else if (r.status == LpStatus::Infeasible) {
            // The lifted point cannot be expressed by the avoidance zonotope
            // at any inflation: separated for every input near this one.
            cert.delta_hat = kInf;
        } else {
            throw std::runtime_error("verify_input: unexpected unbounded separation LP");
        }
        out.push_back(std::move(cert));
    }
    return out;
}

bool all_separated(const std::vector<SeparationCertificate>& certs, double eps) {
    for (const SeparationCertificate& c : certs) {
        if (!(c.delta_hat >= eps)) return false;
    }
    return true;
}

namespace {

double input_cost(const InputSequence& useq, const Matrix& R) {
    double J = 0.0;
    for (const Vector& u : useq.u) J += u.dot(R * u);
    return J;
}

double min_delta(const std::vector<SeparationCertificate>& certs) {
    double m = kInf;
    for (const SeparationCertificate& c : certs) m = std::min(m, c.delta_hat);
    return m;
}

// One max-min ascent step on the linearized margins. Because each margin is
// convex in the input, the linearization is a global lower bound, so the LP
// value never overstates the achievable minimum margin.
bool ascent_step(const std::vector<SeparationProblem>& problems, const IntervalBox& U_box, int N,
                 int nu, InputSequence& useq, std::vector<SeparationCertificate>& certs) {
    const int nU = (N + 1) * nu;
    const Vector uflat = useq.flat();

    std::vector<int> active;
    for (size_t q = 0; q < certs.size(); ++q) {
        if (certs[q].lp_status == LpStatus::Optimal) active.push_back(static_cast<int>(q));
    }
    if (active.empty()) return false;

    const int nq = static_cast<int>(active.size());
    const int nvar = nU + 1 + nq;  // u', m, slacks
    LpProblem lp;
    lp.objective = Vector::Zero(nvar);
    lp.objective(nU) = -1.0;  // maximize m
    lp.eq_lhs = Matrix::Zero(nq, nvar);
    lp.eq_rhs = Vector::Zero(nq);
    for (int t = 0; t < nq; ++t) {
        const SeparationCertificate& c = certs[active[t]];
        lp.eq_lhs.block(t, 0, 1, nU) = c.grad_u.transpose();
        lp.eq_lhs(t, nU) = -1.0;
        lp.eq_lhs(t, nU + 1 + t) = -1.0;
        lp.eq_rhs(t) = c.grad_u.dot(uflat) - c.delta_hat;
    }
    lp.lower = Vector::Constant(nvar, 0.0);
    lp.upper = Vector::Constant(nvar, kInf);
    for (int k = 0; k <= N; ++k) {
        lp.lower.segment(k * nu, nu) = U_box.lower;
        lp.upper.segment(k * nu, nu) = U_box.upper;
    }
    lp.lower(nU) = -kInf;
    lp.upper(nU) = kInf;

    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) return false;
    const double gain = -r.value - min_delta(certs);
    if (gain < 1e-10) return false;
    useq = InputSequence::from_flat(r.point.head(nU), N, nu);
    certs = verify_input(problems, useq);
    return true;
}

}  // namespace

DesignResult design_input(const ModelBank& bank, int N_max, double eps, const Matrix& R_weight,
                          std::uint64_t seed) {
    bank.check();
    if (eps <= 0.0) throw std::invalid_argument("design_input: eps must be positive");
    const int nu = bank.models.front().n_u();
    const std::vector<AugmentedModel> ams = augment(bank);

    DesignResult res;
    if (bank.models.size() < 2) {
        res.found = true;
        res.N_found = 0;
        res.useq = InputSequence::zeros(0, nu);
        return res;
    }

    for (int N = 0; N <= N_max; ++N) {
        const std::vector<SeparationProblem> problems = separation_problems(ams, bank.V, N, true);
        const int nU = (N + 1) * nu;

        // Deterministic starts: zero, box corners, pseudorandom interior.
        std::vector<InputSequence> starts;
        starts.push_back(InputSequence::zeros(N, nu));
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (N + 1)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int pattern : {0x00, 0xff, 0x55, 0xaa, 0x0f, 0xf0}) {
            InputSequence s = InputSequence::zeros(N, nu);
            for (int idx = 0; idx < nU; ++idx) {
                const int c = idx % nu;
                const bool hi = (pattern >> (idx % 8)) & 1;
                s.u[idx / nu](c) = hi ? bank.U_box.upper(c) : bank.U_box.lower(c);
            }
            starts.push_back(std::move(s));
        }
        for (int t = 0; t < 12; ++t) {
            InputSequence s = InputSequence::zeros(N, nu);
            for (int idx = 0; idx < nU; ++idx) {
                const int c = idx % nu;
                s.u[idx / nu](c) =
                    bank.U_box.lower(c) + (bank.U_box.upper(c) - bank.U_box.lower(c)) * unit(rng);
            }
            starts.push_back(std::move(s));
        }

        bool have_best = false;
        InputSequence best;
        std::vector<SeparationCertificate> best_certs;
        double best_J = kInf;

        for (const InputSequence& start : starts) {
            InputSequence u = start;
            std::vector<SeparationCertificate> certs = verify_input(problems, u);
            for (int it = 0; it < 40 && !all_separated(certs, eps); ++it) {
                if (!ascent_step(problems, bank.U_box, N, nu, u, certs)) break;
            }
            if (all_separated(certs, eps)) {
                const double J = input_cost(u, R_weight);
                if (!have_best || J < best_J) {
                    have_best = true;
                    best = u;
                    best_certs = certs;
                    best_J = J;
                }
            }
        }

        if (have_best) {
            // Shrink polish: pull coordinates toward zero while every pair
            // stays certified at the threshold.
            for (double step : {0.25, 0.1, 0.025}) {
                bool improved = true;
                while (improved) {
                    improved = false;
                    for (int k = 0; k <= N; ++k) {
                        for (int c = 0; c < nu; ++c) {
                            const double cur = best.u[k](c);
                            if (std::abs(cur) < 1e-12) continue;
                            InputSequence trial = best;
                            const double delta = std::min(step, std::abs(cur));
                            trial.u[k](c) = cur - (cur > 0 ? delta : -delta);
                            const auto certs = verify_input(problems, trial);
                            if (all_separated(certs, eps) &&
                                input_cost(trial, R_weight) < best_J - 1e-12) {
                                best = trial;
                                best_certs = certs;
                                best_J = input_cost(best, R_weight);
                                improved = true;
                            }
                        }
                    }
                }
            }
            res.found = true;
            res.N_found = N;
            res.useq = best;
            res.certs = best_certs;
            return res;
        }
    }
    return res;
}

}  // namespace czkit
