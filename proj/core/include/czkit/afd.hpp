#ifndef CZKIT_AFD_HPP_
#define CZKIT_AFD_HPP_

#include <cstdint>
#include <vector>

#include "czkit/estimator.hpp"
#include "czkit/setops.hpp"

namespace czkit {

/// Candidate fault models sharing dimensions and uncertainty bounds.
struct ModelBank {
    std::vector<DescriptorModel> models;
    ConstrainedZonotope X0, W, V, Xa;
    IntervalBox U_box;  // admissible input range per step

    void check() const;
};

/// One model rewritten on the augmented state z = (T^{-1} x, w):
///   z~_k = AzTilde z_{k-1} + Btilde u_{k-1},
///   0    = AzCheck z_k + Bcheck u_k,
///   y_k  = F z_k + D u_k + Dv v_k.
struct AugmentedModel {
    const DescriptorModel* model = nullptr;
    Matrix T, Tinv;
    int n_z = 0;
    Matrix F;                  // C T P with P = [I 0]
    Matrix AzTilde, AzCheck;   // [Atilde BwTilde], [Acheck BwCheck]
    Matrix Btilde, Bcheck;
    ConstrainedZonotope Za;      // (T^{-1} Xa) x W
    ConstrainedZonotope Z0base;  // (T^{-1} X0) x W

    int state_dim() const { return static_cast<int>(AzTilde.cols()); }
    int static_dim() const { return static_cast<int>(AzCheck.rows()); }
};

std::vector<AugmentedModel> augment(const ModelBank& bank, double tol = 1e-9);

/// Z0(u0): the augmented initial set with the time-0 static constraint row;
/// b is affine in u0. May be empty for infeasible u0.
ConstrainedZonotope initial_feasible_set(const AugmentedModel& am, const Vector& u0);

struct InputSequence {
    std::vector<Vector> u;  // length N + 1

    int horizon() const { return static_cast<int>(u.size()) - 1; }
    Vector flat() const;
    static InputSequence zeros(int N, int n_u);
    static InputSequence from_flat(const Vector& flat, int N, int n_u);
};

/// State reachable set Z_N(u) by the prediction recursion.
ConstrainedZonotope reach_recursive(const AugmentedModel& am, const ConstrainedZonotope& Z0,
                                    const InputSequence& useq);

/// Closed-form tensors making center and constraint offsets affine in the
/// stacked input sequence: c_N(u) = c_free + H_N u, b_N(u) = b_free + Omega u.
struct ReachTensors {
    int N = 0;
    std::vector<Matrix> H;  // H_0 .. H_N, each state_dim x (N+1) n_u
    Matrix Hbar;            // stacked H_0 .. H_N
    Matrix Q;               // stacked powers of the lifted dynamics
    Vector p;               // stacked drift terms
    Vector beta;
    Matrix Upsilon, Gamma;
    Vector alpha;           // beta + Upsilon p
    Matrix Lambda;          // Upsilon Q
    Matrix Omega;           // Gamma + Upsilon Hbar
    Matrix G_N, A_N;        // input-independent reach blocks
    Vector c_free;          // c_N(0)
    Vector b_free;          // b_N(0) = alpha + Lambda c_z

    Vector c_of(const Vector& u_flat) const { return c_free + H.back() * u_flat; }
    Vector b_of(const Vector& u_flat) const { return b_free + Omega * u_flat; }
};

ReachTensors build_tensors(const AugmentedModel& am, int N);

/// Output reachable set Y_N = F Z_N + D u_N + Dv V.
ConstrainedZonotope output_reach(const AugmentedModel& am, const ConstrainedZonotope& ZN,
                                 const Vector& uN, const ConstrainedZonotope& V);

/// Per model pair (i < j): the input u separates the pair iff
/// Nmat * u_flat lies outside the avoidance zonotope {Gy, cy}.
struct SeparationProblem {
    int i = 0, j = 0;
    Matrix Nmat;
    Matrix Gy;
    Vector cy;
};

/// Builds all n_m (n_m - 1) / 2 pair problems at horizon N. When
/// reduce_avoidance is set, the avoidance zonotope generator count is capped
/// at twice its dimension (enlarging it, so certificates stay conservative).
std::vector<SeparationProblem> separation_problems(const std::vector<AugmentedModel>& ams,
                                                   const ConstrainedZonotope& V, int N,
                                                   bool reduce_avoidance = true);

struct SeparationCertificate {
    int i = 0, j = 0;
    double delta_hat = 0.0;  // > 0 means the pair is separated
    Vector xi;
    LpStatus lp_status = LpStatus::Infeasible;
    /// Gradient of delta_hat with respect to the flat input sequence,
    /// valid when lp_status == Optimal.
    Vector grad_u;
};

std::vector<SeparationCertificate> verify_input(const std::vector<SeparationProblem>& problems,
                                                const InputSequence& useq);

bool all_separated(const std::vector<SeparationCertificate>& certs, double eps);

struct DesignResult {
    bool found = false;
    int N_found = -1;
    InputSequence useq;
    std::vector<SeparationCertificate> certs;
};

/// Minimum-length separating input search: for N = 0..N_max, run a
/// deterministic multistart max-min ascent on the separation margins and
/// certify candidates with verify_input. The certificate is exact; the
/// optimizer is heuristic and J = u^T R-blockdiag u is reduced by a final
/// shrink polish, without a global optimality claim.
DesignResult design_input(const ModelBank& bank, int N_max, double eps, const Matrix& R_weight,
                          std::uint64_t seed = 1);

}  // namespace czkit

#endif
