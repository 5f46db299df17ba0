#ifndef CZKIT_ESTIMATOR_HPP_
#define CZKIT_ESTIMATOR_HPP_

#include <cstdint>
#include <vector>

#include "czkit/reduction.hpp"
#include "czkit/setops.hpp"

namespace czkit {

/// Linear discrete-time descriptor model
///   E x_k = A x_{k-1} + B u_{k-1} + Bw w_{k-1},
///   y_k  = C x_k + D u_k + Dv v_k.
struct DescriptorModel {
    Matrix E, A, B, Bw, C, D, Dv;

    int n() const { return static_cast<int>(E.rows()); }
    int n_u() const { return static_cast<int>(B.cols()); }
    int n_w() const { return static_cast<int>(Bw.cols()); }
    int n_y() const { return static_cast<int>(C.rows()); }
    int n_v() const { return static_cast<int>(Dv.cols()); }

    void check() const;  // throws naming the offending matrix
};

/// SVD decoupling of E = U Sigma V^T with T = (V^T)^{-1}. The transformed
/// state z = T^{-1} x splits into n_z dynamic and n - n_z static components:
///   z~_k = Atilde z_{k-1} + Btilde u_{k-1} + BwTilde w_{k-1},
///   0    = Acheck z_{k-1} + Bcheck u_{k-1} + BwCheck w_{k-1}.
struct SvdTransform {
    Matrix T;
    Matrix Tinv;
    int n_z;
    Matrix SigmaTilde;            // n_z x n_z diagonal, positive
    Matrix Atilde, Acheck;        // n_z x n, (n - n_z) x n
    Matrix Btilde, Bcheck;
    Matrix BwTilde, BwCheck;
};

SvdTransform decompose(const DescriptorModel& m, double tol = 1e-9);

struct UncertaintyBounds {
    ConstrainedZonotope X0;  // initial states, in R^n
    ConstrainedZonotope W;   // process uncertainty
    ConstrainedZonotope V;   // measurement uncertainty
    ConstrainedZonotope Xa;  // admissible states, in R^n
};

/// Initial set in transformed coordinates: the measurement-consistent subset
/// of X0 mapped by T^{-1}, augmented with the time-0 static constraint row.
/// Throws if the result is empty (measurement inconsistent with priors).
ConstrainedZonotope initial_set(const DescriptorModel& m, const SvdTransform& t,
                                const UncertaintyBounds& bounds, const Vector& u0,
                                const Vector& y0);

/// One-step predicted enclosure of z_k, with the static relation shifted to
/// time k. Uses the admissible set for the static components.
ConstrainedZonotope predict(const ConstrainedZonotope& Zhat_prev, const SvdTransform& t,
                            const UncertaintyBounds& bounds, const Vector& u_prev,
                            const Vector& u_now);

/// Measurement update: generalized intersection with the output-consistent
/// set. May return an empty set.
ConstrainedZonotope update(const ConstrainedZonotope& Zbar, const SvdTransform& t,
                           const DescriptorModel& m, const UncertaintyBounds& bounds,
                           const Vector& u_now, const Vector& y_now);

struct EstimatorState {
    int k = 0;
    ConstrainedZonotope Zhat;  // transformed coordinates
    ConstrainedZonotope Xhat;  // original coordinates, Xhat = T Zhat
};

EstimatorState make_initial_state(const DescriptorModel& m, const SvdTransform& t,
                                  const UncertaintyBounds& bounds, const Vector& u0,
                                  const Vector& y0, const ReductionLimits& lim);

/// predict + update + reduce, then map back with T. Throws on empty update.
EstimatorState step(const EstimatorState& state, const SvdTransform& t,
                    const DescriptorModel& m, const UncertaintyBounds& bounds,
                    const Vector& u_prev, const Vector& u_now, const Vector& y_now,
                    const ReductionLimits& lim);

struct Trajectory {
    std::vector<Vector> states;   // x_0 .. x_K
    std::vector<Vector> outputs;  // y_0 .. y_K
};

/// Ground truth simulation. The dynamic components of x0 are kept; the static
/// ones are re-derived each step from the sampled disturbance, which requires
/// the static block of Acheck to be invertible. Deterministic per seed.
Trajectory simulate_truth(const DescriptorModel& m, const SvdTransform& t,
                          const UncertaintyBounds& bounds, const Vector& x0,
                          const std::vector<Vector>& useq, int horizon, std::uint64_t seed);

/// Relaxation of a constrained set to a plain zonotope: all constraints are
/// eliminated, then the generator count is capped at max_generators. The
/// result encloses Z.
ConstrainedZonotope relax_to_zonotope(const ConstrainedZonotope& Z, int max_generators);

/// Comparison baseline: runs the same step as the constrained pipeline, then
/// relaxes the result with relax_to_zonotope. The returned set therefore
/// always encloses the set produced by step() on the same inputs.
EstimatorState zonotope_baseline_step(const EstimatorState& state, const SvdTransform& t,
                                      const DescriptorModel& m, const UncertaintyBounds& bounds,
                                      const Vector& u_prev, const Vector& u_now,
                                      const Vector& y_now, const ReductionLimits& lim);

}  // namespace czkit

#endif
