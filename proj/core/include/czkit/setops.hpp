#ifndef CZKIT_SETOPS_HPP_
#define CZKIT_SETOPS_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "czkit/numerics.hpp"

namespace czkit {

/// Constrained zonotope {c + G xi : ||xi||_inf <= 1, A xi = b}.
/// A with zero rows (n_c = 0) encodes a plain zonotope; zero generator
/// columns (n_g = 0) encode a point.
struct ConstrainedZonotope {
    Matrix G;
    Vector c;
    Matrix A;
    Vector b;

    int dim() const { return static_cast<int>(c.size()); }
    int num_generators() const { return static_cast<int>(G.cols()); }
    int num_constraints() const { return static_cast<int>(A.rows()); }

    static ConstrainedZonotope point(const Vector& p);
    static ConstrainedZonotope zonotope(const Matrix& G, const Vector& c);
    static ConstrainedZonotope box(const Vector& lower, const Vector& upper);

    void check() const;  // throws on inconsistent field shapes
};

struct IntervalBox {
    Vector lower;
    Vector upper;
};

ConstrainedZonotope linear_map(const Matrix& R, const ConstrainedZonotope& Z);
ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& Z, const ConstrainedZonotope& W);
ConstrainedZonotope generalized_intersection(const ConstrainedZonotope& Z, const Matrix& R,
                                             const ConstrainedZonotope& Y);
/// Z x W stacked into R^{dim Z + dim W}.
ConstrainedZonotope cartesian_product(const ConstrainedZonotope& Z, const ConstrainedZonotope& W);

bool contains_point(const ConstrainedZonotope& Z, const Vector& p, double tol = 1e-8);
bool is_empty(const ConstrainedZonotope& Z, double tol = 1e-8);

/// Tight axis-aligned bounds, 2n LPs. Throws if Z is empty.
IntervalBox interval_hull(const ConstrainedZonotope& Z);

/// Half the longest edge of the interval hull.
double radius(const ConstrainedZonotope& Z);

/// max_{z in Z} dir^T z.
double support(const ConstrainedZonotope& Z, const Vector& dir);
/// A point of Z attaining support(Z, dir).
Vector support_point(const ConstrainedZonotope& Z, const Vector& dir);

struct VolumeEstimate {
    double estimate;
    double std_error;
};

/// Hit-or-miss Monte Carlo over the interval hull. Deterministic per seed.
VolumeEstimate mc_volume(const ConstrainedZonotope& Z, int samples, std::uint64_t seed);

/// Member points of Z. Plain zonotopes sample the generator box directly;
/// constrained sets use hit-and-run on the feasible xi-slice.
std::vector<Vector> sample_points(const ConstrainedZonotope& Z, int count, std::uint64_t seed);
Vector sample_point(const ConstrainedZonotope& Z, std::mt19937_64& rng);

}  // namespace czkit

#endif
