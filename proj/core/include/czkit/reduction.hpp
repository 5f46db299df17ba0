#ifndef CZKIT_REDUCTION_HPP_
#define CZKIT_REDUCTION_HPP_

#include "czkit/setops.hpp"

namespace czkit {

struct ReductionLimits {
    int max_generators;
    int max_constraints;

    static ReductionLimits unlimited();
};

/// Remove one constraint and one generator by solving a constraint row for a
/// pivot factor and substituting. The result encloses the input; the pivot is
/// scored by an estimate of the hull growth it causes. Throws if the set has
/// no constraints.
ConstrainedZonotope eliminate_constraint(const ConstrainedZonotope& Z);

/// Enclose Z with at most `target` generators. Small generators are removed
/// one at a time by redistributing them over the remaining columns (an LP per
/// removal); boxing of the lifted zonotope is the fallback when redistribution
/// is infeasible. Throws if target < dim(Z) (dim of the lift when constraints
/// are present).
ConstrainedZonotope reduce_generators(const ConstrainedZonotope& Z, int target);

/// Drop all-zero generator columns exactly.
ConstrainedZonotope drop_zero_generators(const ConstrainedZonotope& Z);

/// Enclose Z within the given complexity limits: prune zero columns, then
/// eliminate constraints, then reduce generators. Returns Z unchanged when it
/// already complies.
ConstrainedZonotope reduce(const ConstrainedZonotope& Z, const ReductionLimits& lim);

}  // namespace czkit

#endif
