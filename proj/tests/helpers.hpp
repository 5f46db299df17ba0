#ifndef CZKIT_TESTS_HELPERS_HPP_
#define CZKIT_TESTS_HELPERS_HPP_

#include <random>

#include "czkit/setops.hpp"

namespace czt {

using czkit::ConstrainedZonotope;
using czkit::Matrix;
using czkit::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
    return random_matrix(rng, n, 1, scale).col(0);
}

/// Random nonempty CZ: the constraint offset is chosen as A xi0 for a point
/// xi0 strictly inside the factor box, so the set always has an interior
/// witness.
inline ConstrainedZonotope random_cz(std::mt19937_64& rng, int dim, int ng, int nc) {
    ConstrainedZonotope z;
    z.G = random_matrix(rng, dim, ng);
    z.c = random_vector(rng, dim);
    z.A = random_matrix(rng, nc, ng);
    const Vector xi0 = random_vector(rng, ng, 0.8);
    z.b = z.A * xi0;
    return z;
}

}  // namespace czt

#endif
