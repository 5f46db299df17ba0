#include <doctest.h>

#include <cmath>
#include <random>

#include "czkit/setops.hpp"
#include "helpers.hpp"

using czkit::ConstrainedZonotope;
using czkit::Matrix;
using czkit::Vector;

namespace {

ConstrainedZonotope x0_example() {
    Vector d(3), c(3);
    d << 0.1, 1.5, 0.6;
    c << 0.5, 0.5, 0.25;
    return ConstrainedZonotope::zonotope(Matrix(d.asDiagonal()), c);
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Vector vec3(double a, double b, double c) {
    Vector v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("linear_map identity and projection") {
    std::mt19937_64 rng(1);
    const ConstrainedZonotope Z = czt::random_cz(rng, 3, 5, 2);
    const ConstrainedZonotope ZI = czkit::linear_map(Matrix::Identity(3, 3), Z);
    CHECK((ZI.G - Z.G).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ZI.c - Z.c).cwiseAbs().maxCoeff() == 0.0);

    Matrix P = Matrix::Zero(2, 2);
    P(0, 0) = 1.0;
    const ConstrainedZonotope square =
        ConstrainedZonotope::zonotope(Matrix::Identity(2, 2), Vector::Zero(2));
    const ConstrainedZonotope seg = czkit::linear_map(P, square);
    const czkit::IntervalBox h = czkit::interval_hull(seg);
    CHECK(h.lower(0) == doctest::Approx(-1.0));
    CHECK(h.upper(0) == doctest::Approx(1.0));
    CHECK(h.lower(1) == doctest::Approx(0.0));
    CHECK(h.upper(1) == doctest::Approx(0.0));
}

TEST_CASE("minkowski_sum basics and support additivity") {
    const ConstrainedZonotope seg =
        ConstrainedZonotope::zonotope(Matrix::Identity(1, 1), Vector::Zero(1));
    const czkit::IntervalBox h = czkit::interval_hull(czkit::minkowski_sum(seg, seg));
    CHECK(h.lower(0) == doctest::Approx(-2.0));
    CHECK(h.upper(0) == doctest::Approx(2.0));

    std::mt19937_64 rng(2);
    const ConstrainedZonotope Z = czt::random_cz(rng, 2, 4, 1);
    const Vector p = czt::random_vector(rng, 2);
    const ConstrainedZonotope shifted = czkit::minkowski_sum(Z, ConstrainedZonotope::point(p));
    CHECK((shifted.c - (Z.c + p)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(shifted.num_generators() == Z.num_generators());

    const ConstrainedZonotope W = czt::random_cz(rng, 2, 3, 1);
    const ConstrainedZonotope S = czkit::minkowski_sum(Z, W);
    for (int d = 0; d < 16; ++d) {
        const double th = 2.0 * M_PI * d / 16;
        const Vector dir = vec2(std::cos(th), std::sin(th));
        CHECK(czkit::support(S, dir) ==
              doctest::Approx(czkit::support(Z, dir) + czkit::support(W, dir)).epsilon(1e-9));
    }
}

TEST_CASE("generalized_intersection hand cases") {
    const ConstrainedZonotope box =
        ConstrainedZonotope::zonotope(Matrix::Identity(2, 2), Vector::Zero(2));

    // Degenerate zonotope {1} x [-1, 1].
    Matrix Gy = Matrix::Zero(2, 1);
    Gy(1, 0) = 1.0;
    const ConstrainedZonotope Y = ConstrainedZonotope::zonotope(Gy, vec2(1.0, 0.0));
    const ConstrainedZonotope I =
        czkit::generalized_intersection(box, Matrix::Identity(2, 2), Y);
    const czkit::IntervalBox h = czkit::interval_hull(I);
    CHECK(h.lower(0) == doctest::Approx(1.0));
    CHECK(h.upper(0) == doctest::Approx(1.0));
    CHECK(h.lower(1) == doctest::Approx(-1.0));
    CHECK(h.upper(1) == doctest::Approx(1.0));

    // Disjoint unit boxes centered at 0 and (3, 0).
    const ConstrainedZonotope far =
        ConstrainedZonotope::zonotope(Matrix::Identity(2, 2), vec2(3.0, 0.0));
    CHECK(czkit::is_empty(czkit::generalized_intersection(box, Matrix::Identity(2, 2), far)));

    // Enclosing box changes nothing observable.
    std::mt19937_64 rng(3);
    const ConstrainedZonotope Z = czt::random_cz(rng, 2, 4, 1);
    const ConstrainedZonotope big =
        ConstrainedZonotope::zonotope(100.0 * Matrix::Identity(2, 2), Vector::Zero(2));
    const ConstrainedZonotope same =
        czkit::generalized_intersection(Z, Matrix::Identity(2, 2), big);
    for (const Vector& p : czkit::sample_points(Z, 50, 5)) {
        CHECK(czkit::contains_point(same, p, 1e-7));
    }
}

TEST_CASE("membership on the published initial set") {
    const ConstrainedZonotope X0 = x0_example();
    CHECK(czkit::contains_point(X0, vec3(0.5, 0.5, 0.25)));
    CHECK_FALSE(czkit::contains_point(X0, vec3(0.7, 0.5, 0.25)));

    const czkit::IntervalBox h = czkit::interval_hull(X0);
    CHECK(h.lower(0) == doctest::Approx(0.4));
    CHECK(h.upper(0) == doctest::Approx(0.6));
    CHECK(h.lower(1) == doctest::Approx(-1.0));
    CHECK(h.upper(1) == doctest::Approx(2.0));
    CHECK(h.lower(2) == doctest::Approx(-0.35));
    CHECK(h.upper(2) == doctest::Approx(0.85));
    CHECK(czkit::radius(X0) == doctest::Approx(1.5));

    const czkit::VolumeEstimate v = czkit::mc_volume(X0, 4000, 1);
    CHECK(v.estimate == doctest::Approx(0.72));
    CHECK(v.std_error == doctest::Approx(0.0));
}

TEST_CASE("radius of point and cube") {
    CHECK(czkit::radius(ConstrainedZonotope::point(vec2(3.0, -1.0))) == doctest::Approx(0.0));
    const ConstrainedZonotope cube =
        ConstrainedZonotope::zonotope(Matrix::Identity(3, 3), Vector::Zero(3));
    CHECK(czkit::radius(cube) == doctest::Approx(1.0));
}

TEST_CASE("is_empty basics") {
    std::mt19937_64 rng(4);
    CHECK_FALSE(czkit::is_empty(czt::random_cz(rng, 2, 4, 0)));
    ConstrainedZonotope z = czt::random_cz(rng, 2, 2, 0);
    z.A = Matrix::Ones(1, 2);
    z.b = Vector::Constant(1, 3.0);
    CHECK(czkit::is_empty(z));
}

TEST_CASE("mc_volume of the diamond") {
    // |x| + |y| <= 1: image of the square under a 45-degree scaled rotation.
    Matrix G(2, 2);
    G << 0.5, 0.5, 0.5, -0.5;
    const ConstrainedZonotope diamond = ConstrainedZonotope::zonotope(G, Vector::Zero(2));
    const czkit::VolumeEstimate v = czkit::mc_volume(diamond, 20000, 3);
    CHECK(std::abs(v.estimate - 2.0) <= 3.0 * v.std_error + 1e-12);
    // Determinism per seed.
    const czkit::VolumeEstimate w = czkit::mc_volume(diamond, 20000, 3);
    CHECK(v.estimate == w.estimate);
}

TEST_CASE("set calculus sampling equivalence") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const ConstrainedZonotope Z = czt::random_cz(rng, n, 2 + rng() % 4, rng() % 3);
        const ConstrainedZonotope W = czt::random_cz(rng, n, 2 + rng() % 4, rng() % 2);
        const Matrix R = czt::random_matrix(rng, 1 + rng() % 3, n);

        const auto zpts = czkit::sample_points(Z, 15, rng());
        const auto wpts = czkit::sample_points(W, 15, rng());

        const ConstrainedZonotope M = czkit::linear_map(R, Z);
        const ConstrainedZonotope S = czkit::minkowski_sum(Z, W);
        for (size_t i = 0; i < zpts.size(); ++i) {
            CHECK(czkit::contains_point(M, R * zpts[i], 1e-7));
            CHECK(czkit::contains_point(S, zpts[i] + wpts[i], 1e-7));
        }

        const ConstrainedZonotope Y = czt::random_cz(rng, 2, 3, 1);
        const Matrix Ry = czt::random_matrix(rng, 2, n);
        const ConstrainedZonotope I = czkit::generalized_intersection(Z, Ry, Y);
        if (!czkit::is_empty(I)) {
            for (const Vector& p : czkit::sample_points(I, 10, rng())) {
                CHECK(czkit::contains_point(Z, p, 1e-6));
                CHECK(czkit::contains_point(Y, Ry * p, 1e-6));
            }
        }
        for (const Vector& p : zpts) {
            if (czkit::contains_point(Y, Ry * p, -1e-7)) {
                CHECK(czkit::contains_point(I, p, 1e-6));
            }
        }
    }
}

TEST_CASE("hull tightness and attainment") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const ConstrainedZonotope Z = czt::random_cz(rng, n, 2 + rng() % 4, rng() % 3);
        const czkit::IntervalBox h = czkit::interval_hull(Z);
        for (int i = 0; i < n; ++i) {
            Vector e = Vector::Zero(n);
            e(i) = 1.0;
            const Vector hi = czkit::support_point(Z, e);
            const Vector lo = czkit::support_point(Z, -e);
            CHECK(czkit::contains_point(Z, hi, 1e-7));
            CHECK(czkit::contains_point(Z, lo, 1e-7));
            CHECK(hi(i) == doctest::Approx(h.upper(i)).epsilon(1e-7));
            CHECK(lo(i) == doctest::Approx(h.lower(i)).epsilon(1e-7));
        }
        for (const Vector& p : czkit::sample_points(Z, 20, rng())) {
            for (int i = 0; i < n; ++i) {
                CHECK(p(i) >= h.lower(i) - 1e-7);
                CHECK(p(i) <= h.upper(i) + 1e-7);
            }
        }
    }
}

TEST_CASE("hull matches factor vertex enumeration") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int ng = 1 + static_cast<int>(rng() % 5);
        const ConstrainedZonotope Z = czt::random_cz(rng, n, ng, 0);  // plain: box vertices exact
        Vector lo = Vector::Constant(n, czkit::kInf), hi = Vector::Constant(n, -czkit::kInf);
        for (int mask = 0; mask < (1 << ng); ++mask) {
            Vector xi(ng);
            for (int j = 0; j < ng; ++j) xi(j) = (mask >> j & 1) ? 1.0 : -1.0;
            const Vector p = Z.c + Z.G * xi;
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const czkit::IntervalBox h = czkit::interval_hull(Z);
        CHECK((h.lower - lo).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((h.upper - hi).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("is_empty agrees with grid search") {
    std::mt19937_64 rng(10);
    const int steps = 41;
    for (int trial = 0; trial < 200; ++trial) {
        const int ng = 1 + static_cast<int>(rng() % 3);
        ConstrainedZonotope z;
        z.G = czt::random_matrix(rng, 2, ng);
        z.c = Vector::Zero(2);
        z.A = czt::random_matrix(rng, 1, ng);
        // Mix of feasible and infeasible offsets.
        z.b = Vector::Constant(1, czt::random_vector(rng, 1, 2.0)(0));

        double best = czkit::kInf;
        std::vector<int> idx(ng, 0);
        const int total = static_cast<int>(std::pow(steps, ng));
        for (int t = 0; t < total; ++t) {
            int rem = t;
            Vector xi(ng);
            for (int j = 0; j < ng; ++j) {
                xi(j) = -1.0 + 2.0 * (rem % steps) / (steps - 1);
                rem /= steps;
            }
            best = std::min(best, (z.A * xi - z.b).cwiseAbs().maxCoeff());
        }
        const double grid_bound = z.A.cwiseAbs().sum() * (1.0 / (steps - 1));
        if (!czkit::is_empty(z)) CHECK(best <= grid_bound + 1e-9);
        if (best <= 1e-10) CHECK_FALSE(czkit::is_empty(z));
    }
}

TEST_CASE("hull width monotone under linear maps") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const ConstrainedZonotope Z = czt::random_cz(rng, 3, 4, 1);
        const Matrix R = czt::random_matrix(rng, 2, 3);
        const czkit::IntervalBox hz = czkit::interval_hull(Z);
        const czkit::IntervalBox hm = czkit::interval_hull(czkit::linear_map(R, Z));
        const Vector wz = hz.upper - hz.lower;
        const Vector wm = hm.upper - hm.lower;
        const Vector bound = R.cwiseAbs() * wz;
        for (int i = 0; i < 2; ++i) CHECK(wm(i) <= bound(i) + 1e-9);
    }
}

TEST_CASE("interval_hull rejects the empty set") {
    ConstrainedZonotope z;
    z.G = Matrix::Identity(2, 2);
    z.c = Vector::Zero(2);
    z.A = Matrix::Ones(1, 2);
    z.b = Vector::Constant(1, 5.0);
    CHECK_THROWS(czkit::interval_hull(z));
}
