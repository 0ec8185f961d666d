#include "oracle_values.hpp"

#include "hmp/geodesics.hpp"
#include "hmp/geometry.hpp"

#include <doctest.h>

#include <random>

using namespace hmp;

namespace
{

Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs)
        v[i++] = x;
    return v;
}

// Christoffel symbols from central differences of metric_at.
double christoffel_fd(const TargetChart& chart, const Vec& y, int a, int b, int c, double h)
{
    const int m = chart.dim();
    auto dg = [&](int dir) {
        Vec yp = y, ym = y;
        yp[dir] += h;
        ym[dir] -= h;
        return Mat((metric_at(chart, yp) - metric_at(chart, ym)) / (2.0 * h));
    };
    const Mat ginv = metric_at(chart, y).inverse();
    double s = 0.0;
    for (int d = 0; d < m; ++d)
        s += ginv(a, d) * (dg(b)(d, c) + dg(c)(d, b) - dg(d)(b, c));
    return 0.5 * s;
}

} // namespace

TEST_CASE("metric_at examples")
{
    const TargetChart flat(GeometryKind::euclidean, 3);
    CHECK(metric_at(flat, vec({1.0, -2.0, 0.5})).isApprox(Mat::Identity(3, 3)));

    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    CHECK(metric_at(sphere, vec({0.0, 0.0})).isApprox(4.0 * Mat::Identity(2, 2)));
    CHECK(metric_at(sphere, vec({1.0, 0.0}))(0, 0) == doctest::Approx(oracle::kSphereMetricAtUnit).epsilon(1e-15));

    const TargetChart hyp(GeometryKind::hyperbolic_poincare, 2, 1.0);
    CHECK(metric_at(hyp, vec({0.5, 0.0}))(1, 1) == doctest::Approx(4.0 / (0.75 * 0.75)));
    CHECK_THROWS_AS(metric_at(hyp, vec({1.0, 0.0})), ChartDomainError);
    CHECK_THROWS_AS(metric_at(hyp, vec({0.8, 0.8})), ChartDomainError);
}

TEST_CASE("metric is positive definite at random valid points")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto kind : {GeometryKind::euclidean, GeometryKind::sphere_stereographic, GeometryKind::hyperbolic_poincare}) {
        const TargetChart chart(kind, 3, 1.3);
        for (int i = 0; i < 10000; ++i) {
            Vec y(3);
            for (int a = 0; a < 3; ++a)
                y[a] = 3.0 * uni(rng);
            if (kind == GeometryKind::hyperbolic_poincare)
                y *= 0.99 / (1.3 * std::max(1.0, y.norm()));
            const Mat g = metric_at(chart, y);
            REQUIRE(g.isApprox(g.transpose()));
            REQUIRE(Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("christoffel_at against the oracle and finite differences")
{
    const TargetChart flat(GeometryKind::euclidean, 2);
    const auto zero = christoffel_at(flat, vec({0.3, 0.4}));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                CHECK(zero(a, b, c) == 0.0);

    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    const auto at0 = christoffel_at(sphere, vec({0.0, 0.0}));
    CHECK(at0(0, 0, 0) == 0.0);
    CHECK(at0(1, 0, 1) == 0.0);

    const auto g = christoffel_at(sphere, vec({1.0, 0.0}));
    CHECK(g(0, 0, 0) == doctest::Approx(oracle::kSphereGamma_000_at_10));
    CHECK(g(0, 0, 1) == doctest::Approx(oracle::kSphereGamma_001_at_10));
    CHECK(g(0, 1, 1) == doctest::Approx(oracle::kSphereGamma_011_at_10));
    CHECK(g(1, 0, 0) == doctest::Approx(oracle::kSphereGamma_100_at_10));
    CHECK(g(1, 0, 1) == doctest::Approx(oracle::kSphereGamma_101_at_10));
    CHECK(g(1, 1, 1) == doctest::Approx(oracle::kSphereGamma_111_at_10));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-0.6, 0.6);
    for (auto kind : {GeometryKind::sphere_stereographic, GeometryKind::hyperbolic_poincare}) {
        const TargetChart chart(kind, 3, 1.0);
        for (int i = 0; i < 100; ++i) {
            Vec y(3);
            for (int a = 0; a < 3; ++a)
                y[a] = uni(rng);
            const auto gam = christoffel_at(chart, y);
            double scale = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c)
                        scale = std::max(scale, std::abs(gam(a, b, c)));
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c) {
                        REQUIRE(gam(a, b, c) == gam(a, c, b));
                        const double fd = christoffel_fd(chart, y, a, b, c, 1e-5);
                        REQUIRE(std::abs(gam(a, b, c) - fd) <= 1e-6 * scale);
                    }
        }
    }
}

TEST_CASE("distance_from_center examples and monotonicity")
{
    const TargetChart flat(GeometryKind::euclidean, 2);
    CHECK(distance_from_center(flat, vec({3.0, 4.0})) == doctest::Approx(5.0));
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    CHECK(distance_from_center(sphere, vec({1.0, 0.0})) == doctest::Approx(oracle::kSphereDistanceAtUnit));
    const TargetChart hyp(GeometryKind::hyperbolic_poincare, 2, 1.0);
    CHECK(distance_from_center(hyp, vec({0.0, 0.0})) == 0.0);
    CHECK(distance_from_center(hyp, vec({0.0, 0.5})) == doctest::Approx(oracle::kHyperbolicDistanceAtHalf));

    for (auto kind : {GeometryKind::euclidean, GeometryKind::sphere_stereographic, GeometryKind::hyperbolic_poincare}) {
        const TargetChart chart(kind, 2, 2.0);
        double prev = -1.0;
        for (int i = 0; i < 400; ++i) {
            const double s = 0.00124 * i;
            const double rho = distance_from_center(chart, vec({0.6 * s, 0.8 * s}));
            REQUIRE(rho > prev);
            prev = rho;
            CHECK(chart.chart_radius_of_distance(rho) == doctest::Approx(s).epsilon(1e-12));
        }
    }
}

TEST_CASE("xi_function")
{
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    CHECK(xi_function(sphere, vec({0.0, 0.0}), 4.0) == doctest::Approx(2.0));
    const double s = sphere.chart_radius_of_distance(M_PI / 4.0);
    CHECK(xi_function(sphere, vec({s, 0.0}), 1.0) == doctest::Approx(oracle::kXiQuarterPi));
    CHECK_THROWS_AS(xi_function(sphere, vec({1.0, 0.0}), 1.0), OutOfCapError);
}

TEST_CASE("sphere geodesics from the center have unit-speed distance")
{
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    const auto zero = Potential::zero(sphere);
    // unit g-speed at the origin: |v| Omega(0) = 1
    GeodesicState s0{vec({0.0, 0.0}), vec({0.3, 0.4}), 0.0};
    const auto traj = integrate_trajectory(sphere, zero, s0, 1e-3, 1.0);
    REQUIRE_FALSE(traj.truncated);
    for (const auto& st : traj.states)
        REQUIRE(std::abs(distance_from_center(sphere, st.position) - st.time) <= 1e-8);
}
