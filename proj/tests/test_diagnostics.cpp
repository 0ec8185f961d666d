#include "oracle_values.hpp"
#include "support.hpp"

#include "hmp/diagnostics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hmp;
using namespace support;

namespace
{

const double kSqrt2 = std::sqrt(2.0);

MapField kink(double L, double h)
{
    const TargetChart line(GeometryKind::euclidean, 1);
    return make_field(box(1, -L, L, h), line, [](const Point& x) { return vec({std::tanh(x[0] / kSqrt2)}); });
}

MapField instanton(double L, double h)
{
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    return make_field(box(2, -L, L, h), sphere, [](const Point& x) { return vec({x[0], x[1]}); });
}

MapField holomorphic(double h)
{
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    return make_field(box(2, -1.0, 1.0, h), sphere,
                      [](const Point& x) { return cubic_holomorphic(x); });
}

MapField hedgehog(double h)
{
    GridSpec s;
    s.dim = 3;
    s.region = RegionKind::annulus;
    s.lower = {-2.0, -2.0, -2.0};
    s.upper = {2.0, 2.0, 2.0};
    s.radius = 2.0;
    s.inner_radius = 0.5;
    s.h = h;
    s.boundary_layers = 3;
    auto grid = std::make_shared<const DomainGrid>(s);
    const TargetChart sphere(GeometryKind::sphere_stereographic, 3, 1.0);
    return make_field(grid, sphere, [](const Point& x) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return vec({x[0] / r, x[1] / r, x[2] / r});
    });
}

} // namespace

TEST_CASE("p_function")
{
    const TargetChart line(GeometryKind::euclidean, 1);
    const Potential dw(PotentialKind::double_well_radial, {}, line);
    const auto one = make_field(box(1, -1.0, 1.0, 0.1), line, [](const Point&) { return vec({1.0}); });
    const auto p1 = p_function(one, dw);
    CHECK(p1.min == 0.0);
    CHECK(p1.max == 0.0);
    CHECK(p1.scalar_target);

    const auto pk = p_function(kink(10.0, 0.01), dw);
    const std::size_t mid = nearest_active(kink(10.0, 0.01).grid(), {0.0, 0.0, 0.0});
    CHECK(std::abs(pk.values[mid] - oracle::kKinkPAtZero) <= 1e-5);
    CHECK(std::max(std::abs(pk.max), std::abs(pk.min)) <= 1e-5);

    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    const auto pi = p_function(instanton(2.0, 0.05), Potential::zero(sphere));
    CHECK(pi.min > 0.0);
    CHECK(pi.max == doctest::Approx(oracle::kInstantonEnergyDensityAtOrigin));
    CHECK_FALSE(pi.scalar_target);
}

TEST_CASE("bochner_residual")
{
    const TargetChart flat(GeometryKind::euclidean, 2);
    const auto affine = make_field(box(2, -1.0, 1.0, 0.1), flat, [](const Point& x) {
        return vec({2 * x[0] - x[1], 0.5 * x[0] + 3 * x[1]});
    });
    const auto ra = bochner_residual(affine, Potential::zero(flat));
    CHECK(ra.norms.sup <= 1e-10);
    CHECK(ra.norms.skipped > 0);
    CHECK(ra.norms.evaluated > 0);

    const TargetChart line(GeometryKind::euclidean, 1);
    const Potential dw(PotentialKind::double_well_radial, {}, line);
    const double k1 = bochner_residual(kink(6.0, 0.02), dw).norms.sup;
    const double k2 = bochner_residual(kink(6.0, 0.01), dw).norms.sup;
    CHECK(std::log2(k1 / k2) >= 1.8);
    CHECK(bochner_residual(kink(6.0, 0.01), dw).chain_rule.sup <= 1e-3);

    // the instanton's tension vanishes identically, so use a holomorphic map with a
    // nontrivial curvature term and second fundamental form
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    const double s1 = bochner_residual(holomorphic(0.04), Potential::zero(sphere)).norms.sup;
    const double s2 = bochner_residual(holomorphic(0.02), Potential::zero(sphere)).norms.sup;
    CHECK(std::log2(s1 / s2) >= 1.8);

    const auto ri = bochner_residual(instanton(2.0, 0.05), Potential::zero(sphere));
    CHECK(ri.kato_negative == 0);
}

TEST_CASE("stress_energy")
{
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    const auto c = make_field(box(2, -1.0, 1.0, 0.1), sphere, [](const Point&) { return vec({0.1, 0.2}); });
    const auto sc = stress_energy(c, Potential::zero(sphere));
    CHECK(sc.tensor_norms.sup == 0.0);
    CHECK(sc.divergence_norms.sup == 0.0);

    // the chart map x -> x is conformal, and its discrete differential is exact
    const auto si = stress_energy(instanton(4.0, 0.05), Potential::zero(sphere));
    CHECK(si.tensor_norms.sup <= 1e-12);
    const auto sh1 = stress_energy(holomorphic(0.04), Potential::zero(sphere)).tensor_norms.sup;
    const auto sh2 = stress_energy(holomorphic(0.02), Potential::zero(sphere)).tensor_norms.sup;
    CHECK(std::log2(sh1 / sh2) >= 1.8);

    const TargetChart line(GeometryKind::euclidean, 1);
    const Potential dw(PotentialKind::double_well_radial, {}, line);
    const double d1 = stress_energy(kink(6.0, 0.02), dw).divergence_norms.sup;
    const double d2 = stress_energy(kink(6.0, 0.01), dw).divergence_norms.sup;
    CHECK(std::log2(d1 / d2) >= 1.8);
}

TEST_CASE("monotonicity_table")
{
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    MonotonicityOptions opt;
    opt.radii = {0.5, 0.75, 1.0, 1.25, 1.5, 2.0};

    const auto c = make_field(box(2, -3.0, 3.0, 0.05), sphere, [](const Point&) { return vec({0.1, 0.2}); });
    const auto tc = monotonicity_table(c, Potential::zero(sphere), opt);
    for (const auto& row : tc.rows) {
        CHECK(row.m == 0.0);
        CHECK(row.identity_lhs == 0.0);
        CHECK(row.identity_rhs == 0.0);
    }

    const auto ti = monotonicity_table(instanton(3.0, 0.02), Potential::zero(sphere), opt);
    REQUIRE(ti.rows.size() == opt.radii.size());
    CHECK(ti.rows[2].m == doctest::Approx(oracle::kInstantonBallEnergyR1).epsilon(0.01));
    CHECK(ti.v_nonpositive);
    CHECK(ti.monotone);
    CHECK(ti.eps_quad > 0.0);
    for (const auto& row : ti.rows) {
        CHECK_FALSE(row.skipped);
        CHECK(row.dm_dr >= -ti.eps_quad);
        CHECK(row.identity_lhs == doctest::Approx(row.identity_rhs).epsilon(0.02));
    }

    MonotonicityOptions far = opt;
    far.radii = {1.0, 5.0};
    const auto tf = monotonicity_table(instanton(3.0, 0.05), Potential::zero(sphere), far);
    CHECK(tf.rows[1].skipped);
    CHECK_FALSE(tf.rows[1].flag.empty());
}

TEST_CASE("hedgehog annulus identity")
{
    const auto field = hedgehog(0.1);
    MonotonicityOptions opt;
    opt.radii = {0.75, 1.0, 1.5};
    opt.inner_radius = 0.5;
    const auto table = monotonicity_table(field, Potential::zero(field.chart()), opt);
    const double expected[] = {oracle::kHedgehogIdentity_0_75, oracle::kHedgehogIdentity_1_0,
                               oracle::kHedgehogIdentity_1_5};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& row = table.rows[i];
        REQUIRE_FALSE(row.skipped);
        CHECK(row.identity_lhs == doctest::Approx(row.identity_rhs).epsilon(0.02));
        CHECK(row.identity_rhs == doctest::Approx(expected[i]).epsilon(0.02));
    }
}

TEST_CASE("gradient_bound_ball")
{
    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    CHECK_THROWS_AS(validate_ball_params(sphere, 1.0, 0.3), ConfigError); // B = d
    CHECK_THROWS_AS(validate_ball_params(sphere, 2.0, 1.2), ConfigError); // R >= pi / (2 sqrt 2)
    CHECK_NOTHROW(validate_ball_params(sphere, 2.0, 0.3));

    const auto c = make_field(ball(2, 4.0, 4.0, 0.1), sphere, [](const Point&) { return vec({0.05, 0.0}); });
    BallBoundParams p;
    p.a = 4.0;
    p.d = 2.0;
    p.cap_radius = 0.3;
    const auto rec = gradient_bound_ball(c, Potential::zero(sphere), p);
    CHECK(rec.hypotheses_satisfied);
    CHECK(rec.lhs == 0.0);
    CHECK(rec.margin > 0.0);
    CHECK(rec.verdict == Verdict::pass);
    CHECK(rec.extras.at("rhs_monotone_in_a") == 1.0);

    // image outside the cap
    const auto wide = make_field(ball(2, 4.0, 4.0, 0.1), sphere, [](const Point&) { return vec({0.5, 0.0}); });
    CHECK(gradient_bound_ball(wide, Potential::zero(sphere), p).verdict == Verdict::not_applicable);

    p.residual_sup = 1.0;
    p.tol = 1e-8;
    CHECK(gradient_bound_ball(c, Potential::zero(sphere), p).verdict == Verdict::unconverged);
}

TEST_CASE("gradient_bound_energy2")
{
    const TargetChart hyp(GeometryKind::hyperbolic_poincare, 2, 1.0);
    const Potential v(PotentialKind::cosine_of_distance, {1.0, 1.0}, hyp);
    const auto c = make_field(ball(2, 2.0, 2.0, 0.1), hyp, [](const Point&) { return vec({0.1, 0.0}); });
    Energy2Params p;
    p.a = 2.0;
    const auto rec = gradient_bound_energy2(c, v, p);
    CHECK(rec.hypotheses_satisfied);
    CHECK(rec.verdict == Verdict::pass);

    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    const auto cs = make_field(ball(2, 2.0, 2.0, 0.1), sphere, [](const Point&) { return vec({0.1, 0.0}); });
    const Potential neg(PotentialKind::quadratic_radial, {-1.0}, sphere);
    CHECK(gradient_bound_energy2(cs, neg, p).verdict == Verdict::not_applicable);
}

TEST_CASE("liouville_integrals")
{
    const TargetChart flat(GeometryKind::euclidean, 1);
    const Potential dw(PotentialKind::double_well_radial, {}, flat);
    const auto one = make_field(box(3, -1.0, 1.0, 0.25, BoundaryCondition::free), flat,
                                [](const Point&) { return vec({1.0}); });
    const auto rec = liouville_integrals(one, dw);
    CHECK(rec.applicable);
    CHECK(rec.dirichlet_integral == 0.0);
    CHECK(rec.potential_integral == doctest::Approx(0.0));
    CHECK(rec.inequality_holds);
    CHECK(rec.verdict == Verdict::pass);

    const auto two = make_field(box(2, -1.0, 1.0, 0.25, BoundaryCondition::free), flat,
                                [](const Point&) { return vec({1.0}); });
    CHECK(liouville_integrals(two, dw).verdict == Verdict::not_applicable);

    const auto dirichlet = make_field(box(3, -1.0, 1.0, 0.25), flat, [](const Point&) { return vec({1.0}); });
    CHECK(liouville_integrals(dirichlet, dw).verdict == Verdict::not_applicable);
}

TEST_CASE("liouville_flow_experiment")
{
    FlowOptions opt;
    opt.tol = 1e-8;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-0.2, 0.2);

    const TargetChart sphere(GeometryKind::sphere_stereographic, 2, 1.0);
    const auto cs = make_field(box(2, 0.0, 1.0, 0.1, BoundaryCondition::periodic), sphere,
                               [&](const Point&) { return vec({uni(rng), uni(rng)}); });
    CHECK(liouville_flow_experiment(cs, Potential::zero(sphere), opt).verdict == Verdict::not_applicable);

    const TargetChart flat(GeometryKind::euclidean, 2);
    const auto cf = make_field(box(2, 0.0, 1.0, 0.1, BoundaryCondition::periodic), flat,
                               [&](const Point&) { return vec({uni(rng), uni(rng)}); });
    Vec mean = Vec::Zero(2);
    for (std::size_t node : cf.grid().active_nodes())
        mean += cf.value(node);
    mean /= static_cast<double>(cf.grid().active_nodes().size());
    const auto rec = liouville_flow_experiment(cf, Potential::zero(flat), opt);
    CHECK(rec.applicable);
    CHECK(rec.converged);
    CHECK(rec.verdict == Verdict::pass);
    CHECK(rec.sup_dphi <= 10 * opt.tol);
    CHECK((rec.limit_point - mean).norm() <= 1e-8);

    const TargetChart hyp(GeometryKind::hyperbolic_poincare, 2, 1.0);
    const Potential concave(PotentialKind::quadratic_radial, {-0.5}, hyp);
    const auto ch = make_field(box(2, 0.0, 1.0, 0.1, BoundaryCondition::periodic), hyp,
                               [&](const Point&) { return vec({0.3 + uni(rng), -0.2 + uni(rng)}); });
    const auto rh = liouville_flow_experiment(ch, concave, opt);
    CHECK(rh.verdict == Verdict::pass);
    CHECK(rh.limit_distance <= 1e-4);
    CHECK(rh.limit_is_critical);
}
