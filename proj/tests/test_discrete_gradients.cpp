#include <cmath>

#include <gtest/gtest.h>

#include "thermoflow/checks.hpp"
#include "thermoflow/discrete_gradients.hpp"

using namespace thermoflow;

namespace {

Polynomial cubic()
{
    Polynomial p(3);
    p.add_term(1.0, {3, 0, 0}).add_term(0.5, {1, 2, 0}).add_term(-0.7, {0, 1, 2}).add_term(2.0, {0, 0, 1});
    return p;
}

std::vector<DiscreteGradientRule> all_rules()
{
    return {DiscreteGradientRule::mean_value(), DiscreteGradientRule::midpoint(),
            DiscreteGradientRule::coordinate_increment()};
}

} // namespace

TEST(GaussLegendre, IntegratesMonomialsExactly)
{
    const QuadratureRule& q = gauss_legendre(10);
    double sum_w = 0.0;
    for (double w : q.weights) sum_w += w;
    EXPECT_NEAR(sum_w, 1.0, 1e-15);
    for (int d = 0; d <= 19; ++d) {
        double s = 0.0;
        for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * std::pow(q.nodes[k], d);
        EXPECT_NEAR(s, 1.0 / (d + 1), 1e-14) << "degree " << d;
    }
    EXPECT_THROW(gauss_legendre(1), InvalidArgument);
    EXPECT_THROW(gauss_legendre(65), InvalidArgument);
}

TEST(DiscreteGradients, EnergyConsistency)
{
    const Polynomial H = cubic();
    const Vec x = (Vec(3) << 0.3, -1.2, 0.8).finished();
    const Vec xp = (Vec(3) << 1.1, 0.4, -0.5).finished();
    for (const auto& rule : all_rules()) {
        const Vec g = discrete_gradient(rule, H, x, xp);
        EXPECT_NEAR(g.dot(xp - x), H.value(xp) - H.value(x), 1e-12) << to_string(rule.kind);
    }
}

TEST(DiscreteGradients, CoincidentPointsGiveTheGradient)
{
    const Polynomial H = cubic();
    const Vec x = (Vec(3) << 0.3, -1.2, 0.8).finished();
    for (const auto& rule : all_rules()) {
        EXPECT_LT((discrete_gradient(rule, H, x, x) - H.gradient(x)).norm(), 1e-14) << to_string(rule.kind);
    }
}

TEST(DiscreteGradients, CoordinateIncrementOnSeparableQuadratic)
{
    // H = x1^2 + x2^2: each difference quotient is x_i + x'_i.
    Polynomial H(2);
    H.add_term(1.0, {2, 0}).add_term(1.0, {0, 2});
    const Vec x = (Vec(2) << 1.0, 2.0).finished();
    const Vec xp = (Vec(2) << 3.0, -1.0).finished();
    const Vec g = discrete_gradient(DiscreteGradientRule::coordinate_increment(), H, x, xp);
    EXPECT_DOUBLE_EQ(g[0], 4.0);
    EXPECT_DOUBLE_EQ(g[1], 1.0);
}

TEST(DiscreteGradients, MidpointAndMeanValueAreSymmetric)
{
    const Polynomial H = cubic();
    const Vec x = (Vec(3) << 0.3, -1.2, 0.8).finished();
    const Vec xp = (Vec(3) << 1.1, 0.4, -0.5).finished();
    for (const auto& rule : {DiscreteGradientRule::mean_value(), DiscreteGradientRule::midpoint()}) {
        EXPECT_LT((discrete_gradient(rule, H, x, xp) - discrete_gradient(rule, H, xp, x)).norm(), 1e-13);
    }
    // Mean value on a cubic is exact: the average of the gradient along the segment.
    const Vec mv = discrete_gradient(DiscreteGradientRule::mean_value(2), H, x, xp);
    const Vec mv64 = discrete_gradient(DiscreteGradientRule::mean_value(64), H, x, xp);
    EXPECT_LT((mv - mv64).norm(), 1e-13);
}

TEST(DiscreteGradients, ParsingAndValidation)
{
    EXPECT_EQ(parse_discrete_gradient_rule("mean-value").kind, DiscreteGradientKind::MeanValue);
    EXPECT_EQ(parse_discrete_gradient_rule("midpoint").kind, DiscreteGradientKind::Midpoint);
    EXPECT_EQ(parse_discrete_gradient_rule("itoh-abe").kind, DiscreteGradientKind::CoordinateIncrement);
    EXPECT_THROW(parse_discrete_gradient_rule("gonzalez"), InvalidArgument);

    const Polynomial H = cubic();
    const Vec x = Vec::Zero(3);
    EXPECT_THROW(discrete_gradient(DiscreteGradientRule::mean_value(1), H, x, x), InvalidArgument);
    EXPECT_THROW(discrete_gradient(DiscreteGradientRule::midpoint(), H, x, Vec::Zero(2)), DimensionMismatch);
    DiscreteGradientRule bad = DiscreteGradientRule::midpoint();
    bad.degeneracy_epsilon = 0.0;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(DiscreteGradients, AxiomsOnRandomPairs)
{
    checks::Sampler s(THERMOFLOW_TEST_SEED, 7);
    for (const auto& th : checks::detail::gradient_test_hamiltonians()) {
        std::vector<GradientPair> pairs;
        for (int k = 0; k < 100; ++k) {
            pairs.push_back({s.vector(th.poly.size(), -1.5, 1.5), s.vector(th.poly.size(), -1.5, 1.5)});
        }
        for (const auto& rule : all_rules()) {
            const AxiomReport r = check_axioms(rule, th.poly, pairs, 1e-12);
            EXPECT_TRUE(r.passed) << th.name << " " << to_string(rule.kind) << " energy " << r.max_energy_residual
                                  << " limit " << r.max_consistency_residual << " rate " << r.min_convergence_rate;
        }
    }
}

TEST(GradientsSuite, AllChecksPass)
{
    const checks::Report r = checks::gradients_suite(THERMOFLOW_TEST_SEED);
    for (const auto& c : r.results) EXPECT_TRUE(c.passed) << checks::format(c);
}
