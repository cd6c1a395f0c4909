#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "thermoflow/checks.hpp"
#include "thermoflow/contact_geometry.hpp"
#include "thermoflow/numdiff.hpp"
#include "thermoflow/thermo_systems.hpp"

using namespace thermoflow;

namespace {

ScalarField oscillator(double gamma) { return damped_oscillator_system(gamma).hamiltonian(); }

ScalarField poly_field(std::initializer_list<std::pair<double, std::vector<int>>> terms)
{
    Polynomial p(3);
    for (const auto& [c, e] : terms) p.add_term(c, e);
    return polynomial_field(1, p);
}

// Lambda with the sign of its first term flipped.
struct FlippedLambda : ContactStructure {
    using ContactStructure::ContactStructure;
    double lambda(const ContactPoint& x, const CoVector& a, const CoVector& b) const
    {
        return -a.ap.dot(b.aq + b.aS * x.p) - b.ap.dot(a.aq + a.aS * x.p);
    }
};

} // namespace

TEST(ContactStructure, ReebFieldNormalisesEta)
{
    const ContactStructure cs(2);
    const ContactPoint x(Vec::Constant(2, 0.4), Vec::Constant(2, -1.3), 2.0);
    EXPECT_DOUBLE_EQ(cs.eta(x, cs.reeb()), 1.0);
    for (int k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(cs.d_eta(x, cs.reeb(), coordinate_vector(2, k)), 0.0);
}

TEST(ContactStructure, EvolutionFieldOfDampedOscillator)
{
    // qdot = dH/dp, pdot = -dH/dq - p dH/dS, Sdot = p dH/dp
    const double gamma = 0.3;
    const ContactStructure cs(1);
    const ContactPoint x(0.7, -1.9, 4.0);
    const TangentVector E = cs.evolution_field(oscillator(gamma), x);
    EXPECT_DOUBLE_EQ(E.dq[0], -1.9);
    EXPECT_DOUBLE_EQ(E.dp[0], -(0.7 + gamma * -1.9));
    EXPECT_DOUBLE_EQ(E.dS, 1.9 * 1.9);

    const TangentVector X = cs.hamiltonian_field(oscillator(gamma), x);
    const double H = 0.5 * 1.9 * 1.9 + 0.5 * 0.7 * 0.7 + gamma * 4.0;
    EXPECT_DOUBLE_EQ(X.dS, 1.9 * 1.9 - H);
}

TEST(ContactStructure, FlatInverseRoundTrip)
{
    const ContactStructure cs(3);
    std::mt19937_64 rng(THERMOFLOW_TEST_SEED);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        const ContactPoint x = ContactPoint::from_vector(Vec::NullaryExpr(7, [&](Eigen::Index) { return u(rng); }));
        const TangentVector v = TangentVector::from_vector(Vec::NullaryExpr(7, [&](Eigen::Index) { return u(rng); }));
        const TangentVector back = cs.flat_inverse(x, cs.flat(x, v));
        EXPECT_LT((back.to_vector() - v.to_vector()).lpNorm<Eigen::Infinity>(), 1e-12);
    }
}

TEST(ContactStructure, SharpPairingIsLambda)
{
    const ContactStructure cs(1);
    const ContactPoint x(0.2, 1.5, -0.7);
    const CoVector a(1.0, -2.0, 0.5);
    const CoVector b(-0.3, 0.8, 2.0);
    EXPECT_NEAR(b(cs.sharp_lambda(x, a)), cs.lambda(x, a, b), 1e-15);
    EXPECT_NEAR(cs.lambda(x, a, b), -cs.lambda(x, b, a), 1e-15);
}

TEST(ContactStructure, BracketDecomposition)
{
    // Cartan bracket = Lambda_0 part + Delta part
    const ContactStructure cs(1);
    const ScalarField f = poly_field({{1.0, {2, 1, 0}}, {0.5, {0, 2, 1}}, {-0.2, {1, 0, 2}}});
    const ScalarField g = poly_field({{0.3, {1, 1, 1}}, {1.0, {0, 0, 2}}, {2.0, {3, 0, 0}}});
    const ContactPoint x(0.4, -1.1, 0.9);
    EXPECT_NEAR(cs.cartan_bracket(f, g, x), cs.poisson_lambda0_bracket(f, g, x) + cs.delta_bracket(f, g, x), 1e-13);
}

TEST(ContactStructure, EntropyHamiltonianDeltaBracketIsLiouvilleDerivative)
{
    const ContactStructure cs(1);
    const ScalarField H = oscillator(0.1);
    const ScalarField S = coordinate_field(1, 2);
    const ContactPoint x(0.3, 2.0, 1.0);
    const double delta_H = H.gradient(x)(cs.liouville(x));
    EXPECT_DOUBLE_EQ(delta_H, 4.0);
    EXPECT_NEAR(cs.delta_bracket(H, S, x), delta_H, 1e-14);
    EXPECT_DOUBLE_EQ(cs.delta_bracket(H, H, x), 0.0);
    EXPECT_DOUBLE_EQ(cs.poisson_lambda0_bracket(H, H, x), 0.0);
}

TEST(ContactStructure, EvolutionFieldAnnihilatesGenerator)
{
    const ContactStructure cs(1);
    const ScalarField f = poly_field({{1.0, {2, 1, 1}}, {0.5, {0, 3, 0}}, {-1.0, {0, 0, 1}}});
    const ContactPoint x(0.8, -0.6, 1.2);
    EXPECT_NEAR(f.gradient(x)(cs.evolution_field(f, x)), 0.0, 1e-14);
}

TEST(ContactStructure, JacobiBracketIsNotALeibnizBracket)
{
    // A derivation kills constants; the Jacobi bracket of 1 with S does not vanish.
    const ContactStructure cs(1);
    const ContactPoint x(0.1, 0.2, 0.3);
    EXPECT_DOUBLE_EQ(cs.jacobi_bracket(constant_field(1, 1.0), coordinate_field(1, 2), x), -1.0);
}

TEST(ContactStructure, JacobiIdentityWithNestedFiniteDifferences)
{
    const ContactStructure cs(1);
    const ScalarField f = poly_field({{1.0, {2, 0, 0}}, {0.5, {0, 1, 1}}, {0.3, {1, 1, 0}}});
    const ScalarField g = poly_field({{1.0, {0, 2, 0}}, {-0.7, {1, 0, 1}}});
    const ScalarField h = poly_field({{0.4, {1, 1, 1}}, {1.0, {0, 0, 2}}, {0.2, {3, 0, 0}}});
    auto bracket = [&](const ScalarField& a, const ScalarField& b) {
        return numdiff::fd_field(1, [&cs, a, b](const ContactPoint& y) { return cs.jacobi_bracket(a, b, y); });
    };
    const ContactPoint x(0.5, -0.4, 0.8);
    const double t1 = cs.jacobi_bracket(f, bracket(g, h), x);
    const double t2 = cs.jacobi_bracket(g, bracket(h, f), x);
    const double t3 = cs.jacobi_bracket(h, bracket(f, g), x);
    const double scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)});
    EXPECT_LT(std::abs(t1 + t2 + t3) / scale, 1e-4);
}

TEST(ContactStructure, LevelSetDecomposition)
{
    const ContactStructure cs(2);
    Polynomial p(5);
    p.add_term(0.5, {0, 0, 2, 0, 0}).add_term(1.0, {2, 1, 0, 0, 0}).add_term(0.8, {0, 0, 0, 0, 1});
    const ScalarField f = polynomial_field(2, p);
    const ContactPoint x(Vec::Constant(2, 0.3), Vec::Constant(2, -0.5), 1.0);
    const LevelSetReport r = cs.verify_level_set_decomposition(f, x, 1e-10);
    EXPECT_TRUE(r.passed) << r.residual;
    EXPECT_DOUBLE_EQ(r.reeb_derivative, 0.8);
}

TEST(ContactStructure, Errors)
{
    EXPECT_THROW(ContactStructure(0), InvalidArgument);
    const ContactStructure cs(1);
    const ContactPoint x2(Vec::Zero(2), Vec::Zero(2), 0.0);
    EXPECT_THROW(cs.eta(x2, cs.reeb()), DimensionMismatch);
    EXPECT_THROW(cs.evolution_field(damped_oscillator_system(0.1, 2).hamiltonian(), ContactPoint(0.0, 0.0, 0.0)),
                 DimensionMismatch);
    const ScalarField no_S = poly_field({{1.0, {2, 0, 0}}});
    EXPECT_THROW(cs.verify_level_set_decomposition(no_S, ContactPoint(1.0, 0.0, 0.0), 1e-10), ReebDerivativeZero);
}

TEST(GeometrySuite, PassesOnCorrectStructure)
{
    const checks::Report r = checks::geometry_suite(THERMOFLOW_TEST_SEED);
    for (const auto& c : r.results) EXPECT_TRUE(c.passed) << checks::format(c);
}

TEST(GeometrySuite, DetectsSignMutationInLambda)
{
    const checks::Report r = checks::geometry_suite<FlippedLambda>(THERMOFLOW_TEST_SEED);
    EXPECT_FALSE(r.passed());
    for (const char* name : {"geometry.sharp_pairing_matches_lambda", "geometry.lambda_equals_minus_deta_of_flat_inverse",
                             "geometry.cartan_equals_lambda0_plus_delta"}) {
        const checks::CheckResult* c = r.find(name);
        ASSERT_NE(c, nullptr) << name;
        EXPECT_FALSE(c->passed) << checks::format(*c);
    }
}
