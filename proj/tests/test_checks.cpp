#include <gtest/gtest.h>

#include "thermoflow/checks.hpp"

using namespace thermoflow;

TEST(Checks, ResultFormatting)
{
    const checks::CheckResult a = checks::at_most("x.residual", 1e-14, 1e-13);
    EXPECT_TRUE(a.passed);
    EXPECT_NE(checks::format(a).find("PASS"), std::string::npos);
    EXPECT_NE(checks::format(a).find("max_residual=1e-14 "), std::string::npos);

    const checks::CheckResult b = checks::at_least("x.min", -1.0, 0.0);
    EXPECT_FALSE(b.passed);
    EXPECT_NE(checks::format(b).find("FAIL"), std::string::npos);

    EXPECT_TRUE(checks::within("x.order", 2.0, 1.7, 2.3).passed);
    EXPECT_FALSE(checks::within("x.order", 1.6, 1.7, 2.3).passed);
    EXPECT_FALSE(checks::at_most("x.nan", std::numeric_limits<double>::quiet_NaN(), 1.0).passed);
}

TEST(Checks, SamplerStreamsAreIndependentAndReproducible)
{
    checks::Sampler a(THERMOFLOW_TEST_SEED, 1);
    checks::Sampler b(THERMOFLOW_TEST_SEED, 1);
    checks::Sampler c(THERMOFLOW_TEST_SEED, 2);
    const Vec va = a.vector(5, -1, 1);
    EXPECT_EQ(va, b.vector(5, -1, 1));
    EXPECT_NE(va, c.vector(5, -1, 1));
}

TEST(Checks, SuiteReportsAreDeterministic)
{
    EXPECT_EQ(checks::run_suite("geometry", 7).text(), checks::run_suite("geometry", 7).text());
    EXPECT_EQ(checks::run_suite("systems", 7).text(), checks::run_suite("systems", 7).text());
}

TEST(Checks, UnknownSuite) { EXPECT_THROW(checks::run_suite("physics", 1), InvalidArgument); }
