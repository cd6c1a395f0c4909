#pragma once

// Invariant suites behind `thermoflow check`. Every check is a pure function of
// the seed; the geometry suite is templated on the structure type so that a
// deliberately broken structure can be run through the same checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "thermoflow/steppers.hpp"

namespace thermoflow::checks {

enum class Bound { AtMost, AtLeast, Within };

struct CheckResult {
    std::string name;
    double value = 0.0;
    Bound bound = Bound::AtMost;
    double lower = 0.0;
    double upper = 0.0;
    bool passed = false;
};

inline CheckResult at_most(std::string name, double value, double tol)
{
    return {std::move(name), value, Bound::AtMost, 0.0, tol, std::isfinite(value) && value <= tol};
}

inline CheckResult at_least(std::string name, double value, double bound)
{
    return {std::move(name), value, Bound::AtLeast, bound, 0.0, std::isfinite(value) && value >= bound};
}

inline CheckResult within(std::string name, double value, double lo, double hi)
{
    return {std::move(name), value, Bound::Within, lo, hi, std::isfinite(value) && value >= lo && value <= hi};
}

inline std::string format(const CheckResult& r)
{
    char buf[256];
    switch (r.bound) {
    case Bound::AtMost:
        std::snprintf(buf, sizeof buf, "%-44s max_residual=%-24.17g bound=<=%-9.3g %s", r.name.c_str(), r.value,
                      r.upper, r.passed ? "PASS" : "FAIL");
        break;
    case Bound::AtLeast:
        std::snprintf(buf, sizeof buf, "%-44s min_value=%-27.17g bound=>=%-9.3g %s", r.name.c_str(), r.value,
                      r.lower, r.passed ? "PASS" : "FAIL");
        break;
    case Bound::Within:
        std::snprintf(buf, sizeof buf, "%-44s value=%-31.17g bound=[%g,%g] %s", r.name.c_str(), r.value, r.lower,
                      r.upper, r.passed ? "PASS" : "FAIL");
        break;
    }
    return buf;
}

struct Report {
    std::vector<CheckResult> results;

    bool passed() const
    {
        return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
    }

    void append(const Report& other) { results.insert(results.end(), other.results.begin(), other.results.end()); }

    const CheckResult* find(std::string_view name) const
    {
        for (const auto& r : results) {
            if (r.name == name) return &r;
        }
        return nullptr;
    }

    std::string text() const
    {
        std::string out;
        for (const auto& r : results) out += format(r) + "\n";
        return out;
    }
};

inline constexpr std::array<std::string_view, 5> kSuiteNames = {"geometry", "gradients", "integrators", "systems",
                                                                "all"};

/// Deterministic sampling helpers. Each check draws from its own stream so
/// that adding or reordering checks leaves the others unchanged.
class Sampler {
public:
    Sampler(std::uint64_t seed, std::uint64_t stream)
    {
        std::seed_seq seq{seed & 0xffffffffu, seed >> 32, stream};
        rng_.seed(seq);
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Vec vector(Eigen::Index n, double lo, double hi)
    {
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    ContactPoint point(int n, double r = 2.0) { return ContactPoint::from_vector(vector(2 * n + 1, -r, r)); }
    CoVector covector(int n, double r = 2.0) { return CoVector::from_vector(vector(2 * n + 1, -r, r)); }
    TangentVector tangent(int n, double r = 2.0) { return TangentVector::from_vector(vector(2 * n + 1, -r, r)); }

    /// A polynomial in `variables` unknowns with `terms` monomials of total degree <= degree.
    Polynomial polynomial(int variables, int degree, int terms)
    {
        Polynomial poly(variables);
        for (int t = 0; t < terms; ++t) {
            std::vector<int> e(variables, 0);
            const int d = integer(0, degree);
            for (int k = 0; k < d; ++k) ++e[integer(0, variables - 1)];
            poly.add_term(uniform(-1.0, 1.0), e);
        }
        return poly;
    }

    ScalarField field(int n, int degree = 3, int terms = 8)
    {
        return polynomial_field(n, polynomial(2 * n + 1, degree, terms));
    }

private:
    std::mt19937_64 rng_;
};

namespace detail {

inline std::vector<int> exps(std::initializer_list<int> e) { return std::vector<int>(e); }

/// H = 1/2 p^T A p + 1/2 q^T K q + gamma S with A = B B^T (positive semi-definite).
inline ScalarField random_quadratic_hamiltonian(Sampler& s, int n, double gamma)
{
    const Mat B = Mat::NullaryExpr(n, n, [&s](Eigen::Index, Eigen::Index) { return s.uniform(-1.0, 1.0); });
    const Mat A = B * B.transpose();
    const Mat C = Mat::NullaryExpr(n, n, [&s](Eigen::Index, Eigen::Index) { return s.uniform(-1.0, 1.0); });
    const Mat K = C * C.transpose() + Mat::Identity(n, n);
    const SimpleThermoSystem sys(
        n, [A](const Vec&) -> Mat { return A; },
        [K, gamma](const Vec& q, double S) { return 0.5 * q.dot(K * q) + gamma * S; },
        [K, gamma](const Vec& q, double) { return PotentialGradient{K * q, gamma}; });
    return hamiltonian_of(sys);
}

/// An anharmonic Lagrangian with velocity-entropy coupling, so that R_L and
/// the mixed Hessian blocks are non-trivial:
///   L = (1 + c S)|v|^2/2 + eps |v|^4/4 - |q|^2/2 - kappa |q|^4/4 - gamma S.
inline ContactLagrangian coupled_lagrangian(int n, double c = 0.1, double eps = 0.05, double kappa = 0.2,
                                            double gamma = 0.1)
{
    return {n, [=](const TangentState& ts) {
                const Vec& v = ts.qdot;
                const Vec& q = ts.q;
                const double a = 1.0 + c * ts.S;
                const double v2 = v.squaredNorm();
                const double q2 = q.squaredNorm();
                LagrangianJet j;
                j.value = 0.5 * a * v2 + 0.25 * eps * v2 * v2 - 0.5 * q2 - 0.25 * kappa * q2 * q2 - gamma * ts.S;
                j.dq = -q - kappa * q2 * q;
                j.dqdot = a * v + eps * v2 * v;
                j.dS = 0.5 * c * v2 - gamma;
                j.W = (a + eps * v2) * Mat::Identity(n, n) + 2.0 * eps * v * v.transpose();
                j.qdot_q = Mat::Zero(n, n);
                j.qdot_S = c * v;
                return j;
            }};
}

inline double scaled(double err, std::initializer_list<double> magnitudes)
{
    double s = 1.0;
    for (double m : magnitudes) s = std::max(s, std::abs(m));
    return err / s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// geometry

/// Brackets assembled from the structure's own primitives, so that a broken
/// lambda shows up everywhere it is used.
template <class Geometry>
double jacobi_from_primitives(const Geometry& geo, double f, const CoVector& df, double g, const CoVector& dg,
                              const ContactPoint& x)
{
    return geo.lambda(x, df, dg) - f * dg.aS + g * df.aS;
}

template <class Geometry = ContactStructure>
Report geometry_suite(std::uint64_t seed)
{
    Report report;
    constexpr int kPoints = 50;

    {
        Sampler s(seed, 1);
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < kPoints; ++k) {
                const ContactPoint x = s.point(n);
                worst = std::max(worst, std::abs(geo.eta(x, geo.reeb()) - 1.0));
                for (int j = 0; j < 2 * n + 1; ++j) {
                    worst = std::max(worst, std::abs(geo.d_eta(x, geo.reeb(), coordinate_vector(n, j))));
                }
            }
        }
        report.results.push_back(at_most("geometry.reeb_eta_one_and_i_R_deta_zero", worst, 0.0));
    }

    {
        Sampler s(seed, 2);
        double worst = 0.0;
        double min_det = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < 100; ++k) {
                const ContactPoint x = s.point(n);
                min_det = std::min(min_det, std::abs(geo.flat_matrix(x).determinant()));
                for (int j = 0; j < 2 * n + 1; ++j) {
                    const TangentVector e = coordinate_vector(n, j);
                    const Vec back = geo.flat_inverse(x, geo.flat(x, e)).to_vector();
                    worst = std::max(worst, (back - e.to_vector()).lpNorm<Eigen::Infinity>());
                }
            }
        }
        report.results.push_back(at_most("geometry.flat_invertible_roundtrip", worst, 1e-12));
        report.results.push_back(at_least("geometry.flat_min_abs_determinant", min_det, 1e-12));
    }

    {
        Sampler s(seed, 3);
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < 20; ++k) {
                const ContactPoint x = s.point(n);
                for (int a = 0; a < 2 * n + 1; ++a) {
                    const CoVector ea = coordinate_covector(n, a);
                    const TangentVector sharp = geo.sharp_lambda(x, ea);
                    for (int b = 0; b < 2 * n + 1; ++b) {
                        const CoVector eb = coordinate_covector(n, b);
                        worst = std::max(worst, std::abs(eb(sharp) - geo.lambda(x, ea, eb)));
                    }
                }
            }
        }
        report.results.push_back(at_most("geometry.sharp_pairing_matches_lambda", worst, 1e-14));
    }

    {
        // Lambda(a, b) = -d eta(flat^{-1} a, flat^{-1} b)
        Sampler s(seed, 4);
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < kPoints; ++k) {
                const ContactPoint x = s.point(n);
                const CoVector a = s.covector(n);
                const CoVector b = s.covector(n);
                const double lam = geo.lambda(x, a, b);
                const double via = -geo.d_eta(x, geo.flat_inverse(x, a), geo.flat_inverse(x, b));
                worst = std::max(worst, detail::scaled(std::abs(lam - via), {lam, via}));
            }
        }
        report.results.push_back(at_most("geometry.lambda_equals_minus_deta_of_flat_inverse", worst, 1e-12));
    }

    {
        Sampler s(seed, 5);
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < kPoints; ++k) {
                const ScalarField f = s.field(n);
                const ScalarField g = s.field(n);
                const ContactPoint x = s.point(n, 1.0);
                const CoVector df = f.gradient(x);
                const CoVector dg = g.gradient(x);
                const double cartan = geo.lambda(x, df, dg);
                const double p0 = geo.poisson_lambda0_bracket(f, g, x);
                const double dl = geo.delta_bracket(f, g, x);
                worst = std::max(worst, detail::scaled(std::abs(cartan - p0 - dl), {cartan, p0, dl}));
            }
        }
        report.results.push_back(at_most("geometry.cartan_equals_lambda0_plus_delta", worst, 1e-13));
    }

    {
        Sampler s(seed, 6);
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < kPoints; ++k) {
                const ScalarField H = detail::random_quadratic_hamiltonian(s, n, s.uniform(0.0, 1.0));
                const ContactPoint x = s.point(n);
                const CoVector dH = H.gradient(x);
                const double h = H(x);
                worst = std::max({worst, std::abs(jacobi_from_primitives(geo, h, dH, h, dH, x)),
                                  std::abs(geo.poisson_lambda0_bracket(H, H, x)),
                                  std::abs(geo.delta_bracket(H, H, x)), std::abs(geo.lambda(x, dH, dH))});
            }
        }
        report.results.push_back(at_most("geometry.self_brackets_vanish", worst, 1e-13));
    }

    {
        // {H, S}_Delta = Delta(H) = p^T A p >= 0, and {S, H}_Lambda0 = 0.
        Sampler s(seed, 7);
        double worst = 0.0;
        double min_delta = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            const ScalarField S = coordinate_field(n, 2 * n);
            for (int k = 0; k < kPoints; ++k) {
                const ScalarField H = detail::random_quadratic_hamiltonian(s, n, s.uniform(0.0, 1.0));
                const ContactPoint x = s.point(n);
                const double deltaH = geo.liouville(x).dp.dot(H.gradient(x).ap);
                const double bracket = geo.delta_bracket(H, S, x);
                worst = std::max({worst, detail::scaled(std::abs(bracket - deltaH), {deltaH}),
                                  std::abs(geo.poisson_lambda0_bracket(S, H, x))});
                min_delta = std::min(min_delta, deltaH);
            }
        }
        report.results.push_back(at_most("geometry.delta_bracket_H_S_equals_Delta_H", worst, 1e-13));
        report.results.push_back(at_least("geometry.Delta_H_nonnegative", min_delta, -1e-12));
    }

    {
        Sampler s(seed, 8);
        double worst_e = 0.0;
        double worst_x = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < kPoints; ++k) {
                const ScalarField f = s.field(n);
                const ContactPoint x = s.point(n, 1.0);
                const CoVector df = f.gradient(x);
                const double scale = df.to_vector().squaredNorm() + 1.0;
                worst_e = std::max(worst_e, std::abs(df(geo.evolution_field(f, x))) / scale);
                const double fx = f(x);
                worst_x = std::max(worst_x, std::abs(df(geo.hamiltonian_field(f, x)) + fx * df.aS) /
                                                std::max(scale, std::abs(fx * df.aS)));
            }
        }
        report.results.push_back(at_most("geometry.E_f_annihilates_f", worst_e, 1e-13));
        report.results.push_back(at_most("geometry.X_f_of_f_equals_minus_f_R_f", worst_x, 1e-12));
    }

    {
        // L_{E_f} eta = -R(f) eta + df, in Cartan form i_E d eta + d(eta(E)) with
        // d(eta(E)) by central differences, and in coordinates
        // (L_X eta)_j = X^i d_i eta_j + eta_i d_j X^i with an FD Jacobian of E_f.
        Sampler s(seed, 9);
        double worst_cartan = 0.0;
        double worst_coord = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            const int N = 2 * n + 1;
            for (int k = 0; k < kPoints; ++k) {
                const ScalarField f = s.field(n);
                const ContactPoint x = s.point(n, 1.0);
                const CoVector df = f.gradient(x);
                const TangentVector E = geo.evolution_field(f, x);
                const Vec eta = CoVector(Vec(-x.p), Vec::Zero(n), 1.0).to_vector();
                const Vec expected = -df.aS * eta + df.to_vector();
                const double scale = std::max(1.0, expected.lpNorm<Eigen::Infinity>());

                Vec i_E_deta(N);
                for (int j = 0; j < N; ++j) i_E_deta[j] = geo.d_eta(x, E, coordinate_vector(n, j));
                const Vec d_eta_E = numdiff::gradient(
                    [&](const Vec& y) {
                        const ContactPoint py = ContactPoint::from_vector(y);
                        return geo.eta(py, geo.evolution_field(f, py));
                    },
                    x.to_vector(), numdiff::kGradientStep);
                worst_cartan =
                    std::max(worst_cartan, (i_E_deta + d_eta_E - expected).lpNorm<Eigen::Infinity>() / scale);

                const Mat J = numdiff::jacobian(
                    [&](const Vec& y) { return geo.evolution_field(f, ContactPoint::from_vector(y)).to_vector(); },
                    x.to_vector(), numdiff::kGradientStep);
                Vec lie = J.transpose() * eta;
                // d_i eta_j: only d eta_{q_k} / d p_k = -1 is non-zero.
                for (int i = 0; i < n; ++i) lie[i] += E.dp[i] * -1.0;
                worst_coord = std::max(worst_coord, (lie - expected).lpNorm<Eigen::Infinity>() / scale);
            }
        }
        report.results.push_back(at_most("geometry.lie_derivative_eta_cartan_form", worst_cartan, 1e-5));
        report.results.push_back(at_most("geometry.lie_derivative_eta_coordinates", worst_coord, 1e-5));
    }

    {
        Sampler s(seed, 10);
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < kPoints; ++k) {
                // S-free polynomial plus a Reeb-derivative term keeps R(f) away from zero.
                const Polynomial qp_part = s.polynomial(2 * n, 3, 8);
                Polynomial poly(2 * n + 1);
                for (const auto& t : qp_part.terms()) {
                    std::vector<int> e = t.exponents;
                    e.push_back(0);
                    poly.add_term(t.coefficient, e);
                }
                std::vector<int> eS(2 * n + 1, 0);
                eS[2 * n] = 1;
                poly.add_term(s.uniform(0.1, 1.0), eS);
                const ScalarField f = polynomial_field(n, poly);
                const LevelSetReport r = geo.verify_level_set_decomposition(f, s.point(n), 1e-10);
                worst = std::max(worst, r.residual);
            }
        }
        report.results.push_back(at_most("geometry.level_set_liouville_decomposition", worst, 1e-10));
    }

    {
        // Cyclic sum of the Jacobi bracket, inner brackets differentiated numerically.
        Sampler s(seed, 11);
        double worst = 0.0;
        for (int n = 1; n <= 2; ++n) {
            const Geometry geo(n);
            for (int k = 0; k < 10; ++k) {
                const ScalarField f = s.field(n, 3, 6);
                const ScalarField g = s.field(n, 3, 6);
                const ScalarField h = s.field(n, 3, 6);
                const ContactPoint x = s.point(n, 1.0);
                auto bracket_field = [&geo, n](const ScalarField& a, const ScalarField& b) {
                    return numdiff::fd_field(n, [&geo, a, b](const ContactPoint& y) {
                        return jacobi_from_primitives(geo, a(y), a.gradient(y), b(y), b.gradient(y), y);
                    });
                };
                auto outer = [&](const ScalarField& a, const ScalarField& inner) {
                    return jacobi_from_primitives(geo, a(x), a.gradient(x), inner(x), inner.gradient(x), x);
                };
                const double t1 = outer(f, bracket_field(g, h));
                const double t2 = outer(g, bracket_field(h, f));
                const double t3 = outer(h, bracket_field(f, g));
                worst = std::max(worst, std::abs(t1 + t2 + t3) /
                                            std::max(1.0, std::abs(t1) + std::abs(t2) + std::abs(t3)));
            }
        }
        report.results.push_back(at_most("geometry.jacobi_identity", worst, 1e-4));
    }

    {
        // f = S, g = q, h = p at (1, 1, 0): {S, qp} = 0 but q{S,p} + p{S,q} = qp.
        const Geometry geo(1);
        const ScalarField S = coordinate_field(1, 2);
        const ScalarField q = coordinate_field(1, 0);
        const ScalarField p = coordinate_field(1, 1);
        const ScalarField qp = product(q, p);
        const ContactPoint x(1.0, 1.0, 0.0);
        auto br = [&](const ScalarField& a, const ScalarField& b) {
            return jacobi_from_primitives(geo, a(x), a.gradient(x), b(x), b.gradient(x), x);
        };
        const double defect = br(S, qp) - (q(x) * br(S, p) + p(x) * br(S, q));
        report.results.push_back(at_least("geometry.leibniz_rule_fails_witness", std::abs(defect), 0.1));
    }

    return report;
}

// ---------------------------------------------------------------------------
// discrete gradients

namespace detail {

struct TestHamiltonian {
    std::string name;
    Polynomial poly;
};

/// Three polynomial Hamiltonians of degree <= 6 in 3, 5 and 7 variables.
inline std::vector<TestHamiltonian> gradient_test_hamiltonians()
{
    std::vector<TestHamiltonian> out;
    {
        Polynomial h(3);
        h.add_term(0.5, exps({2, 0, 0})).add_term(0.5, exps({0, 2, 0})).add_term(0.1, exps({0, 0, 1}));
        out.push_back({"damped_oscillator", h});
    }
    {
        Polynomial h(5);
        h.add_term(0.5, exps({0, 0, 2, 0, 0}))
            .add_term(0.5, exps({0, 0, 0, 2, 0}))
            .add_term(0.25, exps({4, 0, 0, 0, 0}))
            .add_term(0.5, exps({0, 2, 0, 0, 0}))
            .add_term(1.0, exps({1, 2, 0, 0, 0}))
            .add_term(0.3, exps({0, 0, 0, 0, 1}))
            .add_term(0.1, exps({1, 0, 0, 0, 2}))
            .add_term(-0.2, exps({0, 1, 1, 1, 0}));
        out.push_back({"quartic_coupled_n2", h});
    }
    {
        Polynomial h(7);
        h.add_term(0.5, exps({0, 0, 0, 2, 0, 0, 0}))
            .add_term(0.5, exps({0, 0, 0, 0, 2, 0, 0}))
            .add_term(0.5, exps({0, 0, 0, 0, 0, 2, 0}))
            .add_term(1.0, exps({2, 0, 0, 0, 0, 0, 0}))
            .add_term(0.7, exps({1, 1, 1, 0, 0, 0, 0}))
            .add_term(0.05, exps({6, 0, 0, 0, 0, 0, 0}))
            .add_term(-0.1, exps({0, 3, 0, 0, 2, 0, 0}))
            .add_term(0.2, exps({0, 0, 1, 0, 0, 0, 1}))
            .add_term(0.05, exps({0, 0, 0, 0, 0, 0, 3}));
        out.push_back({"sextic_n3", h});
    }
    return out;
}

} // namespace detail

inline Report gradients_suite(std::uint64_t seed)
{
    Report report;

    {
        double worst = 0.0;
        const QuadratureRule& q = gauss_legendre(10);
        for (int d = 0; d <= 19; ++d) {
            double sum = 0.0;
            for (std::size_t k = 0; k < q.nodes.size(); ++k) sum += q.weights[k] * std::pow(q.nodes[k], d);
            worst = std::max(worst, std::abs(sum - 1.0 / (d + 1)));
        }
        report.results.push_back(at_most("gradients.gauss_legendre_10_exact_to_degree_19", worst, 1e-14));
    }

    const auto hams = detail::gradient_test_hamiltonians();
    const std::array<DiscreteGradientRule, 3> rules = {DiscreteGradientRule::mean_value(),
                                                       DiscreteGradientRule::midpoint(),
                                                       DiscreteGradientRule::coordinate_increment()};
    for (const auto& rule : rules) {
        const std::string prefix = "gradients." + std::string(to_string(rule.kind));
        double energy = 0.0;
        double consistency = 0.0;
        double rate = std::numeric_limits<double>::infinity();
        Sampler s(seed, 20 + static_cast<std::uint64_t>(rule.kind));
        for (const auto& ham : hams) {
            const EuclideanFunction H(ham.poly.size(), [p = ham.poly](const Vec& x) { return p.value(x); },
                                      [p = ham.poly](const Vec& x) { return p.gradient(x); });
            std::vector<GradientPair> pairs;
            for (int k = 0; k < 1000; ++k) {
                pairs.push_back({s.vector(H.size(), -1.5, 1.5), s.vector(H.size(), -1.5, 1.5)});
            }
            const AxiomReport r = check_axioms(rule, H, pairs, 1e-12);
            energy = std::max(energy, r.max_energy_residual);
            consistency = std::max(consistency, r.max_consistency_residual);
            rate = std::min(rate, r.min_convergence_rate);
        }
        report.results.push_back(at_most(prefix + ".energy_consistency", energy, 1e-12));
        report.results.push_back(at_most(prefix + ".limit_residual_at_eps_1e-4", consistency, 1e-3));
        report.results.push_back(at_least(prefix + ".limit_convergence_rate", rate, 0.9));
    }

    {
        Sampler s(seed, 30);
        double worst_mid = 0.0;
        double worst_mean = 0.0;
        for (const auto& ham : hams) {
            const EuclideanFunction H(ham.poly.size(), [p = ham.poly](const Vec& x) { return p.value(x); },
                                      [p = ham.poly](const Vec& x) { return p.gradient(x); });
            for (int k = 0; k < 200; ++k) {
                const Vec x = s.vector(H.size(), -1.5, 1.5);
                const Vec y = s.vector(H.size(), -1.5, 1.5);
                for (auto [rule, worst] : {std::pair{DiscreteGradientRule::midpoint(), &worst_mid},
                                           std::pair{DiscreteGradientRule::mean_value(), &worst_mean}}) {
                    const Vec a = discrete_gradient(rule, H, x, y);
                    const Vec b = discrete_gradient(rule, H, y, x);
                    *worst = std::max(*worst, (a - b).lpNorm<Eigen::Infinity>() /
                                                  std::max(1.0, a.lpNorm<Eigen::Infinity>()));
                }
            }
        }
        report.results.push_back(at_most("gradients.midpoint.symmetric", worst_mid, 1e-13));
        report.results.push_back(at_most("gradients.mean-value.symmetric", worst_mean, 1e-13));

        // H(q, p) = q p between (0, 0) and (1, 1): (0, 1) one way, (1, 0) the other.
        Polynomial qp(2);
        qp.add_term(1.0, detail::exps({1, 1}));
        const EuclideanFunction H(2, [qp](const Vec& x) { return qp.value(x); },
                                  [qp](const Vec& x) { return qp.gradient(x); });
        const Vec a = discrete_gradient(DiscreteGradientRule::coordinate_increment(), H, Vec::Zero(2), Vec::Ones(2));
        const Vec b = discrete_gradient(DiscreteGradientRule::coordinate_increment(), H, Vec::Ones(2), Vec::Zero(2));
        report.results.push_back(
            at_least("gradients.itoh-abe.asymmetry_witness", (a - b).lpNorm<Eigen::Infinity>(), 0.5));
    }

    {
        // Non-polynomial H: the mean-value residual must not grow as nodes double.
        const EuclideanFunction H(
            3,
            [](const Vec& x) { return 0.5 * x[1] * x[1] - std::cos(x[0]) + std::exp(0.3 * x[2]) * (1.0 + x[0] * x[0]); },
            [](const Vec& x) {
                Vec g(3);
                g[0] = std::sin(x[0]) + 2.0 * x[0] * std::exp(0.3 * x[2]);
                g[1] = x[1];
                g[2] = 0.3 * std::exp(0.3 * x[2]) * (1.0 + x[0] * x[0]);
                return g;
            });
        Sampler s(seed, 31);
        double worst_ratio = 0.0;
        for (int k = 0; k < 200; ++k) {
            const Vec x = s.vector(3, -3.0, 3.0);
            const Vec y = s.vector(3, -3.0, 3.0);
            const double r4 = energy_residual(DiscreteGradientRule::mean_value(4), H, x, y);
            const double r8 = energy_residual(DiscreteGradientRule::mean_value(8), H, x, y);
            const double r16 = energy_residual(DiscreteGradientRule::mean_value(16), H, x, y);
            const double floor = 1e-14;
            worst_ratio = std::max({worst_ratio, (r8 - floor) / std::max(r4, floor), (r16 - floor) / std::max(r8, floor)});
        }
        report.results.push_back(at_most("gradients.mean-value.node_doubling_monotone", worst_ratio, 1.1));
    }

    return report;
}

// ---------------------------------------------------------------------------
// integrators

namespace detail {

/// Largest peak-to-peak variation of H over k in [from, to].
inline double oscillation(const std::vector<double>& H, std::size_t from, std::size_t to)
{
    const auto first = H.begin() + static_cast<std::ptrdiff_t>(from);
    const auto last = H.begin() + static_cast<std::ptrdiff_t>(std::min(to + 1, H.size()));
    const auto [lo, hi] = std::minmax_element(first, last);
    return *hi - *lo;
}

} // namespace detail

inline Report integrators_suite(std::uint64_t seed)
{
    Report report;
    const double gamma = 0.1;
    const PolynomialSystem osc = damped_oscillator_system(gamma);
    const ScalarField H = osc.hamiltonian();
    StepperConfig cfg;
    cfg.h = 0.1;
    const ContactPoint fig1(0.0, 10.0, 0.0);

    {
        const StepResult c = dg_harmonic_closed_form_step(gamma, cfg, fig1);
        const double rq = std::abs(c.state.q[0] - 4.0 / 4.03) / (4.0 / 4.03);
        const double rp = std::abs(c.state.p[0] - 39.7 / 4.03) / (39.7 / 4.03);
        const double rS = std::abs(c.state.S - 160.0 / 16.2409) / (160.0 / 16.2409);
        report.results.push_back(at_most("integrators.dg_closed_form_first_step", std::max({rq, rp, rS}), 1e-12));
        const StepResult g = dg_step(H, DiscreteGradientRule::midpoint(), cfg, fig1);
        report.results.push_back(at_most("integrators.dg_midpoint_first_step_vs_closed_form",
                                         (g.state.to_vector() - c.state.to_vector()).lpNorm<Eigen::Infinity>(),
                                         1e-10));
    }

    {
        const Trajectory closed = run_stepper(StepperKind::DgHarmonicExact, osc, cfg, fig1, 10000);
        const Trajectory generic = run_stepper(StepperKind::DgMidpoint, osc, cfg, fig1, 10000);
        double per_step = 0.0;
        for (std::size_t k = 0; k + 1 < 1000; ++k) {
            const StepResult a = dg_step(H, DiscreteGradientRule::midpoint(), cfg, closed.states[k]);
            per_step = std::max(per_step, (a.state.to_vector() - closed.states[k + 1].to_vector())
                                              .lpNorm<Eigen::Infinity>());
        }
        report.results.push_back(at_most("integrators.dg_midpoint_per_step_vs_closed_form", per_step, 1e-10));
        report.results.push_back(at_most("integrators.dg_midpoint_energy_drift_1e4_steps", generic.max_energy_drift(), 1e-7));
        report.results.push_back(at_most("integrators.dg_closed_form_energy_drift_1e4_steps", closed.max_energy_drift(), 1e-10));
        report.results.push_back(
            at_least("integrators.dg_midpoint_min_entropy_increment", generic.min_entropy_increment(), -1e-10));
        report.results.push_back(
            at_least("integrators.dg_closed_form_min_entropy_increment", closed.min_entropy_increment(), -1e-10));
    }

    {
        // one step of every rule on random quadratic and quartic Hamiltonians
        Sampler s(seed, 40);
        double worst = 0.0;
        for (const auto& rule : {DiscreteGradientRule::mean_value(), DiscreteGradientRule::midpoint(),
                                 DiscreteGradientRule::coordinate_increment()}) {
            for (int k = 0; k < 20; ++k) {
                const int n = 1 + k % 3;
                ScalarField Hr = detail::random_quadratic_hamiltonian(s, n, s.uniform(0.0, 1.0));
                if (k % 2 == 1) {
                    Polynomial quartic(2 * n + 1);
                    std::vector<int> e(2 * n + 1, 0);
                    e[0] = 4;
                    quartic.add_term(0.25, e);
                    Hr = sum(Hr, polynomial_field(n, quartic));
                }
                const ContactPoint x0 = s.point(n, 1.0);
                const StepResult r = dg_step(Hr, rule, cfg, x0);
                worst = std::max(worst, std::abs(Hr(r.state) - Hr(x0)));
            }
        }
        report.results.push_back(at_most("integrators.dg_all_rules_one_step_energy_error", worst, 10 * cfg.newton_tol));
    }

    {
        const HerglotzStepResult c = herglotz_harmonic_closed_form_step(gamma, cfg, 0.0, 1.0, 0.0);
        const double err = std::max(std::abs(c.q_next[0] - 7.9401 / 4.01), std::abs(c.S_curr - 9.975));
        report.results.push_back(at_most("integrators.herglotz_closed_form_first_step", err, 1e-12));

        const HerglotzInitial init{Vec::Constant(1, 0.0), Vec::Constant(1, 1.0), 0.0};
        const Trajectory closed = run_stepper(StepperKind::HerglotzHarmonicExact, osc, cfg, init, 1000);
        const Trajectory generic = run_stepper(StepperKind::Herglotz, osc, cfg, init, 1000);
        double diff = 0.0;
        for (std::size_t k = 0; k < closed.size(); ++k) {
            diff = std::max(diff, (closed.states[k].to_vector() - generic.states[k].to_vector())
                                      .lpNorm<Eigen::Infinity>());
        }
        report.results.push_back(at_most("integrators.herglotz_generic_vs_closed_form_1000_steps", diff, 1e-10));
        report.results.push_back(
            at_least("integrators.herglotz_min_entropy_increment", closed.min_entropy_increment(), -1e-10));
        const double early = detail::oscillation(closed.energy, 0, 500);
        const double late = detail::oscillation(closed.energy, 500, 1000);
        report.results.push_back(at_most("integrators.herglotz_H_oscillation_late_over_early", late / early, 1.0));
    }

    {
        const Trajectory ref = reference_integrate(H, fig1, 100.0, 1000);
        report.results.push_back(at_most("integrators.reference_energy_drift_t100", ref.max_energy_drift(), 1e-8));
        std::vector<double> times(10001);
        for (int k = 0; k <= 10000; ++k) times[k] = 0.1 * k;
        const Trajectory longrun = reference_integrate(H, fig1, times);
        report.results.push_back(
            at_least("integrators.reference_min_entropy_increment", longrun.min_entropy_increment(), -1e-10));

        const ScalarField H0 = damped_oscillator_system(0.0).hamiltonian();
        const std::vector<double> tpi = {0.0, std::numbers::pi};
        const Trajectory undamped = reference_integrate(H0, fig1, tpi);
        report.results.push_back(at_most("integrators.reference_undamped_q_at_pi", std::abs(undamped.states[1].q[0]), 1e-6));
    }

    {
        const std::array<double, 4> hs = {0.1, 0.05, 0.025, 0.0125};
        auto order = [&](StepperKind kind) {
            return convergence_order(hs, [&](double h) { return final_position_error(kind, osc, fig1, 10.0, h); });
        };
        report.results.push_back(within("integrators.order_dg_midpoint", order(StepperKind::DgMidpoint), 1.7, 2.3));
        report.results.push_back(within("integrators.order_herglotz", order(StepperKind::Herglotz), 1.5, 2.5));
        report.results.push_back(within("integrators.order_euler", order(StepperKind::Euler), 0.8, 1.2));

        double worst_ratio = std::numeric_limits<double>::infinity();
        double prev = final_position_error(StepperKind::DgMidpoint, osc, fig1, 10.0, hs[0]);
        for (std::size_t k = 1; k < hs.size(); ++k) {
            const double e = final_position_error(StepperKind::DgMidpoint, osc, fig1, 10.0, hs[k]);
            worst_ratio = std::min(worst_ratio, prev / e);
            prev = e;
        }
        report.results.push_back(at_least("integrators.dg_midpoint_error_reduction_per_halving", worst_ratio, 3.0));
    }

    return report;
}

// ---------------------------------------------------------------------------
// systems

inline Report systems_suite(std::uint64_t seed)
{
    Report report;

    {
        Sampler s(seed, 50);
        double first = 0.0;
        double second = 0.0;
        double min_production = std::numeric_limits<double>::infinity();
        double generator = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const ContactStructure cs(n);
            const ScalarField S = coordinate_field(n, 2 * n);
            for (int k = 0; k < 50; ++k) {
                // non-quadratic potential so the check is not specific to the oscillator
                Polynomial V = s.polynomial(n + 1, 4, 6);
                std::vector<int> eS(n + 1, 0);
                eS[n] = 1;
                V.add_term(s.uniform(0.0, 1.0), eS);
                const Mat B = Mat::NullaryExpr(n, n, [&s](Eigen::Index, Eigen::Index) { return s.uniform(-1.0, 1.0); });
                const Mat A = B * B.transpose();
                auto pack = [n](const Vec& q, double Sv) {
                    Vec qs(n + 1);
                    qs.head(n) = q;
                    qs[n] = Sv;
                    return qs;
                };
                const SimpleThermoSystem sys(
                    n, [A](const Vec&) -> Mat { return A; },
                    [V, pack](const Vec& q, double Sv) { return V.value(pack(q, Sv)); },
                    [V, pack, n](const Vec& q, double Sv) {
                        const Vec g = V.gradient(pack(q, Sv));
                        return PotentialGradient{g.head(n), g[n]};
                    });
                const ScalarField H = hamiltonian_of(sys);
                const ContactPoint x = s.point(n, 1.0);
                const CoVector dH = H.gradient(x);
                const TangentVector E = cs.evolution_field(H, x);
                const double scale = 1.0 + dH.to_vector().squaredNorm();
                first = std::max(first, std::abs(dH(E)) / scale);
                const double production = x.p.dot(A * x.p);
                second = std::max(second, detail::scaled(std::abs(E.dS - production), {production}));
                min_production = std::min(min_production, E.dS);
                generator = std::max({generator, std::abs(cs.poisson_lambda0_bracket(H, H, x)),
                                      std::abs(cs.delta_bracket(H, H, x)),
                                      std::abs(cs.poisson_lambda0_bracket(S, H, x)),
                                      detail::scaled(std::abs(cs.delta_bracket(H, S, x) - production), {production})});
            }
        }
        report.results.push_back(at_most("systems.first_law_dH_of_E_H", first, 1e-13));
        report.results.push_back(at_most("systems.entropy_rate_equals_pT_g_p", second, 1e-13));
        report.results.push_back(at_least("systems.second_law_min_entropy_rate", min_production, -1e-12));
        report.results.push_back(at_most("systems.single_generator_identities", generator, 1e-13));
    }

    {
        const ContactLagrangian lag = damped_oscillator_lagrangian(0.1);
        const ScalarField H = damped_oscillator_system(0.1).hamiltonian();
        double worst_energy = 0.0;
        double worst_laws = 0.0;
        for (int i = -5; i <= 5; ++i) {
            for (int j = -5; j <= 5; ++j) {
                for (int k = -2; k <= 2; ++k) {
                    const TangentState ts(0.4 * i, 0.4 * j, 0.5 * k);
                    const double EL = lagrangian_energy(lag, ts);
                    worst_energy = std::max(worst_energy, std::abs(EL - H(legendre_transform(lag, ts))));
                    const double thermo = herglotz_rhs(lag, ts, EntropyLaw::Thermodynamic).dS;
                    const double classic = herglotz_rhs(lag, ts, EntropyLaw::Classic).dS;
                    worst_laws = std::max(worst_laws, std::abs(thermo - classic - EL));
                }
            }
        }
        report.results.push_back(at_most("systems.lagrangian_energy_equals_H_of_FL", worst_energy, 1e-12));
        report.results.push_back(at_most("systems.entropy_laws_differ_by_E_L", worst_laws, 1e-12));
    }

    const ContactLagrangian lag = detail::coupled_lagrangian(2);
    auto random_state = [](Sampler& s, int n) {
        return TangentState(s.vector(n, -1.0, 1.0), s.vector(n, -1.0, 1.0), s.uniform(-1.0, 1.0));
    };
    auto fl_vector = [&lag](const Vec& y) { return legendre_transform(lag, TangentState::from_vector(y)).to_vector(); };

    {
        Sampler s(seed, 51);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const TangentState ts = random_state(s, 2);
            const TangentState back = legendre_inverse(lag, legendre_transform(lag, ts));
            worst = std::max(worst, (back.qdot - ts.qdot).lpNorm<Eigen::Infinity>());
        }
        report.results.push_back(at_most("systems.legendre_inverse_recovers_qdot", worst, 1e-10));
    }

    {
        // T FL . herglotz_rhs = E_H o FL, H = E_L o FL^{-1}
        Sampler s(seed, 52);
        const ContactStructure cs(2);
        const ScalarField H = hamiltonian_from_lagrangian(lag);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const TangentState ts = random_state(s, 2);
            const Mat J = numdiff::jacobian(fl_vector, ts.to_vector(), numdiff::kGradientStep);
            const Vec pushed = J * herglotz_rhs(lag, ts).to_vector();
            const Vec target = cs.evolution_field(H, legendre_transform(lag, ts)).to_vector();
            worst = std::max(worst, (pushed - target).lpNorm<Eigen::Infinity>() /
                                        std::max(1.0, target.lpNorm<Eigen::Infinity>()));
        }
        report.results.push_back(at_most("systems.FL_relates_herglotz_rhs_to_E_H", worst, 1e-8));
    }

    {
        // eta_L = FL^* eta: exact Jacobian of FL from the jet, and an FD Jacobian as oracle.
        Sampler s(seed, 53);
        const int n = 2;
        const ContactStructure cs(n);
        double worst_exact = 0.0;
        double worst_fd = 0.0;
        for (int k = 0; k < 20; ++k) {
            const TangentState ts = random_state(s, n);
            const LagrangianJet j = lag.jet(ts);
            Mat T = Mat::Zero(2 * n + 1, 2 * n + 1);
            T.topLeftCorner(n, n).setIdentity();
            T.block(n, 0, n, n) = j.qdot_q;
            T.block(n, n, n, n) = j.W;
            T.block(n, 2 * n, n, 1) = j.qdot_S;
            T(2 * n, 2 * n) = 1.0;
            const Mat Tfd = numdiff::jacobian(fl_vector, ts.to_vector(), numdiff::kGradientStep);
            const ContactPoint x = legendre_transform(lag, ts);
            for (int b = 0; b < 2 * n + 1; ++b) {
                const LagrangianVector v = LagrangianVector::from_vector(Vec::Unit(2 * n + 1, b));
                const double lhs = eta_L(lag, ts, v);
                worst_exact = std::max(worst_exact,
                                       std::abs(lhs - cs.eta(x, TangentVector::from_vector(T * v.to_vector()))));
                worst_fd = std::max(worst_fd, std::abs(lhs - cs.eta(x, TangentVector::from_vector(Tfd * v.to_vector()))));
            }
        }
        report.results.push_back(at_most("systems.eta_L_is_pullback_of_eta", worst_exact, 1e-12));
        report.results.push_back(at_most("systems.eta_L_pullback_fd_jacobian", worst_fd, 1e-8));
    }

    {
        // eta_L(R_L) = 1 and i_{R_L} d eta_L = 0, d eta_L from an FD Jacobian of the coefficients of eta_L.
        Sampler s(seed, 54);
        const int n = 2;
        const int N = 2 * n + 1;
        double worst_eta = 0.0;
        double worst_i = 0.0;
        auto coefficients = [&lag, n, N](const Vec& y) {
            Vec c = Vec::Zero(N);
            c.head(n) = -lag.jet(TangentState::from_vector(y)).dqdot;
            c[N - 1] = 1.0;
            return c;
        };
        for (int k = 0; k < 20; ++k) {
            const TangentState ts = random_state(s, n);
            const LagrangianVector R = reeb_L(lag, ts);
            worst_eta = std::max(worst_eta, std::abs(eta_L(lag, ts, R) - 1.0));
            const Mat D = numdiff::jacobian(coefficients, ts.to_vector(), numdiff::kGradientStep);
            // d eta(v, w) = sum_ij (d_i eta_j - d_j eta_i) v^i w^j with D(j, i) = d_i eta_j
            const Mat F = D.transpose() - D;
            worst_i = std::max(worst_i, (F.transpose() * R.to_vector()).lpNorm<Eigen::Infinity>());
        }
        report.results.push_back(at_most("systems.eta_L_of_R_L_is_one", worst_eta, 1e-14));
        report.results.push_back(at_most("systems.i_R_L_d_eta_L_vanishes", worst_i, 1e-5));
    }

    return report;
}

/// Runs a named suite; "all" runs the four module suites in order.
inline Report run_suite(std::string_view name, std::uint64_t seed)
{
    if (name == "geometry") return geometry_suite(seed);
    if (name == "gradients") return gradients_suite(seed);
    if (name == "integrators") return integrators_suite(seed);
    if (name == "systems") return systems_suite(seed);
    if (name == "all") {
        Report r = geometry_suite(seed);
        r.append(gradients_suite(seed));
        r.append(integrators_suite(seed));
        r.append(systems_suite(seed));
        return r;
    }
    throw InvalidArgument("unknown check suite '" + std::string(name) + "'");
}

} // namespace thermoflow::checks
