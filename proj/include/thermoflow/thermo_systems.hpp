#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "thermoflow/contact_geometry.hpp"

namespace thermoflow {

struct PotentialGradient {
    Vec dq;
    double dS = 0.0;
};

/// H(q, p, S) = 1/2 g^{ij}(q) p_i p_j + V(q, S).
///
/// When the inverse metric depends on q, the supplier must also provide
/// kinetic_q_gradient(q, p) = 1/2 p^T (dg/dq^i) p; without it the metric is
/// treated as constant in the gradient.
class SimpleThermoSystem {
public:
    using Metric = std::function<Mat(const Vec& q)>;
    using Potential = std::function<double(const Vec& q, double S)>;
    using PotentialGrad = std::function<PotentialGradient(const Vec& q, double S)>;
    using KineticQGradient = std::function<Vec(const Vec& q, const Vec& p)>;

    SimpleThermoSystem(int n, Metric inverse_metric, Potential potential, PotentialGrad potential_gradient,
                       KineticQGradient kinetic_q_gradient = {}, std::uint64_t validation_seed = 42)
        : n_(n),
          inverse_metric_(std::move(inverse_metric)),
          potential_(std::move(potential)),
          potential_gradient_(std::move(potential_gradient)),
          kinetic_q_gradient_(std::move(kinetic_q_gradient))
    {
        if (n_ < 1) throw InvalidArgument("SimpleThermoSystem: n must be >= 1");
        validate_metric(validation_seed);
    }

    int dimension() const noexcept { return n_; }

    Mat inverse_metric(const Vec& q) const
    {
        detail::require_same_size(n_, q.size(), "SimpleThermoSystem q");
        return inverse_metric_(q);
    }
    double potential(const Vec& q, double S) const { return potential_(q, S); }
    PotentialGradient potential_gradient(const Vec& q, double S) const { return potential_gradient_(q, S); }
    const KineticQGradient& kinetic_q_gradient() const noexcept { return kinetic_q_gradient_; }

private:
    // Symmetry and positive semi-definiteness on a 100-point sample only.
    void validate_metric(std::uint64_t seed) const
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 2.0);
        for (int s = 0; s < 100; ++s) {
            Vec q(n_);
            for (int i = 0; i < n_; ++i) q[i] = normal(rng);
            const Mat g = inverse_metric_(q);
            if (g.rows() != n_ || g.cols() != n_) {
                throw DimensionMismatch("SimpleThermoSystem: inverse metric must be n x n");
            }
            const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
            if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
                throw InvalidArgument("SimpleThermoSystem: inverse metric is not symmetric");
            }
            Eigen::SelfAdjointEigenSolver<Mat> eig(g, Eigen::EigenvaluesOnly);
            if (eig.eigenvalues().minCoeff() < -1e-12) {
                throw InvalidArgument("SimpleThermoSystem: inverse metric is not positive semi-definite");
            }
        }
    }

    int n_;
    Metric inverse_metric_;
    Potential potential_;
    PotentialGrad potential_gradient_;
    KineticQGradient kinetic_q_gradient_;
};

inline ScalarField hamiltonian_of(const SimpleThermoSystem& sys)
{
    auto shared = std::make_shared<const SimpleThermoSystem>(sys);
    const int n = sys.dimension();
    auto value = [shared](const ContactPoint& x) {
        return 0.5 * x.p.dot(shared->inverse_metric(x.q) * x.p) + shared->potential(x.q, x.S);
    };
    auto gradient = [shared, n](const ContactPoint& x) {
        const PotentialGradient dV = shared->potential_gradient(x.q, x.S);
        detail::require_same_size(n, dV.dq.size(), "potential gradient");
        Vec dq = dV.dq;
        if (shared->kinetic_q_gradient()) dq += shared->kinetic_q_gradient()(x.q, x.p);
        return CoVector{dq, shared->inverse_metric(x.q) * x.p, dV.dS};
    };
    return {n, value, gradient};
}

/// H = |p|^2 / (2m) + V(q) + gamma S.
class LinearlyDampedSystem {
public:
    using Potential = std::function<double(const Vec& q)>;
    using PotentialGrad = std::function<Vec(const Vec& q)>;

    LinearlyDampedSystem(int n, double mass, double gamma, Potential potential, PotentialGrad potential_gradient)
        : n_(n), mass_(mass), gamma_(gamma), potential_(std::move(potential)),
          potential_gradient_(std::move(potential_gradient))
    {
        if (n_ < 1) throw InvalidArgument("LinearlyDampedSystem: n must be >= 1");
        if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw InvalidArgument("LinearlyDampedSystem: mass must be > 0");
        if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) throw InvalidArgument("LinearlyDampedSystem: gamma must be >= 0");
    }

    int dimension() const noexcept { return n_; }
    double mass() const noexcept { return mass_; }
    double gamma() const noexcept { return gamma_; }
    double potential(const Vec& q) const { return potential_(q); }
    Vec potential_gradient(const Vec& q) const { return potential_gradient_(q); }

    SimpleThermoSystem thermo_system() const
    {
        const double m = mass_;
        const double gamma = gamma_;
        const int n = n_;
        auto V = potential_;
        auto dV = potential_gradient_;
        return SimpleThermoSystem(
            n, [n, m](const Vec&) -> Mat { return Mat::Identity(n, n) / m; },
            [V, gamma](const Vec& q, double S) { return V(q) + gamma * S; },
            [dV, gamma](const Vec& q, double) { return PotentialGradient{dV(q), gamma}; });
    }

private:
    int n_;
    double mass_;
    double gamma_;
    Potential potential_;
    PotentialGrad potential_gradient_;
};

/// V(q) = |q|^2 / 2, unit mass.
inline LinearlyDampedSystem damped_oscillator(double gamma, int n = 1)
{
    return {n, 1.0, gamma, [](const Vec& q) { return 0.5 * q.squaredNorm(); }, [](const Vec& q) { return Vec(q); }};
}

/// F_fr = -gamma qdot dq.
inline Vec friction_force(const LinearlyDampedSystem& sys, const Vec& /*q*/, const Vec& qdot)
{
    detail::require_same_size(sys.dimension(), qdot.size(), "friction_force qdot");
    return -sys.gamma() * qdot;
}

/// T = dH/dS, constant for this class.
inline double temperature(const LinearlyDampedSystem& sys, const ContactPoint& /*state*/)
{
    return sys.gamma();
}

/// (q, qdot, S) on TQ x R.
struct TangentState {
    Vec q;
    Vec qdot;
    double S = 0.0;

    TangentState() = default;
    TangentState(Vec q_, Vec qdot_, double S_) : q(std::move(q_)), qdot(std::move(qdot_)), S(S_)
    {
        detail::require_same_size(q.size(), qdot.size(), "TangentState qdot");
    }
    TangentState(double q_, double qdot_, double S_)
        : q(Vec::Constant(1, q_)), qdot(Vec::Constant(1, qdot_)), S(S_) {}

    int dim() const noexcept { return static_cast<int>(q.size()); }
    Vec to_vector() const { return detail::pack(q, qdot, S); }
    static TangentState from_vector(const Vec& x)
    {
        const auto n = detail::half_dimension(x);
        return {x.head(n), x.segment(n, n), x[2 * n]};
    }
};

/// Tangent vector on TQ x R, components along d/dq, d/dqdot, d/dS.
struct LagrangianVector {
    Vec dq;
    Vec dqdot;
    double dS = 0.0;

    LagrangianVector() = default;
    LagrangianVector(Vec dq_, Vec dqdot_, double dS_) : dq(std::move(dq_)), dqdot(std::move(dqdot_)), dS(dS_)
    {
        detail::require_same_size(dq.size(), dqdot.size(), "LagrangianVector dqdot");
    }

    int dim() const noexcept { return static_cast<int>(dq.size()); }
    Vec to_vector() const { return detail::pack(dq, dqdot, dS); }
    static LagrangianVector from_vector(const Vec& x)
    {
        const auto n = detail::half_dimension(x);
        return {x.head(n), x.segment(n, n), x[2 * n]};
    }
};

/// Value and the derivatives of L(q, qdot, S) the Herglotz dynamics need.
struct LagrangianJet {
    double value = 0.0;
    Vec dq;       ///< dL/dq^i
    Vec dqdot;    ///< dL/dqdot^i
    double dS = 0.0;
    Mat W;        ///< d2L/dqdot^i dqdot^j
    Mat qdot_q;   ///< d2L/dqdot^i dq^j
    Vec qdot_S;   ///< d2L/dqdot^i dS
};

class ContactLagrangian {
public:
    using JetFn = std::function<LagrangianJet(const TangentState&)>;

    ContactLagrangian(int n, JetFn jet) : n_(n), jet_(std::move(jet))
    {
        if (n_ < 1) throw InvalidArgument("ContactLagrangian: n must be >= 1");
    }

    int dimension() const noexcept { return n_; }

    LagrangianJet jet(const TangentState& ts) const
    {
        detail::require_same_size(n_, ts.dim(), "ContactLagrangian state");
        return jet_(ts);
    }

    double value(const TangentState& ts) const { return jet(ts).value; }

private:
    int n_;
    JetFn jet_;
};

/// L = 1/2 qdot^T M qdot - V(q, S), V a polynomial in (q_1..q_n, S).
inline ContactLagrangian quadratic_lagrangian(const Mat& mass, Polynomial potential)
{
    const int n = static_cast<int>(mass.rows());
    detail::require_same_size(n + 1, potential.size(), "quadratic_lagrangian potential variables");
    auto V = std::make_shared<const Polynomial>(std::move(potential));
    return {n, [mass, V, n](const TangentState& ts) {
                Vec qs(n + 1);
                qs.head(n) = ts.q;
                qs[n] = ts.S;
                const Vec dV = V->gradient(qs);
                LagrangianJet j;
                j.value = 0.5 * ts.qdot.dot(mass * ts.qdot) - V->value(qs);
                j.dq = -dV.head(n);
                j.dqdot = mass * ts.qdot;
                j.dS = -dV[n];
                j.W = mass;
                j.qdot_q = Mat::Zero(n, n);
                j.qdot_S = Vec::Zero(n);
                return j;
            }};
}

namespace detail {

inline void require_regular(const Mat& W)
{
    Eigen::JacobiSVD<Mat> svd(W);
    const auto& s = svd.singularValues();
    const double smin = s[s.size() - 1];
    if (!(smin > 0.0) || s[0] / smin >= 1e12) {
        throw SingularHessian("Lagrangian velocity Hessian is singular (condition number >= 1e12)");
    }
}

} // namespace detail

/// FL(q, qdot, S) = (q, dL/dqdot, S).
inline ContactPoint legendre_transform(const ContactLagrangian& lag, const TangentState& ts)
{
    return {ts.q, lag.jet(ts).dqdot, ts.S};
}

/// Inverts FL at fixed (q, S) by damped Newton on qdot, starting from W(q, 0, S)^{-1} p.
inline TangentState legendre_inverse(const ContactLagrangian& lag, const ContactPoint& x, double tol = 1e-12,
                                     int max_iterations = 50)
{
    const int n = lag.dimension();
    detail::require_same_size(n, x.dim(), "legendre_inverse point");
    TangentState ts(x.q, Vec::Zero(n), x.S);
    {
        const LagrangianJet j0 = lag.jet(ts);
        detail::require_regular(j0.W);
        ts.qdot = j0.W.partialPivLu().solve(x.p);
    }
    LagrangianJet j = lag.jet(ts);
    double residual = (j.dqdot - x.p).lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iterations; ++it) {
        if (residual <= tol * std::max(1.0, x.p.lpNorm<Eigen::Infinity>())) return ts;
        detail::require_regular(j.W);
        const Vec step = j.W.partialPivLu().solve(j.dqdot - x.p);
        double damping = 1.0;
        for (int halving = 0; halving < 30; ++halving, damping *= 0.5) {
            TangentState trial(ts.q, ts.qdot - damping * step, ts.S);
            LagrangianJet jt = lag.jet(trial);
            const double r = (jt.dqdot - x.p).lpNorm<Eigen::Infinity>();
            if (r < residual || halving == 29) {
                ts = std::move(trial);
                j = std::move(jt);
                residual = r;
                break;
            }
        }
    }
    if (residual <= tol * std::max(1.0, x.p.lpNorm<Eigen::Infinity>())) return ts;
    throw NewtonDivergence("legendre_inverse: Newton did not converge", max_iterations, residual);
}

/// E_L = qdot^i dL/dqdot^i - L.
inline double lagrangian_energy(const ContactLagrangian& lag, const TangentState& ts)
{
    const LagrangianJet j = lag.jet(ts);
    return ts.qdot.dot(j.dqdot) - j.value;
}

/// eta_L = dS - (dL/dqdot^i) dq^i.
inline double eta_L(const ContactLagrangian& lag, const TangentState& ts, const LagrangianVector& v)
{
    detail::require_same_size(lag.dimension(), v.dim(), "eta_L vector");
    return v.dS - lag.jet(ts).dqdot.dot(v.dq);
}

/// R_L = d/dS - W^{ij} (d2L/dqdot^j dS) d/dqdot^i.
inline LagrangianVector reeb_L(const ContactLagrangian& lag, const TangentState& ts)
{
    const LagrangianJet j = lag.jet(ts);
    detail::require_regular(j.W);
    const int n = lag.dimension();
    return {Vec::Zero(n), -j.W.partialPivLu().solve(j.qdot_S), 1.0};
}

enum class EntropyLaw {
    Thermodynamic, ///< Sdot = qdot^i dL/dqdot^i
    Classic,       ///< Sdot = L
};

/// First-order form of the Herglotz equations
///   d/dt(dL/dqdot) - dL/dq = (dL/dqdot)(dL/dS)
/// with the chosen entropy law.
inline LagrangianVector herglotz_rhs(const ContactLagrangian& lag, const TangentState& ts,
                                     EntropyLaw law = EntropyLaw::Thermodynamic)
{
    const LagrangianJet j = lag.jet(ts);
    detail::require_regular(j.W);
    const double Sdot = law == EntropyLaw::Thermodynamic ? ts.qdot.dot(j.dqdot) : j.value;
    const Vec rhs = j.dq - j.qdot_q * ts.qdot - j.qdot_S * Sdot + j.dqdot * j.dS;
    return {ts.qdot, j.W.partialPivLu().solve(rhs), Sdot};
}

/// H = E_L o (FL)^{-1}, evaluated through a Newton inversion of FL.
inline ScalarField hamiltonian_from_lagrangian(const ContactLagrangian& lag)
{
    auto shared = std::make_shared<const ContactLagrangian>(lag);
    return {lag.dimension(),
            [shared](const ContactPoint& x) {
                return lagrangian_energy(*shared, legendre_inverse(*shared, x));
            },
            [shared](const ContactPoint& x) {
                const TangentState ts = legendre_inverse(*shared, x);
                const LagrangianJet j = shared->jet(ts);
                return CoVector{-j.dq, ts.qdot, -j.dS};
            }};
}

/// |p|^2/(2m) + V(q, S) with V polynomial in (q_1..q_n, S); the class every
/// declaratively described system belongs to.
struct PolynomialSystem {
    int n = 1;
    double mass = 1.0;
    Polynomial potential{2};

    SimpleThermoSystem thermo_system() const
    {
        detail::require_same_size(n + 1, potential.size(), "PolynomialSystem potential variables");
        if (!(mass > 0.0)) throw InvalidArgument("PolynomialSystem: mass must be > 0");
        auto V = std::make_shared<const Polynomial>(potential);
        const int dim = n;
        const double m = mass;
        auto pack_qs = [dim](const Vec& q, double S) {
            Vec qs(dim + 1);
            qs.head(dim) = q;
            qs[dim] = S;
            return qs;
        };
        return SimpleThermoSystem(
            dim, [dim, m](const Vec&) -> Mat { return Mat::Identity(dim, dim) / m; },
            [V, pack_qs](const Vec& q, double S) { return V->value(pack_qs(q, S)); },
            [V, pack_qs, dim](const Vec& q, double S) {
                const Vec g = V->gradient(pack_qs(q, S));
                return PotentialGradient{g.head(dim), g[dim]};
            });
    }

    ScalarField hamiltonian() const { return hamiltonian_of(thermo_system()); }

    ContactLagrangian lagrangian() const
    {
        return quadratic_lagrangian(mass * Mat::Identity(n, n), potential);
    }
};

/// The damped oscillator as a PolynomialSystem: V = |q|^2/2 + gamma S.
inline PolynomialSystem damped_oscillator_system(double gamma, int n = 1)
{
    PolynomialSystem sys{n, 1.0, Polynomial(n + 1)};
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(n + 1, 0);
        e[i] = 2;
        sys.potential.add_term(0.5, e);
    }
    std::vector<int> eS(n + 1, 0);
    eS[n] = 1;
    sys.potential.add_term(gamma, eS);
    return sys;
}

/// L = |qdot|^2/2 - |q|^2/2 - gamma S, the Legendre partner of the damped oscillator.
inline ContactLagrangian damped_oscillator_lagrangian(double gamma, int n = 1)
{
    return damped_oscillator_system(gamma, n).lagrangian();
}

} // namespace thermoflow
