#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "thermoflow/integrators.hpp"
#include "thermoflow/thermo_systems.hpp"

namespace thermoflow {

/// L_d(q0, q1, S0) together with its partials D1 (wrt q0), D2 (wrt q1), D_S (wrt S0).
struct DiscreteLagrangianJet {
    double value = 0.0;
    Vec D1;
    Vec D2;
    double DS = 0.0;
};

class DiscreteLagrangian {
public:
    using JetFn = std::function<DiscreteLagrangianJet(const Vec& q0, const Vec& q1, double S0)>;

    DiscreteLagrangian(int n, JetFn jet) : n_(n), jet_(std::move(jet))
    {
        if (n_ < 1) throw InvalidArgument("DiscreteLagrangian: n must be >= 1");
    }

    int dimension() const noexcept { return n_; }

    DiscreteLagrangianJet jet(const Vec& q0, const Vec& q1, double S0) const
    {
        detail::require_same_size(n_, q0.size(), "DiscreteLagrangian q0");
        detail::require_same_size(n_, q1.size(), "DiscreteLagrangian q1");
        return jet_(q0, q1, S0);
    }

    double value(const Vec& q0, const Vec& q1, double S0) const { return jet(q0, q1, S0).value; }

private:
    int n_;
    JetFn jet_;
};

/// L_d(q0, q1, S0) = h L((q0 + q1)/2, (q1 - q0)/h, S0), partials by the chain rule.
inline DiscreteLagrangian discretize_lagrangian_midpoint(const ContactLagrangian& lag, double h)
{
    if (!(h > 0.0)) throw InvalidArgument("discretize_lagrangian_midpoint: h must be > 0");
    auto shared = std::make_shared<const ContactLagrangian>(lag);
    return {lag.dimension(), [shared, h](const Vec& q0, const Vec& q1, double S0) {
                const LagrangianJet j = shared->jet(TangentState(0.5 * (q0 + q1), (q1 - q0) / h, S0));
                DiscreteLagrangianJet d;
                d.value = h * j.value;
                d.D1 = 0.5 * h * j.dq - j.dqdot;
                d.D2 = 0.5 * h * j.dq + j.dqdot;
                d.DS = h * j.dS;
                return d;
            }};
}

/// Discrete Legendre transform p_1 = D2 L_d(q0, q1, S0).
inline Vec discrete_momentum(const DiscreteLagrangian& ld, const Vec& q_prev, const Vec& q_curr, double S_prev)
{
    return ld.jet(q_prev, q_curr, S_prev).D2;
}

/// Momentum at the first node, p_0 = -D1 L_d(q0, q1, S0) / (1 + D_S L_d(q0, q1, S0)),
/// the value the discrete Herglotz equations assign to p_0 one step earlier.
inline Vec initial_discrete_momentum(const DiscreteLagrangian& ld, const Vec& q0, const Vec& q1, double S0)
{
    const DiscreteLagrangianJet j = ld.jet(q0, q1, S0);
    return -j.D1 / (1.0 + j.DS);
}

struct HerglotzStepResult {
    Vec q_next;
    double S_curr = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

/// One step of the discrete Herglotz equations for the evolution dynamics:
///   S1 - S0 = (q1 - q0) . D2 L_d(q0, q1, S0)                      (explicit, first)
///   D1 L_d(q1, q2, S1) + (1 + D_S L_d(q1, q2, S1)) D2 L_d(q0, q1, S0) = 0   (Newton in q2)
inline HerglotzStepResult herglotz_step(const DiscreteLagrangian& ld, const StepperConfig& cfg, const Vec& q_prev,
                                        const Vec& q_curr, double S_prev)
{
    cfg.validate();
    const Vec p_curr = discrete_momentum(ld, q_prev, q_curr, S_prev);
    const double S_curr = S_prev + (q_curr - q_prev).dot(p_curr);

    auto residual = [&](const Vec& q_next) -> Vec {
        const DiscreteLagrangianJet j = ld.jet(q_curr, q_next, S_curr);
        return j.D1 + (1.0 + j.DS) * p_curr;
    };
    const NewtonResult nr = solve_newton(residual, Vec(2.0 * q_curr - q_prev), cfg.newton(), "herglotz_step");
    return {nr.solution, S_curr, nr.iterations, nr.residual};
}

/// Closed-form discrete Herglotz step for L = qdot^2/2 - q^2/2 - gamma S with the midpoint L_d.
inline HerglotzStepResult herglotz_harmonic_closed_form_step(double gamma, const StepperConfig& cfg,
                                                             double q0, double q1, double S0)
{
    cfg.validate();
    const double h = cfg.h;
    const double h2 = h * h;
    const double h3 = h2 * h;
    const double q2 = (gamma * h3 * q0 + gamma * h3 * q1 + 4 * gamma * h * q0 - 4 * gamma * h * q1 - h2 * q0 -
                       2 * h2 * q1 - 4 * q0 + 8 * q1) /
                      (h2 + 4);
    const double S1 = S0 + (q1 - q0) * (q1 - q0) / h - h * (q1 * q1 - q0 * q0) / 4;
    return {Vec::Constant(1, q2), S1, 0, 0.0};
}

} // namespace thermoflow
