#pragma once

#include <cmath>
#include <string>

#include "thermoflow/contact_geometry.hpp"
#include "thermoflow/discrete_gradients.hpp"
#include "thermoflow/newton.hpp"

namespace thermoflow {

struct StepperConfig {
    double h = 0.1;
    double newton_tol = 1e-12;
    int max_newton_iters = 50;
    double fd_jacobian_step = 1e-7;

    void validate() const
    {
        if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("StepperConfig: h must be > 0");
        if (!(newton_tol > 0.0)) throw InvalidArgument("StepperConfig: newton_tol must be > 0");
        if (max_newton_iters < 1) throw InvalidArgument("StepperConfig: max_newton_iters must be >= 1");
        if (!(fd_jacobian_step > 0.0)) throw InvalidArgument("StepperConfig: fd_jacobian_step must be > 0");
    }

    NewtonOptions newton() const
    {
        NewtonOptions o;
        o.tol = newton_tol;
        o.max_iterations = max_newton_iters;
        o.fd_step = fd_jacobian_step;
        return o;
    }
};

struct StepResult {
    ContactPoint state;
    int iterations = 0;
    double residual = 0.0;
};

/// One step of (x1 - x0)/h = sharp_Lambda at (x0 + x1)/2 applied to bar-grad H(x0, x1).
///
/// Solved by Newton from the explicit Euler predictor x0 + h E_H(x0).
inline StepResult dg_step(const ScalarField& H, const DiscreteGradientRule& rule, const StepperConfig& cfg,
                          const ContactPoint& x0)
{
    cfg.validate();
    detail::require_same_size(H.dimension(), x0.dim(), "dg_step state");
    const ContactStructure cs(H.dimension());
    const Vec x = x0.to_vector();
    const double h = cfg.h;

    auto residual = [&](const Vec& y) -> Vec {
        const Vec g = discrete_gradient(rule, H, x, y);
        const ContactPoint mid = ContactPoint::from_vector(0.5 * (x + y));
        return y - x - h * cs.sharp_lambda(mid, CoVector::from_vector(g)).to_vector();
    };

    const Vec guess = x + h * cs.evolution_field(H, x0).to_vector();
    const NewtonResult nr = solve_newton(residual, guess, cfg.newton(), "dg_step");
    return {ContactPoint::from_vector(nr.solution), nr.iterations, nr.residual};
}

/// Closed-form midpoint discrete-gradient step for H = p^2/2 + q^2/2 + gamma S.
inline StepResult dg_harmonic_closed_form_step(double gamma, const StepperConfig& cfg, const ContactPoint& x0)
{
    cfg.validate();
    if (x0.dim() != 1) throw DimensionMismatch("dg_harmonic_closed_form_step requires n = 1");
    const double h = cfg.h;
    const double q0 = x0.q[0];
    const double p0 = x0.p[0];
    const double S0 = x0.S;
    const double den = 2 * gamma * h + h * h + 4;
    const double den2 = den * den;

    const double q1 = (2 * gamma * h * q0 - h * h * q0 + 4 * h * p0 + 4 * q0) / den;
    const double p1 = -(2 * gamma * h * p0 + h * h * p0 + 4 * h * q0 - 4 * p0) / den;
    const double h2 = h * h;
    const double h3 = h2 * h;
    const double h4 = h3 * h;
    const double S1 = (S0 * h4 + (4 * S0 * gamma + 4 * q0 * q0) * h3 +
                       (4 * S0 * gamma * gamma - 16 * p0 * q0 + 8 * S0) * h2) / den2 +
                      ((16 * S0 * gamma + 16 * p0 * p0) * h + 16 * S0) / den2;
    return {ContactPoint(q1, p1, S1), 0, 0.0};
}

/// Explicit Euler on E_H, the first-order control method.
inline StepResult euler_step(const ScalarField& H, const StepperConfig& cfg, const ContactPoint& x0)
{
    cfg.validate();
    const ContactStructure cs(H.dimension());
    const Vec x1 = x0.to_vector() + cfg.h * cs.evolution_field(H, x0).to_vector();
    return {ContactPoint::from_vector(x1), 0, 0.0};
}

} // namespace thermoflow
