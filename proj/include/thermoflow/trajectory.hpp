#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thermoflow/herglotz.hpp"

namespace thermoflow {

/// Ordered (t_k, x_k) with per-step diagnostics. Index 0 is the initial state;
/// entropy_increment[0], newton_iterations[0] and newton_residual[0] are zero.
struct Trajectory {
    std::vector<double> times;
    std::vector<ContactPoint> states;
    std::vector<double> energy;
    std::vector<double> entropy_increment;
    std::vector<int> newton_iterations;
    std::vector<double> newton_residual;

    std::size_t size() const noexcept { return states.size(); }
    bool empty() const noexcept { return states.empty(); }

    void push(double t, ContactPoint x, double H, int iterations = 0, double residual = 0.0)
    {
        if (!times.empty() && !(t > times.back())) {
            throw InvalidArgument("Trajectory: times must be strictly increasing");
        }
        entropy_increment.push_back(states.empty() ? 0.0 : x.S - states.back().S);
        times.push_back(t);
        states.push_back(std::move(x));
        energy.push_back(H);
        newton_iterations.push_back(iterations);
        newton_residual.push_back(residual);
    }

    double max_energy_drift() const
    {
        double m = 0.0;
        for (double e : energy) m = std::max(m, std::abs(e - energy.front()));
        return m;
    }

    /// Smallest S_{k+1} - S_k; +inf for a single-point trajectory.
    double min_entropy_increment() const
    {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < entropy_increment.size(); ++k) m = std::min(m, entropy_increment[k]);
        return m;
    }
};

/// A stepper failure annotated with the failing step and the trajectory up to it.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, int step, Trajectory partial)
        : Error(what), step_(step), partial_(std::move(partial)) {}

    int step() const noexcept { return step_; }
    const Trajectory& partial() const noexcept { return partial_; }

private:
    int step_;
    Trajectory partial_;
};

/// One-step map on the contact phase space.
using HamiltonianStepper = std::function<StepResult(const ContactPoint&)>;

/// Iterates a one-step map n_steps times with step h, recording H along the way.
inline Trajectory integrate(const HamiltonianStepper& stepper, const ScalarField& H, const ContactPoint& x0,
                            double h, int n_steps)
{
    if (n_steps < 0) throw InvalidArgument("integrate: n_steps must be >= 0");
    Trajectory traj;
    traj.push(0.0, x0, H(x0));
    ContactPoint x = x0;
    for (int k = 1; k <= n_steps; ++k) {
        try {
            StepResult r = stepper(x);
            if (!r.state.is_finite()) throw NonFiniteValue("stepper produced a non-finite state");
            x = r.state;
            traj.push(k * h, std::move(r.state), H(x), r.iterations, r.residual);
        } catch (const Error& e) {
            throw IntegrationFailure("step " + std::to_string(k) + ": " + e.what(), k, std::move(traj));
        }
    }
    return traj;
}

/// Two-step map (q_{k-1}, q_k, S_{k-1}) -> (q_{k+1}, S_k).
using HerglotzStepper = std::function<HerglotzStepResult(const Vec& q_prev, const Vec& q_curr, double S_prev)>;

/// Runs n_steps Herglotz steps from (q0, q1, S0). Row k holds (q_k, p_k, S_k) at
/// t_k = k h for k = 0..n_steps, with p_k = D2 L_d(q_{k-1}, q_k, S_{k-1}) and p_0
/// from initial_discrete_momentum. H is evaluated on those states.
inline Trajectory integrate_herglotz(const HerglotzStepper& stepper, const DiscreteLagrangian& ld,
                                     const ScalarField& H, const Vec& q0, const Vec& q1, double S0, double h,
                                     int n_steps)
{
    if (n_steps < 0) throw InvalidArgument("integrate_herglotz: n_steps must be >= 0");
    Trajectory traj;
    ContactPoint x0(q0, initial_discrete_momentum(ld, q0, q1, S0), S0);
    traj.push(0.0, x0, H(x0));
    Vec q_prev = q0;
    Vec q_curr = q1;
    double S_prev = S0;
    for (int k = 1; k <= n_steps; ++k) {
        try {
            HerglotzStepResult r = stepper(q_prev, q_curr, S_prev);
            if (!r.q_next.allFinite() || !std::isfinite(r.S_curr)) {
                throw NonFiniteValue("stepper produced a non-finite state");
            }
            ContactPoint xk(q_curr, discrete_momentum(ld, q_prev, q_curr, S_prev), r.S_curr);
            const double Hk = H(xk);
            traj.push(k * h, std::move(xk), Hk, r.iterations, r.residual);
            q_prev = std::move(q_curr);
            q_curr = std::move(r.q_next);
            S_prev = r.S_curr;
        } catch (const Error& e) {
            throw IntegrationFailure("step " + std::to_string(k) + ": " + e.what(), k, std::move(traj));
        }
    }
    return traj;
}

} // namespace thermoflow
