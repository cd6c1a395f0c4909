#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "thermoflow/trajectory.hpp"

namespace thermoflow {

struct ReferenceTolerances {
    double rtol = 1e-10;
    double atol = 1e-12;
};

inline constexpr double kMinReferenceStep = 1e-14;

/// High-order reference solution of xdot = E_H(x), sampled at the given times.
///
/// Adaptive Runge-Kutta-Fehlberg 7(8) with local error control by rtol/atol;
/// steps are clipped so each requested time is hit exactly.
inline Trajectory reference_integrate(const ScalarField& H, const ContactPoint& x0, std::span<const double> times,
                                      const ReferenceTolerances& tol = {})
{
    namespace ode = boost::numeric::odeint;
    using State = std::vector<double>;

    if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw InvalidArgument("reference_integrate: tolerances must be > 0");
    if (times.empty() || times.front() != 0.0) throw InvalidArgument("reference_integrate: sample times must start at 0");

    const ContactStructure cs(H.dimension());
    auto rhs = [&](const State& s, State& dsdt, double) {
        const ContactPoint x = ContactPoint::from_vector(Eigen::Map<const Vec>(s.data(), s.size()));
        const Vec v = cs.evolution_field(H, x).to_vector();
        std::copy(v.data(), v.data() + v.size(), dsdt.begin());
    };

    auto stepper = ode::make_controlled(tol.atol, tol.rtol, ode::runge_kutta_fehlberg78<State>());

    const Vec v0 = x0.to_vector();
    State s(v0.data(), v0.data() + v0.size());
    double t = 0.0;
    double dt = std::min(1e-3, times.size() > 1 ? times[1] : 1e-3);

    Trajectory traj;
    traj.push(0.0, x0, H(x0));
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double target = times[k];
        if (!(target > times[k - 1])) throw InvalidArgument("reference_integrate: sample times must increase");
        while (t < target) {
            double step = std::min(dt, target - t);
            const bool clipped = step < dt;
            bool failed = false;
            ode::controlled_step_result res = ode::fail;
            do {
                if (step < kMinReferenceStep) {
                    throw StepSizeUnderflow("reference_integrate: step size below 1e-14", t);
                }
                res = stepper.try_step(rhs, s, t, step);
                failed = failed || res == ode::fail;
            } while (res == ode::fail);
            // a step shortened only to land on a sample keeps the controller's previous size
            dt = (clipped && !failed) ? std::max(dt, step) : step;
            if ((clipped && !failed) || target - t <= 1e-14 * std::max(1.0, std::abs(target))) t = target;
        }
        const ContactPoint x = ContactPoint::from_vector(Eigen::Map<const Vec>(s.data(), s.size()));
        traj.push(target, x, H(x));
    }
    return traj;
}

/// Uniform sampling t_k = k t_end / samples, k = 0..samples.
inline Trajectory reference_integrate(const ScalarField& H, const ContactPoint& x0, double t_end, int samples,
                                      const ReferenceTolerances& tol = {})
{
    if (samples < 1 || !(t_end > 0.0)) throw InvalidArgument("reference_integrate: need t_end > 0 and samples >= 1");
    std::vector<double> times(samples + 1);
    for (int k = 0; k <= samples; ++k) times[k] = t_end * k / samples;
    times.back() = t_end;
    return reference_integrate(H, x0, times, tol);
}

} // namespace thermoflow
