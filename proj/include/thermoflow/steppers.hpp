#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "thermoflow/reference.hpp"

namespace thermoflow {

enum class StepperKind {
    DgMidpoint,
    DgMeanValue,
    DgItohAbe,
    DgHarmonicExact,
    Herglotz,
    HerglotzHarmonicExact,
    Reference,
    Euler,
};

inline constexpr std::pair<std::string_view, StepperKind> kStepperNames[] = {
    {"dg-midpoint", StepperKind::DgMidpoint},
    {"dg-mean-value", StepperKind::DgMeanValue},
    {"dg-itoh-abe", StepperKind::DgItohAbe},
    {"dg-harmonic-exact", StepperKind::DgHarmonicExact},
    {"herglotz", StepperKind::Herglotz},
    {"herglotz-harmonic-exact", StepperKind::HerglotzHarmonicExact},
    {"reference", StepperKind::Reference},
    {"euler", StepperKind::Euler},
};

inline std::optional<StepperKind> parse_stepper_kind(std::string_view name)
{
    for (const auto& [n, k] : kStepperNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

inline std::string_view to_string(StepperKind kind)
{
    for (const auto& [n, k] : kStepperNames) {
        if (k == kind) return n;
    }
    return "?";
}

inline bool is_herglotz(StepperKind kind)
{
    return kind == StepperKind::Herglotz || kind == StepperKind::HerglotzHarmonicExact;
}

inline bool needs_damped_oscillator(StepperKind kind)
{
    return kind == StepperKind::DgHarmonicExact || kind == StepperKind::HerglotzHarmonicExact;
}

/// gamma if the system is exactly H = p^2/2 + q^2/2 + gamma S with n = 1.
inline std::optional<double> damped_oscillator_gamma(const PolynomialSystem& sys)
{
    if (sys.n != 1 || sys.mass != 1.0) return std::nullopt;
    std::map<std::vector<int>, double> merged;
    for (const auto& t : sys.potential.terms()) merged[t.exponents] += t.coefficient;
    double gamma = 0.0;
    for (const auto& [e, c] : merged) {
        if (c == 0.0) continue;
        if (e == std::vector<int>{2, 0} && c == 0.5) continue;
        if (e == std::vector<int>{0, 1}) {
            gamma = c;
            continue;
        }
        return std::nullopt;
    }
    if (merged[{2, 0}] != 0.5) return std::nullopt;
    return gamma;
}

/// Initial data for the two-step Herglotz maps.
struct HerglotzInitial {
    Vec q0;
    Vec q1;
    double S0 = 0.0;
};

using InitialCondition = std::variant<ContactPoint, HerglotzInitial>;

/// Runs the named stepper for `steps` steps of size cfg.h (the reference
/// solver is sampled at the same times). Hamiltonian steppers take a
/// ContactPoint, Herglotz steppers a HerglotzInitial.
inline Trajectory run_stepper(StepperKind kind, const PolynomialSystem& sys, const StepperConfig& cfg,
                              const InitialCondition& initial, int steps, const ReferenceTolerances& tol = {})
{
    cfg.validate();
    const ScalarField H = sys.hamiltonian();
    const std::optional<double> gamma = damped_oscillator_gamma(sys);
    if (needs_damped_oscillator(kind) && !gamma) {
        throw InvalidArgument(std::string(to_string(kind)) + " requires the damped oscillator system");
    }

    if (is_herglotz(kind)) {
        const auto* init = std::get_if<HerglotzInitial>(&initial);
        if (!init) throw InvalidArgument("Herglotz integrators need (q0, q1, S0) initial data");
        const DiscreteLagrangian ld = discretize_lagrangian_midpoint(sys.lagrangian(), cfg.h);
        HerglotzStepper stepper;
        if (kind == StepperKind::Herglotz) {
            stepper = [&ld, cfg](const Vec& a, const Vec& b, double S) { return herglotz_step(ld, cfg, a, b, S); };
        } else {
            stepper = [g = *gamma, cfg](const Vec& a, const Vec& b, double S) {
                return herglotz_harmonic_closed_form_step(g, cfg, a[0], b[0], S);
            };
        }
        return integrate_herglotz(stepper, ld, H, init->q0, init->q1, init->S0, cfg.h, steps);
    }

    const auto* x0 = std::get_if<ContactPoint>(&initial);
    if (!x0) throw InvalidArgument("Hamiltonian integrators need (q, p, S) initial data");

    if (kind == StepperKind::Reference) {
        std::vector<double> times(steps + 1);
        for (int k = 0; k <= steps; ++k) times[k] = k * cfg.h;
        try {
            return reference_integrate(H, *x0, times, tol);
        } catch (const StepSizeUnderflow& e) {
            Trajectory partial;
            partial.push(0.0, *x0, H(*x0));
            throw IntegrationFailure(e.what(), static_cast<int>(std::ceil(e.time() / cfg.h)), partial);
        }
    }

    HamiltonianStepper stepper;
    switch (kind) {
    case StepperKind::DgMidpoint:
        stepper = [&H, cfg](const ContactPoint& x) { return dg_step(H, DiscreteGradientRule::midpoint(), cfg, x); };
        break;
    case StepperKind::DgMeanValue:
        stepper = [&H, cfg](const ContactPoint& x) { return dg_step(H, DiscreteGradientRule::mean_value(), cfg, x); };
        break;
    case StepperKind::DgItohAbe:
        stepper = [&H, cfg](const ContactPoint& x) {
            return dg_step(H, DiscreteGradientRule::coordinate_increment(), cfg, x);
        };
        break;
    case StepperKind::DgHarmonicExact:
        stepper = [g = *gamma, cfg](const ContactPoint& x) { return dg_harmonic_closed_form_step(g, cfg, x); };
        break;
    case StepperKind::Euler:
        stepper = [&H, cfg](const ContactPoint& x) { return euler_step(H, cfg, x); };
        break;
    default:
        throw InvalidArgument("run_stepper: unsupported stepper");
    }
    return integrate(stepper, H, *x0, cfg.h, steps);
}

/// Least-squares slope of log(error) against log(h).
inline double log_log_slope(std::span<const double> h_list, std::span<const double> errors)
{
    const std::size_t m = h_list.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double x = std::log(h_list[k]);
        const double y = std::log(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Observed order of a method from its error at a fixed final time for each h.
inline double convergence_order(std::span<const double> h_list, const std::function<double(double)>& error_at)
{
    if (h_list.size() < 3) throw InvalidArgument("convergence_order: need at least 3 step sizes");
    const double ratio = h_list[1] / h_list[0];
    for (std::size_t k = 1; k < h_list.size(); ++k) {
        const double r = h_list[k] / h_list[k - 1];
        if (!(r < 1.0) || std::abs(r - ratio) > 1e-9 * ratio) {
            throw InvalidArgument("convergence_order: step sizes must decrease geometrically");
        }
    }
    std::vector<double> errors;
    for (double h : h_list) {
        const double e = error_at(h);
        if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("convergence_order: error must be positive and finite");
        errors.push_back(e);
    }
    return log_log_slope(h_list, errors);
}

/// Max-norm error in q at t_end of a named stepper against the reference solution
/// from x0. Herglotz steppers start from (q(0), q_ref(h), S(0)).
inline double final_position_error(StepperKind kind, const PolynomialSystem& sys, const ContactPoint& x0,
                                   double t_end, double h, const ReferenceTolerances& tol = {})
{
    const int steps = static_cast<int>(std::lround(t_end / h));
    if (steps < 1 || std::abs(steps * h - t_end) > 1e-9 * t_end) {
        throw InvalidArgument("final_position_error: t_end must be a multiple of h");
    }
    const ScalarField H = sys.hamiltonian();
    const std::vector<double> ref_times = {0.0, h, t_end};
    const Trajectory ref = reference_integrate(H, x0, ref_times, tol);

    StepperConfig cfg;
    cfg.h = h;
    InitialCondition init = x0;
    if (is_herglotz(kind)) init = HerglotzInitial{x0.q, ref.states[1].q, x0.S};
    const Trajectory traj = run_stepper(kind, sys, cfg, init, steps, tol);
    return (traj.states.back().q - ref.states.back().q).lpNorm<Eigen::Infinity>();
}

} // namespace thermoflow
