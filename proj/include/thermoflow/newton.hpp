#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "thermoflow/numdiff.hpp"

namespace thermoflow {

struct NewtonOptions {
    double tol = 1e-12;
    int max_iterations = 50;
    double fd_step = 1e-7;
    int fallback_iterations = 100;
    double fallback_damping = 0.5;
};

struct NewtonResult {
    Vec solution;
    int iterations = 0;
    double residual = 0.0;
    bool used_fallback = false;
    bool at_noise_floor = false;
};

inline std::string format_residual(double r)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", r);
    return buf;
}

inline constexpr double kNoiseFloorFactor = 4.0;

/// Largest change of F when one coordinate of y moves by 1, 2, 4, 8 or 16 ulps:
/// a residual of this size cannot be reduced further in floating point.
template <class Residual>
double residual_noise_floor(const Residual& F, const Vec& y, const Vec& r)
{
    double noise = 0.0;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        for (double dir : {-1.0, 1.0}) {
            Vec yy = y;
            for (int u = 1; u <= 16; ++u) {
                yy[j] = std::nextafter(yy[j], dir * std::numeric_limits<double>::infinity());
                if ((u & (u - 1)) != 0) continue;
                const Vec rr = F(yy);
                if (rr.allFinite()) noise = std::max(noise, (rr - r).lpNorm<Eigen::Infinity>());
            }
        }
    }
    return noise;
}

/// Solves F(y) = 0 by Newton's method with a central-difference Jacobian.
///
/// Converged when max|F| <= tol, or, once the iteration has stalled, when max|F|
/// is within kNoiseFloorFactor times residual_noise_floor. If Newton stalls
/// (non-finite values, no progress over three iterations, or the iteration cap)
/// the solver switches to damped chord iterations y <- y - w J0^{-1} F(y) with
/// the first Jacobian.
template <class Residual>
NewtonResult solve_newton(const Residual& F, Vec guess, const NewtonOptions& opt, const std::string& context)
{
    NewtonResult result;
    Vec y = std::move(guess);
    Vec r = F(y);
    double res = r.lpNorm<Eigen::Infinity>();

    Vec best_y = y;
    Vec best_r = r;
    double best = res;
    auto record = [&] {
        if (std::isfinite(res) && !(res >= best)) {
            best_y = y;
            best_r = r;
            best = res;
        }
    };
    auto finish = [&](bool noise_floor) {
        result.solution = best_y;
        result.residual = best;
        result.at_noise_floor = noise_floor;
        return result;
    };

    Mat J0;
    int stalled = 0;
    for (int it = 0; it < opt.max_iterations && std::isfinite(res) && res > opt.tol; ++it) {
        const Mat J = numdiff::jacobian(F, y, opt.fd_step);
        if (!J.allFinite()) break;
        if (J0.size() == 0) J0 = J;
        const Vec step = Eigen::PartialPivLU<Mat>(J).solve(r);
        if (!step.allFinite()) break;

        const double previous_best = best;
        double damping = 1.0;
        Vec y_trial = y - step;
        Vec r_trial = F(y_trial);
        double res_trial = r_trial.lpNorm<Eigen::Infinity>();
        for (int halving = 0; halving < 8 && !(res_trial < res); ++halving) {
            damping *= 0.5;
            y_trial = y - damping * step;
            r_trial = F(y_trial);
            res_trial = r_trial.lpNorm<Eigen::Infinity>();
        }
        ++result.iterations;
        y = std::move(y_trial);
        r = std::move(r_trial);
        res = res_trial;
        record();

        if (best < 0.9 * previous_best) {
            stalled = 0;
        } else if (++stalled >= 3) {
            break;
        }
    }
    if (best <= opt.tol) return finish(false);
    if (best <= kNoiseFloorFactor * residual_noise_floor(F, best_y, best_r)) return finish(true);

    if (J0.size() != 0) {
        const Eigen::PartialPivLU<Mat> lu0(J0);
        result.used_fallback = true;
        y = best_y;
        r = best_r;
        res = best;
        for (int it = 0; it < opt.fallback_iterations && std::isfinite(res); ++it) {
            y -= opt.fallback_damping * lu0.solve(r);
            r = F(y);
            res = r.lpNorm<Eigen::Infinity>();
            ++result.iterations;
            record();
            if (res <= opt.tol) break;
        }
        if (best <= opt.tol) return finish(false);
        if (best <= kNoiseFloorFactor * residual_noise_floor(F, best_y, best_r)) return finish(true);
    }

    throw NewtonDivergence(context + ": residual " + format_residual(best) + " above tolerance after " +
                               std::to_string(result.iterations) + " iterations",
                           result.iterations, best);
}

} // namespace thermoflow
