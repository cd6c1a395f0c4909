#pragma once

// Central finite differences. These back consistency checks and the Newton
// Jacobians of the implicit steppers; dynamics always use analytic gradients.

#include <cmath>
#include <functional>

#include "thermoflow/scalar_field.hpp"

namespace thermoflow::numdiff {

inline constexpr double kGradientStep = 1e-6;
inline constexpr double kNestedStep = 1e-5;

template <class Fn>
Vec gradient(const Fn& f, const Vec& x, double step = kGradientStep)
{
    Vec g(x.size());
    Vec xp = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double xk = x[k];
        xp[k] = xk + step;
        const double fp = f(xp);
        xp[k] = xk - step;
        const double fm = f(xp);
        xp[k] = xk;
        g[k] = (fp - fm) / (2.0 * step);
    }
    return g;
}

/// Jacobian of a map R^N -> R^M; column k holds d(map)/dx_k.
template <class Map>
Mat jacobian(const Map& map, const Vec& x, double step = kGradientStep)
{
    Vec xp = x;
    Vec f0 = map(x);
    Mat J(f0.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double xk = x[k];
        xp[k] = xk + step;
        Vec fp = map(xp);
        xp[k] = xk - step;
        Vec fm = map(xp);
        xp[k] = xk;
        J.col(k) = (fp - fm) / (2.0 * step);
    }
    return J;
}

/// Wraps a value-only function as a ScalarField whose gradient is a central difference.
inline ScalarField fd_field(int n, std::function<double(const ContactPoint&)> value,
                            double step = kNestedStep)
{
    auto grad = [value, step](const ContactPoint& x) {
        auto flat = [&value](const Vec& y) { return value(ContactPoint::from_vector(y)); };
        return CoVector::from_vector(gradient(flat, x.to_vector(), step));
    };
    return {n, std::move(value), std::move(grad)};
}

/// Largest relative deviation between analytic and central-difference gradients.
template <SmoothFunction F>
double gradient_consistency(const F& f, const Vec& x, double step = kGradientStep)
{
    const Vec exact = f.gradient(x);
    const Vec approx = gradient([&f](const Vec& y) { return f.value(y); }, x, step);
    const double scale = std::max(1.0, exact.lpNorm<Eigen::Infinity>());
    return (exact - approx).lpNorm<Eigen::Infinity>() / scale;
}

} // namespace thermoflow::numdiff
