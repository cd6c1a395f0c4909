#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "thermoflow/scalar_field.hpp"

namespace thermoflow {

enum class DiscreteGradientKind { MeanValue, Midpoint, CoordinateIncrement };

/// A two-point gradient rule with bar-grad H(x, x')^T (x' - x) = H(x') - H(x)
/// and bar-grad H(x, x) = grad H(x).
struct DiscreteGradientRule {
    DiscreteGradientKind kind = DiscreteGradientKind::Midpoint;
    int quadrature_nodes = 8;          ///< MeanValue only, in [2, 64]
    double degeneracy_epsilon = 1e-12; ///< below this |x' - x| the continuous limit is used

    static DiscreteGradientRule mean_value(int nodes = 8) { return {DiscreteGradientKind::MeanValue, nodes, 1e-12}; }
    static DiscreteGradientRule midpoint() { return {DiscreteGradientKind::Midpoint, 8, 1e-12}; }
    static DiscreteGradientRule coordinate_increment()
    {
        return {DiscreteGradientKind::CoordinateIncrement, 8, 1e-12};
    }

    void validate() const
    {
        if (quadrature_nodes < 2 || quadrature_nodes > 64) {
            throw InvalidArgument("DiscreteGradientRule: quadrature_nodes must be in [2, 64], got " +
                                  std::to_string(quadrature_nodes));
        }
        if (!(degeneracy_epsilon > 0.0)) throw InvalidArgument("DiscreteGradientRule: degeneracy_epsilon must be > 0");
    }
};

/// Parses "mean-value", "midpoint" or "itoh-abe".
inline DiscreteGradientRule parse_discrete_gradient_rule(std::string_view name)
{
    if (name == "mean-value") return DiscreteGradientRule::mean_value();
    if (name == "midpoint") return DiscreteGradientRule::midpoint();
    if (name == "itoh-abe") return DiscreteGradientRule::coordinate_increment();
    throw InvalidArgument("unknown discrete gradient rule '" + std::string(name) + "'");
}

inline std::string_view to_string(DiscreteGradientKind kind)
{
    switch (kind) {
    case DiscreteGradientKind::MeanValue: return "mean-value";
    case DiscreteGradientKind::Midpoint: return "midpoint";
    case DiscreteGradientKind::CoordinateIncrement: return "itoh-abe";
    }
    return "?";
}

/// Gauss-Legendre nodes and weights mapped to [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int m)
{
    QuadratureRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= m; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x runs from near +1 downwards; store ascending on [0, 1].
        rule.nodes[m - 1 - i] = 0.5 * (1.0 + x);
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.weights[m - 1 - i] = 0.5 * w;
        rule.weights[i] = 0.5 * w;
    }
    return rule;
}

} // namespace detail

/// Cached table for m nodes, m in [2, 64]. The cache is built once and never mutated.
inline const QuadratureRule& gauss_legendre(int m)
{
    static const std::array<QuadratureRule, 65> tables = [] {
        std::array<QuadratureRule, 65> t{};
        for (int k = 2; k <= 64; ++k) t[k] = detail::compute_gauss_legendre(k);
        return t;
    }();
    if (m < 2 || m > 64) throw InvalidArgument("gauss_legendre: node count must be in [2, 64]");
    return tables[m];
}

template <SmoothFunction F>
Vec discrete_gradient(const DiscreteGradientRule& rule, const F& H, const Vec& x, const Vec& xprime)
{
    rule.validate();
    detail::require_same_size(H.size(), x.size(), "discrete_gradient x");
    detail::require_same_size(H.size(), xprime.size(), "discrete_gradient x'");
    const Vec d = xprime - x;

    switch (rule.kind) {
    case DiscreteGradientKind::MeanValue: {
        if (d.norm() < rule.degeneracy_epsilon) return H.gradient(x);
        const QuadratureRule& q = gauss_legendre(rule.quadrature_nodes);
        Vec g = Vec::Zero(x.size());
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            g += q.weights[k] * H.gradient(x + q.nodes[k] * d);
        }
        return g;
    }
    case DiscreteGradientKind::Midpoint: {
        const Vec mid = 0.5 * (x + xprime);
        Vec g = H.gradient(mid);
        const double d2 = d.squaredNorm();
        if (std::sqrt(d2) < rule.degeneracy_epsilon) return g;
        const double defect = H.value(xprime) - H.value(x) - g.dot(d);
        g += (defect / d2) * d;
        return g;
    }
    case DiscreteGradientKind::CoordinateIncrement: {
        // Primed coordinates fill in from the left: y^(i) = (x'_1..x'_i, x_{i+1}..x_N).
        const Eigen::Index N = x.size();
        Vec g(N);
        Vec y = x;
        double H_prev = H.value(y);
        for (Eigen::Index i = 0; i < N; ++i) {
            if (std::abs(d[i]) < rule.degeneracy_epsilon) {
                g[i] = H.gradient(y)[i];
                y[i] = xprime[i];
                H_prev = H.value(y);
            } else {
                y[i] = xprime[i];
                const double H_next = H.value(y);
                g[i] = (H_next - H_prev) / d[i];
                H_prev = H_next;
            }
        }
        return g;
    }
    }
    throw InvalidArgument("discrete_gradient: unknown rule");
}

/// Residuals of the two discrete-gradient axioms over a set of point pairs.
struct AxiomReport {
    double max_energy_residual = 0.0;      ///< scaled |bar-grad^T (x'-x) - (H(x')-H(x))|
    double max_consistency_residual = 0.0; ///< |bar-grad(x, x + eps d) - grad H(x)| at the smallest eps
    double min_convergence_rate = 0.0;     ///< least observed log-log slope of the consistency error
    bool passed = false;
};

struct GradientPair {
    Vec x;
    Vec xprime;
};

/// Energy-consistency residual for one pair, scaled by max(1, |H(x)|, |H(x')|).
template <SmoothFunction F>
double energy_residual(const DiscreteGradientRule& rule, const F& H, const Vec& x, const Vec& xprime)
{
    const Vec g = discrete_gradient(rule, H, x, xprime);
    const double Hx = H.value(x);
    const double Hxp = H.value(xprime);
    const double scale = std::max({1.0, std::abs(Hx), std::abs(Hxp)});
    return std::abs(g.dot(xprime - x) - (Hxp - Hx)) / scale;
}

/// Checks both axioms on every pair. The x' -> x limit is probed along 8
/// directions (the pair direction and the signed coordinate-cycled directions)
/// with eps = 1e-1 .. 1e-4; the rate must be at least linear (slope >= 0.9)
/// unless the error is already at round-off.
template <SmoothFunction F>
AxiomReport check_axioms(const DiscreteGradientRule& rule, const F& H, const std::vector<GradientPair>& pairs,
                         double tol)
{
    AxiomReport report;
    report.min_convergence_rate = std::numeric_limits<double>::infinity();
    const std::array<double, 4> eps = {1e-1, 1e-2, 1e-3, 1e-4};
    for (const auto& pair : pairs) {
        report.max_energy_residual =
            std::max(report.max_energy_residual, energy_residual(rule, H, pair.x, pair.xprime));

        const Eigen::Index N = pair.x.size();
        const Vec grad = H.gradient(pair.x);
        const double gscale = std::max(1.0, grad.lpNorm<Eigen::Infinity>());
        for (int dir = 0; dir < 8; ++dir) {
            Vec d;
            if (dir == 0 && (pair.xprime - pair.x).norm() > 0.0) {
                d = (pair.xprime - pair.x).normalized();
            } else {
                d = Vec::Zero(N);
                d[dir % N] = (dir % 2 == 0) ? 1.0 : -1.0;
                d[(dir + 1) % N] += 0.5;
                d.normalize();
            }
            std::array<double, 4> err{};
            for (std::size_t k = 0; k < eps.size(); ++k) {
                const Vec g = discrete_gradient(rule, H, pair.x, pair.x + eps[k] * d);
                err[k] = (g - grad).lpNorm<Eigen::Infinity>() / gscale;
            }
            report.max_consistency_residual = std::max(report.max_consistency_residual, err.back());
            if (err[0] > 1e-10) {
                // slope between the largest and smallest eps that is still above round-off
                std::size_t last = 1;
                while (last + 1 < err.size() && err[last + 1] > 1e-10) ++last;
                const double rate = std::log(err[0] / std::max(err[last], 1e-300)) / std::log(eps[0] / eps[last]);
                report.min_convergence_rate = std::min(report.min_convergence_rate, rate);
            }
        }
    }
    report.passed = report.max_energy_residual <= tol && report.max_consistency_residual <= 1e-3 &&
                    report.min_convergence_rate >= 0.9;
    return report;
}

} // namespace thermoflow
