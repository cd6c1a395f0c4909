#pragma once

#include <algorithm>
#include <concepts>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "thermoflow/contact_point.hpp"

namespace thermoflow {

/// Anything with a value and an exact gradient on R^N.
template <class F>
concept SmoothFunction = requires(const F& f, const Vec& x) {
    { f.size() } -> std::convertible_to<int>;
    { f.value(x) } -> std::convertible_to<double>;
    { f.gradient(x) } -> std::convertible_to<Vec>;
};

/// Type-erased smooth function on R^N.
class EuclideanFunction {
public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradientFn = std::function<Vec(const Vec&)>;

    EuclideanFunction(int size, ValueFn value, GradientFn gradient)
        : size_(size), value_(std::move(value)), gradient_(std::move(gradient))
    {
        if (size_ < 1) throw InvalidArgument("EuclideanFunction: size must be positive");
    }

    int size() const noexcept { return size_; }

    double value(const Vec& x) const
    {
        detail::require_same_size(size_, x.size(), "EuclideanFunction argument");
        return value_(x);
    }

    Vec gradient(const Vec& x) const
    {
        detail::require_same_size(size_, x.size(), "EuclideanFunction argument");
        Vec g = gradient_(x);
        detail::require_same_size(size_, g.size(), "EuclideanFunction gradient");
        return g;
    }

private:
    int size_;
    ValueFn value_;
    GradientFn gradient_;
};

namespace detail {

inline double ipow(double base, int exponent)
{
    double r = 1.0;
    for (int k = 0; k < exponent; ++k) r *= base;
    return r;
}

} // namespace detail

/// Sparse polynomial sum_t c_t prod_k x_k^{e_tk} on R^N with exact gradient.
class Polynomial {
public:
    struct Term {
        double coefficient = 0.0;
        std::vector<int> exponents;
    };

    Polynomial() = default;
    explicit Polynomial(int variables) : variables_(variables)
    {
        if (variables < 1) throw InvalidArgument("Polynomial: need at least one variable");
    }

    Polynomial& add_term(double coefficient, std::vector<int> exponents)
    {
        detail::require_same_size(variables_, static_cast<Eigen::Index>(exponents.size()),
                                  "Polynomial term exponents");
        for (int e : exponents) {
            if (e < 0) throw InvalidArgument("Polynomial: negative exponent");
        }
        terms_.push_back({coefficient, std::move(exponents)});
        return *this;
    }

    int size() const noexcept { return variables_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }

    int degree() const
    {
        int d = 0;
        for (const auto& t : terms_) {
            int s = 0;
            for (int e : t.exponents) s += e;
            d = std::max(d, s);
        }
        return d;
    }

    double value(const Vec& x) const
    {
        detail::require_same_size(variables_, x.size(), "Polynomial argument");
        double sum = 0.0;
        for (const auto& t : terms_) {
            double m = t.coefficient;
            for (int k = 0; k < variables_; ++k) m *= detail::ipow(x[k], t.exponents[k]);
            sum += m;
        }
        return sum;
    }

    Vec gradient(const Vec& x) const
    {
        detail::require_same_size(variables_, x.size(), "Polynomial argument");
        Vec g = Vec::Zero(variables_);
        for (const auto& t : terms_) {
            for (int k = 0; k < variables_; ++k) {
                if (t.exponents[k] == 0) continue;
                double m = t.coefficient * t.exponents[k] * detail::ipow(x[k], t.exponents[k] - 1);
                for (int j = 0; j < variables_; ++j) {
                    if (j != k) m *= detail::ipow(x[j], t.exponents[j]);
                }
                g[k] += m;
            }
        }
        return g;
    }

private:
    int variables_ = 1;
    std::vector<Term> terms_;
};

/// A smooth function f on the contact phase space R^{2n+1} with analytic gradient.
///
/// The flat-vector overloads of value/gradient let a ScalarField be used anywhere a
/// SmoothFunction on R^{2n+1} is expected (layout q, p, S).
class ScalarField {
public:
    using ValueFn = std::function<double(const ContactPoint&)>;
    using GradientFn = std::function<CoVector(const ContactPoint&)>;

    ScalarField(int n, ValueFn value, GradientFn gradient)
        : n_(n), value_(std::move(value)), gradient_(std::move(gradient))
    {
        if (n_ < 1) throw InvalidArgument("ScalarField: dimension n must be >= 1");
    }

    int dimension() const noexcept { return n_; }
    int size() const noexcept { return 2 * n_ + 1; }

    double value(const ContactPoint& x) const
    {
        detail::require_same_size(n_, x.dim(), "ScalarField point");
        return value_(x);
    }

    CoVector gradient(const ContactPoint& x) const
    {
        detail::require_same_size(n_, x.dim(), "ScalarField point");
        CoVector g = gradient_(x);
        detail::require_same_size(n_, g.dim(), "ScalarField gradient");
        return g;
    }

    double operator()(const ContactPoint& x) const { return value(x); }

    double value(const Vec& x) const { return value(ContactPoint::from_vector(x)); }
    Vec gradient(const Vec& x) const { return gradient(ContactPoint::from_vector(x)).to_vector(); }

    /// R(f) = df/dS.
    double reeb_derivative(const ContactPoint& x) const { return gradient(x).aS; }

private:
    int n_;
    ValueFn value_;
    GradientFn gradient_;
};

inline ScalarField constant_field(int n, double c)
{
    return {n, [c](const ContactPoint&) { return c; },
            [n](const ContactPoint&) { return CoVector::zero(n); }};
}

/// The coordinate function with flat index k: q^{k+1} for k < n, p_{k-n+1} for k < 2n, S for k = 2n.
inline ScalarField coordinate_field(int n, int k)
{
    if (k < 0 || k > 2 * n) throw InvalidArgument("coordinate_field: index out of range");
    return {n, [k](const ContactPoint& x) { return x.to_vector()[k]; },
            [n, k](const ContactPoint&) { return coordinate_covector(n, k); }};
}

inline ScalarField polynomial_field(int n, Polynomial poly)
{
    detail::require_same_size(2 * n + 1, poly.size(), "polynomial_field variables");
    auto shared = std::make_shared<const Polynomial>(std::move(poly));
    return {n, [shared](const ContactPoint& x) { return shared->value(x.to_vector()); },
            [shared](const ContactPoint& x) {
                return CoVector::from_vector(shared->gradient(x.to_vector()));
            }};
}

inline ScalarField sum(const ScalarField& f, const ScalarField& g)
{
    detail::require_same_size(f.dimension(), g.dimension(), "sum of fields");
    return {f.dimension(), [f, g](const ContactPoint& x) { return f(x) + g(x); },
            [f, g](const ContactPoint& x) {
                return CoVector::from_vector(f.gradient(x).to_vector() + g.gradient(x).to_vector());
            }};
}

inline ScalarField product(const ScalarField& f, const ScalarField& g)
{
    detail::require_same_size(f.dimension(), g.dimension(), "product of fields");
    return {f.dimension(), [f, g](const ContactPoint& x) { return f(x) * g(x); },
            [f, g](const ContactPoint& x) {
                return CoVector::from_vector(g(x) * f.gradient(x).to_vector() +
                                             f(x) * g.gradient(x).to_vector());
            }};
}

} // namespace thermoflow
