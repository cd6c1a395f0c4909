#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "thermoflow/errors.hpp"

namespace thermoflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace detail {

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what)
{
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(a) +
                                ", got " + std::to_string(b));
    }
}

// Flat layout shared by all three triples: [q_1..q_n, p_1..p_n, S].
inline Vec pack(const Vec& a, const Vec& b, double c)
{
    const Eigen::Index n = a.size();
    Vec out(2 * n + 1);
    out.head(n) = a;
    out.segment(n, n) = b;
    out[2 * n] = c;
    return out;
}

inline Eigen::Index half_dimension(const Vec& flat)
{
    if (flat.size() < 3 || flat.size() % 2 == 0) {
        throw DimensionMismatch("flat vector length " + std::to_string(flat.size()) +
                                " is not of the form 2n+1 with n >= 1");
    }
    return (flat.size() - 1) / 2;
}

} // namespace detail

/// A state (q, p, S) of the contact phase space T*Q x R.
struct ContactPoint {
    Vec q;
    Vec p;
    double S = 0.0;

    ContactPoint() = default;
    ContactPoint(Vec q_, Vec p_, double S_) : q(std::move(q_)), p(std::move(p_)), S(S_)
    {
        detail::require_same_size(q.size(), p.size(), "ContactPoint momenta");
    }
    /// Scalar convenience for n = 1.
    ContactPoint(double q_, double p_, double S_)
        : q(Vec::Constant(1, q_)), p(Vec::Constant(1, p_)), S(S_) {}

    int dim() const noexcept { return static_cast<int>(q.size()); }

    bool is_finite() const { return q.allFinite() && p.allFinite() && std::isfinite(S); }

    Vec to_vector() const { return detail::pack(q, p, S); }

    static ContactPoint from_vector(const Vec& x)
    {
        const auto n = detail::half_dimension(x);
        return {x.head(n), x.segment(n, n), x[2 * n]};
    }
};

/// Element of T_x M, components along d/dq, d/dp, d/dS.
struct TangentVector {
    Vec dq;
    Vec dp;
    double dS = 0.0;

    TangentVector() = default;
    TangentVector(Vec dq_, Vec dp_, double dS_) : dq(std::move(dq_)), dp(std::move(dp_)), dS(dS_)
    {
        detail::require_same_size(dq.size(), dp.size(), "TangentVector dp");
    }
    TangentVector(double dq_, double dp_, double dS_)
        : dq(Vec::Constant(1, dq_)), dp(Vec::Constant(1, dp_)), dS(dS_) {}

    int dim() const noexcept { return static_cast<int>(dq.size()); }

    Vec to_vector() const { return detail::pack(dq, dp, dS); }

    static TangentVector from_vector(const Vec& x)
    {
        const auto n = detail::half_dimension(x);
        return {x.head(n), x.segment(n, n), x[2 * n]};
    }

    static TangentVector zero(int n) { return {Vec::Zero(n), Vec::Zero(n), 0.0}; }
};

/// Element of T*_x M, components along dq, dp, dS.
struct CoVector {
    Vec aq;
    Vec ap;
    double aS = 0.0;

    CoVector() = default;
    CoVector(Vec aq_, Vec ap_, double aS_) : aq(std::move(aq_)), ap(std::move(ap_)), aS(aS_)
    {
        detail::require_same_size(aq.size(), ap.size(), "CoVector ap");
    }
    CoVector(double aq_, double ap_, double aS_)
        : aq(Vec::Constant(1, aq_)), ap(Vec::Constant(1, ap_)), aS(aS_) {}

    int dim() const noexcept { return static_cast<int>(aq.size()); }

    Vec to_vector() const { return detail::pack(aq, ap, aS); }

    static CoVector from_vector(const Vec& x)
    {
        const auto n = detail::half_dimension(x);
        return {x.head(n), x.segment(n, n), x[2 * n]};
    }

    static CoVector zero(int n) { return {Vec::Zero(n), Vec::Zero(n), 0.0}; }

    /// Evaluates this covector on a tangent vector.
    double operator()(const TangentVector& v) const
    {
        detail::require_same_size(aq.size(), v.dq.size(), "CoVector pairing");
        return aq.dot(v.dq) + ap.dot(v.dp) + aS * v.dS;
    }
};

/// Coordinate basis dq^i, dp_i, dS of T*M as covectors (index k in [0, 2n]).
inline CoVector coordinate_covector(int n, int k)
{
    Vec e = Vec::Zero(2 * n + 1);
    e[k] = 1.0;
    return CoVector::from_vector(e);
}

inline TangentVector coordinate_vector(int n, int k)
{
    Vec e = Vec::Zero(2 * n + 1);
    e[k] = 1.0;
    return TangentVector::from_vector(e);
}

} // namespace thermoflow
