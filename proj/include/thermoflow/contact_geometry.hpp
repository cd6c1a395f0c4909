#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "thermoflow/scalar_field.hpp"

namespace thermoflow {

/// Outcome of the pointwise level-set check for E_f.
struct LevelSetReport {
    double residual = 0.0;        ///< max over ker(df) basis of |d eta(v, w) + eta(w)|
    double reeb_derivative = 0.0; ///< R(f)(x)
    bool passed = false;
};

/// Canonical contact structure eta = dS - p_i dq^i on R^{2n+1}.
///
/// Every operation is an exact pointwise formula in Darboux coordinates. The
/// bivector follows Lambda = d/dp_i ^ (d/dq^i + p_i d/dS); all other signs are
/// derived from it.
class ContactStructure {
public:
    explicit ContactStructure(int n) : n_(n)
    {
        if (n < 1) throw InvalidArgument("ContactStructure: n must be >= 1, got " + std::to_string(n));
    }

    int n() const noexcept { return n_; }
    int manifold_dimension() const noexcept { return 2 * n_ + 1; }

    double eta(const ContactPoint& x, const TangentVector& v) const
    {
        check(x);
        check(v);
        return v.dS - x.p.dot(v.dq);
    }

    /// d eta = dq^i ^ dp_i.
    double d_eta(const ContactPoint& x, const TangentVector& v, const TangentVector& w) const
    {
        check(x);
        check(v);
        check(w);
        return v.dq.dot(w.dp) - v.dp.dot(w.dq);
    }

    TangentVector reeb() const { return {Vec::Zero(n_), Vec::Zero(n_), 1.0}; }

    /// Liouville field Delta = p_i d/dp_i = -sharp(dS).
    TangentVector liouville(const ContactPoint& x) const
    {
        check(x);
        return {Vec::Zero(n_), x.p, 0.0};
    }

    /// flat(v) = i_v d eta + eta(v) eta.
    CoVector flat(const ContactPoint& x, const TangentVector& v) const
    {
        const double ev = eta(x, v);
        return {-v.dp - ev * x.p, v.dq, ev};
    }

    /// Matrix of flat in the coordinate bases; column k is flat(d/dx_k).
    Mat flat_matrix(const ContactPoint& x) const
    {
        const int N = manifold_dimension();
        Mat M(N, N);
        for (int k = 0; k < N; ++k) M.col(k) = flat(x, coordinate_vector(n_, k)).to_vector();
        return M;
    }

    TangentVector flat_inverse(const ContactPoint& x, const CoVector& a) const
    {
        check(a);
        Vec v = flat_matrix(x).partialPivLu().solve(a.to_vector());
        return TangentVector::from_vector(v);
    }

    double lambda(const ContactPoint& x, const CoVector& a, const CoVector& b) const
    {
        check(x);
        check(a);
        check(b);
        return a.ap.dot(b.aq + b.aS * x.p) - b.ap.dot(a.aq + a.aS * x.p);
    }

    /// sharp with <b, sharp(a)> = Lambda(a, b).
    TangentVector sharp_lambda(const ContactPoint& x, const CoVector& a) const
    {
        check(x);
        check(a);
        return {a.ap, -(a.aq + a.aS * x.p), x.p.dot(a.ap)};
    }

    /// X_f = sharp(df) - f R.
    TangentVector hamiltonian_field(const ScalarField& f, const ContactPoint& x) const
    {
        TangentVector v = evolution_field(f, x);
        v.dS -= f(x);
        return v;
    }

    /// E_f = sharp(df).
    TangentVector evolution_field(const ScalarField& f, const ContactPoint& x) const
    {
        check_field(f);
        return sharp_lambda(x, f.gradient(x));
    }

    /// {f, g} = Lambda(df, dg) + f E(g) - g E(f), with E = -R.
    double jacobi_bracket(const ScalarField& f, const ScalarField& g, const ContactPoint& x) const
    {
        check_field(f);
        check_field(g);
        const CoVector df = f.gradient(x);
        const CoVector dg = g.gradient(x);
        return lambda(x, df, dg) - f(x) * dg.aS + g(x) * df.aS;
    }

    /// [f, g] = Lambda(df, dg).
    double cartan_bracket(const ScalarField& f, const ScalarField& g, const ContactPoint& x) const
    {
        check_field(f);
        check_field(g);
        return lambda(x, f.gradient(x), g.gradient(x));
    }

    /// Bracket of the Poisson bivector Lambda_0 = d/dp_i ^ d/dq^i.
    double poisson_lambda0_bracket(const ScalarField& f, const ScalarField& g,
                                   const ContactPoint& x) const
    {
        check_field(f);
        check_field(g);
        const CoVector df = f.gradient(x);
        const CoVector dg = g.gradient(x);
        return df.ap.dot(dg.aq) - df.aq.dot(dg.ap);
    }

    /// {f, g}_Delta = (dg/dS) Delta(f) - (df/dS) Delta(g).
    double delta_bracket(const ScalarField& f, const ScalarField& g, const ContactPoint& x) const
    {
        check_field(f);
        check_field(g);
        const CoVector df = f.gradient(x);
        const CoVector dg = g.gradient(x);
        return dg.aS * x.p.dot(df.ap) - df.aS * x.p.dot(dg.ap);
    }

    /// Checks that v = E_f / R(f) satisfies i_v omega_c = eta on ker(df_x), where
    /// omega_c is -d eta restricted to the level set through x.
    LevelSetReport verify_level_set_decomposition(const ScalarField& f, const ContactPoint& x,
                                                  double tol) const
    {
        check_field(f);
        check(x);
        const CoVector df = f.gradient(x);
        if (std::abs(df.aS) < 1e-12) {
            throw ReebDerivativeZero("verify_level_set_decomposition: |R(f)(x)| = " +
                                     std::to_string(std::abs(df.aS)) + " < 1e-12");
        }

        const int N = manifold_dimension();
        const Vec g = df.to_vector();
        const Eigen::HouseholderQR<Mat> qr{Mat(g)};
        const Mat Q = qr.householderQ() * Mat::Identity(N, N);
        const Mat kernel = Q.rightCols(N - 1);
        const double leak = (g.transpose() * kernel).cwiseAbs().maxCoeff() / g.norm();
        const double orth =
            (kernel.transpose() * kernel - Mat::Identity(N - 1, N - 1)).cwiseAbs().maxCoeff();
        if (!std::isfinite(leak) || leak > 1e-10 || orth > 1e-10) {
            throw SingularBasis("verify_level_set_decomposition: kernel basis of df is not orthonormal");
        }

        TangentVector v = evolution_field(f, x);
        v.dq /= df.aS;
        v.dp /= df.aS;
        v.dS /= df.aS;

        LevelSetReport report;
        report.reeb_derivative = df.aS;
        for (int k = 0; k < N - 1; ++k) {
            const TangentVector w = TangentVector::from_vector(kernel.col(k));
            report.residual = std::max(report.residual, std::abs(d_eta(x, v, w) + eta(x, w)));
        }
        report.passed = report.residual <= tol;
        return report;
    }

private:
    template <class T>
    void check(const T& t) const
    {
        detail::require_same_size(n_, t.dim(), "ContactStructure argument");
    }

    void check_field(const ScalarField& f) const
    {
        detail::require_same_size(n_, f.dimension(), "ContactStructure field");
    }

    int n_;
};

} // namespace thermoflow
