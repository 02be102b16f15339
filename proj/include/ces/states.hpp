#pragma once

// Constructors for the coherent / EPR / bipartite CES / tripartite CES /
// conjugate-momentum CES families, their eigenequation residuals, the
// closed-form coherent overlaps, and the x-diagonal overlap prefactor.

#include <cmath>

#include "ces/common.hpp"
#include "ces/gauss.hpp"

namespace ces {

// The parameter triple (mu, nu, tau) with 3 lambda^2 = mu^2 + nu^2 + tau^2.
// lambda is always recomputed.  nu and tau appear in denominators downstream,
// so all three components must be nonzero.
struct ModeWeights {
    double mu, nu, tau;

    ModeWeights(double mu_, double nu_, double tau_) : mu(mu_), nu(nu_), tau(tau_) {
        if (mu == 0 || nu == 0 || tau == 0)
            throw std::invalid_argument("ModeWeights: components must be nonzero");
    }

    double lambda() const { return std::sqrt((mu * mu + nu * nu + tau * tau) / 3.0); }

    Eigen::Vector3d m() const { return {mu, nu, tau}; }

    // Unit collective direction d = (mu, nu, tau) / (sqrt(3) lambda).
    Vec direction() const {
        Vec d(3);
        const double den = std::sqrt(3.0) * lambda();
        d << mu / den, nu / den, tau / den;
        return d;
    }
};

// Bipartite variant with 2 lambda^2 = mu^2 + nu^2.
struct BipartiteWeights {
    double mu, nu;

    BipartiteWeights(double mu_, double nu_) : mu(mu_), nu(nu_) {
        if (mu == 0 && nu == 0) throw std::invalid_argument("BipartiteWeights: degenerate weights");
    }

    double lambda() const { return std::sqrt((mu * mu + nu * nu) / 2.0); }
};

namespace detail {
inline void check_s(double s) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("regularization s must lie in (0, 1]");
}
}  // namespace detail

struct CESParams {
    ModeWeights weights;
    cplx beta, gamma;
    double x;
    double s = 1.0;  // regularization of the quadratic term; 1 is the ideal state

    CESParams(ModeWeights w, cplx beta_, cplx gamma_, double x_, double s_ = 1.0)
        : weights(w), beta(beta_), gamma(gamma_), x(x_), s(s_) {
        detail::check_s(s);
    }
};

struct ConjugateParams {
    ModeWeights weights;
    cplx sigma, kappa;
    double p;
    double s = 1.0;

    ConjugateParams(ModeWeights w, cplx sigma_, cplx kappa_, double p_, double s_ = 1.0)
        : weights(w), sigma(sigma_), kappa(kappa_), p(p_), s(s_) {
        detail::check_s(s);
    }
};

// |z> = exp(-|z|^2/2 + z.a+)|0>
inline EQState coherent_state(const Vec& z) {
    const int n = static_cast<int>(z.size());
    return EQState(-0.5 * z.squaredNorm(), z, Mat::Zero(n, n));
}

// Two-mode EPR family |eta>: w = (eta, -eta*), F = s [[0,1],[1,0]].
inline EQState epr_state(cplx eta, double s) {
    detail::check_s(s);
    Vec w(2);
    w << eta, -std::conj(eta);
    Mat F(2, 2);
    F << 0, s, s, 0;
    return EQState(-0.5 * std::norm(eta), w, F);
}

// Bipartite CES |alpha, x>_{mu nu}.
inline EQState bipartite_ces(const BipartiteWeights& bw, cplx alpha, double x, double s) {
    detail::check_s(s);
    const double L = bw.lambda();
    const cplx l = -0.5 * x * x - 0.25 * std::norm(bw.nu * alpha);
    const cplx common = (x - alpha * bw.mu / 2.0) / L;
    Vec w(2);
    w << L * alpha + bw.mu * common, bw.nu * common;
    Eigen::Vector2d m2(bw.mu, bw.nu);
    Mat F = -(s / (2.0 * L * L)) * (m2 * m2.transpose()).cast<cplx>();
    return EQState(l, w, F);
}

namespace detail {
// The x-free linear coefficients of the tripartite family; the conjugate
// state uses the same pattern with beta -> sigma, gamma -> kappa, x -> i p.
inline Vec tripartite_linear(const ModeWeights& mw, cplx beta, cplx gamma, cplx x_like) {
    const double mu = mw.mu, nu = mw.nu, tau = mw.tau, L = mw.lambda();
    Vec w(3);
    w << (beta * (nu * nu + tau * tau) + gamma * mu * tau * tau / nu + 3.0 * x_like * mu) / (3.0 * L),
        (-beta * mu * nu + gamma * tau * tau + 3.0 * x_like * nu) / (3.0 * L),
        (-gamma * (mu * mu + nu * nu) * tau / nu - beta * mu * tau + 3.0 * x_like * tau) / (3.0 * L);
    return w;
}

inline cplx tripartite_scalar(const ModeWeights& mw, cplx beta, cplx gamma, double x_or_p) {
    const double mu = mw.mu, nu = mw.nu, tau = mw.tau;
    return -0.75 * x_or_p * x_or_p -
           (std::conj(beta) * gamma + beta * std::conj(gamma)) * mu * tau * tau / (6.0 * nu) -
           std::norm(gamma) * tau * tau * (1.0 + mu * mu / (nu * nu)) / 6.0 -
           std::norm(beta) * (nu * nu + tau * tau) / 6.0;
}
}  // namespace detail

// Tripartite CES |beta, gamma, x>_{mu nu tau}: the common eigenvector of
// (mu X1 + nu X2 + tau X3)/3, (nu a1 - mu a2) and (tau a2 - nu a3).
inline EQState tripartite_ces(const CESParams& p) {
    const ModeWeights& mw = p.weights;
    const double L = mw.lambda();
    const Eigen::Vector3d m = mw.m();
    const Mat F = -(p.s / (3.0 * L * L)) * (m * m.transpose()).cast<cplx>();
    return EQState(detail::tripartite_scalar(mw, p.beta, p.gamma, p.x),
                   detail::tripartite_linear(mw, p.beta, p.gamma, p.x), F);
}

// Conjugate (momentum) CES |sigma, kappa, p>_{mu nu tau}: x -> i p in the
// linear part and the quadratic term flips sign.
inline EQState conjugate_ces(const ConjugateParams& p) {
    const ModeWeights& mw = p.weights;
    const double L = mw.lambda();
    const Eigen::Vector3d m = mw.m();
    const Mat F = +(p.s / (3.0 * L * L)) * (m * m.transpose()).cast<cplx>();
    return EQState(detail::tripartite_scalar(mw, p.sigma, p.kappa, p.p),
                   detail::tripartite_linear(mw, p.sigma, p.kappa, cplx(0, p.p)), F);
}

// --- the commuting operator family -------------------------------------------

// (mu X1 + nu X2 + tau X3)/3, eigenvalue lambda x / sqrt(2)
inline FirstOrderOperator ces_quadrature_sum(const ModeWeights& mw) {
    const Vec u = mw.m().cast<cplx>() / (3.0 * std::sqrt(2.0));
    return FirstOrderOperator(u, u);
}

// (mu P1 + nu P2 + tau P3)/3, eigenvalue lambda p / sqrt(2) on the conjugate family
inline FirstOrderOperator ces_momentum_sum(const ModeWeights& mw) {
    const Vec base = mw.m().cast<cplx>() / (3.0 * std::sqrt(2.0));
    const cplx mi(0, -1);
    return FirstOrderOperator(mi * base, -mi * base);
}

// nu a1 - mu a2, eigenvalue nu beta lambda
inline FirstOrderOperator ces_ladder_12(const ModeWeights& mw) {
    Vec u(3);
    u << mw.nu, -mw.mu, 0.0;
    return FirstOrderOperator(u, Vec::Zero(3));
}

// tau a2 - nu a3, eigenvalue tau gamma lambda
inline FirstOrderOperator ces_ladder_23(const ModeWeights& mw) {
    Vec u(3);
    u << 0.0, mw.tau, -mw.nu;
    return FirstOrderOperator(u, Vec::Zero(3));
}

// (mu X1 + nu X2)/2 for the bipartite family, eigenvalue lambda x / sqrt(2)
inline FirstOrderOperator bipartite_quadrature_sum(const BipartiteWeights& bw) {
    Vec u(2);
    u << bw.mu, bw.nu;
    u /= 2.0 * std::sqrt(2.0);
    return FirstOrderOperator(u, u);
}

// nu a1 - mu a2 on two modes, eigenvalue nu alpha lambda
inline FirstOrderOperator bipartite_ladder(const BipartiteWeights& bw) {
    Vec u(2);
    u << bw.nu, -bw.mu;
    return FirstOrderOperator(u, Vec::Zero(2));
}

struct EigenResidual {
    cplx scalar_defect;        // sigma - eigenvalue
    double vector_defect_norm;  // ||v||; zero iff exact eigenstate
};

inline EigenResidual eigen_residual(const EQState& st, const FirstOrderOperator& op, cplx eigenvalue) {
    const FirstOrderAction act = apply_first_order(op, st);
    return {act.sigma - eigenvalue, act.v.norm()};
}

// --- overlaps -----------------------------------------------------------------

// Exponential prefactor multiplying delta(x - x') in the x-diagonal overlap
// <a|b> of two tripartite CES with shared weights.  The regularized ratio
//
//    <a(x)|b(x)>_s / <0,0,x|0,0,x>_s
//
// equals this expression exactly, independent of s (the amplified direction
// m is orthogonal to the beta/gamma content of w).  The printed form of the
// paper's overlap misprints the |beta|^2 and gamma gamma'* coefficients; the
// corrected coefficients below are forced by the eigenequation algebra and
// restore prefactor(a, a) = 1.
inline cplx overlap_prefactor(const CESParams& a, const CESParams& b) {
    const ModeWeights& mw = a.weights;
    if (mw.mu != b.weights.mu || mw.nu != b.weights.nu || mw.tau != b.weights.tau)
        throw std::invalid_argument("overlap_prefactor: weights must be shared");
    const double mu = mw.mu, nu = mw.nu, tau = mw.tau;
    const double A = (nu * nu + tau * tau) / 3.0;
    const double B = tau * tau * (mu * mu + nu * nu) / (3.0 * nu * nu);
    const double C = mu * tau * tau / (3.0 * nu);
    const cplx bp = a.beta, gp = a.gamma;  // bra labels
    const cplx bk = b.beta, gk = b.gamma;  // ket labels
    const cplx e = -0.5 * A * (std::norm(bk) + std::norm(bp)) - 0.5 * B * (std::norm(gk) + std::norm(gp)) -
                   0.5 * C *
                       (bk * std::conj(gk) + std::conj(bk) * gk + bp * std::conj(gp) + std::conj(bp) * gp) +
                   A * bk * std::conj(bp) + B * gk * std::conj(gp) +
                   C * (bk * std::conj(gp) + gk * std::conj(bp));
    return std::exp(e);
}

// <z1 z2 z3 | beta, gamma, x>_s in closed form (finite at s = 1).
inline cplx coherent_ces_overlap(const Vec& z, const CESParams& p) {
    if (z.size() != 3) throw std::invalid_argument("coherent_ces_overlap: need 3 modes");
    const ModeWeights& mw = p.weights;
    const double L = mw.lambda();
    const Vec zb = z.conjugate();
    const Vec w = detail::tripartite_linear(mw, p.beta, p.gamma, p.x);
    const cplx mz = mw.m().cast<cplx>().transpose() * zb;
    const cplx e = -0.5 * z.squaredNorm() + detail::tripartite_scalar(mw, p.beta, p.gamma, p.x) +
                   (w.transpose() * zb).value() - p.s / (6.0 * L * L) * mz * mz;
    return std::exp(e);
}

// Momentum-family counterpart <z | sigma, kappa, p>_s.
inline cplx coherent_conjugate_overlap(const Vec& z, const ConjugateParams& p) {
    if (z.size() != 3) throw std::invalid_argument("coherent_conjugate_overlap: need 3 modes");
    const ModeWeights& mw = p.weights;
    const double L = mw.lambda();
    const Vec zb = z.conjugate();
    const Vec w = detail::tripartite_linear(mw, p.sigma, p.kappa, cplx(0, p.p));
    const cplx mz = mw.m().cast<cplx>().transpose() * zb;
    const cplx e = -0.5 * z.squaredNorm() + detail::tripartite_scalar(mw, p.sigma, p.kappa, p.p) +
                   (w.transpose() * zb).value() + p.s / (6.0 * L * L) * mz * mz;
    return std::exp(e);
}

}  // namespace ces
