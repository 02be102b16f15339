#pragma once

// The collective-quadrature Wigner operator Delta(p, x): a 2-D phase-space
// object built on the CES representation, NOT the usual 6-dimensional
// three-mode Wigner operator.  Evaluated on states in both backends,
// together with its x / p marginal projectors.
//
// Analytic route: Delta is Fourier-represented by coherent shifts along the
// collective direction, so expectation values reduce to 2-D (or 1-D)
// Gaussian integrals whose exponents are exact quadratics in the Fourier
// variables.  Fock route: in the rotated basis where the collective mode is
// mode 1, Delta(p,x) = (1/(pi tau^2 lambda^2)) D(c) (-1)^{n_1} D(c)+ with
// c = sqrt(3)(x + i p)/2; the displaced-parity form is an exact resummation
// of the normally ordered exponential series (the raw total-power series
// alternates with terms up to exp(2(sqrt(N)+|c|)^2) and cancels
// catastrophically in double precision, so it is not used).

#include <cmath>
#include <ostream>
#include <vector>

#include "ces/common.hpp"
#include "ces/fock.hpp"
#include "ces/gauss.hpp"
#include "ces/protocol.hpp"
#include "ces/states.hpp"

namespace ces {

struct PhasePoint {
    double x = 0;
    double p = 0;
};

// <z|Delta(p,x)|z'> by the coherent substitution rule.
inline cplx wigner_element(const Vec& z, const Vec& zp, const PhasePoint& pt, const ModeWeights& mw) {
    const double L = mw.lambda();
    const Vec m = mw.m().cast<cplx>();
    const cplx xa = pt.x / std::sqrt(2.0) -
                    (m.transpose() * (z.conjugate() + zp)).value() / (3.0 * std::sqrt(2.0) * L);
    const cplx pa = pt.p / std::sqrt(2.0) -
                    (m.transpose() * (zp - z.conjugate())).value() / (3.0 * std::sqrt(2.0) * L * cplx(0, 1));
    const cplx lzz = -0.5 * (z.squaredNorm() + zp.squaredNorm()) + (z.conjugate().transpose() * zp).value();
    return std::exp(-3.0 * (xa * xa + pa * pa) + lzz) / (kPi * mw.tau * mw.tau * L * L);
}

namespace detail {

// log <psi| e^{a g.a+} e^{b g.a} |psi>, exact quadratic in whatever (a, b)
// are linear in; reconstructed from point evaluations.
inline cplx log_shifted_ip(const EQState& psi, const Vec& g, cplx alpha, cplx alpha_p) {
    const EQState bra = shift_annihilation(psi, std::conj(alpha) * g);
    const EQState ket = shift_annihilation(psi, alpha_p * g);
    return log_overlap(bra, ket);
}

struct Quad2 {
    cplx c0, lk, lq, qkk, qqq, qkq;
};

// Exact reconstruction of a quadratic polynomial from 6 evaluations.
template <typename F>
Quad2 reconstruct_quadratic(F&& f) {
    Quad2 q;
    q.c0 = f(0.0, 0.0);
    const cplx fp0 = f(1.0, 0.0), fm0 = f(-1.0, 0.0);
    const cplx f0p = f(0.0, 1.0), f0m = f(0.0, -1.0);
    q.lk = (fp0 - fm0) / 2.0;
    q.lq = (f0p - f0m) / 2.0;
    q.qkk = fp0 + fm0 - 2.0 * q.c0;
    q.qqq = f0p + f0m - 2.0 * q.c0;
    q.qkq = f(1.0, 1.0) - q.c0 - q.lk - q.lq - 0.5 * q.qkk - 0.5 * q.qqq;
    return q;
}

}  // namespace detail

// <psi|Delta(p,x)|psi> / <psi|psi> for the analytic backend.
inline double wigner_value(const EQState& psi, const PhasePoint& pt, const ModeWeights& mw) {
    const double L = mw.lambda();
    const Vec g = mw.m().cast<cplx>() / (3.0 * std::sqrt(2.0) * L);
    auto f = [&](double k, double q) {
        const cplx alpha(q, -k);     // -ik + q
        const cplx alpha_p(-q, -k);  // -ik - q
        return detail::log_shifted_ip(psi, g, alpha, alpha_p);
    };
    const detail::Quad2 Q = detail::reconstruct_quadratic(f);
    Eigen::Matrix2cd A;
    A << cplx(1.0 / 6.0) - Q.qkk, -Q.qkq, -Q.qkq, cplx(1.0 / 6.0) - Q.qqq;
    const cplx det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    if (det.real() <= 0) throw DivergentIntegralError("wigner_value: Fourier integral not convergent");
    const cplx u = pt.x / std::sqrt(2.0), v = pt.p / std::sqrt(2.0);
    Eigen::Vector2cd b(cplx(0, 1) * u + Q.lk, cplx(0, 1) * v + Q.lq);
    const cplx binv = (b(0) * (A(1, 1) * b(0) - A(0, 1) * b(1)) + b(1) * (A(0, 0) * b(1) - A(1, 0) * b(0))) / det;
    const cplx val = std::exp(Q.c0 + 0.5 * binv - log_norm2(psi)) / (6.0 * std::sqrt(det));
    return (val / (kPi * mw.tau * mw.tau * L * L)).real();
}

namespace detail {

// 1-D marginal integral shared by marginal_x / marginal_p.
inline double marginal_eq(const EQState& psi, double coord, const ModeWeights& mw, bool momentum) {
    const double L = mw.lambda();
    const Vec d = mw.direction();
    const double tilde = std::sqrt(1.5) * coord;
    auto f = [&](double k) {
        Vec vb, vk;
        if (momentum) {
            vb = (k / std::sqrt(2.0)) * d;
            vk = (-k / std::sqrt(2.0)) * d;
        } else {
            vb = (cplx(0, k) / std::sqrt(2.0)) * d;
            vk = (cplx(0, -k) / std::sqrt(2.0)) * d;
        }
        return log_overlap(shift_annihilation(psi, vb), shift_annihilation(psi, vk));
    };
    const cplx c0 = f(0.0);
    const cplx fp = f(1.0), fm = f(-1.0);
    const cplx l1 = (fp - fm) / 2.0;
    const cplx q1 = fp + fm - 2.0 * c0;
    const cplx aq = 0.25 - 0.5 * q1;
    if (aq.real() <= 0) throw DivergentIntegralError("marginal: Fourier integral not convergent");
    const cplx b = cplx(0, tilde) + l1;
    const cplx val = std::sqrt(kPi / aq) * std::exp(c0 + b * b / (4.0 * aq) - log_norm2(psi));
    return (std::sqrt(2.0 / (3.0 * kPi)) / (mw.tau * mw.tau * L * L) * val / std::sqrt(4.0 * kPi)).real();
}

}  // namespace detail

inline double marginal_x(const EQState& psi, double x, const ModeWeights& mw) {
    return detail::marginal_eq(psi, x, mw, false);
}
inline double marginal_p(const EQState& psi, double p, const ModeWeights& mw) {
    return detail::marginal_eq(psi, p, mw, true);
}

// --- Fock backend ---------------------------------------------------------------

namespace detail {

// U_Q with Q mapping the collective direction onto mode 1: the inverse of the
// generation cascade, realized by two beam-splitter evolutions.
inline std::pair<FockState, LeakageReport> rotate_to_collective(const FockState& st, const ModeWeights& mw,
                                                                double tol) {
    const ProtocolAngles ang = protocol_angles(mw);
    auto [s1, r1] = evolve_state(bs_action(1, 2, -ang.phi), st, tol);
    auto [s2, r2] = evolve_state(bs_action(0, 1, -ang.theta), s1, tol);
    LeakageReport rep{std::max(r1.boundary_mass, r2.boundary_mass), std::max(r1.norm_defect, r2.norm_defect)};
    return {s2, rep};
}

// exp(coeff * ladder_mode) applied exactly (the series terminates on the
// truncated space; every kept amplitude is exact).
inline FockState apply_exp_ladder(const FockState& st, cplx coeff, int mode, LadderKind kind) {
    FockState acc = st;
    FockState term = st;
    FockState next(st.n_modes(), st.cutoff());
    for (int k = 1; k <= st.cutoff() + 1; ++k) {
        std::fill(next.amps().begin(), next.amps().end(), cplx(0, 0));
        if (kind == LadderKind::Lower) add_scaled_lower(term, mode, coeff / double(k), next);
        else add_scaled_raise(term, mode, coeff / double(k), next);
        std::swap(term, next);
        double tn = 0;
        for (std::size_t f = 0; f < term.dim(); ++f) {
            acc.amp(f) += term.amp(f);
            tn += std::norm(term.amp(f));
        }
        if (tn == 0) break;
    }
    return acc;
}

}  // namespace detail

// Fock-backend Wigner value via the displaced-parity form on the collective
// mode.  The beam-splitter rotation is the only approximate step; its
// leakage is reported through the optional pointer.
inline double wigner_value(const FockState& psi, const PhasePoint& pt, const ModeWeights& mw,
                           double tol = default_tolerances().matrix_exp_rel,
                           LeakageReport* leakage = nullptr) {
    if (psi.n_modes() != 3) throw std::invalid_argument("wigner_value: need 3 modes");
    const double L = mw.lambda();
    auto [rot, rep] = detail::rotate_to_collective(psi, mw, tol);
    if (leakage) *leakage = rep;
    const cplx c = std::sqrt(3.0) * cplx(pt.x, pt.p) / 2.0;
    FockState sh = detail::apply_exp_ladder(rot, std::conj(c), 0, LadderKind::Lower);
    sh = detail::apply_exp_ladder(sh, -c, 0, LadderKind::Raise);
    const double damp = std::exp(-std::norm(c));  // e^{-|c|^2/2} applied to |amp|^2
    double par = 0;
    // mode 0 is the most significant index: n1 = f / stride(0)
    for (std::size_t f = 0; f < sh.dim(); ++f) {
        const int n1 = static_cast<int>(f / sh.stride(0));
        const double w = std::norm(sh.amp(f));
        par += (n1 % 2 == 0) ? w : -w;
    }
    return damp * par / (kPi * mw.tau * mw.tau * L * L * psi.norm2());
}

// Fock-backend marginals via single-mode position (momentum) wavefunctions of
// the collective mode.
inline double marginal_value(const FockState& psi, double coord, const ModeWeights& mw, bool momentum,
                             double tol = default_tolerances().matrix_exp_rel,
                             LeakageReport* leakage = nullptr) {
    if (psi.n_modes() != 3) throw std::invalid_argument("marginal: need 3 modes");
    const double L = mw.lambda();
    auto [rot, rep] = detail::rotate_to_collective(psi, mw, tol);
    if (leakage) *leakage = rep;
    const int N = rot.cutoff();
    const double tilde = std::sqrt(1.5) * coord;
    // Hermite functions h_n(tilde), stable upward recurrence.
    std::vector<cplx> h(N + 1);
    h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * tilde * tilde);
    if (N >= 1) h[1] = std::sqrt(2.0) * tilde * h[0];
    for (int n = 1; n < N; ++n)
        h[n + 1] = std::sqrt(2.0 / (n + 1.0)) * tilde * h[n] - std::sqrt(n / (n + 1.0)) * h[n - 1];
    if (momentum) {
        cplx phase(1, 0);
        const cplx mi(0, -1);
        for (int n = 0; n <= N; ++n) {
            h[n] *= phase;
            phase *= mi;
        }
    }
    const std::size_t str = rot.stride(0);
    double acc = 0;
    for (std::size_t rest = 0; rest < str; ++rest) {
        cplx amp_sum(0, 0);
        for (int n1 = 0; n1 <= N; ++n1) amp_sum += h[n1] * rot.amp(n1 * str + rest);
        acc += std::norm(amp_sum);
    }
    return std::sqrt(2.0 / 3.0) / (mw.tau * mw.tau * L * L) * acc / psi.norm2();
}

inline double marginal_x(const FockState& psi, double x, const ModeWeights& mw,
                         double tol = default_tolerances().matrix_exp_rel) {
    return marginal_value(psi, x, mw, false, tol);
}
inline double marginal_p(const FockState& psi, double p, const ModeWeights& mw,
                         double tol = default_tolerances().matrix_exp_rel) {
    return marginal_value(psi, p, mw, true, tol);
}

// --- grids -----------------------------------------------------------------------

struct WignerGrid {
    std::vector<double> xs, ps;
    Eigen::MatrixXd values;  // values(i, j) = W(xs[i], ps[j])

    void to_csv(std::ostream& os) const {
        os << "x,p,value\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < ps.size(); ++j)
                os << xs[i] << "," << ps[j] << "," << values(i, j) << "\n";
    }
};

inline WignerGrid wigner_grid(const EQState& psi, const ModeWeights& mw, double x_min, double x_max,
                              int nx, double p_min, double p_max, int np) {
    WignerGrid grid;
    grid.xs.resize(nx);
    grid.ps.resize(np);
    grid.values.resize(nx, np);
    for (int i = 0; i < nx; ++i) grid.xs[i] = nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1.0);
    for (int j = 0; j < np; ++j) grid.ps[j] = np == 1 ? p_min : p_min + (p_max - p_min) * j / (np - 1.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < np; ++j) grid.values(i, j) = wigner_value(psi, {grid.xs[i], grid.ps[j]}, mw);
    return grid;
}

// Gauss-Legendre quadrature of the Wigner value over a phase-space box,
// used by the normalization identity (= 2/(3 tau^2 lambda^2)).
inline double wigner_total_integral(const EQState& psi, const ModeWeights& mw, double box_half_width = 6.0,
                                    int order = 48) {
    // nodes/weights for the given order on [-1, 1] by Newton iteration
    std::vector<double> xn(order), wn(order);
    for (int i = 0; i < order; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            const double dp = order * (t * p0 - p1) / (t * t - 1.0);
            const double t_old = t;
            t = t_old - p0 / dp;
            if (std::abs(t - t_old) < 1e-15) {
                xn[i] = t;
                wn[i] = 2.0 / ((1.0 - t * t) * dp * dp);
                break;
            }
        }
    }
    const double h = box_half_width;
    double tot = 0;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            tot += wn[i] * wn[j] * wigner_value(psi, {h * xn[i], h * xn[j]}, mw);
    return tot * h * h;
}

}  // namespace ces
