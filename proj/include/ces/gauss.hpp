#pragma once

// Exact algebra of exponential-quadratic states
//
//     |psi> = e^l exp( w.a+ + 1/2 a+^T F a+ ) |0...0>
//
// with closed-form overlaps, Gaussian unitaries (displacements, passive
// transforms, collective squeezing), first-order operator action, the
// complex Gaussian integral, and exact projection to truncated Fock space.

#include <cmath>
#include <vector>

#include "ces/common.hpp"
#include "ces/fock.hpp"

namespace ces {

class EQState {
  public:
    EQState(cplx log_prefactor, Vec w, Mat F,
            double symmetry_tol = default_tolerances().symmetry_check)
        : l_(log_prefactor), w_(std::move(w)), F_(std::move(F)) {
        if (F_.rows() != w_.size() || F_.cols() != w_.size())
            throw std::invalid_argument("EQState: F must be n x n");
        const double asym = (F_ - F_.transpose()).cwiseAbs().maxCoeff();
        if (asym > symmetry_tol) throw std::invalid_argument("EQState: F must be symmetric");
        F_ = ((F_ + F_.transpose()) / 2.0).eval();
    }

    static EQState vacuum(int n_modes) {
        return EQState(0.0, Vec::Zero(n_modes), Mat::Zero(n_modes, n_modes));
    }

    int n_modes() const { return static_cast<int>(w_.size()); }
    cplx log_prefactor() const { return l_; }
    const Vec& w() const { return w_; }
    const Mat& F() const { return F_; }

    double f_spectral_norm() const {
        if (w_.size() == 0) return 0;
        Eigen::JacobiSVD<Mat> svd(F_);
        return svd.singularValues()(0);
    }

    bool normalizable() const { return f_spectral_norm() < 1.0; }

  private:
    cplx l_;
    Vec w_;
    Mat F_;
};

// c*1 + sum_i ( u_i a_i + ut_i a_i^dagger )
struct FirstOrderOperator {
    Vec u;   // annihilation coefficients
    Vec ut;  // creation coefficients
    cplx c = 0.0;

    FirstOrderOperator(Vec u_, Vec ut_, cplx c_ = 0.0) : u(std::move(u_)), ut(std::move(ut_)), c(c_) {
        if (u.size() != ut.size()) throw std::invalid_argument("FirstOrderOperator: length mismatch");
    }

    FirstOrderOperator adjoint() const { return FirstOrderOperator(ut.conjugate(), u.conjugate(), std::conj(c)); }

    // [this, other] is a c-number for first-order operators.
    cplx commutator_scalar(const FirstOrderOperator& other) const {
        return (u.transpose() * other.ut).value() - (other.u.transpose() * ut).value();
    }

    FockAction fock_action(int n_modes) const {
        if (n_modes != u.size()) throw std::invalid_argument("fock_action: mode count mismatch");
        Vec uu = u, tt = ut;
        cplx cc = c;
        return [uu, tt, cc](const FockState& src, FockState& dst) {
            for (int m = 0; m < src.n_modes(); ++m) {
                if (uu(m) != cplx(0, 0)) detail::add_scaled_lower(src, m, uu(m), dst);
                if (tt(m) != cplx(0, 0)) detail::add_scaled_raise(src, m, tt(m), dst);
            }
            if (cc != cplx(0, 0))
                for (std::size_t f = 0; f < src.dim(); ++f) dst.amp(f) += cc * src.amp(f);
        };
    }
};

struct FirstOrderAction {
    cplx sigma;  // scalar part
    Vec v;       // creation-coefficient part
};

// Op|psi> = (sigma + v.a+)|psi> with sigma = c + u.w and v = F u + ut.
// Exact; no truncation involved.
inline FirstOrderAction apply_first_order(const FirstOrderOperator& op, const EQState& st) {
    if (op.u.size() != st.w().size()) throw std::invalid_argument("apply_first_order: mode count mismatch");
    FirstOrderAction out{op.c + (op.u.transpose() * st.w()).value(), st.F() * op.u + op.ut};
    return out;
}

// --- complex Gaussian integral ----------------------------------------------

// integrand exp( zeta|z|^2 + xi z + eta z* + f z^2 + g z*^2 ), measure d^2z/pi
struct GaussianIntegralSpec {
    cplx zeta, xi, eta, f, g;
};

// True convergence of the 2-D real Gaussian: the real quadratic form in
// (Re z, Im z) must be negative definite.
inline bool gaussian_integral_convergent(const GaussianIntegralSpec& s) {
    const double a = (s.zeta + s.f + s.g).real();
    const double b = (s.zeta - s.f - s.g).real();
    const double c = -(s.f - s.g).imag();
    return a < 0 && a * b - c * c > 0;
}

// The two alternative condition sets quoted with the formula (reading the
// first symbol of each as zeta; as printed they reject even the unit
// Gaussian).  Slightly looser than true negative definiteness.
inline bool gaussian_integral_paper_conditions(const GaussianIntegralSpec& s) {
    const cplx disc = s.zeta * s.zeta - 4.0 * s.f * s.g;
    const cplx p = s.zeta + s.f + s.g;
    const cplx m = s.zeta - s.f - s.g;
    const bool set1 = p.real() < 0 && (disc / p).real() < 0;
    const bool set2 = m.real() < 0 && (disc / m).real() < 0;
    return set1 || set2;
}

// (zeta^2-4fg)^{-1/2} exp[ (-zeta xi eta + xi^2 g + eta^2 f) / (zeta^2-4fg) ]
// Principal square root; validated regime keeps zeta^2-4fg in the right
// half-plane, outside it the call refuses rather than pick a branch.
inline cplx gaussian_integral(const GaussianIntegralSpec& s) {
    if (!gaussian_integral_convergent(s))
        throw DivergentIntegralError("gaussian_integral: integrand not convergent");
    const cplx disc = s.zeta * s.zeta - 4.0 * s.f * s.g;
    if (disc.real() <= 0)
        throw BranchError("gaussian_integral: zeta^2-4fg left the principal branch regime");
    return std::exp((-s.zeta * s.xi * s.eta + s.xi * s.xi * s.g + s.eta * s.eta * s.f) / disc) / std::sqrt(disc);
}

// --- overlaps ----------------------------------------------------------------

// log <bra|ket> assembled directly in log space:
//   conj(l_b) + l_k - 1/2 Log det(M) + 1/2 w_k.(M^-1 Fb*)w_k
//   + 1/2 wb*.(F_k M^-1)wb* + w_k.M^-1 wb*        with  M = I - Fb* F_k.
inline cplx log_overlap(const EQState& bra, const EQState& ket) {
    if (bra.n_modes() != ket.n_modes()) throw std::invalid_argument("overlap: mode count mismatch");
    if (bra.f_spectral_norm() * ket.f_spectral_norm() >= 1.0)
        throw DivergentIntegralError("overlap: ||F_bra|| * ||F_ket|| >= 1, vacuum matrix element diverges");
    const int n = ket.n_modes();
    const Mat G = bra.F().conjugate();
    const Mat& F = ket.F();
    const Mat M = Mat::Identity(n, n) - G * F;
    Eigen::PartialPivLU<Mat> lu(M);
    const cplx det = lu.determinant();
    if (det.real() <= 0)
        throw BranchError("overlap: det(I - Fb* Fk) left the principal branch regime");
    const Mat Minv = lu.inverse();
    const Vec u = ket.w();
    const Vec v = bra.w().conjugate();
    const cplx quad = 0.5 * (u.transpose() * (Minv * G) * u).value() +
                      0.5 * (v.transpose() * (F * Minv) * v).value() +
                      (u.transpose() * Minv * v).value();
    return std::conj(bra.log_prefactor()) + ket.log_prefactor() + quad - 0.5 * std::log(det);
}

inline cplx overlap(const EQState& bra, const EQState& ket) { return std::exp(log_overlap(bra, ket)); }

inline double log_norm2(const EQState& st) { return log_overlap(st, st).real(); }
inline double norm2(const EQState& st) { return std::exp(log_norm2(st)); }

// --- Gaussian unitaries -------------------------------------------------------

// D(eps) = exp(eps.a+ - eps*.a)
inline EQState displace(const EQState& st, const Vec& eps) {
    if (eps.size() != st.w().size()) throw std::invalid_argument("displace: mode count mismatch");
    const Vec ec = eps.conjugate();
    const cplx l = st.log_prefactor() - 0.5 * eps.squaredNorm() - (st.w().transpose() * ec).value() +
                   0.5 * (ec.transpose() * st.F() * ec).value();
    const Vec w = st.w() + eps - st.F() * ec;
    return EQState(l, w, st.F());
}

// exp(v.a)|psi>: pure annihilation shift, closed form.
inline EQState shift_annihilation(const EQState& st, const Vec& v) {
    const cplx l = st.log_prefactor() + (st.w().transpose() * v).value() + 0.5 * (v.transpose() * st.F() * v).value();
    return EQState(l, st.w() + st.F() * v, st.F());
}

// Passive (photon-number conserving) unitary U_T with w -> T w and
// F -> T F T^T, so that applying T1 then T2 composes as T2 T1.  The matrix T
// is how creation-coefficient vectors transform; the beam splitter
// B_ij(theta) = exp[-theta(a_i+ a_j - a_i a_j+)] has the 2x2 block
// [[cos, -sin],[sin, cos]] on (i, j), which reproduces the two-splitter
// cascade identity exactly (validated against the Fock exponential oracle).
inline EQState passive_transform(const EQState& st, const Mat& T,
                                 double tol = default_tolerances().unitary_check) {
    const int n = st.n_modes();
    if (T.rows() != n || T.cols() != n) throw std::invalid_argument("passive_transform: T must be n x n");
    const double dev = (T.adjoint() * T - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    if (dev > tol) throw std::invalid_argument("passive_transform: T is not unitary to tolerance");
    return EQState(st.log_prefactor(), T * st.w(), T * st.F() * T.transpose());
}

namespace detail {

// exp((g/2) a_mode^2): annihilation-quadratic update, exact.
//   D = 1 - g F_mm,  l += -Log(D)/2 + g w_m^2/(2D)
//   w_m -> w_m/D,  w_j += (g w_m/D) F_mj,
//   F_mm -> F_mm/D,  F_mj -> F_mj/D,  F_jk += (g/D) F_mj F_mk.
inline EQState apply_annihilation_quadratic(const EQState& st, cplx g, int mode,
                                            double guard = default_tolerances().squeeze_guard) {
    const int n = st.n_modes();
    const cplx D = 1.0 - g * st.F()(mode, mode);
    if (std::abs(D) < guard)
        throw ConvergenceError("annihilation-quadratic update ill-conditioned (1 - g F_mm ~ 0)");
    Vec w = st.w();
    Mat F = st.F();
    const cplx wm = w(mode);
    const cplx l = st.log_prefactor() - 0.5 * std::log(D) + g * wm * wm / (2.0 * D);
    w(mode) = wm / D;
    for (int j = 0; j < n; ++j) {
        if (j == mode) continue;
        w(j) += (g * wm / D) * st.F()(mode, j);
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == mode && k == mode) F(j, k) = st.F()(mode, mode) / D;
            else if (j == mode) F(j, k) = st.F()(mode, k) / D;
            else if (k == mode) F(j, k) = st.F()(j, mode) / D;
            else F(j, k) = st.F()(j, k) + (g / D) * st.F()(mode, j) * st.F()(mode, k);
        }
    return EQState(l, w, F);
}

// exp(kappa n_mode) acting as a+_mode -> e^kappa a+_mode (vacuum fixed).
inline EQState apply_number_scale(const EQState& st, cplx scale, int mode) {
    Vec w = st.w();
    Mat F = st.F();
    w(mode) *= scale;
    F.row(mode) *= scale;
    F.col(mode) *= scale;
    return EQState(st.log_prefactor(), w, F);
}

// exp((t/2) a_mode+^2): just adds to the quadratic exponent.
inline EQState apply_creation_quadratic(const EQState& st, cplx t, int mode) {
    Mat F = st.F();
    F(mode, mode) += t;
    return EQState(st.log_prefactor(), st.w(), F);
}

// Single-mode squeeze exp[(z/2)(a^2 - a+^2)] on `mode` via the normal-ordered
// factorization sech^{1/2} e^{-(tanh/2)a+^2} e^{ln(sech) n} e^{(tanh/2)a^2}.
inline EQState squeeze_mode(const EQState& st, double zeta, int mode) {
    const double t = std::tanh(zeta);
    const double sech = 1.0 / std::cosh(zeta);
    EQState out = apply_annihilation_quadratic(st, t, mode);
    out = apply_number_scale(out, sech, mode);
    out = apply_creation_quadratic(out, -t, mode);
    return EQState(out.log_prefactor() + 0.5 * std::log(sech), out.w(), out.F());
}

// Unitary Q with Q d = e_1 (rows built by Gram-Schmidt completion of d).
inline Mat collective_rotation(const Vec& d) {
    const int n = static_cast<int>(d.size());
    Mat U(n, n);  // first column d, completed to a unitary; Q = U^dagger
    U.col(0) = d;
    int filled = 1;
    for (int c = 0; c < n && filled < n; ++c) {
        Vec v = Vec::Zero(n);
        v(c) = 1.0;
        for (int k = 0; k < filled; ++k) v -= U.col(k) * (U.col(k).adjoint() * v).value();
        const double nn = v.norm();
        if (nn > 1e-8) U.col(filled++) = v / nn;
    }
    if (filled < n) throw std::invalid_argument("collective_rotation: degenerate direction");
    return U.adjoint();
}

}  // namespace detail

// exp[(zeta/2)(R^2 - R+^2)] with R = sum_i conj(d_i) a_i, ||d|| = 1: rotate the
// collective mode onto mode 1, apply the exact single-mode Bogoliubov update,
// rotate back.  Guards against leaving the (delta-)normalizable family.
inline EQState squeeze_collective(const EQState& st, const Vec& d, double zeta,
                                  const Tolerances& tol = default_tolerances()) {
    if (d.size() != st.w().size()) throw std::invalid_argument("squeeze_collective: mode count mismatch");
    if (std::abs(d.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("squeeze_collective: direction must be normalized");
    const Mat Q = detail::collective_rotation(d);
    EQState rot = passive_transform(st, Q, tol.unitary_check);
    EQState sq = detail::squeeze_mode(rot, zeta, 0);
    EQState out = passive_transform(sq, Q.adjoint(), tol.unitary_check);
    if (out.f_spectral_norm() > tol.f_norm_guard)
        throw ConvergenceError("squeeze_collective: ||F|| guard exceeded");
    return out;
}

// --- projection to Fock space --------------------------------------------------

namespace detail {

// dst[f + shift] += coeff * src[f] over all tuples where every mode stays
// within the cutoff after adding `powers`.
inline void shifted_accumulate(const std::vector<cplx>& src, std::vector<cplx>& dst, cplx coeff,
                               const std::vector<int>& powers, int n, int cutoff, int depth,
                               std::size_t base_src, std::size_t base_dst, bool& touched) {
    const std::size_t width = static_cast<std::size_t>(cutoff + 1);
    if (depth == n - 1) {
        const int lim = cutoff - powers[depth];
        const std::size_t dst0 = base_dst + powers[depth];
        for (int o = 0; o <= lim; ++o) {
            const cplx v = src[base_src + o];
            if (v != cplx(0, 0)) {
                dst[dst0 + o] += coeff * v;
                touched = true;
            }
        }
        return;
    }
    std::size_t str = 1;
    for (int m = depth + 1; m < n; ++m) str *= width;
    const int lim = cutoff - powers[depth];
    for (int o = 0; o <= lim; ++o)
        shifted_accumulate(src, dst, coeff, powers, n, cutoff, depth + 1, base_src + o * str,
                           base_dst + (o + powers[depth]) * str, touched);
}

}  // namespace detail

// Exact coefficients of every kept occupation tuple: the exponent only raises
// photon number, so the truncated polynomial exponential terminates per sector.
inline FockState fock_project(const EQState& st, int cutoff) {
    const int n = st.n_modes();
    FockState out(n, cutoff);
    const std::size_t dim = out.dim();

    struct Monomial {
        std::vector<int> powers;
        cplx coeff;
    };
    std::vector<Monomial> monos;
    for (int i = 0; i < n; ++i) {
        if (st.w()(i) != cplx(0, 0)) {
            Monomial mo{std::vector<int>(n, 0), st.w()(i)};
            mo.powers[i] = 1;
            monos.push_back(mo);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const cplx c = (i == j) ? 0.5 * st.F()(i, i) : st.F()(i, j);
            if (c == cplx(0, 0)) continue;
            Monomial mo{std::vector<int>(n, 0), c};
            mo.powers[i] += 1;
            mo.powers[j] += 1;
            if (mo.powers[i] > cutoff || mo.powers[j] > cutoff) continue;
            monos.push_back(mo);
        }

    std::vector<cplx> res(dim, cplx(0, 0)), term(dim, cplx(0, 0)), next(dim);
    res[0] = 1.0;
    term[0] = 1.0;
    for (int k = 1; k <= n * cutoff; ++k) {
        std::fill(next.begin(), next.end(), cplx(0, 0));
        bool any = false;
        for (const Monomial& mo : monos)
            detail::shifted_accumulate(term, next, mo.coeff, mo.powers, n, cutoff, 0, 0, 0, any);
        if (!any) break;
        const double inv_k = 1.0 / k;
        for (std::size_t f = 0; f < dim; ++f) {
            term[f] = next[f] * inv_k;
            res[f] += term[f];
        }
    }

    std::vector<double> sqrt_fact(cutoff + 1);
    sqrt_fact[0] = 1.0;
    for (int k = 1; k <= cutoff; ++k) sqrt_fact[k] = sqrt_fact[k - 1] * std::sqrt(static_cast<double>(k));
    const cplx pref = std::exp(st.log_prefactor());
    for (std::size_t f = 0; f < dim; ++f) {
        double fac = 1.0;
        std::size_t rest = f;
        for (int m = n - 1; m >= 0; --m) {
            fac *= sqrt_fact[rest % (cutoff + 1)];
            rest /= (cutoff + 1);
        }
        out.amp(f) = pref * res[f] * fac;
    }
    return out;
}

}  // namespace ces
