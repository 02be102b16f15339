#pragma once

// Collective three-mode squeezing S(eta) = exp[(zeta/2)(R^2 - R+^2)] with
// R = (mu a1 + nu a2 + tau a3)/(sqrt(3) lambda) and eta = e^zeta: factored and
// exponential operator forms, SU(1,1) commutators, the exact action on the
// CES family, ladder/quadrature conjugation rules, and squeezed-vacuum
// variances.  The generator sign is fixed so that S(eta)|b,g,x> =
// eta^{-1/2}|b,g,x/eta>; with this choice both printed squeezed-vacuum
// formulas (for S and S^{-1}) come out consistent.

#include <cmath>
#include <random>

#include "ces/common.hpp"
#include "ces/fock.hpp"
#include "ces/gauss.hpp"
#include "ces/states.hpp"

namespace ces {

struct SqueezeParams {
    double eta;
    ModeWeights weights;

    SqueezeParams(double eta_, ModeWeights w) : eta(eta_), weights(w) {
        if (!(eta > 0)) throw std::invalid_argument("SqueezeParams: eta must be positive");
        const double z = zeta();
        if (std::abs(sech_zeta() - 1.0 / std::cosh(z)) > 1e-14 ||
            std::abs(tanh_zeta() - std::tanh(z)) > 1e-14)
            throw std::invalid_argument("SqueezeParams: hyperbolic identities violated");
    }

    double zeta() const { return std::log(eta); }
    double sech_zeta() const { return 2.0 * eta / (1.0 + eta * eta); }
    double tanh_zeta() const { return (eta * eta - 1.0) / (1.0 + eta * eta); }
};

struct CollectiveMode {
    Vec d;  // unit vector (mu, nu, tau)/(sqrt(3) lambda)

    explicit CollectiveMode(const ModeWeights& mw) : d(mw.direction()) {
        if (std::abs(d.norm() - 1.0) > 1e-12) throw std::invalid_argument("CollectiveMode: not normalized");
    }
};

namespace detail {

// dst += coeff * R * src  with R = sum_i conj(d_i) a_i
inline void add_scaled_R(const FockState& src, const Vec& d, cplx coeff, FockState& dst) {
    for (int m = 0; m < src.n_modes(); ++m)
        if (d(m) != cplx(0, 0)) add_scaled_lower(src, m, coeff * std::conj(d(m)), dst);
}

inline void add_scaled_Rdag(const FockState& src, const Vec& d, cplx coeff, FockState& dst) {
    for (int m = 0; m < src.n_modes(); ++m)
        if (d(m) != cplx(0, 0)) add_scaled_raise(src, m, coeff * d(m), dst);
}

}  // namespace detail

inline FockState apply_R(const FockState& st, const CollectiveMode& cm) {
    FockState out(st.n_modes(), st.cutoff());
    detail::add_scaled_R(st, cm.d, 1.0, out);
    return out;
}

inline FockState apply_Rdag(const FockState& st, const CollectiveMode& cm) {
    FockState out(st.n_modes(), st.cutoff());
    detail::add_scaled_Rdag(st, cm.d, 1.0, out);
    return out;
}

// (zeta/2)(R^2 - R+^2)
inline FockAction squeeze_generator_action(const CollectiveMode& cm, double zeta) {
    const Vec d = cm.d;
    return [d, zeta](const FockState& src, FockState& dst) {
        FockState tmp(src.n_modes(), src.cutoff());
        detail::add_scaled_R(src, d, 1.0, tmp);
        detail::add_scaled_R(tmp, d, 0.5 * zeta, dst);
        std::fill(tmp.amps().begin(), tmp.amps().end(), cplx(0, 0));
        detail::add_scaled_Rdag(src, d, 1.0, tmp);
        detail::add_scaled_Rdag(tmp, d, -0.5 * zeta, dst);
    };
}

enum class SqueezeForm { Exponential, Factored };

// S(eta)|psi> in the Fock backend.  The factored route
//   sech^{1/2} e^{-(t/2)R+^2} e^{ln(sech) R+R} e^{(t/2)R^2}
// is exact on the truncated space for every kept amplitude (lowering
// terminates, R+R preserves total photon number, raising only feeds upward);
// the exponential route is a sub-stepped Taylor action.
inline std::pair<FockState, LeakageReport> apply_squeeze_fock(const FockState& st, const ModeWeights& mw,
                                                              double zeta, SqueezeForm form,
                                                              double tol = default_tolerances().matrix_exp_rel) {
    const CollectiveMode cm(mw);
    if (form == SqueezeForm::Exponential) return evolve_state(squeeze_generator_action(cm, zeta), st, tol);

    const double t = std::tanh(zeta);
    const double sech = 1.0 / std::cosh(zeta);
    const Vec d = cm.d;
    FockAction r2 = [d, t](const FockState& src, FockState& dst) {
        FockState tmp(src.n_modes(), src.cutoff());
        detail::add_scaled_R(src, d, 1.0, tmp);
        detail::add_scaled_R(tmp, d, 0.5 * t, dst);
    };
    FockAction rdr = [d, sech](const FockState& src, FockState& dst) {
        FockState tmp(src.n_modes(), src.cutoff());
        detail::add_scaled_R(src, d, 1.0, tmp);
        detail::add_scaled_Rdag(tmp, d, std::log(sech), dst);
    };
    FockAction rd2 = [d, t](const FockState& src, FockState& dst) {
        FockState tmp(src.n_modes(), src.cutoff());
        detail::add_scaled_Rdag(src, d, 1.0, tmp);
        detail::add_scaled_Rdag(tmp, d, -0.5 * t, dst);
    };
    auto [s1, r1] = evolve_state(r2, st, tol);
    auto [s2, r2rep] = evolve_state(rdr, s1, tol);
    auto [s3, r3] = evolve_state(rd2, s2, tol);
    for (std::size_t f = 0; f < s3.dim(); ++f) s3.amp(f) *= std::sqrt(sech);
    LeakageReport rep;
    rep.boundary_mass = s3.boundary_mass();
    rep.norm_defect = std::max({r1.norm_defect, r2rep.norm_defect, r3.norm_defect});
    return {s3, rep};
}

// EQState backend: exact Bogoliubov update along the collective direction.
inline EQState apply_squeeze(const EQState& st, const SqueezeParams& sp) {
    return squeeze_collective(st, CollectiveMode(sp.weights).d, sp.zeta());
}

// --- SU(1,1) -----------------------------------------------------------------

struct Su11Defects {
    double ladder_defect;  // || [R, R+] - 1 ||    on occupations <= N-1
    double quad_defect;    // || [R^2/2, R+^2/2] - (R+R + 1/2) ||  on occupations <= N-2
};

inline Su11Defects su11_check(const ModeWeights& mw, int cutoff) {
    const CollectiveMode cm(mw);
    const int n = 3;
    FockOperator R(n, cutoff), Rd(n, cutoff);
    for (int m = 0; m < n; ++m) {
        R = R + std::conj(cm.d(m)) * FockOperator::ladder(n, cutoff, m, LadderKind::Lower);
        Rd = Rd + cm.d(m) * FockOperator::ladder(n, cutoff, m, LadderKind::Raise);
    }
    const Mat one = Mat::Identity(R.dim(), R.dim());
    const Mat c1 = (R * Rd - Rd * R).matrix() - one;
    const Mat c2 = 0.25 * (R * R * Rd * Rd - Rd * Rd * R * R).matrix() - (Rd * R).matrix() - 0.5 * one;

    auto restricted_norm = [&](const Mat& m2, int max_occ) {
        std::vector<int> keep;
        FockState probe(n, cutoff);
        for (std::size_t f = 0; f < probe.dim(); ++f) {
            const auto occ = probe.occupation(f);
            bool ok = true;
            for (int o : occ)
                if (o > max_occ) { ok = false; break; }
            if (ok) keep.push_back(static_cast<int>(f));
        }
        Mat sub(keep.size(), keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i)
            for (std::size_t j = 0; j < keep.size(); ++j) sub(i, j) = m2(keep[i], keep[j]);
        Eigen::JacobiSVD<Mat> svd(sub);
        return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    };
    return {restricted_norm(c1, cutoff - 1), restricted_norm(c2, cutoff - 2)};
}

// --- action on the CES family ---------------------------------------------------

struct SqueezeCesCheck {
    double w_deviation;
    double f_deviation;
    double prefactor_deviation;  // |l_out - (l_target - zeta/2)|
};

// S(eta)|beta, gamma, x> == eta^{-1/2} |beta, gamma, x/eta>, exact parameter
// algebra at s = 1 (the ideal family is closed under the squeeze).
inline SqueezeCesCheck squeeze_ces(const CESParams& p, double eta) {
    if (p.s != 1.0) throw std::invalid_argument("squeeze_ces: the closed-family identity needs s = 1");
    const SqueezeParams sp(eta, p.weights);
    const EQState out = apply_squeeze(tripartite_ces(p), sp);
    const EQState target = tripartite_ces(CESParams(p.weights, p.beta, p.gamma, p.x / eta, 1.0));
    return {(out.w() - target.w()).cwiseAbs().maxCoeff(), (out.F() - target.F()).cwiseAbs().maxCoeff(),
            std::abs(out.log_prefactor() - (target.log_prefactor() - 0.5 * sp.zeta()))};
}

// --- conjugation rules -----------------------------------------------------------

// S a_i S^{-1} = a_i + d_i [ R (cosh zeta - 1) + R+ sinh zeta ].
inline FirstOrderOperator conjugated_ladder(int mode, const SqueezeParams& sp) {
    const CollectiveMode cm(sp.weights);
    const double z = sp.zeta();
    Vec u = Vec::Zero(3), ut = Vec::Zero(3);
    u(mode) = 1.0;
    u += cm.d(mode) * (std::cosh(z) - 1.0) * cm.d.conjugate();
    ut = cm.d(mode) * std::sinh(z) * cm.d;
    return FirstOrderOperator(u, ut);
}

// S X_i S^{-1} = X_i + mu_i A (e^zeta - 1),  A = sum_j mu_j X_j / (3 lambda^2).
inline FirstOrderOperator conjugated_quadrature(int mode, const SqueezeParams& sp, QuadratureKind kind) {
    const FirstOrderOperator sa = conjugated_ladder(mode, sp);
    const FirstOrderOperator sad = sa.adjoint();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (kind == QuadratureKind::X)
        return FirstOrderOperator(inv_sqrt2 * (sa.u + sad.u), inv_sqrt2 * (sa.ut + sad.ut),
                                  inv_sqrt2 * (sa.c + sad.c));
    const cplx mi(0, -1);
    return FirstOrderOperator(mi * inv_sqrt2 * (sa.u - sad.u), mi * inv_sqrt2 * (sa.ut - sad.ut),
                              mi * inv_sqrt2 * (sa.c - sad.c));
}

// Fock oracle for the conjugation rule: compare S a_i S^{-1} |psi> computed by
// matrix-exponential evolution against the closed first-order form, on random
// interior states.
// Probe states live on low occupations (<= probe_occ per mode) so the
// round-trip S a_i S^{-1} stays far from the truncation boundary; the
// remaining deviation on the probe block is pure formula content.
inline double verify_conjugated_ladder(const SqueezeParams& sp, int mode, int cutoff, int n_trials,
                                       std::uint64_t seed, int probe_occ = 2,
                                       const Tolerances& tol = default_tolerances()) {
    const CollectiveMode cm(sp.weights);
    const double z = sp.zeta();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    double worst = 0;
    if (probe_occ >= cutoff) throw std::invalid_argument("verify_conjugated_ladder: probe_occ too large");
    for (int trial = 0; trial < n_trials; ++trial) {
        FockState psi(3, cutoff);
        for (std::size_t f = 0; f < psi.dim(); ++f) {
            const auto occ = psi.occupation(f);
            if (occ[0] <= probe_occ && occ[1] <= probe_occ && occ[2] <= probe_occ)
                psi.amp(f) = cplx(gauss(rng), gauss(rng));
        }
        const double nrm = std::sqrt(psi.norm2());
        for (std::size_t f = 0; f < psi.dim(); ++f) psi.amp(f) /= nrm;

        auto [s_inv, r1] = evolve_state(squeeze_generator_action(cm, -z), psi, tol.matrix_exp_rel);
        const FockState mid = apply_lower(s_inv, mode);
        auto [lhs, r2] = evolve_state(squeeze_generator_action(cm, z), mid, tol.matrix_exp_rel);

        FockState rhs(3, cutoff);
        conjugated_ladder(mode, sp).fock_action(3)(psi, rhs);

        double dev = 0;
        for (std::size_t f = 0; f < psi.dim(); ++f) {
            const auto occ = psi.occupation(f);
            if (occ[0] <= probe_occ && occ[1] <= probe_occ && occ[2] <= probe_occ)
                dev = std::max(dev, std::abs(lhs.amp(f) - rhs.amp(f)));
        }
        worst = std::max(worst, dev);
    }
    return worst;
}

// --- squeezed-vacuum variances ---------------------------------------------------

struct VarianceReport {
    double mean_x, mean_p;          // <X1+X2+X3>, <P1+P2+P3> on S^{-1}|000>
    double var_x, var_p;            // measured in the Fock backend
    double var_x_closed, var_p_closed;
    double product, product_closed;
    double leakage;
};

inline double squeezed_variance_closed(const ModeWeights& mw, double zeta, QuadratureKind kind) {
    const double L = mw.lambda();
    const double S = mw.mu + mw.nu + mw.tau;
    const double e2 = kind == QuadratureKind::X ? std::exp(2.0 * zeta) : std::exp(-2.0 * zeta);
    return 0.5 * (S * S / (3.0 * L * L) * (e2 - 1.0) + 3.0);
}

// Variances of the summed quadratures on S(eta)^{-1}|000>, Fock backend
// against the closed forms.
inline VarianceReport squeezed_vacuum_variances(const ModeWeights& mw, double zeta, int cutoff = 24,
                                                double tol = default_tolerances().matrix_exp_rel) {
    const CollectiveMode cm(mw);
    auto [sv, rep] = evolve_state(squeeze_generator_action(cm, -zeta), FockState::vacuum(3, cutoff), tol);
    const double n2 = sv.norm2();

    auto quad_sum = [&](QuadratureKind kind) {
        FockState out(3, cutoff);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int m = 0; m < 3; ++m) {
            if (kind == QuadratureKind::X) {
                detail::add_scaled_lower(sv, m, inv_sqrt2, out);
                detail::add_scaled_raise(sv, m, inv_sqrt2, out);
            } else {
                detail::add_scaled_lower(sv, m, cplx(0, -inv_sqrt2), out);
                detail::add_scaled_raise(sv, m, cplx(0, inv_sqrt2), out);
            }
        }
        return out;
    };
    const FockState xs = quad_sum(QuadratureKind::X);
    const FockState ps = quad_sum(QuadratureKind::P);

    VarianceReport out;
    out.mean_x = (inner(sv, xs) / n2).real();
    out.mean_p = (inner(sv, ps) / n2).real();
    out.var_x = inner(xs, xs).real() / n2 - sq(out.mean_x);
    out.var_p = inner(ps, ps).real() / n2 - sq(out.mean_p);
    out.var_x_closed = squeezed_variance_closed(mw, zeta, QuadratureKind::X);
    out.var_p_closed = squeezed_variance_closed(mw, zeta, QuadratureKind::P);
    out.product = out.var_x * out.var_p;
    out.product_closed = out.var_x_closed * out.var_p_closed;
    out.leakage = sv.boundary_mass();
    return out;
}

struct InequalityReport {
    double var_x, var_p;
    double bound_x, bound_p;  // (3/2) e^{+-2 zeta}
    bool x_within;            // VarX <= bound_x
    bool p_above;             // VarP >= bound_p
    bool equality_expected;   // mu = nu = tau
    bool equality_observed;
};

// VarX <= (3/2)e^{2 zeta} and VarP >= (3/2)e^{-2 zeta}, equality iff the
// weights are all equal (Cauchy-Schwarz on (mu+nu+tau)^2 <= 9 lambda^2).
inline InequalityReport squeezing_inequalities(const ModeWeights& mw, double zeta, double eq_tol = 1e-10) {
    if (zeta < 0) throw std::invalid_argument("squeezing_inequalities: needs zeta >= 0");
    InequalityReport out;
    out.var_x = squeezed_variance_closed(mw, zeta, QuadratureKind::X);
    out.var_p = squeezed_variance_closed(mw, zeta, QuadratureKind::P);
    out.bound_x = 1.5 * std::exp(2.0 * zeta);
    out.bound_p = 1.5 * std::exp(-2.0 * zeta);
    out.x_within = out.var_x <= out.bound_x + eq_tol;
    out.p_above = out.var_p >= out.bound_p - eq_tol;
    out.equality_expected = std::abs(mw.mu - mw.nu) < 1e-14 && std::abs(mw.nu - mw.tau) < 1e-14;
    out.equality_observed =
        std::abs(out.var_x - out.bound_x) < eq_tol && std::abs(out.var_p - out.bound_p) < eq_tol;
    return out;
}

// Max matrix-element difference between the factored and exponential forms on
// the photons <= max_photons in/out block at the given cutoff.  The factored
// route is amplitude-exact there; the Taylor route evolves with the standard
// per-mode headroom so its boundary backflow stays below the comparison.
inline double factored_vs_exponential(const ModeWeights& mw, double zeta, int cutoff, int max_photons,
                                      double tol = default_tolerances().matrix_exp_rel,
                                      int headroom = default_tolerances().headroom) {
    const CollectiveMode cm(mw);
    std::vector<std::size_t> block;
    FockState probe(3, cutoff);
    for (std::size_t f = 0; f < probe.dim(); ++f) {
        const auto occ = probe.occupation(f);
        if (occ[0] + occ[1] + occ[2] <= max_photons) block.push_back(f);
    }
    double worst = 0;
    for (const std::size_t col : block) {
        FockState basis(3, cutoff);
        basis.amp(col) = 1.0;
        auto [ve, re] = evolve_state_padded(
            [&](int) { return squeeze_generator_action(cm, zeta); }, basis, headroom, tol);
        auto [vf, rf] = apply_squeeze_fock(basis, mw, zeta, SqueezeForm::Factored, tol);
        for (const std::size_t row : block) worst = std::max(worst, std::abs(ve.amp(row) - vf.amp(row)));
    }
    return worst;
}

}  // namespace ces
