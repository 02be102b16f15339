#pragma once

// Truncated multimode Fock-space numerics: states, ladder/quadrature
// operators, inner products, expectations, and operator/state exponentials
// with truncation-leakage accounting.
//
// Per-mode cutoff convention: each mode holds occupations 0..N.  Ladder
// matrix elements are exact below the cutoff boundary; everything that
// touches occupation N is accounted for by LeakageReport.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "ces/common.hpp"

namespace ces {

struct LeakageReport {
    double boundary_mass = 0.0;  // probability weight with any mode at the cutoff
    double norm_defect = 0.0;    // relative norm change of the evolution
};

class FockState {
  public:
    FockState(int n_modes, int cutoff)
        : n_modes_(n_modes), cutoff_(cutoff), amps_(dimension(n_modes, cutoff), cplx(0, 0)) {
        if (n_modes < 1 || cutoff < 1) throw std::invalid_argument("FockState: need n_modes >= 1, cutoff >= 1");
    }

    static std::size_t dimension(int n_modes, int cutoff) {
        std::size_t d = 1;
        for (int i = 0; i < n_modes; ++i) d *= static_cast<std::size_t>(cutoff + 1);
        return d;
    }

    static FockState vacuum(int n_modes, int cutoff) {
        FockState st(n_modes, cutoff);
        st.amps_[0] = 1.0;
        return st;
    }

    static FockState basis(int n_modes, int cutoff, const std::vector<int>& occ) {
        FockState st(n_modes, cutoff);
        st.amps_[st.flat_index(occ)] = 1.0;
        return st;
    }

    int n_modes() const { return n_modes_; }
    int cutoff() const { return cutoff_; }
    std::size_t dim() const { return amps_.size(); }

    const std::vector<cplx>& amps() const { return amps_; }
    std::vector<cplx>& amps() { return amps_; }

    cplx amp(std::size_t flat) const { return amps_[flat]; }
    cplx& amp(std::size_t flat) { return amps_[flat]; }

    // Mode 0 is the most significant digit.
    std::size_t flat_index(const std::vector<int>& occ) const {
        if (static_cast<int>(occ.size()) != n_modes_) throw std::invalid_argument("flat_index: wrong tuple length");
        std::size_t f = 0;
        for (int m = 0; m < n_modes_; ++m) {
            if (occ[m] < 0 || occ[m] > cutoff_) throw std::invalid_argument("flat_index: occupation out of range");
            f = f * (cutoff_ + 1) + occ[m];
        }
        return f;
    }

    std::vector<int> occupation(std::size_t flat) const {
        std::vector<int> occ(n_modes_);
        for (int m = n_modes_ - 1; m >= 0; --m) {
            occ[m] = static_cast<int>(flat % (cutoff_ + 1));
            flat /= (cutoff_ + 1);
        }
        return occ;
    }

    std::size_t stride(int mode) const {
        std::size_t s = 1;
        for (int m = n_modes_ - 1; m > mode; --m) s *= (cutoff_ + 1);
        return s;
    }

    double norm2() const {
        double n = 0;
        for (const cplx& a : amps_) n += std::norm(a);
        return n;
    }

    double boundary_mass() const {
        double mass = 0;
        for (std::size_t f = 0; f < amps_.size(); ++f) {
            if (amps_[f] == cplx(0, 0)) continue;
            std::size_t rest = f;
            bool at_boundary = false;
            for (int m = n_modes_ - 1; m >= 0; --m) {
                if (static_cast<int>(rest % (cutoff_ + 1)) == cutoff_) { at_boundary = true; break; }
                rest /= (cutoff_ + 1);
            }
            if (at_boundary) mass += std::norm(amps_[f]);
        }
        return mass;
    }

    // Copy into a space with a different per-mode cutoff (pad or truncate).
    FockState with_cutoff(int new_cutoff) const {
        FockState out(n_modes_, new_cutoff);
        const int keep = std::min(cutoff_, new_cutoff);
        std::vector<int> occ(n_modes_, 0);
        for (;;) {
            out.amps_[out.flat_index(occ)] = amps_[flat_index(occ)];
            int m = n_modes_ - 1;
            while (m >= 0 && occ[m] == keep) { occ[m] = 0; --m; }
            if (m < 0) break;
            ++occ[m];
        }
        return out;
    }

    // Total-photon filter: zero out amplitudes with more than `max_total` photons.
    FockState restrict_total_photons(int max_total) const {
        FockState out(*this);
        for (std::size_t f = 0; f < amps_.size(); ++f) {
            std::size_t rest = f;
            int tot = 0;
            for (int m = 0; m < n_modes_; ++m) {
                tot += static_cast<int>(rest % (cutoff_ + 1));
                rest /= (cutoff_ + 1);
            }
            if (tot > max_total) out.amps_[f] = 0;
        }
        return out;
    }

  private:
    int n_modes_;
    int cutoff_;
    std::vector<cplx> amps_;
};

inline cplx inner(const FockState& lhs, const FockState& rhs) {
    if (lhs.n_modes() != rhs.n_modes() || lhs.cutoff() != rhs.cutoff())
        throw std::invalid_argument("inner: shape mismatch");
    cplx acc(0, 0);
    for (std::size_t f = 0; f < lhs.dim(); ++f) acc += std::conj(lhs.amp(f)) * rhs.amp(f);
    return acc;
}

namespace detail {

// dst += coeff * a_mode * src   (amplitude-level, exact below the boundary)
inline void add_scaled_lower(const FockState& src, int mode, cplx coeff, FockState& dst) {
    const int N = src.cutoff();
    const std::size_t s = src.stride(mode);
    const std::size_t dim = src.dim();
    const std::size_t block = s * (N + 1);
    for (std::size_t base = 0; base < dim; base += block) {
        for (int n = 1; n <= N; ++n) {
            const double r = std::sqrt(static_cast<double>(n));
            const std::size_t off = base + s * n;
            for (std::size_t k = 0; k < s; ++k)
                dst.amp(off - s + k) += coeff * r * src.amp(off + k);
        }
    }
}

// dst += coeff * a_mode^dagger * src
inline void add_scaled_raise(const FockState& src, int mode, cplx coeff, FockState& dst) {
    const int N = src.cutoff();
    const std::size_t s = src.stride(mode);
    const std::size_t dim = src.dim();
    const std::size_t block = s * (N + 1);
    for (std::size_t base = 0; base < dim; base += block) {
        for (int n = 0; n < N; ++n) {
            const double r = std::sqrt(static_cast<double>(n + 1));
            const std::size_t off = base + s * n;
            for (std::size_t k = 0; k < s; ++k)
                dst.amp(off + s + k) += coeff * r * src.amp(off + k);
        }
    }
}

}  // namespace detail

inline FockState apply_lower(const FockState& st, int mode) {
    if (mode < 0 || mode >= st.n_modes()) throw std::invalid_argument("apply_lower: invalid mode");
    FockState out(st.n_modes(), st.cutoff());
    detail::add_scaled_lower(st, mode, 1.0, out);
    return out;
}

inline FockState apply_raise(const FockState& st, int mode) {
    if (mode < 0 || mode >= st.n_modes()) throw std::invalid_argument("apply_raise: invalid mode");
    FockState out(st.n_modes(), st.cutoff());
    detail::add_scaled_raise(st, mode, 1.0, out);
    return out;
}

// A generator acting on states: dst = G * src.  Used to exponentiate on
// spaces too large for dense matrices.
using FockAction = std::function<void(const FockState&, FockState&)>;

enum class LadderKind { Lower, Raise };
enum class QuadratureKind { X, P };

// Dense operator on the truncated space.  Dense storage caps the dimension;
// 3 modes at N = 12 (2197-dim) is the documented desk scale, anything past
// 4096 must use FockAction instead.
class FockOperator {
  public:
    static constexpr std::size_t kMaxDenseDim = 4096;

    FockOperator(int n_modes, int cutoff)
        : n_modes_(n_modes), cutoff_(cutoff) {
        const std::size_t d = FockState::dimension(n_modes, cutoff);
        if (d > kMaxDenseDim)
            throw std::invalid_argument("FockOperator: dense dimension cap exceeded (use FockAction)");
        mat_ = Mat::Zero(d, d);
    }

    int n_modes() const { return n_modes_; }
    int cutoff() const { return cutoff_; }
    std::size_t dim() const { return mat_.rows(); }
    const Mat& matrix() const { return mat_; }
    Mat& matrix() { return mat_; }

    static FockOperator identity(int n_modes, int cutoff) {
        FockOperator op(n_modes, cutoff);
        op.mat_.setIdentity();
        return op;
    }

    static FockOperator ladder(int n_modes, int cutoff, int mode, LadderKind kind) {
        if (mode < 0 || mode >= n_modes) throw std::invalid_argument("ladder: invalid mode index");
        FockOperator op(n_modes, cutoff);
        FockState probe(n_modes, cutoff);
        for (std::size_t col = 0; col < op.dim(); ++col) {
            FockState src(n_modes, cutoff);
            src.amp(col) = 1.0;
            FockState dst(n_modes, cutoff);
            if (kind == LadderKind::Lower) detail::add_scaled_lower(src, mode, 1.0, dst);
            else detail::add_scaled_raise(src, mode, 1.0, dst);
            for (std::size_t row = 0; row < op.dim(); ++row)
                if (dst.amp(row) != cplx(0, 0)) op.mat_(row, col) = dst.amp(row);
        }
        return op;
    }

    static FockOperator quadrature(int n_modes, int cutoff, int mode, QuadratureKind kind) {
        FockOperator a = ladder(n_modes, cutoff, mode, LadderKind::Lower);
        FockOperator ad = ladder(n_modes, cutoff, mode, LadderKind::Raise);
        FockOperator op(n_modes, cutoff);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        if (kind == QuadratureKind::X)
            op.mat_ = (a.mat_ + ad.mat_) * inv_sqrt2;
        else
            op.mat_ = (a.mat_ - ad.mat_) * cplx(0, -inv_sqrt2);
        return op;
    }

    FockOperator adjoint() const {
        FockOperator op(n_modes_, cutoff_);
        op.mat_ = mat_.adjoint();
        return op;
    }

    FockState apply(const FockState& st) const {
        if (st.n_modes() != n_modes_ || st.cutoff() != cutoff_)
            throw std::invalid_argument("FockOperator::apply: shape mismatch");
        FockState out(n_modes_, cutoff_);
        Eigen::Map<const Vec> v(st.amps().data(), st.dim());
        Eigen::Map<Vec> o(out.amps().data(), out.dim());
        o = mat_ * v;
        return out;
    }

    FockAction action() const {
        Mat m = mat_;
        return [m](const FockState& src, FockState& dst) {
            Eigen::Map<const Vec> v(src.amps().data(), src.dim());
            Eigen::Map<Vec> o(dst.amps().data(), dst.dim());
            o = m * v;
        };
    }

    friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
        FockOperator op(a.n_modes_, a.cutoff_);
        op.mat_ = a.mat_ * b.mat_;
        return op;
    }
    friend FockOperator operator+(const FockOperator& a, const FockOperator& b) {
        FockOperator op(a.n_modes_, a.cutoff_);
        op.mat_ = a.mat_ + b.mat_;
        return op;
    }
    friend FockOperator operator-(const FockOperator& a, const FockOperator& b) {
        FockOperator op(a.n_modes_, a.cutoff_);
        op.mat_ = a.mat_ - b.mat_;
        return op;
    }
    friend FockOperator operator*(cplx c, const FockOperator& a) {
        FockOperator op(a.n_modes_, a.cutoff_);
        op.mat_ = c * a.mat_;
        return op;
    }

  private:
    int n_modes_;
    int cutoff_;
    Mat mat_;
};

inline FockOperator commutator(const FockOperator& a, const FockOperator& b) { return a * b - b * a; }

inline cplx expectation(const FockOperator& op, const FockState& st) {
    const double n2 = st.norm2();
    if (n2 <= 0) throw std::invalid_argument("expectation: zero-norm state");
    return inner(st, op.apply(st)) / n2;
}

inline double variance(const FockOperator& op, const FockState& st) {
    const double n2 = st.norm2();
    if (n2 <= 0) throw std::invalid_argument("variance: zero-norm state");
    const FockState ops = op.apply(st);
    const cplx mean = inner(st, ops) / n2;
    const double second = inner(ops, ops).real() / n2;  // Hermitian op assumed
    return second - std::norm(mean);
}

// --- exponentials -----------------------------------------------------------

// exp(A) by scaling and squaring with a Taylor core.  `tol` is the relative
// truncation target of the Taylor series at the scaled level.
inline Mat expm(const Mat& a, double tol = default_tolerances().matrix_exp_rel) {
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    while ((norm1 / std::pow(2.0, s)) > 0.5) ++s;
    Mat b = a / std::pow(2.0, s);
    Mat acc = Mat::Identity(a.rows(), a.cols());
    Mat term = acc;
    bool converged = false;
    for (int k = 1; k <= 60; ++k) {
        term = (term * b) / static_cast<double>(k);
        acc += term;
        const double tn = term.cwiseAbs().colwise().sum().maxCoeff();
        const double an = acc.cwiseAbs().colwise().sum().maxCoeff();
        if (tn <= 0.5 * tol * an) { converged = true; break; }
    }
    if (!converged) throw ConvergenceError("expm: Taylor core did not converge");
    for (int i = 0; i < s; ++i) acc = acc * acc;
    return acc;
}

inline FockOperator evolve(const FockOperator& generator, double tol = default_tolerances().matrix_exp_rel) {
    FockOperator out(generator.n_modes(), generator.cutoff());
    out.matrix() = expm(generator.matrix(), tol);
    return out;
}

// exp(G)|psi> by sub-stepped Taylor action.  Substeps double until the series
// converges within the term budget; throws ConvergenceError past the cap.
inline std::pair<FockState, LeakageReport> evolve_state(const FockAction& generator, const FockState& st,
                                                        double tol = default_tolerances().matrix_exp_rel) {
    const double in_norm = std::sqrt(st.norm2());
    // first-application norm ratio seeds the substep count; the doubling loop
    // below covers generators whose strength grows along the evolution
    int first = 1;
    if (in_norm > 0) {
        FockState probe(st.n_modes(), st.cutoff());
        generator(st, probe);
        const double r = std::sqrt(probe.norm2()) / in_norm;
        while (first < (1 << 12) && first < r) first *= 2;
    }
    for (int substeps = first; substeps <= (1 << 14); substeps *= 2) {
        FockState cur = st;
        bool ok = true;
        for (int step = 0; step < substeps && ok; ++step) {
            FockState acc = cur;
            FockState term = cur;
            FockState next(st.n_modes(), st.cutoff());
            ok = false;
            double prev_tn = -1;
            for (int k = 1; k <= 48; ++k) {
                std::fill(next.amps().begin(), next.amps().end(), cplx(0, 0));
                generator(term, next);
                const double scale = 1.0 / (static_cast<double>(k) * substeps);
                for (std::size_t f = 0; f < next.dim(); ++f) next.amp(f) *= scale;
                std::swap(term, next);
                for (std::size_t f = 0; f < term.dim(); ++f) acc.amp(f) += term.amp(f);
                const double tn = std::sqrt(term.norm2());
                const double an = std::sqrt(acc.norm2());
                if (tn <= 0.5 * tol * an && prev_tn >= 0 && prev_tn <= 0.5 * tol * an) { ok = true; break; }
                prev_tn = tn;
            }
            cur = acc;
        }
        if (ok) {
            LeakageReport rep;
            rep.boundary_mass = cur.boundary_mass();
            const double out_norm = std::sqrt(cur.norm2());
            rep.norm_defect = in_norm > 0 ? std::abs(out_norm - in_norm) / in_norm : 0.0;
            return {cur, rep};
        }
    }
    throw ConvergenceError("evolve_state: Taylor action did not converge at requested tolerance");
}

// Evolve with per-mode headroom: pad the cutoff, evolve, project back.
// The returned LeakageReport describes the padded evolution, so
// boundary_mass certifies how little probability ever reached the edge.
inline std::pair<FockState, LeakageReport> evolve_state_padded(
    const std::function<FockAction(int cutoff)>& generator_at, const FockState& st, int headroom,
    double tol = default_tolerances().matrix_exp_rel) {
    const int padded = st.cutoff() + headroom;
    auto [big, rep] = evolve_state(generator_at(padded), st.with_cutoff(padded), tol);
    return {big.with_cutoff(st.cutoff()), rep};
}

}  // namespace ces
