#pragma once

// Seed-deterministic block Monte Carlo for the completeness relations and the
// marginal-distribution identities.  Samples are drawn in fixed-size blocks;
// block b uses an independent substream seeded from (seed, b), and results
// are combined in block order, so estimates do not depend on how many worker
// threads processed the blocks.

#include <atomic>
#include <cmath>
#include <future>
#include <random>
#include <thread>
#include <vector>

#include "ces/common.hpp"
#include "ces/states.hpp"

namespace ces {

enum class CesKind { Position, Momentum };

struct McOptions {
    long n_samples = 1000000;
    std::uint64_t seed = 0;
    double proposal_inflation = 1.3;  // widens the matched Gaussian envelope
    static constexpr long kBlockSize = 16384;
};

namespace detail {

struct BlockRng {
    std::mt19937_64 engine;
    std::normal_distribution<double> normal;

    BlockRng(std::uint64_t seed, std::uint64_t block) {
        std::seed_seq seq{static_cast<std::uint64_t>(0x9e3779b97f4a7c15ULL), seed, block};
        engine.seed(seq);
    }
    double gauss() { return normal(engine); }
};

// Gaussian proposal matched to the |<0|beta,gamma,x>|^2 envelope
//   exp(2 Re l) = exp(-(v1' Q2 v1) - (v2' Q2 v2) - 3x^2/2),
// v1 = (Re beta, Re gamma), v2 = (Im beta, Im gamma), inflated for safety.
struct CesProposal {
    Eigen::Matrix2d cov, cov_inv, chol;
    double x_var;
    double log_norm_bg;  // log normalization of one 2-D block
    double log_norm_x;

    CesProposal(const ModeWeights& mw, double inflate) {
        const double mu = mw.mu, nu = mw.nu, tau = mw.tau;
        Eigen::Matrix2d Q2;
        Q2 << nu * nu + tau * tau, mu * tau * tau / nu, mu * tau * tau / nu,
            tau * tau * (mu * mu + nu * nu) / (nu * nu);
        Q2 /= 3.0;
        cov = inflate * Q2.inverse() / 2.0;
        cov_inv = cov.inverse();
        chol = Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
        x_var = inflate / 3.0;
        log_norm_bg = std::log(2.0 * kPi * std::sqrt(cov.determinant()));
        log_norm_x = 0.5 * std::log(2.0 * kPi * x_var);
    }

    // draws (beta, gamma) and returns the log proposal density of the 4-D part
    void sample_bg(BlockRng& rng, cplx& beta, cplx& gamma, double& log_q) const {
        Eigen::Vector2d v1 = chol * Eigen::Vector2d(rng.gauss(), rng.gauss());
        Eigen::Vector2d v2 = chol * Eigen::Vector2d(rng.gauss(), rng.gauss());
        beta = cplx(v1(0), v2(0));
        gamma = cplx(v1(1), v2(1));
        log_q = -0.5 * (v1.dot(cov_inv * v1) + v2.dot(cov_inv * v2)) - 2.0 * log_norm_bg;
    }

    double sample_x(BlockRng& rng, double& log_q) const {
        const double x = std::sqrt(x_var) * rng.gauss();
        log_q += -0.5 * x * x / x_var - log_norm_x;
        return x;
    }
};

// Runs `fn(block_index, rng)` over all blocks, possibly in parallel; the
// caller combines the per-block results in index order.
template <typename Fn>
void for_each_block(int n_blocks, std::uint64_t seed, Fn&& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(n_blocks));
    if (workers <= 1) {
        for (int b = 0; b < n_blocks; ++b) {
            BlockRng rng(seed, static_cast<std::uint64_t>(b));
            fn(b, rng);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int b = next.fetch_add(1);
                if (b >= n_blocks) return;
                BlockRng rng(seed, static_cast<std::uint64_t>(b));
                fn(b, rng);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

struct CompletenessEstimate {
    Mat mean;                    // MC estimate of the ket-bra integral on the truncated space
    Eigen::MatrixXd stderr_mat;  // per-entry standard error (re/im combined)
    double target_constant;      // 1/(tau^2 lambda^2)
    double fitted_constant;      // average of the real diagonal
    double max_diag_rel_dev;
    double max_diag_stderr;
    double max_offdiag_abs;
    double max_offdiag_stderr;
    long effective_samples;
    int n_blocks;
    bool budget_warning;  // 3 x worst diag stderr exceeds 5% of the target
};

// MC estimate of  int d2beta/pi d2gamma/pi dx/sqrt(6 pi) |beta,gamma,x><beta,gamma,x|
// (or the momentum version) projected to the per-mode cutoff.
inline CompletenessEstimate completeness_mc(const ModeWeights& mw, double s, int cutoff,
                                            const McOptions& opt, CesKind kind = CesKind::Position) {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("completeness_mc: needs s in (0,1) for normalizable sampling");
    const double L = mw.lambda();
    const double measure_const = 1.0 / (kPi * kPi * std::sqrt(6.0 * kPi));
    const detail::CesProposal prop(mw, opt.proposal_inflation);

    const int n_blocks = static_cast<int>((opt.n_samples + McOptions::kBlockSize - 1) / McOptions::kBlockSize);
    const long eff_samples = static_cast<long>(n_blocks) * McOptions::kBlockSize;
    const std::size_t dim = FockState::dimension(3, cutoff);

    std::vector<Mat> block_means(n_blocks);
    detail::for_each_block(n_blocks, opt.seed, [&](int b, detail::BlockRng& rng) {
        Mat acc = Mat::Zero(dim, dim);
        for (long i = 0; i < McOptions::kBlockSize; ++i) {
            cplx beta, gamma;
            double log_q = 0;
            prop.sample_bg(rng, beta, gamma, log_q);
            const double xp = prop.sample_x(rng, log_q);
            const EQState st = (kind == CesKind::Position)
                                   ? tripartite_ces(CESParams(mw, beta, gamma, xp, s))
                                   : conjugate_ces(ConjugateParams(mw, beta, gamma, xp, s));
            const FockState proj = fock_project(st, cutoff);
            Eigen::Map<const Vec> v(proj.amps().data(), dim);
            const double wgt = measure_const * std::exp(-log_q);
            acc.noalias() += wgt * (v * v.adjoint());
        }
        block_means[b] = acc / static_cast<double>(McOptions::kBlockSize);
    });

    Mat mean = Mat::Zero(dim, dim);
    for (const Mat& m : block_means) mean += m;
    mean /= n_blocks;
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(dim, dim);
    for (const Mat& m : block_means) {
        var += (m - mean).real().cwiseAbs2();
        var += (m - mean).imag().cwiseAbs2();
    }
    Eigen::MatrixXd se = (var / (n_blocks * std::max(1, n_blocks - 1))).cwiseSqrt();

    CompletenessEstimate out;
    out.mean = mean;
    out.stderr_mat = se;
    out.target_constant = 1.0 / (mw.tau * mw.tau * L * L);
    out.effective_samples = eff_samples;
    out.n_blocks = n_blocks;
    double diag_sum = 0, worst_diag = 0, worst_diag_se = 0, worst_off = 0, worst_off_se = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        diag_sum += mean(i, i).real();
        worst_diag = std::max(worst_diag, std::abs(mean(i, i).real() - out.target_constant));
        worst_diag_se = std::max(worst_diag_se, se(i, i));
        for (std::size_t j = 0; j < dim; ++j) {
            if (i == j) continue;
            worst_off = std::max(worst_off, std::abs(mean(i, j)));
            worst_off_se = std::max(worst_off_se, se(i, j));
        }
    }
    out.fitted_constant = diag_sum / static_cast<double>(dim);
    out.max_diag_rel_dev = worst_diag / out.target_constant;
    out.max_diag_stderr = worst_diag_se;
    out.max_offdiag_abs = worst_off;
    out.max_offdiag_stderr = worst_off_se;
    out.budget_warning = 3.0 * worst_diag_se > 0.05 * out.target_constant;
    return out;
}

struct PartialCompletenessResult {
    cplx mc_value;
    double stderr_value;
    cplx closed_form;
};

namespace detail {
inline cplx partial_closed_form(double coord, const Vec& z, const Vec& zp, const ModeWeights& mw,
                                CesKind kind) {
    const double L = mw.lambda();
    const cplx lzz = -0.5 * (z.squaredNorm() + zp.squaredNorm()) + (z.conjugate().transpose() * zp).value();
    const Vec m = mw.m().cast<cplx>();
    cplx arg;
    if (kind == CesKind::Position)
        arg = coord / std::sqrt(2.0) - (m.transpose() * (z.conjugate() + zp)).value() / (3.0 * std::sqrt(2.0) * L);
    else
        arg = coord / std::sqrt(2.0) -
              (m.transpose() * (zp - z.conjugate())).value() / (3.0 * std::sqrt(2.0) * L * cplx(0, 1));
    return 3.0 / (mw.tau * mw.tau * L * L) * std::exp(-3.0 * arg * arg + lzz);
}
}  // namespace detail

// MC estimate of  int d2beta/pi d2gamma/pi <z|beta,gamma,x><beta,gamma,x|z'>
// at fixed x, against the normally ordered closed form evaluated by the
// coherent substitution rule.  `kind` selects the momentum family instead.
inline PartialCompletenessResult partial_completeness_check(double coord, const Vec& z, const Vec& zp,
                                                            const ModeWeights& mw, double s,
                                                            const McOptions& opt,
                                                            CesKind kind = CesKind::Position) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("partial_completeness_check: needs s in (0,1)");
    const detail::CesProposal prop(mw, opt.proposal_inflation);
    const double measure_const = 1.0 / (kPi * kPi);

    const int n_blocks = static_cast<int>((opt.n_samples + McOptions::kBlockSize - 1) / McOptions::kBlockSize);
    std::vector<cplx> block_means(n_blocks);
    detail::for_each_block(n_blocks, opt.seed, [&](int b, detail::BlockRng& rng) {
        cplx acc(0, 0);
        for (long i = 0; i < McOptions::kBlockSize; ++i) {
            cplx beta, gamma;
            double log_q = 0;
            prop.sample_bg(rng, beta, gamma, log_q);
            cplx lo_z, lo_zp;
            if (kind == CesKind::Position) {
                const CESParams cp(mw, beta, gamma, coord, s);
                lo_z = std::log(coherent_ces_overlap(z, cp));
                lo_zp = std::log(coherent_ces_overlap(zp, cp));
            } else {
                const ConjugateParams cp(mw, beta, gamma, coord, s);
                lo_z = std::log(coherent_conjugate_overlap(z, cp));
                lo_zp = std::log(coherent_conjugate_overlap(zp, cp));
            }
            acc += measure_const * std::exp(lo_z + std::conj(lo_zp) - log_q);
        }
        block_means[b] = acc / static_cast<double>(McOptions::kBlockSize);
    });

    cplx mean(0, 0);
    for (const cplx& m : block_means) mean += m;
    mean /= static_cast<double>(n_blocks);
    double var = 0;
    for (const cplx& m : block_means) var += std::norm(m - mean);
    const double se = std::sqrt(var / (n_blocks * std::max(1, n_blocks - 1)));

    return {mean, se, detail::partial_closed_form(coord, z, zp, mw, kind)};
}

struct MarginalMcResult {
    double mc_value;
    double stderr_value;
};

// MC estimate of  sqrt(2/(27 pi)) int d2beta d2gamma / pi^2 |<psi|beta,gamma,x>|^2,
// the probability-marginal form of the x marginal (momentum version analogous).
inline MarginalMcResult marginal_mc(const EQState& psi, double coord, const ModeWeights& mw, double s,
                                    const McOptions& opt, CesKind kind = CesKind::Position) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("marginal_mc: needs s in (0,1)");
    const detail::CesProposal prop(mw, opt.proposal_inflation);
    const double front = std::sqrt(2.0 / (27.0 * kPi)) / (kPi * kPi);
    const double psi_log_norm2 = log_norm2(psi);

    const int n_blocks = static_cast<int>((opt.n_samples + McOptions::kBlockSize - 1) / McOptions::kBlockSize);
    std::vector<double> block_means(n_blocks);
    detail::for_each_block(n_blocks, opt.seed, [&](int b, detail::BlockRng& rng) {
        double acc = 0;
        for (long i = 0; i < McOptions::kBlockSize; ++i) {
            cplx beta, gamma;
            double log_q = 0;
            prop.sample_bg(rng, beta, gamma, log_q);
            const EQState st = (kind == CesKind::Position)
                                   ? tripartite_ces(CESParams(mw, beta, gamma, coord, s))
                                   : conjugate_ces(ConjugateParams(mw, beta, gamma, coord, s));
            const double lo = 2.0 * log_overlap(psi, st).real() - psi_log_norm2;
            acc += front * std::exp(lo - log_q);
        }
        block_means[b] = acc / static_cast<double>(McOptions::kBlockSize);
    });

    double mean = 0;
    for (double m : block_means) mean += m;
    mean /= n_blocks;
    double var = 0;
    for (double m : block_means) var += sq(m - mean);
    return {mean, std::sqrt(var / (n_blocks * std::max(1, n_blocks - 1)))};
}

}  // namespace ces
