#include <catch2/catch_amalgamated.hpp>

#include "ces/states.hpp"
#include "oracles.hpp"

using namespace ces;
using Catch::Approx;

TEST_CASE("coherent states") {
    Vec z(3);
    z << cplx(0.4, -0.1), cplx(0, 0), cplx(-0.3, 0.2);
    const EQState coh = coherent_state(z);
    REQUIRE(norm2(coh) == Approx(1.0));

    const EQState vac = coherent_state(Vec::Zero(3));
    REQUIRE(vac.w().norm() == 0.0);
    REQUIRE(vac.log_prefactor() == cplx(0, 0));

    Vec z2(3);
    z2 << cplx(-0.2, 0.5), cplx(0.3, 0.3), cplx(0.1, 0);
    const cplx expected = std::exp((z.conjugate().transpose() * z2).value() -
                                   0.5 * (z.squaredNorm() + z2.squaredNorm()));
    REQUIRE(std::abs(overlap(coh, coherent_state(z2)) - expected) < 1e-14);
}

TEST_CASE("EPR family eigen-residuals") {
    const cplx eta(0.6, -0.4);
    // (a1 - a2+) |eta> = eta |eta> at s = 1; vector defect (1-s)-proportional below
    Vec u(2), ut(2);
    u << 1.0, 0.0;
    ut << 0.0, -1.0;
    const FirstOrderOperator op(u, ut);
    for (const double s : {0.4, 0.8, 1.0}) {
        const auto r = eigen_residual(epr_state(eta, s), op, eta);
        REQUIRE(std::abs(r.scalar_defect) < 1e-14);
        REQUIRE(r.vector_defect_norm == Approx(1.0 - s).margin(1e-14));
    }
    // small-s states have w = (eta, -eta*)
    const EQState e0 = epr_state(0.0, 0.1);
    REQUIRE(e0.w().norm() == 0.0);
    REQUIRE_THROWS_AS(epr_state(eta, 1.5), std::invalid_argument);
}

TEST_CASE("bipartite CES eigenequations") {
    oracle::TestRng rng(3);
    for (int t = 0; t < 25; ++t) {
        const BipartiteWeights bw(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
        const cplx alpha = rng.disk(1.5);
        const double x = rng.uniform(-1.5, 1.5);
        const double L = bw.lambda();
        for (const double s : {0.6, 1.0}) {
            const EQState st = bipartite_ces(bw, alpha, x, s);
            const auto rx = eigen_residual(st, bipartite_quadrature_sum(bw), L * x / std::sqrt(2.0));
            REQUIRE(std::abs(rx.scalar_defect) < 1e-13);
            if (s == 1.0) REQUIRE(rx.vector_defect_norm < 1e-13);
            // ladder combination holds for every s
            const auto rl = eigen_residual(st, bipartite_ladder(bw), cplx(bw.nu) * alpha * L);
            REQUIRE(std::abs(rl.scalar_defect) < 1e-13);
            REQUIRE(rl.vector_defect_norm < 1e-13);
        }
    }
    // alpha = 0, x = 0, mu = nu = 1: pure collective squeezing
    const EQState pure = bipartite_ces(BipartiteWeights(1, 1), 0.0, 0.0, 1.0);
    REQUIRE(pure.w().norm() == 0.0);
    REQUIRE(pure.F()(0, 1).real() == Approx(-0.5));
}

TEST_CASE("tripartite CES construction and eigenequations") {
    // symmetric reduction: w = 0, F = -(1/3) all-ones
    const ModeWeights unit(1, 1, 1);
    const EQState sym = tripartite_ces(CESParams(unit, 0.0, 0.0, 0.0, 1.0));
    REQUIRE(sym.w().norm() == 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(sym.F()(i, j).real() == Approx(-1.0 / 3.0));

    oracle::TestRng rng(9);
    for (int t = 0; t < 50; ++t) {
        const ModeWeights mw(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
        const cplx beta = rng.disk(2.0), gamma = rng.disk(2.0);
        const double x = rng.uniform(-2, 2);
        const double L = mw.lambda();
        for (const double s : {0.5, 0.9, 1.0}) {
            const EQState st = tripartite_ces(CESParams(mw, beta, gamma, x, s));
            // sum_i m_i w_i = 3 lambda x for all draws
            const cplx mw_sum = (mw.m().cast<cplx>().transpose() * st.w()).value();
            REQUIRE(std::abs(mw_sum - 3.0 * L * x) < 1e-12);
            // nu w1 - mu w2 = nu beta lambda ; tau w2 - nu w3 = tau gamma lambda
            REQUIRE(std::abs(mw.nu * st.w()(0) - mw.mu * st.w()(1) - mw.nu * beta * L) < 1e-12);
            REQUIRE(std::abs(mw.tau * st.w()(1) - mw.nu * st.w()(2) - mw.tau * gamma * L) < 1e-12);
            // full eigen-residuals
            const auto rx = eigen_residual(st, ces_quadrature_sum(mw), L * x / std::sqrt(2.0));
            REQUIRE(std::abs(rx.scalar_defect) < 1e-12);
            REQUIRE(std::abs(rx.vector_defect_norm - (1.0 - s) * mw.m().norm() / (3.0 * std::sqrt(2.0))) <
                    1e-12);
            const auto r12 = eigen_residual(st, ces_ladder_12(mw), cplx(mw.nu) * beta * L);
            const auto r23 = eigen_residual(st, ces_ladder_23(mw), cplx(mw.tau) * gamma * L);
            REQUIRE(std::abs(r12.scalar_defect) < 1e-12);
            REQUIRE(r12.vector_defect_norm < 1e-12);
            REQUIRE(std::abs(r23.scalar_defect) < 1e-12);
            REQUIRE(r23.vector_defect_norm < 1e-12);
        }
        // the operator family commutes
        const auto ox = ces_quadrature_sum(mw);
        const auto o12 = ces_ladder_12(mw);
        const auto o23 = ces_ladder_23(mw);
        REQUIRE(std::abs(ox.commutator_scalar(o12)) < 1e-14);
        REQUIRE(std::abs(ox.commutator_scalar(o23)) < 1e-14);
        REQUIRE(std::abs(o12.commutator_scalar(o23)) < 1e-14);
    }

    REQUIRE_THROWS_AS(ModeWeights(1.0, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(CESParams(unit, 0.0, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("conjugate CES") {
    // sign-flipped quadratic term in the symmetric case
    const ModeWeights unit(1, 1, 1);
    const EQState sym = conjugate_ces(ConjugateParams(unit, 0.0, 0.0, 0.0, 1.0));
    REQUIRE(sym.w().norm() == 0.0);
    REQUIRE(sym.F()(0, 2).real() == Approx(1.0 / 3.0));

    oracle::TestRng rng(15);
    for (int t = 0; t < 25; ++t) {
        const ModeWeights mw(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
        const cplx sg = rng.disk(1.5), kp = rng.disk(1.5);
        const double p = rng.uniform(-1.5, 1.5);
        const double L = mw.lambda();
        for (const double s : {0.7, 1.0}) {
            const EQState st = conjugate_ces(ConjugateParams(mw, sg, kp, p, s));
            const auto rp = eigen_residual(st, ces_momentum_sum(mw), L * p / std::sqrt(2.0));
            REQUIRE(std::abs(rp.scalar_defect) < 1e-12);
            if (s == 1.0) REQUIRE(rp.vector_defect_norm < 1e-12);
            const auto r12 = eigen_residual(st, ces_ladder_12(mw), cplx(mw.nu) * sg * L);
            REQUIRE(std::abs(r12.scalar_defect) < 1e-12);
            REQUIRE(r12.vector_defect_norm < 1e-12);
        }
    }
}

TEST_CASE("overlap prefactor") {
    const ModeWeights mw(1.2, 0.8, 1.5);
    const CESParams zero(mw, 0.0, 0.0, 0.3, 1.0);
    REQUIRE(overlap_prefactor(zero, zero) == cplx(1, 0));

    oracle::TestRng rng(23);
    for (int t = 0; t < 20; ++t) {
        const ModeWeights w(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
        const CESParams a(w, rng.disk(1.0), rng.disk(1.0), 0.2, 1.0);
        const CESParams b(w, rng.disk(1.0), rng.disk(1.0), 0.2, 1.0);
        // Hermitian symmetry
        REQUIRE(std::abs(overlap_prefactor(a, b) - std::conj(overlap_prefactor(b, a))) < 1e-14);
        // same labels -> equal-norm states -> ratio 1
        REQUIRE(std::abs(overlap_prefactor(a, a) - 1.0) < 1e-13);

        // regularized-ratio oracle at increasing s
        const cplx pf = overlap_prefactor(a, b);
        for (const double s : {0.9, 0.99, 0.999}) {
            const cplx num = log_overlap(tripartite_ces(CESParams(w, a.beta, a.gamma, a.x, s)),
                                         tripartite_ces(CESParams(w, b.beta, b.gamma, b.x, s)));
            const cplx den = log_overlap(tripartite_ces(CESParams(w, 0.0, 0.0, a.x, s)),
                                         tripartite_ces(CESParams(w, 0.0, 0.0, a.x, s)));
            REQUIRE(std::abs(std::exp(num - den) - pf) < 1e-10 * std::abs(pf));
        }
    }
}

TEST_CASE("x-orthogonality and the delta limit") {
    const ModeWeights mw(1.3, 0.7, 1.8);
    const cplx b(0.3, -0.2), g(0.1, 0.4);
    const double x = 0.4, xp = 0.9;
    // |overlap| -> 0 for x != x' as s -> 1
    double prev = 1e300;
    for (const double s : {0.9, 0.99, 0.999}) {
        const double lo = log_overlap(tripartite_ces(CESParams(mw, b, g, xp, s)),
                                      tripartite_ces(CESParams(mw, b, g, x, s)))
                              .real();
        REQUIRE(lo < prev);
        prev = lo;
    }
    REQUIRE(prev < -100.0);  // |overlap| < 1e-40 at s = 0.999

    // the x-dependence matches the Gaussian delta family of width
    // eps = 2(1 - s^2)/3, normalized as sqrt(2 pi / 3) delta(x - x')
    for (const double s : {0.99, 0.999}) {
        const double eps = 2.0 * (1.0 - s * s) / 3.0;
        for (const double dx : {0.0, 0.01, 0.02}) {
            const cplx num = log_overlap(tripartite_ces(CESParams(mw, b, g, x + dx, s)),
                                         tripartite_ces(CESParams(mw, b, g, x, s)));
            const cplx pf = overlap_prefactor(CESParams(mw, b, g, x, 1.0), CESParams(mw, b, g, x, 1.0));
            const double delta_form =
                std::sqrt(2.0 * kPi / 3.0) * std::exp(-dx * dx / eps) / std::sqrt(kPi * eps);
            const double ratio = std::exp(num.real()) / (std::abs(pf) * delta_form);
            REQUIRE(ratio == Approx(1.0).margin(0.05 * (1 + dx * dx / eps)));
        }
    }
}

TEST_CASE("coherent-CES overlap closed form") {
    const ModeWeights mw(1.2, 0.8, 1.5);
    const CESParams p(mw, cplx(0.3, -0.4), cplx(0.2, 0.5), 0.7, 0.9);

    // z = 0 reduces to the scalar prefactor
    REQUIRE(std::abs(coherent_ces_overlap(Vec::Zero(3), p) -
                     std::exp(tripartite_ces(p).log_prefactor())) < 1e-14);

    // agreement with the analytic-backend overlap on random draws
    oracle::TestRng rng(27);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        const ModeWeights w(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
        const CESParams pp(w, rng.disk(1.0), rng.disk(1.0), rng.uniform(-1, 1), 0.9);
        Vec z(3);
        for (int i = 0; i < 3; ++i) z(i) = rng.disk(1.0);
        const cplx direct = coherent_ces_overlap(z, pp);
        const cplx via_gauss = overlap(coherent_state(z), tripartite_ces(pp));
        worst = std::max(worst, std::abs(direct - via_gauss));
    }
    REQUIRE(worst < 1e-10);

    // s = 1 stays finite (coherent bra): matches the gauss backend there too
    const CESParams p1(mw, cplx(0.3, -0.4), cplx(0.2, 0.5), 0.7, 1.0);
    Vec z(3);
    z << cplx(0.2, 0.1), cplx(-0.3, 0.2), cplx(0.1, -0.1);
    REQUIRE(std::abs(coherent_ces_overlap(z, p1) - overlap(coherent_state(z), tripartite_ces(p1))) < 1e-12);

    // momentum family
    const ConjugateParams cp(mw, cplx(0.2, 0.1), cplx(-0.4, 0.25), 0.3, 0.95);
    REQUIRE(std::abs(coherent_conjugate_overlap(z, cp) - overlap(coherent_state(z), conjugate_ces(cp))) <
            1e-12);
}
