#include <catch2/catch_amalgamated.hpp>

#include "ces/fock.hpp"
#include "ces/gauss.hpp"
#include "ces/protocol.hpp"
#include "ces/states.hpp"
#include "oracles.hpp"

using namespace ces;
using Catch::Approx;

TEST_CASE("flat index and occupation tuple round-trip") {
    oracle::TestRng rng(11);
    for (const auto [n_modes, cutoff] : {std::pair{1, 9}, {2, 5}, {3, 4}}) {
        FockState st(n_modes, cutoff);
        for (std::size_t f = 0; f < st.dim(); ++f) {
            const auto occ = st.occupation(f);
            REQUIRE(st.flat_index(occ) == f);
        }
    }
}

TEST_CASE("ladder matrix elements") {
    const int N = 6;
    const FockOperator a = FockOperator::ladder(1, N, 0, LadderKind::Lower);
    const FockOperator ad = FockOperator::ladder(1, N, 0, LadderKind::Raise);
    // <0|a|1> = 1
    REQUIRE(a.matrix()(0, 1) == cplx(1, 0));
    // <2|a+|1> = sqrt(2)
    REQUIRE(ad.matrix()(2, 1).real() == Approx(std::sqrt(2.0)));
    // [a, a+] = 1 on occupations <= N-1
    const Mat c = commutator(a, ad).matrix();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) REQUIRE(std::abs(c(i, j) - (i == j ? 1.0 : 0.0)) < 1e-14);

    REQUIRE_THROWS_AS(FockOperator::ladder(2, 4, 2, LadderKind::Lower), std::invalid_argument);
}

TEST_CASE("quadrature operators") {
    const int N = 10;
    const FockOperator X = FockOperator::quadrature(1, N, 0, QuadratureKind::X);
    const FockOperator P = FockOperator::quadrature(1, N, 0, QuadratureKind::P);

    const FockState vac = FockState::vacuum(1, N);
    REQUIRE(variance(X, vac) == Approx(0.5));
    REQUIRE(variance(P, vac) == Approx(0.5));
    REQUIRE(std::abs(expectation(X, vac)) < 1e-14);

    // <z|X|z> = sqrt(2) Re z
    const cplx z(0.4, -0.3);
    Vec zv(1);
    zv << z;
    const FockState coh = fock_project(coherent_state(zv), N);
    REQUIRE(expectation(X, coh).real() == Approx(std::sqrt(2.0) * z.real()).margin(1e-10));
    REQUIRE(expectation(P, coh).real() == Approx(std::sqrt(2.0) * z.imag()).margin(1e-10));

    // [X, P] = i on the interior
    const Mat c = commutator(X, P).matrix();
    for (int i = 0; i < N - 1; ++i)
        for (int j = 0; j < N - 1; ++j)
            REQUIRE(std::abs(c(i, j) - (i == j ? cplx(0, 1) : cplx(0, 0))) < 1e-13);

    // variance is invariant under unitary conjugation
    oracle::TestRng urng(5);
    const Mat u = oracle::random_unitary(urng, X.dim());
    FockOperator rotated(1, N);
    rotated.matrix() = u * X.matrix() * u.adjoint();
    FockState rstate(1, N);
    Eigen::Map<Vec>(rstate.amps().data(), rstate.dim()) =
        u * Eigen::Map<const Vec>(coh.amps().data(), coh.dim());
    REQUIRE(variance(rotated, rstate) == Approx(variance(X, coh)).margin(1e-10));
}

TEST_CASE("inner products") {
    const FockState v = FockState::basis(3, 3, {0, 0, 0});
    REQUIRE(inner(v, v) == cplx(1, 0));
    REQUIRE(inner(FockState::basis(3, 3, {1, 0, 0}), FockState::basis(3, 3, {0, 1, 0})) == cplx(0, 0));
    REQUIRE_THROWS_AS(inner(FockState::vacuum(2, 3), FockState::vacuum(3, 3)), std::invalid_argument);

    // displaced vacuum against the power-series oracle
    const cplx eps(0.7, -0.2);
    const int N = 18;
    auto [disp, rep] = evolve_state(displacement_action(0, eps), FockState::vacuum(1, N));
    for (int n = 0; n <= N - 6; ++n) {
        const FockState fock_n = FockState::basis(1, N, {n});
        REQUIRE(std::abs(inner(disp, fock_n) - std::conj(oracle::displaced_vacuum_amp(eps, n))) < 1e-12);
    }
}

TEST_CASE("expectation rejects zero-norm states") {
    const FockState zero(1, 3);
    const FockOperator X = FockOperator::quadrature(1, 3, 0, QuadratureKind::X);
    REQUIRE_THROWS_AS(expectation(X, zero), std::invalid_argument);
    REQUIRE_THROWS_AS(variance(X, zero), std::invalid_argument);
}

TEST_CASE("evolve: exponential contracts") {
    const int N = 8;
    // exp(0) = identity
    FockOperator zero(1, N);
    REQUIRE((evolve(zero).matrix() - Mat::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff() < 1e-14);

    // anti-Hermitian generator preserves the norm to tolerance
    const FockOperator gen = bs_generator(2, 6, 0, 1, 0.43);
    const FockState st = FockState::basis(2, 6, {1, 0});
    auto [out, rep] = evolve_state(gen.action(), st);
    REQUIRE(rep.norm_defect < 1e-12);
    REQUIRE(rep.boundary_mass < 1e-20);

    // B12(pi/2) maps |10> -> |01> (2-level rotation closed form)
    auto [rot, rep2] = evolve_state(bs_action(0, 1, kPi / 2), st);
    REQUIRE(std::abs(inner(FockState::basis(2, 6, {0, 1}), rot) - cplx(1, 0)) < 1e-12);
    REQUIRE(std::abs(inner(st, rot)) < 1e-12);
}

TEST_CASE("boundary mass and total-photon filter") {
    FockState st(2, 3);
    st.amp(st.flat_index({3, 1})) = cplx(0.5, 0);
    st.amp(st.flat_index({1, 1})) = cplx(1.0, 0);
    REQUIRE(st.boundary_mass() == Approx(0.25));
    const FockState low = st.restrict_total_photons(2);
    REQUIRE(low.amp(low.flat_index({3, 1})) == cplx(0, 0));
    REQUIRE(low.amp(low.flat_index({1, 1})) == cplx(1, 0));

    const FockState grown = st.with_cutoff(5);
    REQUIRE(grown.amp(grown.flat_index({3, 1})) == cplx(0.5, 0));
    REQUIRE(grown.with_cutoff(3).amp(st.flat_index({3, 1})) == cplx(0.5, 0));
}

TEST_CASE("dense operator dimension cap") {
    REQUIRE_THROWS_AS(FockOperator(3, 20), std::invalid_argument);
}
