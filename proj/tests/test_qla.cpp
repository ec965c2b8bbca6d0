#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qbattery/qla.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace qbattery;
using qla::ComplexMatrix;
using qla::ComplexVector;
using qla::DensityMatrix;

namespace {

ComplexMatrix diag_real(std::initializer_list<double> d) {
    ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
    int i = 0;
    for (double v : d) m(i, i) = v, ++i;
    return m;
}

}  // namespace

TEST_CASE("kron basics") {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix i3 = ComplexMatrix::Identity(3, 3);
    CHECK(support::max_diff(qla::kron(i2, i3), ComplexMatrix::Identity(6, 6)) == 0.0);

    // spectrum of a sum of local terms is the direct sum of spectra
    const double omega = 0.7, nu = 1.3;
    const ComplexMatrix h = qla::kron(diag_real({0.0, nu}), i2) + qla::kron(i2, diag_real({0.0, omega}));
    const qla::Spectrum s = qla::herm_eig(qla::hermitian_operator(h));
    std::vector<double> expect{0.0, omega, nu, nu + omega};
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 4; ++i) CHECK(s.eigenvalues(i) == doctest::Approx(expect[i]).epsilon(1e-12));

    // projector (x) projector stays rank one with unit trace
    const ComplexMatrix p = qla::kron(diag_real({0.0, 1.0}), diag_real({1.0, 0.0, 0.0}));
    CHECK(p.trace().real() == doctest::Approx(1.0));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p);
    int rank = 0;
    for (int i = 0; i < 6; ++i) rank += es.eigenvalues()(i) > 1e-12 ? 1 : 0;
    CHECK(rank == 1);
}

TEST_CASE("partial trace") {
    std::mt19937_64 gen(41);
    const DensityMatrix ra = support::random_density(2, gen);
    const DensityMatrix rb = support::random_density(3, gen);
    const DensityMatrix joint{qla::kron(ra.mat, rb.mat)};

    SUBCASE("product state reduces to its factors") {
        const DensityMatrix red = qla::partial_trace(joint, {2, 3}, {1});
        CHECK(support::max_diff(red.mat, rb.mat) < 1e-14);
        const DensityMatrix reda = qla::partial_trace(joint, {2, 3}, {0});
        CHECK(support::max_diff(reda.mat, ra.mat) < 1e-14);
    }

    SUBCASE("maximally entangled state reduces to the maximally mixed one") {
        ComplexVector phi = ComplexVector::Zero(4);
        phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
        const DensityMatrix bell{phi * phi.adjoint()};
        const DensityMatrix red = qla::partial_trace(bell, {2, 2}, {1});
        CHECK(support::max_diff(red.mat, 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-14);
    }

    SUBCASE("three factors, keep outer pair in order") {
        const DensityMatrix rc = support::random_density(2, gen);
        const DensityMatrix trip{qla::kron(qla::kron(ra.mat, rb.mat), rc.mat)};
        const DensityMatrix red = qla::partial_trace(trip, {2, 3, 2}, {0, 2});
        CHECK(support::max_diff(red.mat, qla::kron(ra.mat, rc.mat)) < 1e-13);
    }

    SUBCASE("dimension mismatch is rejected") {
        CHECK_THROWS_AS(qla::partial_trace(joint, {2, 2}, {0}), DimensionError);
        CHECK_THROWS_AS(qla::partial_trace(joint, {2, 3}, {}), DimensionError);
        CHECK_THROWS_AS(qla::partial_trace(joint, {2, 3}, {2}), DimensionError);
    }
}

TEST_CASE("herm_eig") {
    ComplexMatrix bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(qla::hermitian_operator(bad), DomainError);

    const qla::Spectrum s = qla::herm_eig(qla::hermitian_operator(diag_real({3.0, 1.0, 2.0})));
    CHECK(s.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(s.eigenvalues(2) == doctest::Approx(3.0));

    ComplexMatrix sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    const qla::Spectrum sxs = qla::herm_eig(qla::hermitian_operator(sx));
    CHECK(sxs.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(sxs.eigenvalues(1) == doctest::Approx(1.0));

    // single-excitation Jaynes-Cummings block splits by the Rabi frequency
    const double g = 0.8, omega = 1.0, delta = 0.1, nu = omega - delta;
    ComplexMatrix block(2, 2);
    block << nu, g, g, omega;
    const qla::Spectrum bs = qla::herm_eig(qla::hermitian_operator(block));
    const double mean = 0.5 * (nu + omega);
    const double rabi = std::sqrt(g * g + 0.25 * delta * delta);
    CHECK(bs.eigenvalues(0) == doctest::Approx(mean - rabi).epsilon(1e-12));
    CHECK(bs.eigenvalues(1) == doctest::Approx(mean + rabi).epsilon(1e-12));

    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const qla::HermitianOperator h = support::random_hermitian(8, gen);
        const qla::Spectrum spec = qla::herm_eig(h);
        CHECK(support::max_diff(spec.eigenvectors.adjoint() * spec.eigenvectors,
                                ComplexMatrix::Identity(8, 8)) < 1e-10);
        const ComplexMatrix resid =
            h.mat * spec.eigenvectors - spec.eigenvectors * spec.eigenvalues.asDiagonal();
        CHECK(support::max_abs(resid) < 1e-9 * std::max(1.0, support::max_abs(h.mat)));
        for (int i = 0; i + 1 < 8; ++i) CHECK(spec.eigenvalues(i) <= spec.eigenvalues(i + 1));
    }
}

TEST_CASE("evolve") {
    std::mt19937_64 gen(11);
    const qla::HermitianOperator h = support::random_hermitian(6, gen);
    const DensityMatrix rho = support::random_density(6, gen);

    SUBCASE("time zero is the identity") {
        CHECK(support::max_diff(qla::evolve(h, 0.0, rho).mat, rho.mat) < 1e-12);
    }

    SUBCASE("unitary invariants") {
        const DensityMatrix out = qla::evolve(h, 0.83, rho);
        CHECK(std::abs(out.mat.trace().real() - 1.0) < 1e-10);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> e0(rho.mat, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> e1(out.mat, Eigen::EigenvaluesOnly);
        CHECK((e0.eigenvalues() - e1.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("composition") {
        const DensityMatrix once = qla::evolve(h, 0.4 + 0.9, rho);
        const DensityMatrix twice = qla::evolve(h, 0.4, qla::evolve(h, 0.9, rho));
        CHECK(support::max_diff(once.mat, twice.mat) < 1e-9);
    }

    SUBCASE("resonant excitation swap goes as sin^2(gt)") {
        // charger (x) two-level mode, basis {e0 0, e0 1, e1 0, e1 1}
        const double g = 1.3, omega = 1.0;
        ComplexMatrix hm = ComplexMatrix::Zero(4, 4);
        hm(1, 1) = omega;
        hm(2, 2) = omega;  // resonant: nu = omega
        hm(3, 3) = 2.0 * omega;
        hm(1, 2) = hm(2, 1) = g;
        ComplexMatrix start = ComplexMatrix::Zero(4, 4);
        start(2, 2) = 1.0;  // |e1, 0>
        for (double t : {0.2, 0.7, 1.9}) {
            const DensityMatrix out =
                qla::evolve(qla::hermitian_operator(hm), t, DensityMatrix{start});
            const double swapped = std::sin(g * t) * std::sin(g * t);
            CHECK(out.mat(1, 1).real() == doctest::Approx(swapped).epsilon(1e-12));
            CHECK(out.mat(2, 2).real() == doctest::Approx(1.0 - swapped).epsilon(1e-12));
        }
    }
}

TEST_CASE("apply_projector") {
    std::mt19937_64 gen(13);
    const DensityMatrix rho = support::random_density(4, gen);

    const qla::ProjectionResult full =
        qla::apply_projector(rho, ComplexMatrix::Identity(4, 4));
    CHECK(full.prob == doctest::Approx(1.0));
    CHECK(support::max_diff(full.post->mat, rho.mat) < 1e-12);

    // |00><00| projected onto |1><1| (x) I vanishes
    ComplexMatrix zero_state = ComplexMatrix::Zero(4, 4);
    zero_state(0, 0) = 1.0;
    ComplexMatrix p = ComplexMatrix::Zero(4, 4);
    p(2, 2) = p(3, 3) = 1.0;
    const qla::ProjectionResult none = qla::apply_projector(DensityMatrix{zero_state}, p);
    CHECK(none.prob == 0.0);
    CHECK(!none.post.has_value());

    CHECK_THROWS_AS(qla::apply_projector(rho, 2.0 * ComplexMatrix::Identity(4, 4)), DomainError);

    // probabilities of a complete projective measurement sum to one
    const ComplexMatrix u = support::random_unitary(4, gen);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const ComplexMatrix pk = u.col(k) * u.col(k).adjoint();
        total += qla::apply_projector(rho, pk).prob;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("density matrix validation") {
    ComplexMatrix ok(2, 2);
    ok << 0.5, 0.25, 0.25, 0.5;
    CHECK_NOTHROW(qla::density_matrix(ok));

    ComplexMatrix bad_trace = 2.0 * ok;
    CHECK_THROWS_AS(qla::density_matrix(bad_trace), DomainError);

    ComplexMatrix not_herm(2, 2);
    not_herm << 0.5, 0.5, 0.0, 0.5;
    CHECK_THROWS_AS(qla::density_matrix(not_herm), DomainError);

    ComplexMatrix indefinite(2, 2);
    indefinite << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(qla::density_matrix(indefinite), DomainError);

    // sanitize clamps a tiny negative eigenvalue and renormalizes
    ComplexMatrix nearly(2, 2);
    nearly << 1.0 + 5e-13, 0.0, 0.0, -5e-13;
    const DensityMatrix cleaned = qla::sanitize_state(nearly);
    CHECK(cleaned.mat(1, 1).real() >= 0.0);
    CHECK(std::abs(cleaned.mat.trace().real() - 1.0) < 1e-12);
    CHECK(!qla::check_state(cleaned).has_value());

    ComplexMatrix too_negative(2, 2);
    too_negative << 1.1, 0.0, 0.0, -0.1;
    CHECK_THROWS_AS(qla::sanitize_state(too_negative), DomainError);
}
