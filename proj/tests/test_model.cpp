#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qbattery/model.hpp"
#include "qbattery/qla.hpp"
#include "support.hpp"

#include <cmath>

using namespace qbattery;
using qla::ComplexMatrix;
using qla::DensityMatrix;

namespace {

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
    return support::max_abs(a * b - b * a);
}

}  // namespace

TEST_CASE("single-mode construction") {
    SUBCASE("resonant two-level block") {
        // d_b = 2, omega = nu = g = 1: the one-excitation block of the total
        // Hamiltonian in the {|e1 0>, |e0 1>} pair is [[1, 1], [1, 1]].
        const model::BatteryChargerModel m = model::build_single_mode(2, 1.0, 1.0, 1.0);
        const ComplexMatrix& h = m.h_total.mat;  // basis e0 0, e0 1, e1 0, e1 1
        CHECK(h(2, 2).real() == doctest::Approx(1.0));
        CHECK(h(1, 1).real() == doctest::Approx(1.0));
        CHECK(h(1, 2).real() == doctest::Approx(1.0));
        CHECK(h(2, 1).real() == doctest::Approx(1.0));
        CHECK(h(0, 0).real() == doctest::Approx(0.0));
        CHECK(h(3, 3).real() == doctest::Approx(2.0));
        CHECK(std::abs(h(0, 3)) == doctest::Approx(0.0));
        CHECK(m.detunings[0] == doctest::Approx(0.0));
    }

    SUBCASE("reference configuration") {
        const model::BatteryChargerModel m = model::build_single_mode(11, 1.0, 1.0, 1.0);
        CHECK(m.battery_dim() == 11);
        CHECK(m.joint_dim() == 22);
        CHECK(m.capacity() == doctest::Approx(10.0));
        CHECK(m.battery_energies(10) == doctest::Approx(10.0));
        CHECK(m.warnings.empty());
    }

    SUBCASE("hermiticity and excitation conservation") {
        for (double delta : {0.0, 0.05, 0.1}) {
            const model::BatteryChargerModel m = model::build_single_mode(7, 1.0, 1.0 - delta, 0.9);
            CHECK(support::max_abs(m.h_total.mat - m.h_total.mat.adjoint()) < 1e-14);
            CHECK(commutator_norm(m.h_total.mat, model::excitation_operator(m)) < 1e-12);
        }
    }

    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(model::build_single_mode(1, 1.0, 1.0, 1.0), DomainError);
        CHECK_THROWS_AS(model::build_single_mode(4, -1.0, 1.0, 1.0), DomainError);
        CHECK_THROWS_AS(model::build_single_mode(4, 1.0, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS(model::build_single_mode(4, 1.0, -0.2, 1.0), DomainError);
    }

    SUBCASE("large detuning warns but builds") {
        const model::BatteryChargerModel m = model::build_single_mode(4, 1.0, 0.5, 1.0);
        REQUIRE(m.warnings.size() == 1);
        CHECK(m.warnings[0].find("detuning") != std::string::npos);
    }
}

TEST_CASE("multimode construction") {
    const std::vector<int> dims{3, 3};
    const std::vector<double> freqs{0.7, 1.0};
    const std::vector<double> levels{0.0, 0.7, 1.0};

    SUBCASE("coupling matrix element") {
        const model::BatteryChargerModel m = model::build_multimode(dims, freqs, levels, 0.6);
        // <e1, 0 0| H_ab |e0, 1 0> = g
        const int bra = 1 * 9 + 0;
        const int ket = 0 * 9 + 3;
        CHECK(m.h_ab.mat(bra, ket).real() == doctest::Approx(0.6));
        CHECK(commutator_norm(m.h_total.mat, model::excitation_operator(m)) < 1e-12);
    }

    SUBCASE("uncoupled model leaves product states product") {
        const model::BatteryChargerModel m = model::build_multimode(dims, freqs, levels, 0.0);
        std::mt19937_64 gen(3);
        const DensityMatrix ra = support::random_density(3, gen);
        const DensityMatrix rb = support::random_density(9, gen);
        const DensityMatrix joint{qla::kron(ra.mat, rb.mat)};
        const DensityMatrix out = qla::evolve(m.h_total, 1.7, joint);
        const DensityMatrix red = qla::partial_trace(out, {3, 9}, {1});
        // free evolution only changes battery phases, populations are frozen
        for (int i = 0; i < 9; ++i) {
            CHECK(red.mat(i, i).real() == doctest::Approx(rb.mat(i, i).real()).epsilon(1e-10));
        }
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(model::build_multimode({3, 3}, {1.0, 1.0}, {0.0, 1.0, 2.0}, 1.0),
                        DomainError);  // degenerate frequencies
        CHECK_THROWS_AS(model::build_multimode({3, 3}, {0.7, 1.0}, {0.0, 1.0, 0.7}, 1.0),
                        DomainError);  // levels not increasing
        CHECK_THROWS_AS(model::build_multimode({3, 3}, {0.7, 1.0}, {0.1, 0.7, 1.0}, 1.0),
                        DomainError);  // nu_0 != 0
        CHECK_THROWS_AS(model::build_multimode({3}, {0.7, 1.0}, {0.0, 0.7, 1.0}, 1.0),
                        DimensionError);
    }
}

TEST_CASE("battery initial states") {
    SUBCASE("ground") {
        const model::BatteryInitState s = model::battery_ground(5);
        CHECK(s.realized.mat(0, 0).real() == doctest::Approx(1.0));
        CHECK(std::abs(s.realized.mat.trace().real() - 1.0) < 1e-14);
    }

    SUBCASE("thermal approaches the ground state at large beta") {
        const model::BatteryInitState s = model::battery_thermal(11, 50.0, 1.0);
        CHECK(std::abs(s.realized.mat(0, 0).real() - 1.0) < 1e-20);
        for (int n = 1; n < 11; ++n) CHECK(s.realized.mat(n, n).real() < 1e-20);
    }

    SUBCASE("thermal Boltzmann ratios") {
        const double beta = 1.3, omega = 0.9;
        const model::BatteryInitState s = model::battery_thermal(9, beta, omega);
        double sum = 0.0;
        for (int n = 0; n < 9; ++n) sum += s.realized.mat(n, n).real();
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (int n = 0; n + 1 < 9; ++n) {
            const double ratio = s.realized.mat(n + 1, n + 1).real() / s.realized.mat(n, n).real();
            CHECK(ratio == doctest::Approx(std::exp(-beta * omega)).epsilon(1e-12));
        }
    }

    SUBCASE("benchmark three-level mixture is accepted") {
        CHECK_NOTHROW(model::battery_truncated(11, {0.43, 0.42, 0.15}));
    }

    SUBCASE("non-passive populations name the violated inequality") {
        CHECK_THROWS_WITH_AS(model::battery_truncated(11, {0.4, 0.6}),
                             doctest::Contains("r_0 >= r_1"), DomainError);
        CHECK_THROWS_AS(model::battery_truncated(11, {0.5, 0.4}), DomainError);  // sum != 1
        CHECK_THROWS_AS(model::battery_truncated(2, {0.4, 0.3, 0.3}), DimensionError);
    }
}

TEST_CASE("charger initial states") {
    SUBCASE("excited level of a qubit") {
        const model::ChargerInitState s = model::charger_excited(2, 1);
        CHECK(s.realized.mat(1, 1).real() == doctest::Approx(1.0));
        CHECK(s.realized.mat(0, 0).real() == doctest::Approx(0.0));
    }

    SUBCASE("superposition limits") {
        const model::ChargerInitState pole = model::charger_superposition(3, 0.0, 0.0);
        CHECK(pole.realized.mat(1, 1).real() == doctest::Approx(1.0));

        const model::ChargerInitState eq = model::charger_superposition(3, M_PI / 2, 0.0);
        CHECK(eq.realized.mat(1, 1).real() == doctest::Approx(0.5));
        CHECK(eq.realized.mat(2, 2).real() == doctest::Approx(0.5));
        CHECK(eq.realized.mat(1, 2).real() == doctest::Approx(0.5));
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(model::charger_excited(2, 2), DomainError);
        CHECK_THROWS_AS(model::charger_superposition(2, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS(model::charger_superposition(3, -0.1, 0.0), DomainError);
        CHECK_THROWS_AS(model::charger_superposition(3, 1.0, 6.3), DomainError);
    }
}

TEST_CASE("passivity predicate") {
    const qla::HermitianOperator h =
        qla::hermitian_operator([] {
            ComplexMatrix m = ComplexMatrix::Zero(2, 2);
            m(1, 1) = 0.8;
            return m;
        }());

    ComplexMatrix ground = ComplexMatrix::Zero(2, 2);
    ground(0, 0) = 1.0;
    CHECK(model::is_passive(DensityMatrix{ground}, h));

    ComplexMatrix inverted = ComplexMatrix::Zero(2, 2);
    inverted(0, 0) = 0.3;
    inverted(1, 1) = 0.7;
    CHECK(!model::is_passive(DensityMatrix{inverted}, h));

    const model::BatteryInitState th = model::battery_thermal(6, 0.7, 0.8);
    const qla::HermitianOperator h6 = qla::hermitian_operator(0.8 * model::number_operator(6));
    CHECK(model::is_passive(th.realized, h6));

    // coherences in the energy eigenbasis spoil passivity
    ComplexMatrix coherent(2, 2);
    coherent << 0.6, 0.2, 0.2, 0.4;
    CHECK(!model::is_passive(DensityMatrix{coherent}, h));
}

TEST_CASE("uncoupled battery never charges") {
    // multimode builder with one mode admits g = 0
    const model::BatteryChargerModel m = model::build_multimode({5}, {1.0}, {0.0, 1.0}, 0.0);
    const model::BatteryInitState init = model::battery_thermal(5, 2.0, 1.0);
    const DensityMatrix charger = model::charger_excited(2, 1).realized;
    for (double t : {0.3, 1.1, 4.0}) {
        const DensityMatrix joint{qla::kron(charger.mat, init.realized.mat)};
        const DensityMatrix out = qla::evolve(m.h_total, t, joint);
        const DensityMatrix red = qla::partial_trace(out, {2, 5}, {1});
        CHECK(support::max_diff(red.mat, init.realized.mat) < 1e-12);
    }
}

TEST_CASE("composite battery init") {
    const model::BatteryChargerModel m =
        model::build_multimode({3, 3}, {0.7, 1.0}, {0.0, 0.7, 1.0}, 1.0);

    SUBCASE("ground product is collectively passive") {
        const DensityMatrix g =
            model::compose_battery_init(m, {model::battery_ground(3), model::battery_ground(3)});
        CHECK(model::is_passive(g, m.h_battery));
    }

    SUBCASE("thermal products at equal temperature are collectively passive") {
        const model::BatteryInitState th1 = model::battery_thermal(3, 1.5, 0.7);
        const model::BatteryInitState th2 = model::battery_thermal(3, 1.5, 1.0);
        CHECK(model::is_passive(model::compose_battery_init(m, {th1, th2}), m.h_battery));
    }

    SUBCASE("truncated products build but need not be collectively passive") {
        // on 3-level modes the (2,0) level sits below (1,1) in energy yet is
        // empty, so the product carries a little collective ergotropy
        const model::BatteryInitState t2 = model::battery_truncated(3, {0.8, 0.2});
        const DensityMatrix composite = model::compose_battery_init(m, {t2, t2});
        CHECK(!model::is_passive(composite, m.h_battery));
        CHECK(std::abs(composite.mat.trace().real() - 1.0) < 1e-12);
    }

    SUBCASE("mode dimension mismatch is rejected") {
        const model::BatteryInitState t2 = model::battery_truncated(4, {0.8, 0.2});
        CHECK_THROWS_AS(model::compose_battery_init(m, {t2, t2}), DimensionError);
    }
}
