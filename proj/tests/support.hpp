// Shared helpers for the test binaries: seeded random states and operators,
// entrywise comparisons.

#pragma once

#include "qbattery/qla.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace support {

using qbattery::qla::ComplexMatrix;
using qbattery::qla::ComplexVector;

inline ComplexMatrix random_ginibre(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    ComplexMatrix g(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) g(r, c) = std::complex<double>(nd(gen), nd(gen));
    }
    return g;
}

inline qbattery::qla::DensityMatrix random_density(int n, std::mt19937_64& gen) {
    const ComplexMatrix g = random_ginibre(n, gen);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return qbattery::qla::sanitize_state(rho);
}

inline ComplexMatrix random_unitary(int n, std::mt19937_64& gen) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_ginibre(n, gen));
    return ComplexMatrix(qr.householderQ());
}

inline qbattery::qla::HermitianOperator random_hermitian(int n, std::mt19937_64& gen) {
    const ComplexMatrix g = random_ginibre(n, gen);
    return qbattery::qla::hermitian_operator(0.5 * (g + g.adjoint()));
}

// Descending normalized populations, i.e. a random passive Fock-diagonal state.
inline std::vector<double> random_passive_populations(int d, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> p(d);
    double sum = 0.0;
    for (double& x : p) sum += (x = u01(gen) + 1e-6);
    std::sort(p.begin(), p.end(), std::greater<double>());
    for (double& x : p) x /= sum;
    return p;
}

inline double max_abs(const ComplexMatrix& a) { return a.cwiseAbs().maxCoeff(); }

inline double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return max_abs(a - b);
}

}  // namespace support
