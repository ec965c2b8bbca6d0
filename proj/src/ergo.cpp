#include "qbattery/ergo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qbattery::ergo {

using qla::ComplexMatrix;
using qla::DensityMatrix;
using qla::HermitianOperator;
using qla::RealVector;

namespace {

constexpr double kErgotropyFloor = 1e-10;

double floor_work(double e) { return (e > -kErgotropyFloor && e < 0.0) ? 0.0 : e; }

// Passive energy of an unnormalized PSD block: descending eigenvalues paired
// with ascending energies. Tiny negative eigenvalues from roundoff are
// clamped to zero.
//
// A PSD matrix with a vanishing diagonal entry has a vanishing row and
// column (|m_ij|^2 <= m_ii m_jj), so the eigensolve runs on the occupied
// support only; the dropped eigenvalues are zero and pair with the highest
// energies, contributing nothing.
double passive_energy(const ComplexMatrix& m, const RealVector& energies_sorted) {
    constexpr double kSupportEps = 1e-30;
    const Eigen::Index n = m.rows();
    thread_local Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
    thread_local std::vector<Eigen::Index> keep;
    keep.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (m(i, i).real() > kSupportEps) keep.push_back(i);
    }
    if (keep.empty()) return 0.0;

    const Eigen::Index k = static_cast<Eigen::Index>(keep.size());
    if (k == n) {
        solver.compute(m, Eigen::EigenvaluesOnly);
    } else {
        thread_local ComplexMatrix sub;
        sub.resize(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m(keep[i], keep[j]);
        }
        solver.compute(sub, Eigen::EigenvaluesOnly);
    }
    const RealVector& ev = solver.eigenvalues();  // ascending, k entries
    double out = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double lambda = std::max(ev(i), 0.0);
        out += lambda * energies_sorted(k - 1 - i);
    }
    return out;
}

double diag_energy(const ComplexMatrix& m, const RealVector& energies) {
    double out = 0.0;
    for (Eigen::Index i = 0; i < energies.size(); ++i) out += m(i, i).real() * energies(i);
    return out;
}

// <xi_k| rho_ab |xi_k> on the battery factor, unnormalized; trace = p^k.
// Accumulates contiguous column segments, which vectorizes where the strided
// 2-D block expression does not.
ComplexMatrix project_block(const ComplexMatrix& rho_ab, int d_a, int d_b,
                            const Eigen::Ref<const qla::ComplexVector>& xi) {
    ComplexMatrix m = ComplexMatrix::Zero(d_b, d_b);
    for (int ap = 0; ap < d_a; ++ap) {
        if (xi(ap) == std::complex<double>(0.0, 0.0)) continue;
        for (int a = 0; a < d_a; ++a) {
            const std::complex<double> w = std::conj(xi(a)) * xi(ap);
            if (w == std::complex<double>(0.0, 0.0)) continue;
            for (int j = 0; j < d_b; ++j) {
                m.col(j).noalias() += w * rho_ab.col(ap * d_b + j).segment(a * d_b, d_b);
            }
        }
    }
    return m;
}

void require_joint(const ComplexMatrix& rho_ab, const model::BatteryChargerModel& m,
                   const char* who) {
    if (rho_ab.rows() != m.joint_dim() || rho_ab.cols() != m.joint_dim()) {
        throw DimensionError(std::string(who) + ": state does not live on the joint space");
    }
}

}  // namespace

MeasurementBasis make_basis(ComplexMatrix vectors, std::vector<double> params) {
    if (vectors.rows() != vectors.cols() || vectors.rows() == 0) {
        throw DimensionError("make_basis: need a complete square set of vectors");
    }
    const ComplexMatrix gram = vectors.adjoint() * vectors;
    const double defect =
        (gram - ComplexMatrix::Identity(vectors.rows(), vectors.cols())).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
        throw DomainError("make_basis: vectors are not orthonormal within 1e-10");
    }
    return MeasurementBasis{static_cast<int>(vectors.rows()), std::move(vectors),
                            std::move(params)};
}

DensityMatrix passive_state(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.mat.rows() != h.mat.rows()) {
        throw DimensionError("passive_state: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.mat);
    const qla::Spectrum hs = qla::herm_eig(h);
    const Eigen::Index n = rho.mat.rows();
    RealVector q(n);  // descending, clamped
    for (Eigen::Index i = 0; i < n; ++i) q(i) = std::max(es.eigenvalues()(n - 1 - i), 0.0);
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.noalias() += q(k) * hs.eigenvectors.col(k) * hs.eigenvectors.col(k).adjoint();
    }
    return qla::sanitize_state(out);
}

double ergotropy(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.mat.rows() != h.mat.rows()) {
        throw DimensionError("ergotropy: dimension mismatch");
    }
    const qla::Spectrum hs = qla::herm_eig(h);
    const double energy = h.mat.transpose().cwiseProduct(rho.mat).sum().real();
    return floor_work(energy - passive_energy(rho.mat, hs.eigenvalues));
}

double battery_ergotropy_raw(const ComplexMatrix& rho_ab, const model::BatteryChargerModel& m) {
    require_joint(rho_ab, m, "battery_ergotropy");
    const int d_b = m.battery_dim();
    ComplexMatrix rb = ComplexMatrix::Zero(d_b, d_b);
    for (int a = 0; a < m.charger_dim; ++a) {
        rb += rho_ab.block(a * d_b, a * d_b, d_b, d_b);
    }
    return floor_work(diag_energy(rb, m.battery_energies) -
                      passive_energy(rb, m.battery_energies_sorted));
}

double battery_ergotropy(const DensityMatrix& rho_ab, const model::BatteryChargerModel& m) {
    return battery_ergotropy_raw(rho_ab.mat, m);
}

MeasuredEnsemble measure_charger(const DensityMatrix& rho_ab, const model::BatteryChargerModel& m,
                                 const MeasurementBasis& basis) {
    require_joint(rho_ab.mat, m, "measure_charger");
    if (basis.charger_dim != m.charger_dim) {
        throw DimensionError("measure_charger: basis dimension does not match the charger");
    }
    const int d_b = m.battery_dim();
    MeasuredEnsemble out;
    for (int k = 0; k < basis.charger_dim; ++k) {
        ComplexMatrix block = project_block(rho_ab.mat, m.charger_dim, d_b, basis.vectors.col(k));
        const double p = block.trace().real();
        if (p <= qla::kZeroProbability) continue;
        out.outcomes.push_back(Outcome{k, p, qla::sanitize_state(block / p)});
    }
    return out;
}

double daemonic_ergotropy_raw(const ComplexMatrix& rho_ab, const model::BatteryChargerModel& m,
                              const ComplexMatrix& basis_vectors) {
    const int d_b = m.battery_dim();
    double sum = 0.0;
    // Sum_k p^k E^k == Sum_k [Tr(H M_k) - passive(M_k)] on unnormalized
    // blocks M_k; zero-probability outcomes contribute exactly 0.
    for (int k = 0; k < m.charger_dim; ++k) {
        const ComplexMatrix block =
            project_block(rho_ab, m.charger_dim, d_b, basis_vectors.col(k));
        if (block.trace().real() <= qla::kZeroProbability) continue;
        sum += diag_energy(block, m.battery_energies) -
               passive_energy(block, m.battery_energies_sorted);
    }
    return floor_work(sum);
}

double daemonic_ergotropy(const DensityMatrix& rho_ab, const model::BatteryChargerModel& m,
                          const MeasurementBasis& basis) {
    require_joint(rho_ab.mat, m, "daemonic_ergotropy");
    if (basis.charger_dim != m.charger_dim) {
        throw DimensionError("daemonic_ergotropy: basis dimension does not match the charger");
    }
    return daemonic_ergotropy_raw(rho_ab.mat, m, basis.vectors);
}

double advantage(const DensityMatrix& rho_ab, const model::BatteryChargerModel& m,
                 const MeasurementBasis& basis) {
    return daemonic_ergotropy(rho_ab, m, basis) - battery_ergotropy(rho_ab, m);
}

}  // namespace qbattery::ergo
