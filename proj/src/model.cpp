#include "qbattery/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qbattery::model {

using qla::ComplexMatrix;
using qla::DensityMatrix;
using qla::HermitianOperator;

namespace {

ComplexMatrix identity(int d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix ketbra(int d, int i, int j) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

// Operator acting on one battery mode, identity on the others.
ComplexMatrix embed_mode_op(const std::vector<int>& dims, int mode, const ComplexMatrix& op) {
    ComplexMatrix out = (mode == 0) ? op : identity(dims[0]);
    for (int f = 1; f < static_cast<int>(dims.size()); ++f) {
        out = qla::kron(out, f == mode ? op : identity(dims[f]));
    }
    return out;
}

void finalize(BatteryChargerModel& m) {
    const int db = m.battery_dim();

    ComplexMatrix hb_battery = ComplexMatrix::Zero(db, db);
    for (int i = 0; i < m.mode_count(); ++i) {
        hb_battery += embed_mode_op(m.mode_dims, i, m.mode_freqs[i] * number_operator(m.mode_dims[i]));
    }
    m.h_battery = qla::hermitian_operator(hb_battery);
    m.battery_energies = hb_battery.diagonal().real();
    m.battery_energies_sorted = m.battery_energies;
    std::sort(m.battery_energies_sorted.begin(), m.battery_energies_sorted.end());

    ComplexMatrix nu = ComplexMatrix::Zero(m.charger_dim, m.charger_dim);
    for (int i = 0; i < m.charger_dim; ++i) nu(i, i) = m.charger_levels[i];

    m.h_b = qla::hermitian_operator(qla::kron(identity(m.charger_dim), hb_battery));
    m.h_a = qla::hermitian_operator(qla::kron(nu, identity(db)));

    ComplexMatrix hab = ComplexMatrix::Zero(m.joint_dim(), m.joint_dim());
    for (int i = 0; i < m.mode_count(); ++i) {
        const ComplexMatrix raise = embed_mode_op(m.mode_dims, i, raising_operator(m.mode_dims[i]));
        hab += m.coupling * qla::kron(ketbra(m.charger_dim, 0, i + 1), raise);
    }
    hab += hab.adjoint().eval();
    m.h_ab = qla::hermitian_operator(hab);

    m.h_total = qla::hermitian_operator(m.h_a.mat + m.h_b.mat + m.h_ab.mat, 1e-14);
    m.total_spectrum = qla::herm_eig(m.h_total);

    m.detunings.resize(m.mode_count());
    for (int i = 0; i < m.mode_count(); ++i) {
        m.detunings[i] = m.mode_freqs[i] - m.charger_levels[i + 1];
        if (std::abs(m.detunings[i]) > 0.1 * m.mode_freqs[i]) {
            std::ostringstream w;
            w << "detuning of mode " << i + 1 << " (" << m.detunings[i]
              << ") exceeds 10% of its frequency; outside the studied regime";
            m.warnings.push_back(w.str());
        }
    }
}

}  // namespace

int BatteryChargerModel::battery_dim() const {
    int d = 1;
    for (int di : mode_dims) d *= di;
    return d;
}

double BatteryChargerModel::min_mode_freq() const {
    return *std::min_element(mode_freqs.begin(), mode_freqs.end());
}

double BatteryChargerModel::capacity() const {
    double c = 0.0;
    for (int i = 0; i < mode_count(); ++i) c += (mode_dims[i] - 1) * mode_freqs[i];
    return c;
}

std::vector<int> BatteryChargerModel::joint_dims() const {
    std::vector<int> d{charger_dim};
    d.insert(d.end(), mode_dims.begin(), mode_dims.end());
    return d;
}

HermitianOperator BatteryChargerModel::mode_hamiltonian(int mode) const {
    if (mode < 0 || mode >= mode_count()) {
        throw DimensionError("mode_hamiltonian: mode index out of range");
    }
    return qla::hermitian_operator(mode_freqs[mode] * number_operator(mode_dims[mode]));
}

BatteryChargerModel build_single_mode(int d_b, double omega, double nu, double g) {
    if (d_b < 2) throw DomainError("build_single_mode: d_b must be >= 2");
    if (omega <= 0.0) throw DomainError("build_single_mode: omega must be positive");
    if (nu <= 0.0) throw DomainError("build_single_mode: nu must be positive");
    if (g <= 0.0) throw DomainError("build_single_mode: g must be positive");

    BatteryChargerModel m;
    m.charger_dim = 2;
    m.mode_dims = {d_b};
    m.mode_freqs = {omega};
    m.charger_levels = {0.0, nu};
    m.coupling = g;
    finalize(m);
    return m;
}

BatteryChargerModel build_multimode(const std::vector<int>& mode_dims,
                                    const std::vector<double>& mode_freqs,
                                    const std::vector<double>& charger_levels, double g) {
    const int n = static_cast<int>(mode_dims.size());
    if (n < 1) throw DomainError("build_multimode: need at least one mode");
    if (mode_freqs.size() != mode_dims.size()) {
        throw DimensionError("build_multimode: mode_dims and mode_freqs lengths differ");
    }
    if (static_cast<int>(charger_levels.size()) != n + 1) {
        throw DimensionError("build_multimode: charger_levels must have one entry per level");
    }
    if (charger_levels[0] != 0.0) {
        throw DomainError("build_multimode: nu_0 must be exactly 0");
    }
    for (int i = 0; i + 1 < n + 1; ++i) {
        if (charger_levels[i + 1] <= charger_levels[i]) {
            throw DomainError("build_multimode: charger levels must be strictly increasing");
        }
    }
    for (int i = 0; i < n; ++i) {
        if (mode_dims[i] < 2) throw DomainError("build_multimode: every mode needs >= 2 levels");
        if (mode_freqs[i] <= 0.0) throw DomainError("build_multimode: frequencies must be positive");
        for (int j = i + 1; j < n; ++j) {
            if (mode_freqs[i] == mode_freqs[j]) {
                throw DomainError("build_multimode: degenerate mode frequencies are not supported");
            }
        }
    }
    if (!std::isfinite(g) || g < 0.0) {
        throw DomainError("build_multimode: coupling must be finite and nonnegative");
    }

    BatteryChargerModel m;
    m.charger_dim = n + 1;
    m.mode_dims = mode_dims;
    m.mode_freqs = mode_freqs;
    m.charger_levels = charger_levels;
    m.coupling = g;
    finalize(m);
    return m;
}

ComplexMatrix lowering_operator(int d) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (int nn = 1; nn < d; ++nn) m(nn - 1, nn) = std::sqrt(static_cast<double>(nn));
    return m;
}

ComplexMatrix raising_operator(int d) { return lowering_operator(d).adjoint(); }

ComplexMatrix number_operator(int d) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (int nn = 0; nn < d; ++nn) m(nn, nn) = static_cast<double>(nn);
    return m;
}

ComplexMatrix excitation_operator(const BatteryChargerModel& m) {
    const int db = m.battery_dim();
    ComplexMatrix n_b = ComplexMatrix::Zero(db, db);
    for (int i = 0; i < m.mode_count(); ++i) {
        n_b += embed_mode_op(m.mode_dims, i, number_operator(m.mode_dims[i]));
    }
    ComplexMatrix n_a = ComplexMatrix::Zero(m.charger_dim, m.charger_dim);
    for (int i = 1; i < m.charger_dim; ++i) n_a(i, i) = 1.0;
    return qla::kron(identity(m.charger_dim), n_b) + qla::kron(n_a, identity(db));
}

BatteryInitState battery_ground(int d_b) {
    if (d_b < 1) throw DomainError("battery_ground: dimension must be positive");
    ComplexMatrix m = ComplexMatrix::Zero(d_b, d_b);
    m(0, 0) = 1.0;
    return BatteryInitState{BatteryInitKind::ground, DensityMatrix{std::move(m)}};
}

BatteryInitState battery_truncated(int d_b, const std::vector<double>& populations) {
    const int d = static_cast<int>(populations.size());
    if (d < 1 || d > d_b) {
        throw DimensionError("battery_truncated: need 1..d_b populations");
    }
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        if (populations[i] < 0.0) {
            std::ostringstream msg;
            msg << "battery_truncated: r_" << i << " = " << populations[i] << " violates r_" << i
                << " >= 0";
            throw DomainError(msg.str());
        }
        if (i > 0 && populations[i] > populations[i - 1] + 1e-12) {
            std::ostringstream msg;
            msg << "battery_truncated: populations violate passivity r_" << i - 1 << " >= r_" << i
                << " (" << populations[i - 1] << " < " << populations[i] << ")";
            throw DomainError(msg.str());
        }
        sum += populations[i];
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << "battery_truncated: populations sum to " << sum << ", violating sum r_n = 1";
        throw DomainError(msg.str());
    }
    ComplexMatrix m = ComplexMatrix::Zero(d_b, d_b);
    for (int i = 0; i < d; ++i) m(i, i) = populations[i];
    return BatteryInitState{BatteryInitKind::truncated, qla::sanitize_state(m)};
}

BatteryInitState battery_thermal(int d_b, double beta, double omega) {
    if (d_b < 1) throw DomainError("battery_thermal: dimension must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw DomainError("battery_thermal: beta must be finite and nonnegative");
    }
    if (omega <= 0.0) throw DomainError("battery_thermal: omega must be positive");
    // populations exp(-beta omega n) kept up to n = d_b - 1 and renormalized
    std::vector<double> pops(d_b);
    double z = 0.0;
    for (int nn = 0; nn < d_b; ++nn) {
        pops[nn] = std::exp(-beta * omega * nn);
        z += pops[nn];
    }
    ComplexMatrix m = ComplexMatrix::Zero(d_b, d_b);
    for (int nn = 0; nn < d_b; ++nn) m(nn, nn) = pops[nn] / z;
    return BatteryInitState{BatteryInitKind::thermal, DensityMatrix{std::move(m)}};
}

qla::DensityMatrix compose_battery_init(const BatteryChargerModel& m,
                                        const std::vector<BatteryInitState>& per_mode) {
    if (static_cast<int>(per_mode.size()) != m.mode_count()) {
        throw DimensionError("compose_battery_init: one init per mode required");
    }
    ComplexMatrix rho = per_mode[0].realized.mat;
    if (rho.rows() != m.mode_dims[0]) {
        throw DimensionError("compose_battery_init: mode 1 dimension mismatch");
    }
    for (int i = 1; i < m.mode_count(); ++i) {
        if (per_mode[i].realized.mat.rows() != m.mode_dims[i]) {
            throw DimensionError("compose_battery_init: mode dimension mismatch");
        }
        rho = qla::kron(rho, per_mode[i].realized.mat);
    }
    return DensityMatrix{std::move(rho)};
}

ChargerInitState charger_excited(int d_a, int level) {
    if (level < 0 || level >= d_a) {
        throw DomainError("charger_excited: level index out of range");
    }
    ComplexMatrix m = ComplexMatrix::Zero(d_a, d_a);
    m(level, level) = 1.0;
    return ChargerInitState{ChargerInitKind::excited_level, DensityMatrix{std::move(m)}};
}

ChargerInitState charger_superposition(int d_a, double theta, double phi) {
    if (d_a < 3) {
        throw DomainError("charger_superposition: needs a charger with at least 3 levels");
    }
    if (theta < 0.0 || theta > M_PI) {
        throw DomainError("charger_superposition: theta must lie in [0, pi]");
    }
    if (phi < 0.0 || phi >= 2.0 * M_PI) {
        throw DomainError("charger_superposition: phi must lie in [0, 2 pi)");
    }
    qla::ComplexVector psi = qla::ComplexVector::Zero(d_a);
    psi(1) = std::cos(theta / 2.0);
    psi(2) = std::polar(std::sin(theta / 2.0), phi);
    return ChargerInitState{ChargerInitKind::superposition,
                            DensityMatrix{psi * psi.adjoint()}};
}

bool is_passive(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.mat.rows() != h.mat.rows()) {
        throw DimensionError("is_passive: dimension mismatch");
    }
    const qla::Spectrum spec = qla::herm_eig(h);
    const ComplexMatrix sigma = spec.eigenvectors.adjoint() * rho.mat * spec.eigenvectors;
    ComplexMatrix off = sigma;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 1e-10) return false;
    for (Eigen::Index i = 0; i + 1 < sigma.rows(); ++i) {
        if (sigma(i + 1, i + 1).real() > sigma(i, i).real() + 1e-12) return false;
    }
    return true;
}

}  // namespace qbattery::model
