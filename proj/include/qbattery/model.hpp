// model.hpp: battery-charger Hamiltonians and initial states.
// Single harmonic mode + qubit charger, or several non-degenerate modes +
// qudit charger where mode i couples to the {|e0>, |ei>} transition.

#pragma once

#include "qbattery/qla.hpp"

#include <string>
#include <vector>

namespace qbattery::model {

// Joint-space factor ordering is fixed as charger (x) mode_1 (x) mode_2 ...
struct BatteryChargerModel {
    int charger_dim = 0;                  // d_a
    std::vector<int> mode_dims;           // d_{b_i}
    std::vector<double> mode_freqs;       // omega_i, hbar = 1
    std::vector<double> charger_levels;   // nu_0..nu_{d_a-1}, nu_0 = 0
    double coupling = 0.0;                // g
    std::vector<double> detunings;        // delta_i = omega_i - nu_i

    qla::HermitianOperator h_b, h_a, h_ab, h_total;  // joint space
    qla::HermitianOperator h_battery;                // battery space only

    qla::RealVector battery_energies;         // diagonal of h_battery (Fock order)
    qla::RealVector battery_energies_sorted;  // ascending
    qla::Spectrum total_spectrum;             // of h_total, computed once

    std::vector<std::string> warnings;

    int mode_count() const { return static_cast<int>(mode_dims.size()); }
    bool single_mode() const { return mode_count() == 1; }
    int battery_dim() const;
    int joint_dim() const { return charger_dim * battery_dim(); }
    double min_mode_freq() const;
    double capacity() const;  // sum_i (d_i - 1) omega_i
    std::vector<int> joint_dims() const;  // {d_a, d_1, d_2, ...}

    qla::HermitianOperator mode_hamiltonian(int mode) const;  // omega_i * n on d_i levels
};

BatteryChargerModel build_single_mode(int d_b, double omega, double nu, double g);
BatteryChargerModel build_multimode(const std::vector<int>& mode_dims,
                                    const std::vector<double>& mode_freqs,
                                    const std::vector<double>& charger_levels, double g);

// Ladder operators of a d-level truncated mode.
qla::ComplexMatrix lowering_operator(int d);
qla::ComplexMatrix raising_operator(int d);
qla::ComplexMatrix number_operator(int d);

// Total excitation number Sum_i n_i + Sum_{i>=1} |e_i><e_i|; commutes with
// h_total for every constructed model.
qla::ComplexMatrix excitation_operator(const BatteryChargerModel& m);

// ------------------------------ initial states -------------------------------

enum class BatteryInitKind { ground, truncated, thermal };

struct BatteryInitState {
    BatteryInitKind kind;
    qla::DensityMatrix realized;  // diagonal in the Fock basis
};

// Single-mode passive initial states on d_b levels.
BatteryInitState battery_ground(int d_b);
// Populations must be descending, nonnegative, normalized; the violated
// inequality is named in the error.
BatteryInitState battery_truncated(int d_b, const std::vector<double>& populations);
// Boltzmann populations at inverse temperature beta (k_B = 1), truncated at
// d_b levels and renormalized.
BatteryInitState battery_thermal(int d_b, double beta, double omega);

// Tensor product of one init per mode. Each factor is passive for its own
// mode; the product need not be passive for the collective battery (a
// truncated mixture on a taller mode leaves empty levels below occupied
// ones), so collective passivity is reported by is_passive, not enforced.
qla::DensityMatrix compose_battery_init(const BatteryChargerModel& m,
                                        const std::vector<BatteryInitState>& per_mode);

enum class ChargerInitKind { excited_level, superposition };

struct ChargerInitState {
    ChargerInitKind kind;
    qla::DensityMatrix realized;  // pure
};

ChargerInitState charger_excited(int d_a, int level);
// cos(theta/2)|e1> + e^{i phi} sin(theta/2)|e2>, requires d_a >= 3.
ChargerInitState charger_superposition(int d_a, double theta, double phi);

// True iff rho is diagonal in the energy eigenbasis of h with populations
// non-increasing in energy.
bool is_passive(const qla::DensityMatrix& rho, const qla::HermitianOperator& h);

}  // namespace qbattery::model
