// cycle.hpp: the charging cycle. Joint evolution with a fresh charger followed
// by tracing the charger out, ergotropy maximization over the evolution time,
// repeated rounds until full charge, and multi-mode simultaneous charging.
//
// Battery states are recorded in the frame rotating with the battery
// Hamiltonian. The conjugation by exp(i H_b t) leaves populations,
// eigenvalues and every ergotropic quantity of the round unchanged (it is
// diagonal in the Fock basis), and makes composition of rounds match the
// closed forms in `oracle` for resonant multi-mode models.

#pragma once

#include "qbattery/measopt.hpp"
#include "qbattery/model.hpp"
#include "qbattery/qla.hpp"

#include <optional>
#include <vector>

namespace qbattery::cycle {

struct TimeWindow {
    double lo = 0.0;
    double hi = 0.0;
};

// First period of the slowest coupled block: (0, 2 pi / Omega_1] for the
// single-mode model, (0, 2 pi / g] for multi-mode ones.
TimeWindow default_window(const model::BatteryChargerModel& m);

// One application of the charging map: evolve charger (x) battery for time t
// under the joint Hamiltonian, trace out the charger.
qla::DensityMatrix charge_once(const model::BatteryChargerModel& m,
                               const qla::DensityMatrix& battery,
                               const qla::DensityMatrix& charger, double t);

struct FindTauResult {
    std::optional<double> tau;  // absent when the ergotropy vanishes on the window
    double e_max = 0.0;
};

// Grid scan (2001 points) + golden-section refinement + parabolic polish.
// Returns the smallest maximizer when the maximum is attained several times.
FindTauResult find_tau(const model::BatteryChargerModel& m, const qla::DensityMatrix& battery,
                       const qla::DensityMatrix& charger,
                       std::optional<TimeWindow> window = std::nullopt);

struct CycleRecord {
    int m = 0;
    double tau = 0.0;
    double e_max = 0.0;
    std::vector<double> populations;       // battery Fock-basis diagonal after the round
    std::vector<double> mode_ergotropies;  // per mode; empty for single-mode models
    bool simultaneous = false;             // multi-mode: all modes charged at tau
    std::optional<measopt::DaemonicReport> daemonic;
};

enum class Termination { full_charge, max_cycles, stalled };

struct ChargeTrajectory {
    std::vector<CycleRecord> records;
    Termination terminated = Termination::max_cycles;

    // First round whose daemonic gap is at or below the threshold.
    std::optional<int> first_gapless(double threshold = measopt::kGaplessThreshold) const;
};

struct RepeatOptions {
    int max_cycles = 1;
    bool with_daemonic = false;
    measopt::OptBudget budget{};
    std::optional<TimeWindow> window{};
};

// Fresh copy of `charger` each round; stops on full charge
// (e_max >= capacity - 1e-6 min omega), on max_cycles, or once the gain
// stays below 1e-9 for three consecutive rounds.
ChargeTrajectory repeat_cycles(const model::BatteryChargerModel& m,
                               const qla::DensityMatrix& battery0,
                               const qla::DensityMatrix& charger, const RepeatOptions& opts);

// Ergotropy of each single-mode reduction against its own mode Hamiltonian.
std::vector<double> per_mode_ergotropies(const qla::DensityMatrix& battery,
                                         const model::BatteryChargerModel& m);

// Per recorded round: collective and every individual mode strictly charged,
// threshold 1e-9 min omega.
std::vector<bool> simultaneous_charging_check(const ChargeTrajectory& traj,
                                              const model::BatteryChargerModel& m);

}  // namespace qbattery::cycle
