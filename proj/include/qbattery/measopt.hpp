// measopt.hpp: optimization of daemonic ergotropy over the projective
// measurement manifold of the charger. Deterministic grid plus coordinate
// descent for the qubit, fixed-seed multistarts for the qudit.

#pragma once

#include "qbattery/ergo.hpp"
#include "qbattery/model.hpp"

#include <cstdint>
#include <vector>

namespace qbattery::measopt {

struct QubitBasisParams {
    double alpha = 0.0;  // in [0, pi]
    double gamma = 0.0;  // in [0, 2 pi)
};

// Flat (angle, phase) pairs for a fixed sequence of two-level rotations,
// d_a (d_a - 1) reals in total. The generated basis is surjective onto all
// orthonormal bases up to per-vector phases, which daemonic quantities
// cannot see.
struct QuditBasisParams {
    std::vector<double> angles;
};

// The two vectors cos(a/2)|e0> + e^{i c} sin(a/2)|e1> and
// sin(a/2)|e0> - e^{i c} cos(a/2)|e1>.
ergo::MeasurementBasis qubit_basis(const QubitBasisParams& p);

ergo::MeasurementBasis qudit_basis(int dim, const QuditBasisParams& p);

enum class OptSense { minimize, maximize };

struct OptBudget {
    int alpha_grid = 181;    // qubit alpha samples on [0, pi]
    int gamma_grid = 72;     // qubit gamma samples on [0, 2 pi)
    int multistarts = 64;    // qudit starts, first one is the computational basis
    long max_evals = 400000;
    double param_tol = 1e-6;
    std::uint64_t seed = 0;
};

struct OptResult {
    double value = 0.0;
    std::vector<double> params;
    long evaluations = 0;
    bool converged = false;
};

// Heuristic global optimum of the daemonic ergotropy over the basis manifold;
// refinement never leaves the bracket established by the sampled grid.
OptResult optimize_daemonic(const qla::DensityMatrix& rho_ab,
                            const model::BatteryChargerModel& m, OptSense sense,
                            const OptBudget& budget = {});

struct DaemonicReport {
    double t = 0.0;
    double ergotropy = 0.0;
    double daemonic_min = 0.0;
    double daemonic_max = 0.0;
    double gap = 0.0;   // daemonic_min - ergotropy
    double gain = 0.0;  // daemonic_max - ergotropy
    double band = 0.0;  // daemonic_max - daemonic_min
    std::vector<double> argmin_params;
    std::vector<double> argmax_params;
    bool min_converged = false;
    bool max_converged = false;
};

DaemonicReport daemonic_report(const qla::DensityMatrix& rho_ab,
                               const model::BatteryChargerModel& m, double t,
                               const OptBudget& budget = {});

inline constexpr double kGaplessThreshold = 1e-3;

inline bool gapless(const DaemonicReport& r, double threshold = kGaplessThreshold) {
    return r.gap <= threshold;
}

}  // namespace qbattery::measopt
