// ergo.hpp: extractable work. Passive companions, ergotropy, measurement
// ensembles on the charger, daemonic ergotropy and the advantage functional.

#pragma once

#include "qbattery/model.hpp"
#include "qbattery/qla.hpp"

#include <vector>

namespace qbattery::ergo {

// Complete orthonormal set of charger-space vectors (columns) defining a
// projective measurement, together with its generating parameters.
struct MeasurementBasis {
    int charger_dim = 0;
    qla::ComplexMatrix vectors;
    std::vector<double> params;
};

// Validates orthonormality and completeness to 1e-10.
MeasurementBasis make_basis(qla::ComplexMatrix vectors, std::vector<double> params = {});

struct Outcome {
    int index = 0;  // basis-vector index
    double prob = 0.0;
    qla::DensityMatrix post;  // battery-space state
};

// Zero-probability outcomes (prob <= 1e-12) are omitted; their mass is
// exactly 0 in every sum.
struct MeasuredEnsemble {
    std::vector<Outcome> outcomes;
};

// Eigenvalues of rho sorted descending, attached to the energy eigenvectors
// of h sorted ascending.
qla::DensityMatrix passive_state(const qla::DensityMatrix& rho, const qla::HermitianOperator& h);

// Tr[h (rho - passive(rho))], floored at zero against roundoff.
double ergotropy(const qla::DensityMatrix& rho, const qla::HermitianOperator& h);

// Ergotropy of the battery reduction of a joint charger (x) battery state.
double battery_ergotropy(const qla::DensityMatrix& rho_ab, const model::BatteryChargerModel& m);
double battery_ergotropy_raw(const qla::ComplexMatrix& rho_ab, const model::BatteryChargerModel& m);

MeasuredEnsemble measure_charger(const qla::DensityMatrix& rho_ab,
                                 const model::BatteryChargerModel& m,
                                 const MeasurementBasis& basis);

// Probability-weighted mean of outcome ergotropies; >= the plain ergotropy of
// the reduced battery state by convexity.
double daemonic_ergotropy(const qla::DensityMatrix& rho_ab, const model::BatteryChargerModel& m,
                          const MeasurementBasis& basis);

// Allocation-light path for optimizer loops. `basis_vectors` are the columns
// of an orthonormal charger basis; no validation is performed.
double daemonic_ergotropy_raw(const qla::ComplexMatrix& rho_ab,
                              const model::BatteryChargerModel& m,
                              const qla::ComplexMatrix& basis_vectors);

// daemonic_ergotropy - ergotropy of the reduced battery state.
double advantage(const qla::DensityMatrix& rho_ab, const model::BatteryChargerModel& m,
                 const MeasurementBasis& basis);

}  // namespace qbattery::ergo
