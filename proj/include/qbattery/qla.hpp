// qla.hpp: dense complex linear algebra for small quantum systems.
// Tensor products, partial traces, Hermitian eigensystems, exact unitary
// propagation and projective measurements, all on top of Eigen.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qbattery {

// Thrown when operand shapes are inconsistent.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a value violates a physical constraint (non-passive
// populations, non-projector operators, out-of-range angles, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace qla {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kEigenvalueClamp = 1e-12;
inline constexpr double kZeroProbability = 1e-12;

// ----------------------------- domain types ---------------------------------

// Trace-one Hermitian positive-semidefinite state.
struct DensityMatrix {
    ComplexMatrix mat;

    int dim() const { return static_cast<int>(mat.rows()); }
};

// Hermitian to 1e-12; used for Hamiltonians and observables.
struct HermitianOperator {
    ComplexMatrix mat;

    int dim() const { return static_cast<int>(mat.rows()); }
};

// Eigensystem of a Hermitian operator, eigenvalues ascending.
struct Spectrum {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;  // columns, orthonormal
};

// ------------------------------ construction --------------------------------

// Validating constructor: rejects non-square, non-Hermitian, non-unit-trace
// or indefinite input.
DensityMatrix density_matrix(const ComplexMatrix& m);

// Producer-side constructor: symmetrizes, clamps eigenvalues in
// [-kEigenvalueClamp, 0) to zero and renormalizes the trace when clamping
// occurred. Used for states coming out of reductions and measurements.
DensityMatrix sanitize_state(const ComplexMatrix& m);

HermitianOperator hermitian_operator(const ComplexMatrix& m, double tol = 1e-12);

// Checks the DensityMatrix invariants, returns a human-readable violation
// description or nothing.
std::optional<std::string> check_state(const DensityMatrix& rho,
                                       double herm_tol = kHermitianTol,
                                       double trace_tol = kTraceTol,
                                       double psd_tol = kPsdTol);

// ------------------------------- operations ---------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Reduced state over the kept factors (order preserved). `dims` lists the
// tensor-factor dimensions of rho, row-major convention as produced by kron.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep);
ComplexMatrix partial_trace_raw(const ComplexMatrix& m, const std::vector<int>& dims,
                                const std::vector<int>& keep);

Spectrum herm_eig(const HermitianOperator& h);

// U rho U^dag with U = exp(-i h t), exact to eigendecomposition accuracy.
DensityMatrix evolve(const HermitianOperator& h, double t, const DensityMatrix& rho);

struct ProjectionResult {
    double prob = 0.0;
    std::optional<DensityMatrix> post;  // absent when prob <= kZeroProbability
};

// p must be a projector on the full space (p^2 = p = p^dag).
ProjectionResult apply_projector(const DensityMatrix& rho, const ComplexMatrix& p);

// -------------------------- repeated propagation -----------------------------

// Eigendecomposes a Hamiltonian once and evolves arbitrary states for many
// times t. For sweeps, move the state to the eigenbasis once and call
// evolve_in_eigenbasis per grid point.
class Propagator {
public:
    explicit Propagator(const HermitianOperator& h);
    explicit Propagator(Spectrum spec);

    DensityMatrix evolve(double t, const DensityMatrix& rho0) const;

    ComplexMatrix to_eigenbasis(const ComplexMatrix& rho0) const;
    ComplexMatrix evolve_in_eigenbasis(double t, const ComplexMatrix& w) const;

    const Spectrum& spectrum() const { return spec_; }

private:
    Spectrum spec_;
};

}  // namespace qla
}  // namespace qbattery
