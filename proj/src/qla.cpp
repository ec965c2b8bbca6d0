#include "qbattery/qla.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <sstream>

namespace qbattery::qla {

namespace {

void require_square(const ComplexMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(who) + ": matrix must be square and non-empty");
    }
}

double hermitian_defect(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_finite(const ComplexMatrix& m, const char* who) {
    if (!m.allFinite()) {
        throw DomainError(std::string(who) + ": entries must be finite");
    }
}

}  // namespace

DensityMatrix density_matrix(const ComplexMatrix& m) {
    require_square(m, "density_matrix");
    require_finite(m, "density_matrix");
    if (hermitian_defect(m) > kHermitianTol) {
        throw DomainError("density_matrix: input is not Hermitian within 1e-10");
    }
    if (std::abs(m.trace().real() - 1.0) > kTraceTol || std::abs(m.trace().imag()) > kTraceTol) {
        throw DomainError("density_matrix: trace differs from 1 beyond 1e-10");
    }
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol) {
        throw DomainError("density_matrix: negative eigenvalue beyond 1e-10");
    }
    return DensityMatrix{std::move(h)};
}

DensityMatrix sanitize_state(const ComplexMatrix& m) {
    require_square(m, "sanitize_state");
    require_finite(m, "sanitize_state");
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    RealVector ev = es.eigenvalues();
    bool clamped = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0) {
            if (ev(i) < -kEigenvalueClamp) {
                throw DomainError("sanitize_state: eigenvalue below -1e-12, not a state");
            }
            ev(i) = 0.0;
            clamped = true;
        }
    }
    if (!clamped) {
        return DensityMatrix{std::move(h)};
    }
    double tr = ev.sum();
    if (tr <= 0.0) {
        throw DomainError("sanitize_state: vanishing trace");
    }
    ev /= tr;
    const ComplexMatrix& v = es.eigenvectors();
    return DensityMatrix{v * ev.asDiagonal() * v.adjoint()};
}

HermitianOperator hermitian_operator(const ComplexMatrix& m, double tol) {
    require_square(m, "hermitian_operator");
    require_finite(m, "hermitian_operator");
    if (hermitian_defect(m) > tol) {
        throw DomainError("hermitian_operator: input is not Hermitian");
    }
    return HermitianOperator{0.5 * (m + m.adjoint())};
}

std::optional<std::string> check_state(const DensityMatrix& rho, double herm_tol,
                                       double trace_tol, double psd_tol) {
    std::ostringstream msg;
    const double hd = hermitian_defect(rho.mat);
    if (hd > herm_tol) {
        msg << "hermitian defect " << hd;
        return msg.str();
    }
    const double td = std::abs(rho.mat.trace() - std::complex<double>(1.0, 0.0));
    if (td > trace_tol) {
        msg << "trace defect " << td;
        return msg.str();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.mat, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -psd_tol) {
        msg << "negative eigenvalue " << lmin;
        return msg.str();
    }
    return std::nullopt;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix partial_trace_raw(const ComplexMatrix& m, const std::vector<int>& dims,
                                const std::vector<int>& keep) {
    require_square(m, "partial_trace");
    long long total = 1;
    for (int d : dims) {
        if (d <= 0) throw DimensionError("partial_trace: factor dimensions must be positive");
        total *= d;
    }
    if (total != m.rows()) {
        throw DimensionError("partial_trace: product of dims does not match matrix dimension");
    }
    if (keep.empty()) {
        throw DimensionError("partial_trace: keep set must be non-empty");
    }
    const int nf = static_cast<int>(dims.size());
    std::vector<bool> kept(nf, false);
    for (int k : keep) {
        if (k < 0 || k >= nf) throw DimensionError("partial_trace: keep index out of range");
        if (kept[k]) throw DimensionError("partial_trace: duplicate keep index");
        kept[k] = true;
    }

    // strides of each factor in the row-major composite index
    std::vector<long long> stride(nf, 1);
    for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

    std::vector<int> kept_idx, traced_idx;
    for (int f = 0; f < nf; ++f) (kept[f] ? kept_idx : traced_idx).push_back(f);

    long long dk = 1, dt = 1;
    for (int f : kept_idx) dk *= dims[f];
    for (int f : traced_idx) dt *= dims[f];

    // composite index of the kept (resp. traced) subsystem -> offset in the full index
    auto offsets = [&](const std::vector<int>& factors, long long count) {
        std::vector<long long> off(count, 0);
        for (long long c = 0; c < count; ++c) {
            long long rem = c;
            for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
                off[c] += (rem % dims[*it]) * stride[*it];
                rem /= dims[*it];
            }
        }
        return off;
    };
    const std::vector<long long> koff = offsets(kept_idx, dk);
    const std::vector<long long> toff = offsets(traced_idx, dt);

    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (long long i = 0; i < dk; ++i) {
        for (long long j = 0; j < dk; ++j) {
            std::complex<double> sum = 0.0;
            for (long long s = 0; s < dt; ++s) {
                sum += m(koff[i] + toff[s], koff[j] + toff[s]);
            }
            out(i, j) = sum;
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
    return sanitize_state(partial_trace_raw(rho.mat, dims, keep));
}

Spectrum herm_eig(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.mat);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("herm_eig: eigendecomposition failed");
    }
    return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

DensityMatrix evolve(const HermitianOperator& h, double t, const DensityMatrix& rho) {
    return Propagator(h).evolve(t, rho);
}

ProjectionResult apply_projector(const DensityMatrix& rho, const ComplexMatrix& p) {
    require_square(p, "apply_projector");
    if (p.rows() != rho.mat.rows()) {
        throw DimensionError("apply_projector: projector dimension mismatch");
    }
    if (hermitian_defect(p) > kHermitianTol ||
        (p * p - p).cwiseAbs().maxCoeff() > kHermitianTol) {
        throw DomainError("apply_projector: operator is not a projector (p^2 = p = p^dag)");
    }
    ComplexMatrix prp = p * rho.mat * p;
    const double prob = prp.trace().real();
    if (prob <= kZeroProbability) {
        return ProjectionResult{0.0, std::nullopt};
    }
    return ProjectionResult{prob, sanitize_state(prp / prob)};
}

Propagator::Propagator(const HermitianOperator& h) : spec_(herm_eig(h)) {}

Propagator::Propagator(Spectrum spec) : spec_(std::move(spec)) {}

ComplexMatrix Propagator::to_eigenbasis(const ComplexMatrix& rho0) const {
    if (rho0.rows() != spec_.eigenvectors.rows() || rho0.cols() != spec_.eigenvectors.rows()) {
        throw DimensionError("Propagator: state dimension mismatch");
    }
    return spec_.eigenvectors.adjoint() * rho0 * spec_.eigenvectors;
}

ComplexMatrix Propagator::evolve_in_eigenbasis(double t, const ComplexMatrix& w) const {
    if (!std::isfinite(t)) {
        throw DomainError("Propagator: time must be finite");
    }
    const Eigen::Index n = spec_.eigenvalues.size();
    ComplexVector phase(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phase(i) = std::polar(1.0, -spec_.eigenvalues(i) * t);
    }
    // rho(t) = V (phase . w . phase^*) V^dag
    ComplexMatrix rotated = phase.asDiagonal() * w * phase.conjugate().asDiagonal();
    return spec_.eigenvectors * rotated * spec_.eigenvectors.adjoint();
}

DensityMatrix Propagator::evolve(double t, const DensityMatrix& rho0) const {
    return sanitize_state(evolve_in_eigenbasis(t, to_eigenbasis(rho0.mat)));
}

}  // namespace qbattery::qla
