#include "qbattery/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbattery::oracle {

using qla::ComplexMatrix;
using qla::ComplexVector;
using qla::DensityMatrix;

double rabi_frequency(int n, double g, double delta) {
    if (n < 1) throw DomainError("rabi_frequency: n must be >= 1");
    return std::sqrt(g * g * n + 0.25 * delta * delta);
}

JCCoefficients jc_coeffs(int n, double g, double delta, double t) {
    if (n < 1) throw DomainError("jc_coeffs: no coupling block for n < 1");
    const double omega_n = rabi_frequency(n, g, delta);
    const double s = std::sin(omega_n * t);
    const double c = std::cos(omega_n * t);
    const double om2 = omega_n * omega_n;
    JCCoefficients out;
    out.n = n;
    out.rabi = omega_n;
    out.a = g * g * n * s * s / om2;
    out.b = (4.0 * g * g * n * c * c + delta * delta) / (4.0 * om2);
    out.c = g * std::sqrt(static_cast<double>(n)) / (2.0 * om2) *
            std::complex<double>(delta * s * s, -omega_n * std::sin(2.0 * omega_n * t));
    return out;
}

std::vector<double> recursion_step(const std::vector<double>& r_prev, double g, double delta,
                                   double t) {
    const int d_b = static_cast<int>(r_prev.size());
    if (d_b < 2) throw DimensionError("recursion_step: need at least two levels");
    const double sum = std::accumulate(r_prev.begin(), r_prev.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-10) {
        throw DomainError("recursion_step: input populations must sum to 1");
    }

    std::vector<double> a(d_b), b(d_b);  // a[n], b[n] for blocks n = 1..d_b-1
    for (int n = 1; n < d_b; ++n) {
        const JCCoefficients jc = jc_coeffs(n, g, delta, t);
        a[n] = jc.a;
        b[n] = jc.b;
    }

    std::vector<double> r(d_b);
    r[0] = r_prev[0] * b[1];
    for (int i = 1; i <= d_b - 2; ++i) {
        r[i] = r_prev[i - 1] * a[i] + (i + 1 < d_b ? r_prev[i] * b[i + 1] : 0.0);
    }
    r[d_b - 1] = r_prev[d_b - 1] + r_prev[d_b - 2] * a[d_b - 1];
    return r;
}

double vacuum_interval_angle(double g, double delta) {
    const double arg = (4.0 * g * g - delta * delta) / (8.0 * g * g);
    if (arg < 0.0) {
        throw DomainError("vacuum_interval_angle: interval undefined for delta^2 > 4 g^2");
    }
    return std::acos(std::sqrt(arg));
}

double ergo_vacuum(double g, double delta, double omega, double t) {
    if (delta * delta > 4.0 * g * g) {
        throw DomainError("ergo_vacuum: undefined for delta^2 > 4 g^2");
    }
    const JCCoefficients jc = jc_coeffs(1, g, delta, t);
    return jc.a > jc.b ? omega * (jc.a - jc.b) : 0.0;
}

double daemonic_vacuum(double g, double delta, double omega, double t) {
    return omega * jc_coeffs(1, g, delta, t).a;
}

double gap_vacuum(double g, double delta, double omega) {
    const double om1 = rabi_frequency(1, g, delta);
    return omega * delta * delta / (4.0 * om1 * om1);
}

namespace {

// index of |n1 n2> in the 3 (x) 3 battery space
inline int idx(int n1, int n2) { return 3 * n1 + n2; }

// Ergotropy of a diagonal 3-level state against omega * n.
double diag3_ergotropy(double p0, double p1, double p2, double omega) {
    const double energy = omega * (p1 + 2.0 * p2);
    double q[3] = {p0, p1, p2};
    std::sort(q, q + 3, std::greater<double>());
    const double passive = omega * (q[1] + 2.0 * q[2]);
    return std::max(0.0, energy - passive);
}

}  // namespace

TwoModeFirstCycle two_mode_first_cycle(double theta, double phi, double g, double omega1,
                                       double omega2, double t) {
    if (omega1 <= 0.0 || omega2 <= 0.0 || omega1 == omega2) {
        throw DomainError("two_mode_first_cycle: frequencies must be positive and distinct");
    }
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const double sg = std::sin(g * t), cg = std::cos(g * t);
    const double s2 = sg * sg, c2 = cg * cg;

    ComplexVector u = ComplexVector::Zero(9);
    u(idx(1, 0)) = c;
    u(idx(0, 1)) = std::polar(s, phi);
    ComplexMatrix rho = s2 * (u * u.adjoint());
    rho(idx(0, 0), idx(0, 0)) += c2;

    TwoModeFirstCycle out{qla::sanitize_state(rho), 0.0, 0.0, 0.0};

    // Eigenvalues of rho_b are {sin^2 gt, cos^2 gt, 0, ...}; the passive
    // companion puts the smaller of the two on the lowest excited level.
    const double stored = s2 * (omega1 * c * c + omega2 * s * s);
    out.collective_ergotropy =
        std::max(0.0, stored - std::min(omega1, omega2) * std::min(s2, c2));

    out.mode1_ergotropy = diag3_ergotropy(s2 * s * s + c2, s2 * c * c, 0.0, omega1);
    out.mode2_ergotropy = diag3_ergotropy(s2 * c * c + c2, s2 * s * s, 0.0, omega2);
    return out;
}

double two_mode_first_tau(double g, int ell) {
    if (g <= 0.0) throw DomainError("two_mode_first_tau: g must be positive");
    return (2.0 * ell + 1.0) * M_PI / (2.0 * g);
}

TwoModeSecondCycle two_mode_second_cycle(double theta, double phi, double g, double t) {
    if (g <= 0.0) throw DomainError("two_mode_second_cycle: g must be positive");
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const double sr = std::sin(std::sqrt(2.0) * g * t);
    const double cr = std::cos(std::sqrt(2.0) * g * t);
    const double s2 = sr * sr, c2 = cr * cr;
    const std::complex<double> ph = std::polar(1.0, phi);

    // Transferred branch: c^2 |20> + sqrt(2) e^{i phi} c s |11> + e^{2 i phi} s^2 |02>.
    ComplexVector v = ComplexVector::Zero(9);
    v(idx(2, 0)) = c * c;
    v(idx(1, 1)) = std::sqrt(2.0) * ph * c * s;
    v(idx(0, 2)) = ph * ph * s * s;
    // Retained branch: the first-cycle output c |10> + e^{i phi} s |01>.
    ComplexVector w = ComplexVector::Zero(9);
    w(idx(1, 0)) = c;
    w(idx(0, 1)) = ph * s;

    ComplexMatrix rho = s2 * (v * v.adjoint()) + c2 * (w * w.adjoint());

    TwoModeSecondCycle out{qla::sanitize_state(rho), DensityMatrix{}, DensityMatrix{}};

    const double c4 = c * c * c * c, s4 = s * s * s * s;
    const double half_sin2 = 2.0 * c * c * s * s;  // sin^2(theta) / 2

    ComplexMatrix m1 = ComplexMatrix::Zero(3, 3);
    m1(0, 0) = s2 * s4 + c2 * s * s;
    m1(1, 1) = s2 * half_sin2 + c2 * c * c;
    m1(2, 2) = s2 * c4;
    out.rho_b1 = qla::sanitize_state(m1);

    ComplexMatrix m2 = ComplexMatrix::Zero(3, 3);
    m2(0, 0) = s2 * c4 + c2 * c * c;
    m2(1, 1) = s2 * half_sin2 + c2 * s * s;
    m2(2, 2) = s2 * s4;
    out.rho_b2 = qla::sanitize_state(m2);
    return out;
}

double two_mode_second_tau(double g, int ell) {
    if (g <= 0.0) throw DomainError("two_mode_second_tau: g must be positive");
    return (2.0 * ell + 1.0) * M_PI / (2.0 * std::sqrt(2.0) * g);
}

}  // namespace qbattery::oracle
