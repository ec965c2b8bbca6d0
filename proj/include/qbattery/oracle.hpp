// oracle.hpp: closed-form reference values for the Jaynes-Cummings charging
// cycle, used as ground truth in tests and as fast paths in sweeps.
//
// All two-mode expressions are written in the frame rotating with the free
// Hamiltonian; at resonance the joint propagator factors as
// exp(-i H0 t) exp(-i H_ab t), so populations and ergotropies agree with the
// lab frame and cycle composition uses the rotating-frame convention.

#pragma once

#include "qbattery/qla.hpp"

#include <complex>
#include <vector>

namespace qbattery::oracle {

// Rabi frequency of the n-excitation block, sqrt(g^2 n + delta^2 / 4).
double rabi_frequency(int n, double g, double delta);

struct JCCoefficients {
    int n = 0;
    double rabi = 0.0;         // Omega_n
    double a = 0.0;            // A_n(t), population transferred up
    double b = 0.0;            // B_n(t) = 1 - A_n(t)
    std::complex<double> c{};  // C_n(t), coherence of the 2x2 block
};

// A_n = g^2 n sin^2(Omega_n t) / Omega_n^2
// B_n = (4 g^2 n cos^2(Omega_n t) + delta^2) / (4 Omega_n^2)
// C_n = g sqrt(n) / (2 Omega_n^2) * (delta sin^2(Omega_n t) - i Omega_n sin(2 Omega_n t))
JCCoefficients jc_coeffs(int n, double g, double delta, double t);

// One charging round on Fock populations:
//   r'_0 = r_0 B_1,   r'_i = r_{i-1} A_i + r_i B_{i+1},
//   r'_{top} = r_{top} + r_{top-1} A_{top}.
std::vector<double> recursion_step(const std::vector<double>& r_prev, double g, double delta,
                                   double t);

// Ergotropy of the once-charged vacuum: omega (A_1 - B_1) when A_1 > B_1,
// else 0. Undefined (error) when delta^2 > 4 g^2, where it never turns on.
double ergo_vacuum(double g, double delta, double omega, double t);

// Boundary angle of the nonzero-ergotropy interval,
// acos(sqrt((4 g^2 - delta^2) / (8 g^2))).
double vacuum_interval_angle(double g, double delta);

// Measurement-independent daemonic ergotropy of the charged vacuum,
// omega A_1(t).
double daemonic_vacuum(double g, double delta, double omega, double t);

// Daemonic gap at the charging optimum, omega delta^2 / (4 Omega_1^2).
double gap_vacuum(double g, double delta, double omega);

// ------------------------- double mode, qutrit charger -----------------------
// Charger state cos(theta/2)|e1> + e^{i phi} sin(theta/2)|e2>, both modes from
// their ground states, resonant coupling g. States live on 3 (x) 3 battery
// levels so they can be compared entrywise with dense evolution.

struct TwoModeFirstCycle {
    qla::DensityMatrix rho_b;       // 9-dim collective state at time t
    double collective_ergotropy;    // against omega_1 n_1 + omega_2 n_2
    double mode1_ergotropy;
    double mode2_ergotropy;
};

TwoModeFirstCycle two_mode_first_cycle(double theta, double phi, double g, double omega1,
                                       double omega2, double t);

// First maximizer of the first-cycle collective ergotropy, pi / (2 g).
double two_mode_first_tau(double g, int ell = 0);

struct TwoModeSecondCycle {
    qla::DensityMatrix rho_b;   // 9-dim collective state at time t into round 2
    qla::DensityMatrix rho_b1;  // 3-dim reduced states
    qla::DensityMatrix rho_b2;
};

// Second round applied to the traced-out first-cycle output at tau_(1).
// Every excitation block oscillates at sqrt(2) g, so populations go as
// sin^2(sqrt(2) g t) and the collective maximum sits at
// tau_(2) = (2 ell + 1) pi / (2 sqrt(2) g).
TwoModeSecondCycle two_mode_second_cycle(double theta, double phi, double g, double t);

double two_mode_second_tau(double g, int ell = 0);

}  // namespace qbattery::oracle
