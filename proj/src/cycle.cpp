#include "qbattery/cycle.hpp"

#include "qbattery/ergo.hpp"
#include "qbattery/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qbattery::cycle {

using qla::ComplexMatrix;
using qla::DensityMatrix;

namespace {

constexpr int kGridPoints = 2001;
constexpr double kTimeTol = 1e-10;
constexpr double kStallGain = 1e-9;
constexpr int kStallRounds = 3;

void require_inputs(const model::BatteryChargerModel& m, const DensityMatrix& battery,
                    const DensityMatrix& charger, const char* who) {
    if (battery.dim() != m.battery_dim()) {
        throw DimensionError(std::string(who) + ": battery state dimension mismatch");
    }
    if (charger.dim() != m.charger_dim) {
        throw DimensionError(std::string(who) + ": charger state dimension mismatch");
    }
}

// Move the traced-out battery state to the frame rotating with H_b.
void rotate_to_battery_frame(const model::BatteryChargerModel& m, double t, ComplexMatrix& rb) {
    const int d = m.battery_dim();
    qla::ComplexVector ph(d);
    for (int i = 0; i < d; ++i) ph(i) = std::polar(1.0, m.battery_energies(i) * t);
    rb = ph.asDiagonal() * rb * ph.conjugate().asDiagonal();
}

ComplexMatrix reduce_battery(const model::BatteryChargerModel& m, const ComplexMatrix& joint) {
    const int d_b = m.battery_dim();
    ComplexMatrix rb = ComplexMatrix::Zero(d_b, d_b);
    for (int a = 0; a < m.charger_dim; ++a) rb += joint.block(a * d_b, a * d_b, d_b, d_b);
    return rb;
}

}  // namespace

TimeWindow default_window(const model::BatteryChargerModel& m) {
    if (m.single_mode()) {
        const double om1 = oracle::rabi_frequency(1, m.coupling, m.detunings[0]);
        return TimeWindow{0.0, 2.0 * M_PI / om1};
    }
    if (m.coupling <= 0.0) {
        throw DomainError("default_window: no default window for an uncoupled model");
    }
    return TimeWindow{0.0, 2.0 * M_PI / m.coupling};
}

DensityMatrix charge_once(const model::BatteryChargerModel& m, const DensityMatrix& battery,
                          const DensityMatrix& charger, double t) {
    require_inputs(m, battery, charger, "charge_once");
    if (!std::isfinite(t)) throw DomainError("charge_once: time must be finite");
    const qla::Propagator prop(m.total_spectrum);
    const ComplexMatrix joint =
        prop.evolve_in_eigenbasis(t, prop.to_eigenbasis(qla::kron(charger.mat, battery.mat)));
    ComplexMatrix rb = reduce_battery(m, joint);
    rotate_to_battery_frame(m, t, rb);
    return qla::sanitize_state(rb);
}

FindTauResult find_tau(const model::BatteryChargerModel& m, const DensityMatrix& battery,
                       const DensityMatrix& charger, std::optional<TimeWindow> window) {
    require_inputs(m, battery, charger, "find_tau");
    const TimeWindow w = window ? *window : default_window(m);
    if (!(w.lo >= 0.0) || !(w.hi > w.lo) || !std::isfinite(w.hi)) {
        throw DomainError("find_tau: window must satisfy 0 <= lo < hi < inf");
    }

    const qla::Propagator prop(m.total_spectrum);
    const ComplexMatrix w0 = prop.to_eigenbasis(qla::kron(charger.mat, battery.mat));
    auto ergotropy_at = [&](double t) {
        return ergo::battery_ergotropy_raw(prop.evolve_in_eigenbasis(t, w0), m);
    };

    // open at lo, closed at hi
    const double step = (w.hi - w.lo) / kGridPoints;
    std::vector<double> values(kGridPoints);
    double vmax = -1.0;
    for (int k = 0; k < kGridPoints; ++k) {
        values[k] = ergotropy_at(w.lo + (k + 1) * step);
        vmax = std::max(vmax, values[k]);
    }
    const double scale = std::max(1.0, m.capacity());
    if (vmax <= 1e-12 * scale) {
        return FindTauResult{std::nullopt, 0.0};
    }

    // Refine every near-maximal local grid maximum; grid placement alone can
    // misorder peaks of equal analytic height by ~ curvature * step^2.
    const double slack = 1e-3 * std::max(1.0, vmax);
    std::vector<int> candidates;
    int k_global = 0;
    for (int k = 0; k < kGridPoints; ++k) {
        if (values[k] > values[k_global]) k_global = k;
        const bool up = k == 0 || values[k] >= values[k - 1];
        const bool down = k == kGridPoints - 1 || values[k] >= values[k + 1];
        if (up && down && values[k] >= vmax - slack && candidates.size() < 32) {
            candidates.push_back(k);
        }
    }
    if (std::find(candidates.begin(), candidates.end(), k_global) == candidates.end()) {
        candidates.push_back(k_global);
    }

    auto refine = [&](int k) {
        double a = w.lo + k * step;  // one grid step below, still >= lo
        double b = std::min(w.hi, w.lo + (k + 2) * step);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = ergotropy_at(c), fd = ergotropy_at(d);
        while (b - a > kTimeTol) {
            if (fc >= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = ergotropy_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = ergotropy_at(d);
            }
        }
        double tau = fc >= fd ? c : d;
        // One parabolic polish with a spacing far above the eigensolver noise
        // floor; the golden-section bracket alone wanders within the flat top.
        const double h = std::max(1e-5 * (w.hi - w.lo), 1e-9);
        if (tau - h > w.lo && tau + h < w.hi) {
            const double fm = ergotropy_at(tau - h);
            const double f0 = ergotropy_at(tau);
            const double fp = ergotropy_at(tau + h);
            const double denom = fp - 2.0 * f0 + fm;
            if (denom < 0.0) {
                const double shift = 0.5 * h * (fm - fp) / denom;
                if (std::abs(shift) < h) tau += shift;
            }
        }
        return std::pair<double, double>(tau, ergotropy_at(tau));
    };

    std::vector<std::pair<double, double>> refined;
    refined.reserve(candidates.size());
    double best = -1.0;
    for (int k : candidates) {
        refined.push_back(refine(k));
        best = std::max(best, refined.back().second);
    }
    // smallest tau among refined peaks tied with the best value
    const double tie = 1e-12 * std::max(1.0, best);
    const std::pair<double, double>* pick = nullptr;
    for (const auto& r : refined) {
        if (r.second >= best - tie && (!pick || r.first < pick->first)) pick = &r;
    }
    return FindTauResult{pick->first, pick->second};
}

ChargeTrajectory repeat_cycles(const model::BatteryChargerModel& m, const DensityMatrix& battery0,
                               const DensityMatrix& charger, const RepeatOptions& opts) {
    require_inputs(m, battery0, charger, "repeat_cycles");
    if (opts.max_cycles < 1) throw DomainError("repeat_cycles: max_cycles must be >= 1");

    const double eps_full = 1e-6 * m.min_mode_freq();
    const double thr = 1e-9 * m.min_mode_freq();

    ChargeTrajectory traj;
    traj.terminated = Termination::max_cycles;
    DensityMatrix state = battery0;
    double prev_e = 0.0;
    int flat_rounds = 0;

    for (int round = 1; round <= opts.max_cycles; ++round) {
        const FindTauResult ft = find_tau(m, state, charger, opts.window);
        CycleRecord rec;
        rec.m = round;
        if (ft.tau) {
            rec.tau = *ft.tau;
            rec.e_max = ft.e_max;
            if (opts.with_daemonic) {
                const DensityMatrix rho_ab =
                    qla::evolve(m.h_total, rec.tau, DensityMatrix{qla::kron(charger.mat, state.mat)});
                rec.daemonic = measopt::daemonic_report(rho_ab, m, rec.tau, opts.budget);
            }
            state = charge_once(m, state, charger, rec.tau);
        } else {
            rec.tau = 0.0;
            rec.e_max = 0.0;
        }
        rec.populations.resize(m.battery_dim());
        for (int i = 0; i < m.battery_dim(); ++i) rec.populations[i] = state.mat(i, i).real();
        if (!m.single_mode()) {
            rec.mode_ergotropies = per_mode_ergotropies(state, m);
            rec.simultaneous =
                rec.e_max > thr &&
                std::all_of(rec.mode_ergotropies.begin(), rec.mode_ergotropies.end(),
                            [&](double e) { return e > thr; });
        }
        traj.records.push_back(std::move(rec));

        const double gain = traj.records.back().e_max - prev_e;
        prev_e = traj.records.back().e_max;
        if (traj.records.back().e_max >= m.capacity() - eps_full) {
            traj.terminated = Termination::full_charge;
            break;
        }
        flat_rounds = gain < kStallGain ? flat_rounds + 1 : 0;
        if (flat_rounds >= kStallRounds) {
            traj.terminated = Termination::stalled;
            break;
        }
    }
    return traj;
}

std::optional<int> ChargeTrajectory::first_gapless(double threshold) const {
    for (const CycleRecord& r : records) {
        if (r.daemonic && r.daemonic->gap <= threshold) return r.m;
    }
    return std::nullopt;
}

std::vector<double> per_mode_ergotropies(const DensityMatrix& battery,
                                         const model::BatteryChargerModel& m) {
    if (m.single_mode()) {
        throw DomainError("per_mode_ergotropies: model has a single mode");
    }
    if (battery.dim() != m.battery_dim()) {
        throw DimensionError("per_mode_ergotropies: battery state dimension mismatch");
    }
    std::vector<double> out(m.mode_count());
    for (int i = 0; i < m.mode_count(); ++i) {
        const ComplexMatrix ri = qla::partial_trace_raw(battery.mat, m.mode_dims, {i});
        out[i] = ergo::ergotropy(qla::sanitize_state(ri), m.mode_hamiltonian(i));
    }
    return out;
}

std::vector<bool> simultaneous_charging_check(const ChargeTrajectory& traj,
                                              const model::BatteryChargerModel& m) {
    if (m.single_mode()) {
        throw DomainError("simultaneous_charging_check: model has a single mode");
    }
    const double thr = 1e-9 * m.min_mode_freq();
    std::vector<bool> out;
    out.reserve(traj.records.size());
    for (const CycleRecord& r : traj.records) {
        bool all = r.e_max > thr && !r.mode_ergotropies.empty();
        for (double e : r.mode_ergotropies) all = all && e > thr;
        out.push_back(all);
    }
    return out;
}

}  // namespace qbattery::cycle
