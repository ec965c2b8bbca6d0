// C ABI over the C++ core: opaque handles, status codes, thread-local error
// text. All exceptions are converted at this boundary.

#include "qbattery/qbattery.h"

#include "qbattery/cycle.hpp"
#include "qbattery/ergo.hpp"
#include "qbattery/measopt.hpp"
#include "qbattery/model.hpp"
#include "qbattery/oracle.hpp"
#include "qbattery/qla.hpp"

#include <cstring>
#include <functional>
#include <sstream>
#include <string>

using namespace qbattery;

struct qb_model {
    model::BatteryChargerModel impl;
};

struct qb_state {
    qla::DensityMatrix impl;
};

struct qb_trajectory {
    cycle::ChargeTrajectory impl;
};

namespace {

thread_local std::string g_last_error;

qb_status fail(qb_status code, const std::string& what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
qb_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return QB_OK;
    } catch (const DimensionError& e) {
        return fail(QB_ERR_DIMENSION_MISMATCH, e.what());
    } catch (const DomainError& e) {
        return fail(QB_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(QB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(QB_ERR_INTERNAL, e.what());
    }
}

qb_status require(bool ok, const char* what) {
    return ok ? QB_OK : fail(QB_ERR_INVALID_ARGUMENT, what);
}

measopt::OptBudget to_budget(const qb_opt_options* o) {
    measopt::OptBudget b;
    if (o) {
        b.alpha_grid = o->alpha_grid;
        b.gamma_grid = o->gamma_grid;
        b.multistarts = o->multistarts;
        b.max_evals = o->max_evals;
        b.param_tol = o->param_tol;
        b.seed = o->seed;
    }
    return b;
}

void fill_report(const measopt::DaemonicReport& r, qb_daemonic_result* out) {
    out->t = r.t;
    out->ergotropy = r.ergotropy;
    out->daemonic_min = r.daemonic_min;
    out->daemonic_max = r.daemonic_max;
    out->gap = r.gap;
    out->gain = r.gain;
    out->band = r.band;
    out->n_params = static_cast<int>(r.argmin_params.size());
    for (int i = 0; i < QB_MAX_BASIS_PARAMS; ++i) {
        out->argmin_params[i] = i < out->n_params ? r.argmin_params[i] : 0.0;
        out->argmax_params[i] =
            i < static_cast<int>(r.argmax_params.size()) ? r.argmax_params[i] : 0.0;
    }
    out->min_converged = r.min_converged ? 1 : 0;
    out->max_converged = r.max_converged ? 1 : 0;
}

// Same passive init on every mode, tensored and passivity-checked.
qla::DensityMatrix per_mode_init(const model::BatteryChargerModel& m,
                                 const std::function<model::BatteryInitState(int, double)>& make) {
    std::vector<model::BatteryInitState> inits;
    inits.reserve(m.mode_count());
    for (int i = 0; i < m.mode_count(); ++i) {
        inits.push_back(make(m.mode_dims[i], m.mode_freqs[i]));
    }
    return model::compose_battery_init(m, inits);
}

}  // namespace

extern "C" {

const char* qb_last_error(void) { return g_last_error.c_str(); }

const char* qb_version(void) { return "0.1.0"; }

qb_status qb_model_single_mode(int d_b, double omega, double nu, double g, qb_model** out) {
    if (qb_status s = require(out != nullptr, "qb_model_single_mode: out is NULL")) return s;
    return guarded([&] { *out = new qb_model{model::build_single_mode(d_b, omega, nu, g)}; });
}

qb_status qb_model_multimode(int n_modes, const int* mode_dims, const double* mode_freqs,
                             const double* charger_levels, double g, qb_model** out) {
    if (qb_status s = require(out && mode_dims && mode_freqs && charger_levels && n_modes > 0,
                              "qb_model_multimode: NULL argument or n_modes < 1")) {
        return s;
    }
    return guarded([&] {
        *out = new qb_model{model::build_multimode(
            std::vector<int>(mode_dims, mode_dims + n_modes),
            std::vector<double>(mode_freqs, mode_freqs + n_modes),
            std::vector<double>(charger_levels, charger_levels + n_modes + 1), g)};
    });
}

void qb_model_free(qb_model* m) { delete m; }

int qb_model_charger_dim(const qb_model* m) { return m ? m->impl.charger_dim : 0; }
int qb_model_battery_dim(const qb_model* m) { return m ? m->impl.battery_dim() : 0; }
int qb_model_joint_dim(const qb_model* m) { return m ? m->impl.joint_dim() : 0; }
int qb_model_mode_count(const qb_model* m) { return m ? m->impl.mode_count() : 0; }
double qb_model_capacity(const qb_model* m) { return m ? m->impl.capacity() : 0.0; }

size_t qb_model_warnings(const qb_model* m, char* buf, size_t buflen) {
    if (!m) return 0;
    std::string joined;
    for (const std::string& w : m->impl.warnings) {
        if (!joined.empty()) joined += '\n';
        joined += w;
    }
    if (buf && buflen > 0) {
        const size_t n = std::min(buflen - 1, joined.size());
        std::memcpy(buf, joined.data(), n);
        buf[n] = '\0';
    }
    return joined.size() + 1;
}

qb_status qb_battery_ground(const qb_model* m, qb_state** out) {
    if (qb_status s = require(m && out, "qb_battery_ground: NULL argument")) return s;
    return guarded([&] {
        *out = new qb_state{per_mode_init(
            m->impl, [](int d, double) { return model::battery_ground(d); })};
    });
}

qb_status qb_battery_truncated(const qb_model* m, const double* populations, int d,
                               qb_state** out) {
    if (qb_status s = require(m && out && populations && d > 0,
                              "qb_battery_truncated: NULL argument or d < 1")) {
        return s;
    }
    return guarded([&] {
        const std::vector<double> pops(populations, populations + d);
        *out = new qb_state{per_mode_init(
            m->impl, [&](int dim, double) { return model::battery_truncated(dim, pops); })};
    });
}

qb_status qb_battery_thermal(const qb_model* m, double beta, qb_state** out) {
    if (qb_status s = require(m && out, "qb_battery_thermal: NULL argument")) return s;
    return guarded([&] {
        *out = new qb_state{per_mode_init(m->impl, [&](int d, double omega) {
            return model::battery_thermal(d, beta, omega);
        })};
    });
}

qb_status qb_battery_init_parse(const qb_model* m, const char* spec, qb_state** out) {
    if (qb_status s = require(m && out && spec, "qb_battery_init_parse: NULL argument")) return s;
    return guarded([&] {
        const std::string text(spec);
        auto number_after = [&](size_t pos) {
            size_t used = 0;
            const double v = std::stod(text.substr(pos), &used);
            return std::pair<double, size_t>(v, pos + used);
        };
        if (text == "ground") {
            *out = new qb_state{per_mode_init(
                m->impl, [](int d, double) { return model::battery_ground(d); })};
        } else if (text.rfind("trunc2:", 0) == 0) {
            const double r0 = number_after(7).first;
            const std::vector<double> pops{r0, 1.0 - r0};
            *out = new qb_state{per_mode_init(
                m->impl, [&](int d, double) { return model::battery_truncated(d, pops); })};
        } else if (text.rfind("trunc3:", 0) == 0) {
            auto [r0, next] = number_after(7);
            if (next >= text.size() || text[next] != ',') {
                throw DomainError("battery init: trunc3 needs r0,r1");
            }
            const double r1 = number_after(next + 1).first;
            const std::vector<double> pops{r0, r1, 1.0 - r0 - r1};
            *out = new qb_state{per_mode_init(
                m->impl, [&](int d, double) { return model::battery_truncated(d, pops); })};
        } else if (text.rfind("thermal:", 0) == 0) {
            const double beta = number_after(8).first;
            *out = new qb_state{per_mode_init(m->impl, [&](int d, double omega) {
                return model::battery_thermal(d, beta, omega);
            })};
        } else {
            throw DomainError("battery init: expected ground | trunc2:R0 | trunc3:R0,R1 | "
                              "thermal:BETA");
        }
    });
}

qb_status qb_charger_excited(const qb_model* m, int level, qb_state** out) {
    if (qb_status s = require(m && out, "qb_charger_excited: NULL argument")) return s;
    return guarded(
        [&] { *out = new qb_state{model::charger_excited(m->impl.charger_dim, level).realized}; });
}

qb_status qb_charger_superposition(const qb_model* m, double theta, double phi, qb_state** out) {
    if (qb_status s = require(m && out, "qb_charger_superposition: NULL argument")) return s;
    return guarded([&] {
        *out = new qb_state{
            model::charger_superposition(m->impl.charger_dim, theta, phi).realized};
    });
}

void qb_state_free(qb_state* s) { delete s; }

int qb_state_dim(const qb_state* s) { return s ? s->impl.dim() : 0; }

qb_status qb_state_populations(const qb_state* s, double* out, int len) {
    if (qb_status st = require(s && out, "qb_state_populations: NULL argument")) return st;
    if (len < s->impl.dim()) {
        return fail(QB_ERR_DIMENSION_MISMATCH, "qb_state_populations: buffer too small");
    }
    for (int i = 0; i < s->impl.dim(); ++i) out[i] = s->impl.mat(i, i).real();
    return QB_OK;
}

qb_status qb_state_entry(const qb_state* s, int row, int col, double* re, double* im) {
    if (qb_status st = require(s && re && im, "qb_state_entry: NULL argument")) return st;
    if (row < 0 || col < 0 || row >= s->impl.dim() || col >= s->impl.dim()) {
        return fail(QB_ERR_DIMENSION_MISMATCH, "qb_state_entry: index out of range");
    }
    *re = s->impl.mat(row, col).real();
    *im = s->impl.mat(row, col).imag();
    return QB_OK;
}

qb_status qb_battery_ergotropy(const qb_model* m, const qb_state* battery, double* out) {
    if (qb_status s = require(m && battery && out, "qb_battery_ergotropy: NULL argument")) {
        return s;
    }
    return guarded([&] {
        if (battery->impl.dim() != m->impl.battery_dim()) {
            throw DimensionError("qb_battery_ergotropy: state is not on the battery space");
        }
        *out = ergo::ergotropy(battery->impl, m->impl.h_battery);
    });
}

qb_status qb_charge_once(const qb_model* m, const qb_state* battery, const qb_state* charger,
                         double t, qb_state** out) {
    if (qb_status s = require(m && battery && charger && out, "qb_charge_once: NULL argument")) {
        return s;
    }
    return guarded(
        [&] { *out = new qb_state{cycle::charge_once(m->impl, battery->impl, charger->impl, t)}; });
}

qb_status qb_find_tau(const qb_model* m, const qb_state* battery, const qb_state* charger,
                      double t_lo, double t_hi, int* found, double* tau, double* e_max) {
    if (qb_status s = require(m && battery && charger && found && tau && e_max,
                              "qb_find_tau: NULL argument")) {
        return s;
    }
    return guarded([&] {
        std::optional<cycle::TimeWindow> w;
        if (t_hi > t_lo) w = cycle::TimeWindow{t_lo, t_hi};
        const cycle::FindTauResult r = cycle::find_tau(m->impl, battery->impl, charger->impl, w);
        *found = r.tau ? 1 : 0;
        *tau = r.tau.value_or(0.0);
        *e_max = r.e_max;
    });
}

qb_status qb_per_mode_ergotropies(const qb_model* m, const qb_state* battery, double* out,
                                  int len) {
    if (qb_status s = require(m && battery && out, "qb_per_mode_ergotropies: NULL argument")) {
        return s;
    }
    return guarded([&] {
        const std::vector<double> e = cycle::per_mode_ergotropies(battery->impl, m->impl);
        if (len < static_cast<int>(e.size())) {
            throw DimensionError("qb_per_mode_ergotropies: buffer too small");
        }
        std::copy(e.begin(), e.end(), out);
    });
}

void qb_opt_options_default(qb_opt_options* o) {
    if (!o) return;
    const measopt::OptBudget b;
    o->alpha_grid = b.alpha_grid;
    o->gamma_grid = b.gamma_grid;
    o->multistarts = b.multistarts;
    o->max_evals = b.max_evals;
    o->param_tol = b.param_tol;
    o->seed = b.seed;
}

qb_status qb_daemonic_report(const qb_model* m, const qb_state* battery, const qb_state* charger,
                             double t, const qb_opt_options* opts, qb_daemonic_result* out) {
    if (qb_status s = require(m && battery && charger && out,
                              "qb_daemonic_report: NULL argument")) {
        return s;
    }
    return guarded([&] {
        const qla::DensityMatrix rho_ab = qla::evolve(
            m->impl.h_total, t, qla::DensityMatrix{qla::kron(charger->impl.mat, battery->impl.mat)});
        fill_report(measopt::daemonic_report(rho_ab, m->impl, t, to_budget(opts)), out);
    });
}

qb_status qb_daemonic_qubit_basis(const qb_model* m, const qb_state* battery,
                                  const qb_state* charger, double t, double alpha, double gamma,
                                  double* daemonic, double* ergotropy) {
    if (qb_status s = require(m && battery && charger && daemonic && ergotropy,
                              "qb_daemonic_qubit_basis: NULL argument")) {
        return s;
    }
    return guarded([&] {
        const qla::DensityMatrix rho_ab = qla::evolve(
            m->impl.h_total, t, qla::DensityMatrix{qla::kron(charger->impl.mat, battery->impl.mat)});
        const ergo::MeasurementBasis basis = measopt::qubit_basis({alpha, gamma});
        *daemonic = ergo::daemonic_ergotropy(rho_ab, m->impl, basis);
        *ergotropy = ergo::battery_ergotropy(rho_ab, m->impl);
    });
}

qb_status qb_daemonic_qudit_basis(const qb_model* m, const qb_state* battery,
                                  const qb_state* charger, double t, const double* params,
                                  int n_params, double* daemonic) {
    if (qb_status s = require(m && battery && charger && params && daemonic,
                              "qb_daemonic_qudit_basis: NULL argument")) {
        return s;
    }
    return guarded([&] {
        const qla::DensityMatrix rho_ab = qla::evolve(
            m->impl.h_total, t, qla::DensityMatrix{qla::kron(charger->impl.mat, battery->impl.mat)});
        measopt::QuditBasisParams p{std::vector<double>(params, params + n_params)};
        const ergo::MeasurementBasis basis = measopt::qudit_basis(m->impl.charger_dim, p);
        *daemonic = ergo::daemonic_ergotropy(rho_ab, m->impl, basis);
    });
}

qb_status qb_repeat_cycles(const qb_model* m, const qb_state* battery, const qb_state* charger,
                           int max_cycles, int with_daemonic, const qb_opt_options* opts,
                           qb_trajectory** out) {
    return qb_repeat_cycles_windowed(m, battery, charger, max_cycles, with_daemonic, opts, 0.0,
                                     0.0, out);
}

qb_status qb_repeat_cycles_windowed(const qb_model* m, const qb_state* battery,
                                    const qb_state* charger, int max_cycles, int with_daemonic,
                                    const qb_opt_options* opts, double t_lo, double t_hi,
                                    qb_trajectory** out) {
    if (qb_status s = require(m && battery && charger && out, "qb_repeat_cycles: NULL argument")) {
        return s;
    }
    return guarded([&] {
        cycle::RepeatOptions ro;
        ro.max_cycles = max_cycles;
        ro.with_daemonic = with_daemonic != 0;
        ro.budget = to_budget(opts);
        if (t_hi > t_lo) ro.window = cycle::TimeWindow{t_lo, t_hi};
        *out = new qb_trajectory{
            cycle::repeat_cycles(m->impl, battery->impl, charger->impl, ro)};
    });
}

void qb_trajectory_free(qb_trajectory* t) { delete t; }

int qb_trajectory_size(const qb_trajectory* t) {
    return t ? static_cast<int>(t->impl.records.size()) : 0;
}

int qb_trajectory_termination(const qb_trajectory* t) {
    if (!t) return QB_TERM_MAX_CYCLES;
    switch (t->impl.terminated) {
        case cycle::Termination::full_charge: return QB_TERM_FULL_CHARGE;
        case cycle::Termination::max_cycles: return QB_TERM_MAX_CYCLES;
        case cycle::Termination::stalled: return QB_TERM_STALLED;
    }
    return QB_TERM_MAX_CYCLES;
}

qb_status qb_trajectory_record(const qb_trajectory* t, int index, qb_cycle_record* out) {
    if (qb_status s = require(t && out, "qb_trajectory_record: NULL argument")) return s;
    if (index < 0 || index >= static_cast<int>(t->impl.records.size())) {
        return fail(QB_ERR_DIMENSION_MISMATCH, "qb_trajectory_record: index out of range");
    }
    const cycle::CycleRecord& r = t->impl.records[index];
    if (static_cast<int>(r.mode_ergotropies.size()) > QB_MAX_MODES) {
        return fail(QB_ERR_INTERNAL, "qb_trajectory_record: too many modes for the C record");
    }
    out->m = r.m;
    out->tau = r.tau;
    out->e_max = r.e_max;
    out->n_modes = static_cast<int>(r.mode_ergotropies.size());
    for (int i = 0; i < QB_MAX_MODES; ++i) {
        out->mode_ergotropy[i] = i < out->n_modes ? r.mode_ergotropies[i] : 0.0;
    }
    out->simultaneous = r.simultaneous ? 1 : 0;
    out->has_daemonic = r.daemonic ? 1 : 0;
    if (r.daemonic) {
        fill_report(*r.daemonic, &out->daemonic);
    } else {
        std::memset(&out->daemonic, 0, sizeof(out->daemonic));
    }
    return QB_OK;
}

qb_status qb_trajectory_populations(const qb_trajectory* t, int index, double* out, int len) {
    if (qb_status s = require(t && out, "qb_trajectory_populations: NULL argument")) return s;
    if (index < 0 || index >= static_cast<int>(t->impl.records.size())) {
        return fail(QB_ERR_DIMENSION_MISMATCH, "qb_trajectory_populations: index out of range");
    }
    const std::vector<double>& p = t->impl.records[index].populations;
    if (len < static_cast<int>(p.size())) {
        return fail(QB_ERR_DIMENSION_MISMATCH, "qb_trajectory_populations: buffer too small");
    }
    std::copy(p.begin(), p.end(), out);
    return QB_OK;
}

double qb_jc_rabi(int n, double g, double delta) {
    return n >= 1 ? oracle::rabi_frequency(n, g, delta) : 0.0;
}

qb_status qb_jc_coeffs(int n, double g, double delta, double t, double* a_n, double* b_n,
                       double* c_re, double* c_im) {
    if (qb_status s = require(a_n && b_n && c_re && c_im, "qb_jc_coeffs: NULL argument")) return s;
    return guarded([&] {
        const oracle::JCCoefficients jc = oracle::jc_coeffs(n, g, delta, t);
        *a_n = jc.a;
        *b_n = jc.b;
        *c_re = jc.c.real();
        *c_im = jc.c.imag();
    });
}

qb_status qb_vacuum_ergotropy(double g, double delta, double omega, double t, double* out) {
    if (qb_status s = require(out != nullptr, "qb_vacuum_ergotropy: out is NULL")) return s;
    return guarded([&] { *out = oracle::ergo_vacuum(g, delta, omega, t); });
}

double qb_vacuum_daemonic(double g, double delta, double omega, double t) {
    return oracle::daemonic_vacuum(g, delta, omega, t);
}

qb_status qb_vacuum_gap(double g, double delta, double omega, double* out) {
    if (qb_status s = require(out != nullptr, "qb_vacuum_gap: out is NULL")) return s;
    return guarded([&] { *out = oracle::gap_vacuum(g, delta, omega); });
}

qb_status qb_recursion_step(const double* r_prev, int d_b, double g, double delta, double t,
                            double* r_next) {
    if (qb_status s = require(r_prev && r_next && d_b >= 2,
                              "qb_recursion_step: NULL argument or d_b < 2")) {
        return s;
    }
    return guarded([&] {
        const std::vector<double> next =
            oracle::recursion_step(std::vector<double>(r_prev, r_prev + d_b), g, delta, t);
        std::copy(next.begin(), next.end(), r_next);
    });
}

}  // extern "C"
