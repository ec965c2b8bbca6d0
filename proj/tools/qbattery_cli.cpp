// qbattery_cli: batch harness over the C API. Configures a scenario, runs
// sweeps and charging trajectories, writes CSV tables with one row per
// parameter point, and verifies the closed-form regression suite.
//
// Exit codes: 0 success, 1 usage/config error, 2 verification failure.

#include "qbattery/qbattery.h"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr double kPi = 3.14159265358979323846;

// ------------------------------ option model --------------------------------

struct Grid {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    double at(int i) const { return n <= 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

struct Options {
    std::vector<int> dims{11};
    std::vector<double> omegas{1.0};
    double g = 1.0;
    std::vector<double> deltas{0.0};
    std::string init = "ground";
    double theta = kPi / 2.0;
    double phi = 0.0;
    int cycles = 50;
    Grid tgrid{0.0, 2.0 * kPi, 401};
    Grid beta_grid{0.5, 10.0, 20};
    Grid r0_grid{0.5, 1.0, 26};
    Grid alpha_grid{0.0, kPi, 65};
    double gamma = 0.0;
    unsigned long long seed = 0;
    std::string out;
    double gapless_threshold = 1e-3;
    qb_opt_options opt{};
    int threads = 0;
    std::optional<std::pair<double, double>> window;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid number '" + s + "' for " + key);
    }
}

long parse_long(const std::string& s, const std::string& key) {
    try {
        size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid integer '" + s + "' for " + key);
    }
}

Grid parse_grid(const std::string& s, const std::string& key) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw UsageError(key + " expects lo:hi:n, got '" + s + "'");
    Grid g;
    g.lo = parse_double(parts[0], key);
    g.hi = parse_double(parts[1], key);
    g.n = static_cast<int>(parse_long(parts[2], key));
    if (g.n < 1 || g.hi < g.lo) throw UsageError(key + " expects lo <= hi and n >= 1");
    return g;
}

// Merged key=value view of config file and command-line flags.
Options materialize(const std::map<std::string, std::string>& kv) {
    Options o;
    qb_opt_options_default(&o.opt);
    for (const auto& [key, value] : kv) {
        if (key == "dim") {
            o.dims.clear();
            for (const auto& p : split(value, ',')) {
                o.dims.push_back(static_cast<int>(parse_long(p, key)));
            }
        } else if (key == "omega") {
            o.omegas.clear();
            for (const auto& p : split(value, ',')) o.omegas.push_back(parse_double(p, key));
        } else if (key == "g") {
            o.g = parse_double(value, key);
        } else if (key == "delta") {
            o.deltas.clear();
            for (const auto& p : split(value, ',')) o.deltas.push_back(parse_double(p, key));
        } else if (key == "init") {
            o.init = value;
        } else if (key == "theta") {
            o.theta = parse_double(value, key);
        } else if (key == "phi") {
            o.phi = parse_double(value, key);
        } else if (key == "cycles") {
            o.cycles = static_cast<int>(parse_long(value, key));
        } else if (key == "tgrid") {
            o.tgrid = parse_grid(value, key);
        } else if (key == "beta_grid") {
            o.beta_grid = parse_grid(value, key);
        } else if (key == "r0_grid") {
            o.r0_grid = parse_grid(value, key);
        } else if (key == "alpha_grid") {
            o.alpha_grid = parse_grid(value, key);
        } else if (key == "gamma") {
            o.gamma = parse_double(value, key);
        } else if (key == "seed") {
            o.seed = static_cast<unsigned long long>(parse_long(value, key));
            o.opt.seed = o.seed;
        } else if (key == "out") {
            o.out = value;
        } else if (key == "gapless_threshold") {
            o.gapless_threshold = parse_double(value, key);
        } else if (key == "opt_alpha_grid") {
            o.opt.alpha_grid = static_cast<int>(parse_long(value, key));
        } else if (key == "opt_gamma_grid") {
            o.opt.gamma_grid = static_cast<int>(parse_long(value, key));
        } else if (key == "opt_multistarts") {
            o.opt.multistarts = static_cast<int>(parse_long(value, key));
        } else if (key == "opt_param_tol") {
            o.opt.param_tol = parse_double(value, key);
        } else if (key == "opt_max_evals") {
            o.opt.max_evals = parse_long(value, key);
        } else if (key == "threads") {
            o.threads = static_cast<int>(parse_long(value, key));
        } else if (key == "window") {
            const auto parts = split(value, ':');
            if (parts.size() != 2) throw UsageError("window expects lo:hi");
            o.window = std::make_pair(parse_double(parts[0], key), parse_double(parts[1], key));
        } else {
            throw UsageError("unknown configuration key '" + key + "'");
        }
    }
    if (o.dims.size() != o.omegas.size()) {
        throw UsageError("dim and omega must list the same number of modes");
    }
    if (o.deltas.size() == 1 && o.dims.size() > 1) {
        o.deltas.assign(o.dims.size(), o.deltas[0]);
    }
    if (o.deltas.size() != o.dims.size()) {
        throw UsageError("delta must list one value or one per mode");
    }
    return o;
}

void load_config_file(const std::string& path, std::map<std::string, std::string>& kv) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        // config never overrides an explicit command-line flag
        kv.emplace(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
}

// ------------------------------ C API helpers --------------------------------

struct CApiError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(qb_status s, const char* what) {
    if (s != QB_OK) {
        throw CApiError(std::string(what) + ": " + qb_last_error());
    }
}

using ModelPtr = std::unique_ptr<qb_model, decltype(&qb_model_free)>;
using StatePtr = std::unique_ptr<qb_state, decltype(&qb_state_free)>;
using TrajPtr = std::unique_ptr<qb_trajectory, decltype(&qb_trajectory_free)>;

ModelPtr build_model(const Options& o) {
    qb_model* m = nullptr;
    if (o.dims.size() == 1) {
        const double nu = o.omegas[0] - o.deltas[0];
        check(qb_model_single_mode(o.dims[0], o.omegas[0], nu, o.g, &m), "model");
    } else {
        std::vector<double> levels(o.dims.size() + 1, 0.0);
        for (size_t i = 0; i < o.dims.size(); ++i) levels[i + 1] = o.omegas[i] - o.deltas[i];
        check(qb_model_multimode(static_cast<int>(o.dims.size()), o.dims.data(), o.omegas.data(),
                                 levels.data(), o.g, &m),
              "model");
    }
    ModelPtr model(m, &qb_model_free);
    const size_t need = qb_model_warnings(model.get(), nullptr, 0);
    if (need > 1) {
        std::string buf(need, '\0');
        qb_model_warnings(model.get(), buf.data(), buf.size());
        std::cerr << "warning: " << buf.c_str() << "\n";
    }
    return model;
}

StatePtr battery_init(const qb_model* m, const std::string& spec) {
    qb_state* s = nullptr;
    check(qb_battery_init_parse(m, spec.c_str(), &s), "battery init");
    return StatePtr(s, &qb_state_free);
}

StatePtr charger_init(const qb_model* m, const Options& o) {
    qb_state* s = nullptr;
    if (qb_model_charger_dim(m) == 2) {
        check(qb_charger_excited(m, 1, &s), "charger init");
    } else {
        check(qb_charger_superposition(m, o.theta, o.phi, &s), "charger init");
    }
    return StatePtr(s, &qb_state_free);
}

// ------------------------------- CSV output ---------------------------------

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write output file: " + path);
    out << header << "\n";
    for (const std::string& r : rows) out << r << "\n";
    if (!out) throw UsageError("write failed for output file: " + path);
}

// Ordered parallel map: rows are computed by a small worker pool and written
// in index order regardless of completion order.
template <typename Fn>
void for_each_row(int n, int threads, Fn&& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            try {
                for (int i; (i = next.fetch_add(1)) < n;) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ------------------------------- subcommands --------------------------------

int run_time_sweep(const Options& o) {
    const ModelPtr m = build_model(o);
    const StatePtr battery = battery_init(m.get(), o.init);
    const StatePtr charger = charger_init(m.get(), o);

    std::vector<std::string> rows(o.tgrid.n);
    for_each_row(o.tgrid.n, o.threads, [&](int i) {
        const double t = o.tgrid.at(i);
        qb_daemonic_result r;
        check(qb_daemonic_report(m.get(), battery.get(), charger.get(), t, &o.opt, &r),
              "time-sweep");
        rows[i] = num(t) + "," + num(r.ergotropy) + "," + num(r.daemonic_min) + "," +
                  num(r.daemonic_max) + "," + num(r.gap) + "," + num(r.band);
    });
    const std::string path = o.out.empty() ? "time_sweep.csv" : o.out;
    write_csv(path, "t,ergotropy,daemonic_min,daemonic_max,gap,band", rows);
    std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
    return 0;
}

int run_beta_sweep(const Options& o) {
    const ModelPtr m = build_model(o);
    const StatePtr charger = charger_init(m.get(), o);

    std::vector<std::string> rows(o.beta_grid.n);
    std::vector<int> gapless(o.beta_grid.n, 0);
    for_each_row(o.beta_grid.n, o.threads, [&](int i) {
        const double beta = o.beta_grid.at(i);
        qb_state* b = nullptr;
        check(qb_battery_thermal(m.get(), beta, &b), "beta-sweep");
        const StatePtr battery(b, &qb_state_free);
        int found = 0;
        double tau = 0.0, e_max = 0.0;
        double lo = 0.0, hi = 0.0;
        if (o.window) {
            lo = o.window->first;
            hi = o.window->second;
        }
        check(qb_find_tau(m.get(), battery.get(), charger.get(), lo, hi, &found, &tau, &e_max),
              "beta-sweep");
        qb_daemonic_result r{};
        check(qb_daemonic_report(m.get(), battery.get(), charger.get(), tau, &o.opt, &r),
              "beta-sweep");
        gapless[i] = r.gap <= o.gapless_threshold ? 1 : 0;
        rows[i] = num(beta) + "," + num(tau) + "," + num(e_max) + "," + num(r.daemonic_min) +
                  "," + num(r.gap);
    });
    const std::string path = o.out.empty() ? "beta_sweep.csv" : o.out;
    write_csv(path, "beta,tau,e_max,daemonic_min,gap", rows);
    std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
    for (int i = 0; i < o.beta_grid.n; ++i) {
        std::cout << "beta " << num(o.beta_grid.at(i)) << ": "
                  << (gapless[i] ? "gapless" : "gapped") << " at threshold "
                  << num(o.gapless_threshold) << "\n";
    }
    return 0;
}

const char* termination_name(int term) {
    switch (term) {
        case QB_TERM_FULL_CHARGE: return "full_charge";
        case QB_TERM_STALLED: return "stalled";
        default: return "max_cycles";
    }
}

int run_repeat_charge(const Options& o) {
    const ModelPtr m = build_model(o);
    const StatePtr battery = battery_init(m.get(), o.init);
    const StatePtr charger = charger_init(m.get(), o);

    qb_trajectory* traj_raw = nullptr;
    const double wlo = o.window ? o.window->first : 0.0;
    const double whi = o.window ? o.window->second : 0.0;
    check(qb_repeat_cycles_windowed(m.get(), battery.get(), charger.get(), o.cycles, 0, &o.opt,
                                    wlo, whi, &traj_raw),
          "repeat-charge");
    const TrajPtr traj(traj_raw, &qb_trajectory_free);

    const int d_b = qb_model_battery_dim(m.get());
    std::string header = "m,tau_m,e_max_m";
    for (int i = 0; i < d_b; ++i) header += ",pop_" + std::to_string(i);

    std::vector<std::string> rows;
    std::vector<double> pops(d_b);
    for (int i = 0; i < qb_trajectory_size(traj.get()); ++i) {
        qb_cycle_record rec;
        check(qb_trajectory_record(traj.get(), i, &rec), "repeat-charge");
        check(qb_trajectory_populations(traj.get(), i, pops.data(), d_b), "repeat-charge");
        std::string row = std::to_string(rec.m) + "," + num(rec.tau) + "," + num(rec.e_max);
        for (int k = 0; k < d_b; ++k) row += "," + num(pops[k]);
        rows.push_back(std::move(row));
    }
    const std::string path = o.out.empty() ? "repeat_charge.csv" : o.out;
    write_csv(path, header, rows);
    std::cout << "wrote " << rows.size() << " rows to " << path << " (terminated: "
              << termination_name(qb_trajectory_termination(traj.get())) << ")\n";
    return 0;
}

int run_double_mode(const Options& o_in) {
    Options o = o_in;
    if (o.dims.size() == 1) {  // double-mode defaults
        o.dims = {3, 3};
        o.omegas = {0.7, 1.0};
        o.deltas = {0.0, 0.0};
    }
    if (o.dims.size() != 2) throw UsageError("double-mode expects exactly two modes");
    const ModelPtr m = build_model(o);
    const StatePtr battery = battery_init(m.get(), o.init);
    const StatePtr charger = charger_init(m.get(), o);

    qb_trajectory* traj_raw = nullptr;
    const double wlo = o.window ? o.window->first : 0.0;
    const double whi = o.window ? o.window->second : 0.0;
    check(qb_repeat_cycles_windowed(m.get(), battery.get(), charger.get(), o.cycles, 0, &o.opt,
                                    wlo, whi, &traj_raw),
          "double-mode");
    const TrajPtr traj(traj_raw, &qb_trajectory_free);

    std::vector<std::string> rows;
    for (int i = 0; i < qb_trajectory_size(traj.get()); ++i) {
        qb_cycle_record rec;
        check(qb_trajectory_record(traj.get(), i, &rec), "double-mode");
        rows.push_back(std::to_string(rec.m) + "," + num(rec.tau) + "," + num(rec.e_max) + "," +
                       num(rec.mode_ergotropy[0]) + "," + num(rec.mode_ergotropy[1]) + "," +
                       std::to_string(rec.simultaneous));
    }
    const std::string path = o.out.empty() ? "double_mode.csv" : o.out;
    write_csv(path, "m,tau_m,e_b,e_b1,e_b2,simultaneous", rows);
    std::cout << "wrote " << rows.size() << " rows to " << path << " (terminated: "
              << termination_name(qb_trajectory_termination(traj.get())) << ")\n";
    return 0;
}

int run_landscape(const Options& o) {
    if (o.dims.size() != 1) throw UsageError("landscape expects a single-mode model");
    const ModelPtr m = build_model(o);
    const StatePtr charger = charger_init(m.get(), o);

    std::vector<std::string> blocks(o.r0_grid.n);
    for_each_row(o.r0_grid.n, o.threads, [&](int i) {
        const double r0 = o.r0_grid.at(i);
        qb_state* b = nullptr;
        const std::vector<double> pops{r0, 1.0 - r0};
        check(qb_battery_truncated(m.get(), pops.data(), 2, &b), "landscape");
        const StatePtr battery(b, &qb_state_free);
        int found = 0;
        double tau = 0.0, e_max = 0.0;
        check(qb_find_tau(m.get(), battery.get(), charger.get(), 0.0, 0.0, &found, &tau, &e_max),
              "landscape");
        std::string block;
        for (int j = 0; j < o.alpha_grid.n; ++j) {
            const double alpha = o.alpha_grid.at(j);
            double daemonic = 0.0, ergotropy = 0.0;
            check(qb_daemonic_qubit_basis(m.get(), battery.get(), charger.get(), tau, alpha,
                                          o.gamma, &daemonic, &ergotropy),
                  "landscape");
            block += num(r0) + "," + num(alpha) + "," + num(daemonic - ergotropy) + "\n";
        }
        block.pop_back();
        blocks[i] = std::move(block);
    });
    const std::string path = o.out.empty() ? "landscape.csv" : o.out;
    write_csv(path, "r0,alpha,advantage", blocks);
    std::cout << "wrote " << o.r0_grid.n * o.alpha_grid.n << " rows to " << path << "\n";
    return 0;
}

// ------------------------------- verification -------------------------------

struct Verifier {
    bool all_ok = true;

    void report(bool ok, const std::string& name, const std::string& detail = "") {
        all_ok = all_ok && ok;
        std::cout << (ok ? "ok   " : "FAIL ") << name;
        if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
    }
};

int run_verify(const Options& o) {
    Verifier v;
    const int d_b = 11;
    const double g = 1.0, omega = 1.0;

    for (const double delta : {0.0, 0.1}) {
        qb_model* m_raw = nullptr;
        check(qb_model_single_mode(d_b, omega, omega - delta, g, &m_raw), "verify");
        const ModelPtr m(m_raw, &qb_model_free);
        qb_state* b_raw = nullptr;
        check(qb_battery_ground(m.get(), &b_raw), "verify");
        const StatePtr ground(b_raw, &qb_state_free);
        qb_state* c_raw = nullptr;
        check(qb_charger_excited(m.get(), 1, &c_raw), "verify");
        const StatePtr charger(c_raw, &qb_state_free);

        // charged-vacuum ergotropy against the closed form
        double worst = 0.0;
        for (int i = 1; i <= 101; ++i) {
            const double t = 2.0 * kPi * i / 101;
            qb_state* evolved = nullptr;
            check(qb_charge_once(m.get(), ground.get(), charger.get(), t, &evolved), "verify");
            const StatePtr st(evolved, &qb_state_free);
            double e_num = 0.0, e_ref = 0.0;
            check(qb_battery_ergotropy(m.get(), st.get(), &e_num), "verify");
            check(qb_vacuum_ergotropy(g, delta, omega, t, &e_ref), "verify");
            worst = std::max(worst, std::abs(e_num - e_ref));
        }
        v.report(worst <= 1e-9, "vacuum ergotropy closed form, delta=" + num(delta),
                 "max deviation " + num(worst));

        // basis independence of the daemonic ergotropy
        worst = 0.0;
        for (int it = 1; it <= 10; ++it) {
            const double t = 2.0 * kPi * it / 10;
            for (int ia = 0; ia <= 8; ++ia) {
                for (int ig = 0; ig < 4; ++ig) {
                    double daemonic = 0.0, plain = 0.0;
                    check(qb_daemonic_qubit_basis(m.get(), ground.get(), charger.get(), t,
                                                  kPi * ia / 8, 2.0 * kPi * ig / 4 , &daemonic,
                                                  &plain),
                          "verify");
                    worst = std::max(worst,
                                     std::abs(daemonic - qb_vacuum_daemonic(g, delta, omega, t)));
                }
            }
        }
        v.report(worst <= 1e-9, "daemonic basis independence, delta=" + num(delta),
                 "max deviation " + num(worst));

        // gap at the charging optimum from full optimization
        int found = 0;
        double tau = 0.0, e_max = 0.0;
        check(qb_find_tau(m.get(), ground.get(), charger.get(), 0.0, 0.0, &found, &tau, &e_max),
              "verify");
        qb_daemonic_result r{};
        check(qb_daemonic_report(m.get(), ground.get(), charger.get(), tau, &o.opt, &r), "verify");
        double gap_ref = 0.0;
        check(qb_vacuum_gap(g, delta, omega, &gap_ref), "verify");
        v.report(std::abs(r.gap - gap_ref) <= 1e-6 && std::abs(r.band) <= 1e-9,
                 "daemonic gap and band at tau, delta=" + num(delta),
                 "gap " + num(r.gap) + " ref " + num(gap_ref) + " band " + num(r.band));

        // recursion against dense evolution on random passive inputs
        std::mt19937_64 rng(o.seed + 17);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> pops(4);
            double sum = 0.0;
            for (double& p : pops) sum += (p = u01(rng));
            std::sort(pops.begin(), pops.end(), std::greater<double>());
            for (double& p : pops) p /= sum;
            qb_state* st_raw = nullptr;
            check(qb_battery_truncated(m.get(), pops.data(), 4, &st_raw), "verify");
            StatePtr state(st_raw, &qb_state_free);
            std::vector<double> r_ref(pops);
            r_ref.resize(d_b, 0.0);
            const double t = 2.0 * kPi * u01(rng);
            const int rounds = 1 + static_cast<int>(u01(rng) * 3);
            for (int k = 0; k < rounds; ++k) {
                qb_state* next = nullptr;
                check(qb_charge_once(m.get(), state.get(), charger.get(), t, &next), "verify");
                state = StatePtr(next, &qb_state_free);
                std::vector<double> stepped(d_b);
                check(qb_recursion_step(r_ref.data(), d_b, g, delta, t, stepped.data()),
                      "verify");
                r_ref = std::move(stepped);
            }
            std::vector<double> dense(d_b);
            check(qb_state_populations(state.get(), dense.data(), d_b), "verify");
            for (int i = 0; i < d_b; ++i) worst = std::max(worst, std::abs(dense[i] - r_ref[i]));
        }
        v.report(worst <= 1e-10, "population recursion vs dense evolution, delta=" + num(delta),
                 "max deviation " + num(worst));
    }

    {  // ladder of full charging rounds
        qb_model* m_raw = nullptr;
        check(qb_model_single_mode(d_b, omega, omega, g, &m_raw), "verify");
        const ModelPtr m(m_raw, &qb_model_free);
        qb_state* b_raw = nullptr;
        check(qb_battery_ground(m.get(), &b_raw), "verify");
        const StatePtr ground(b_raw, &qb_state_free);
        qb_state* c_raw = nullptr;
        check(qb_charger_excited(m.get(), 1, &c_raw), "verify");
        const StatePtr charger(c_raw, &qb_state_free);

        qb_trajectory* traj_raw = nullptr;
        check(qb_repeat_cycles(m.get(), ground.get(), charger.get(), 20, 0, &o.opt, &traj_raw),
              "verify");
        const TrajPtr traj(traj_raw, &qb_trajectory_free);
        bool ok = qb_trajectory_termination(traj.get()) == QB_TERM_FULL_CHARGE &&
                  qb_trajectory_size(traj.get()) == d_b - 1;
        std::string detail;
        for (int i = 0; ok && i < qb_trajectory_size(traj.get()); ++i) {
            qb_cycle_record rec;
            check(qb_trajectory_record(traj.get(), i, &rec), "verify");
            if (std::abs(rec.e_max - (i + 1) * omega) > 1e-9 ||
                std::abs(rec.tau - kPi / (2.0 * std::sqrt(i + 1.0))) > 1e-8) {
                ok = false;
                detail = "round " + std::to_string(i + 1) + ": e_max " + num(rec.e_max) +
                         " tau " + num(rec.tau);
            }
        }
        v.report(ok, "resonant ladder reaches full charge in d_b - 1 rounds", detail);
    }

    {  // double mode: collective gaplessness and simultaneous charging
        const int dims[2] = {3, 3};
        const double freqs[2] = {0.7, 1.0};
        const double levels[3] = {0.0, 0.7, 1.0};
        qb_model* m_raw = nullptr;
        check(qb_model_multimode(2, dims, freqs, levels, g, &m_raw), "verify");
        const ModelPtr m(m_raw, &qb_model_free);
        qb_state* b_raw = nullptr;
        check(qb_battery_ground(m.get(), &b_raw), "verify");
        const StatePtr ground(b_raw, &qb_state_free);

        const double theta = kPi / 3.0;
        qb_state* c_raw = nullptr;
        check(qb_charger_superposition(m.get(), theta, 0.0, &c_raw), "verify");
        const StatePtr charger(c_raw, &qb_state_free);

        int found = 0;
        double tau = 0.0, e_max = 0.0;
        check(qb_find_tau(m.get(), ground.get(), charger.get(), 0.0, 0.0, &found, &tau, &e_max),
              "verify");
        const double c2 = std::cos(theta / 2) * std::cos(theta / 2);
        const double expect = freqs[0] * c2 + freqs[1] * (1.0 - c2);
        v.report(found && std::abs(tau - kPi / (2.0 * g)) <= 1e-7 &&
                     std::abs(e_max - expect) <= 1e-9,
                 "double-mode first round maximum",
                 "tau " + num(tau) + " e_max " + num(e_max) + " expect " + num(expect));

        qb_opt_options opts = o.opt;
        opts.multistarts = std::min(opts.multistarts, 16);
        qb_daemonic_result r{};
        check(qb_daemonic_report(m.get(), ground.get(), charger.get(), tau, &opts, &r), "verify");
        v.report(r.gap <= 1e-6 && r.gap >= -1e-9, "double-mode collective gap closes at tau",
                 "gap " + num(r.gap));

        // second round charges both modes only inside the theta window
        bool ok = true;
        std::string detail;
        for (const double th : {0.3, kPi / 2, 2.5}) {
            qb_state* cc_raw = nullptr;
            check(qb_charger_superposition(m.get(), th, 0.0, &cc_raw), "verify");
            const StatePtr cc(cc_raw, &qb_state_free);
            qb_trajectory* traj_raw = nullptr;
            check(qb_repeat_cycles(m.get(), ground.get(), cc.get(), 2, 0, &o.opt, &traj_raw),
                  "verify");
            const TrajPtr traj(traj_raw, &qb_trajectory_free);
            qb_cycle_record rec1, rec2;
            check(qb_trajectory_record(traj.get(), 0, &rec1), "verify");
            check(qb_trajectory_record(traj.get(), 1, &rec2), "verify");
            const double x = std::sin(th / 2) * std::sin(th / 2);
            const bool expect_simultaneous = x >= 1.0 / 3.0 && x <= 2.0 / 3.0;
            if (rec1.simultaneous || rec2.simultaneous != expect_simultaneous) {
                ok = false;
                detail = "theta " + num(th);
            }
        }
        v.report(ok, "double-mode simultaneous charging window", detail);
    }

    if (!v.all_ok) {
        std::cout << "verification FAILED\n";
        return 2;
    }
    std::cout << "verification passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum battery charging simulator (CSV batch harness)"};
    app.require_subcommand(1);

    std::map<std::string, std::string> flag_kv;
    std::string config_path;

    const auto add_common = [&](CLI::App* cmd) {
        const auto capture = [&flag_kv](const std::string& key) {
            return [&flag_kv, key](const std::string& value) { flag_kv[key] = value; };
        };
        cmd->add_option_function<std::string>("--dim", capture("dim"),
                                              "battery levels, comma list for several modes");
        cmd->add_option_function<std::string>("--omega", capture("omega"),
                                              "mode energy, comma list for several modes");
        cmd->add_option_function<std::string>("--g", capture("g"), "coupling strength");
        cmd->add_option_function<std::string>("--delta", capture("delta"),
                                              "detuning omega - nu (list for several modes)");
        cmd->add_option_function<std::string>(
            "--init", capture("init"), "battery init: ground|trunc2:r0|trunc3:r0,r1|thermal:beta");
        cmd->add_option_function<std::string>("--theta", capture("theta"),
                                              "charger superposition polar angle");
        cmd->add_option_function<std::string>("--phi", capture("phi"),
                                              "charger superposition phase");
        cmd->add_option_function<std::string>("--cycles", capture("cycles"),
                                              "maximum charging rounds");
        cmd->add_option_function<std::string>("--tgrid", capture("tgrid"), "time grid lo:hi:n");
        cmd->add_option_function<std::string>("--seed", capture("seed"),
                                              "seed for optimizer multistarts");
        cmd->add_option_function<std::string>("--out", capture("out"), "output CSV path");
        cmd->add_option_function<std::string>("--gapless-threshold", capture("gapless_threshold"),
                                              "gap value reported as gapless");
        cmd->add_option("--config", config_path, "key=value configuration file");
    };

    CLI::App* cmd_time = app.add_subcommand("time-sweep", "ergotropy and daemonic band over time");
    CLI::App* cmd_beta = app.add_subcommand("beta-sweep", "thermal initial states over beta");
    CLI::App* cmd_repeat = app.add_subcommand("repeat-charge", "charging rounds to full charge");
    CLI::App* cmd_double = app.add_subcommand("double-mode", "two-mode battery charging rounds");
    CLI::App* cmd_landscape =
        app.add_subcommand("landscape", "daemonic advantage on the (r0, alpha) plane");
    CLI::App* cmd_verify =
        app.add_subcommand("verify", "run the closed-form regression suite");
    for (CLI::App* cmd :
         {cmd_time, cmd_beta, cmd_repeat, cmd_double, cmd_landscape, cmd_verify}) {
        add_common(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        std::map<std::string, std::string> kv = flag_kv;
        if (!config_path.empty()) load_config_file(config_path, kv);
        const Options options = materialize(kv);

        if (cmd_time->parsed()) return run_time_sweep(options);
        if (cmd_beta->parsed()) return run_beta_sweep(options);
        if (cmd_repeat->parsed()) return run_repeat_charge(options);
        if (cmd_double->parsed()) return run_double_mode(options);
        if (cmd_landscape->parsed()) return run_landscape(options);
        if (cmd_verify->parsed()) return run_verify(options);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CApiError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
