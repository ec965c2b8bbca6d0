#include "qbattery/measopt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace qbattery::measopt {

using qla::ComplexMatrix;

namespace {

double wrap_2pi(double x) {
    const double two_pi = 2.0 * M_PI;
    x = std::fmod(x, two_pi);
    return x < 0.0 ? x + two_pi : x;
}

ComplexMatrix givens(int dim, int p, int q, double theta, double phi) {
    ComplexMatrix g = ComplexMatrix::Identity(dim, dim);
    const double c = std::cos(theta), s = std::sin(theta);
    g(p, p) = c;
    g(p, q) = -std::polar(s, -phi);
    g(q, p) = std::polar(s, phi);
    g(q, q) = c;
    return g;
}

// Rotation planes in column-major bottom-up elimination order; any unitary is
// a product of rotations on these planes times per-column phases.
std::vector<std::pair<int, int>> rotation_planes(int dim) {
    std::vector<std::pair<int, int>> planes;
    for (int j = 0; j < dim - 1; ++j) {
        for (int i = dim - 1; i > j; --i) planes.emplace_back(i - 1, i);
    }
    return planes;
}

struct Comparator {
    OptSense sense;
    bool improves(double candidate, double incumbent) const {
        return sense == OptSense::minimize ? candidate < incumbent : candidate > incumbent;
    }
};

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Objective {
    std::function<double(const std::vector<double>&)> eval;
    long evaluations = 0;

    double operator()(const std::vector<double>& p) {
        ++evaluations;
        return eval(p);
    }
};

// Pattern search over box/periodic coordinates; accepts only strict
// improvements, so the incumbent never leaves the bracket set by its start.
struct CoordinateDescent {
    Comparator cmp;
    std::vector<double> lo, hi;      // clamped ranges; periodic when period > 0
    std::vector<double> period;
    double param_tol;
    long max_evals;

    bool refine(Objective& f, std::vector<double>& p, double& value) const {
        const size_t n = p.size();
        std::vector<double> step(n);
        for (size_t j = 0; j < n; ++j) {
            step[j] = period[j] > 0.0 ? period[j] / 8.0 : (hi[j] - lo[j]) / 8.0;
        }
        while (true) {
            if (*std::max_element(step.begin(), step.end()) < param_tol) return true;
            bool progress = false;
            for (size_t j = 0; j < n; ++j) {
                for (double dir : {1.0, -1.0}) {
                    if (f.evaluations >= max_evals) return false;
                    double cand = p[j] + dir * step[j];
                    cand = period[j] > 0.0 ? wrap_2pi(cand) : std::clamp(cand, lo[j], hi[j]);
                    if (cand == p[j]) continue;
                    std::vector<double> q = p;
                    q[j] = cand;
                    const double v = f(q);
                    if (cmp.improves(v, value)) {
                        p = std::move(q);
                        value = v;
                        progress = true;
                        break;
                    }
                }
            }
            if (!progress) {
                for (double& s : step) s *= 0.5;
            }
        }
    }
};

// Best value seen so far; ties within 1e-12 resolve to the lexicographically
// smaller parameter vector so reports are reproducible.
struct Incumbent {
    explicit Incumbent(OptSense sense) : cmp{sense} {}

    Comparator cmp;
    bool valid = false;
    double value = 0.0;
    std::vector<double> params;
    bool converged = false;

    void offer(double v, const std::vector<double>& p, bool ok = false) {
        if (!valid) {
            valid = true;
            value = v;
            params = p;
            converged = ok;
            return;
        }
        const double tie = 1e-12 * std::max(1.0, std::abs(value));
        if (std::abs(v - value) <= tie) {
            if (lex_less(p, params)) {
                params = p;
                converged = ok;
            }
        } else if (cmp.improves(v, value)) {
            value = v;
            params = p;
            converged = ok;
        }
    }
};

OptResult optimize_qubit(Objective& f, OptSense sense, const OptBudget& budget) {
    const int na = std::max(2, budget.alpha_grid);
    const int ng = std::max(1, budget.gamma_grid);

    Incumbent best(sense);
    for (int i = 0; i < na; ++i) {
        const double alpha = M_PI * i / (na - 1);
        for (int j = 0; j < ng; ++j) {
            const double gamma = 2.0 * M_PI * j / ng;
            const std::vector<double> p{alpha, gamma};
            best.offer(f(p), p);
            if (f.evaluations >= budget.max_evals) {
                return OptResult{best.value, best.params, f.evaluations, false};
            }
        }
    }

    CoordinateDescent cd{best.cmp, {0.0, 0.0}, {M_PI, 2.0 * M_PI}, {0.0, 2.0 * M_PI},
                         budget.param_tol, budget.max_evals};
    const bool converged = cd.refine(f, best.params, best.value);
    return OptResult{best.value, best.params, f.evaluations, converged};
}

OptResult optimize_qudit(Objective& f, int dim, OptSense sense, const OptBudget& budget) {
    const size_t n_params = static_cast<size_t>(dim) * (dim - 1);
    CoordinateDescent cd{Comparator{sense},
                         std::vector<double>(n_params, 0.0),
                         std::vector<double>(n_params, 2.0 * M_PI),
                         std::vector<double>(n_params, 2.0 * M_PI),
                         budget.param_tol,
                         budget.max_evals};

    std::mt19937_64 rng(budget.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    Incumbent best(sense);
    const int starts = std::max(1, budget.multistarts);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> p(n_params, 0.0);
        if (s > 0) {
            // angle in [0, pi], phase in [0, 2 pi)
            for (size_t j = 0; j < n_params; j += 2) p[j] = M_PI * u01(rng);
            for (size_t j = 1; j < n_params; j += 2) p[j] = 2.0 * M_PI * u01(rng);
        }
        double v = f(p);
        const bool ok = cd.refine(f, p, v);
        best.offer(v, p, ok);
        if (f.evaluations >= budget.max_evals) {
            return OptResult{best.value, best.params, f.evaluations, false};
        }
    }
    return OptResult{best.value, best.params, f.evaluations, best.converged};
}

}  // namespace

ergo::MeasurementBasis qubit_basis(const QubitBasisParams& p) {
    if (p.alpha < 0.0 || p.alpha > M_PI) {
        throw DomainError("qubit_basis: alpha must lie in [0, pi]");
    }
    if (p.gamma < 0.0 || p.gamma >= 2.0 * M_PI) {
        throw DomainError("qubit_basis: gamma must lie in [0, 2 pi)");
    }
    const double c = std::cos(p.alpha / 2.0), s = std::sin(p.alpha / 2.0);
    const std::complex<double> ph = std::polar(1.0, p.gamma);
    ComplexMatrix v(2, 2);
    v(0, 0) = c;
    v(1, 0) = ph * s;
    v(0, 1) = s;
    v(1, 1) = -ph * c;
    return ergo::make_basis(std::move(v), {p.alpha, p.gamma});
}

ergo::MeasurementBasis qudit_basis(int dim, const QuditBasisParams& p) {
    if (dim < 2) throw DimensionError("qudit_basis: dimension must be >= 2");
    const auto planes = rotation_planes(dim);
    if (p.angles.size() != 2 * planes.size()) {
        throw DimensionError("qudit_basis: expected dim (dim - 1) parameters");
    }
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    for (size_t k = 0; k < planes.size(); ++k) {
        u = u * givens(dim, planes[k].first, planes[k].second, p.angles[2 * k],
                       p.angles[2 * k + 1]);
    }
    return ergo::make_basis(std::move(u), p.angles);
}

OptResult optimize_daemonic(const qla::DensityMatrix& rho_ab,
                            const model::BatteryChargerModel& m, OptSense sense,
                            const OptBudget& budget) {
    if (rho_ab.mat.rows() != m.joint_dim()) {
        throw DimensionError("optimize_daemonic: state does not live on the joint space");
    }
    const ComplexMatrix& joint = rho_ab.mat;

    if (m.charger_dim == 2) {
        Objective f;
        f.eval = [&](const std::vector<double>& p) {
            const double c = std::cos(p[0] / 2.0), s = std::sin(p[0] / 2.0);
            const std::complex<double> ph = std::polar(1.0, p[1]);
            ComplexMatrix v(2, 2);
            v(0, 0) = c;
            v(1, 0) = ph * s;
            v(0, 1) = s;
            v(1, 1) = -ph * c;
            return ergo::daemonic_ergotropy_raw(joint, m, v);
        };
        return optimize_qubit(f, sense, budget);
    }

    const auto planes = rotation_planes(m.charger_dim);
    Objective f;
    f.eval = [&](const std::vector<double>& p) {
        ComplexMatrix u = ComplexMatrix::Identity(m.charger_dim, m.charger_dim);
        for (size_t k = 0; k < planes.size(); ++k) {
            u = u * givens(m.charger_dim, planes[k].first, planes[k].second, p[2 * k],
                           p[2 * k + 1]);
        }
        return ergo::daemonic_ergotropy_raw(joint, m, u);
    };
    return optimize_qudit(f, m.charger_dim, sense, budget);
}

DaemonicReport daemonic_report(const qla::DensityMatrix& rho_ab,
                               const model::BatteryChargerModel& m, double t,
                               const OptBudget& budget) {
    DaemonicReport r;
    r.t = t;
    r.ergotropy = ergo::battery_ergotropy(rho_ab, m);
    const OptResult lo = optimize_daemonic(rho_ab, m, OptSense::minimize, budget);
    const OptResult hi = optimize_daemonic(rho_ab, m, OptSense::maximize, budget);
    r.daemonic_min = lo.value;
    r.daemonic_max = hi.value;
    r.gap = lo.value - r.ergotropy;
    r.gain = hi.value - r.ergotropy;
    r.band = hi.value - lo.value;
    r.argmin_params = lo.params;
    r.argmax_params = hi.params;
    r.min_converged = lo.converged;
    r.max_converged = hi.converged;
    return r;
}

}  // namespace qbattery::measopt
