// Unit-mass minimization of the trapped energy by normalized gradient
// flow, with collapse detection through the kinetic length scale
// L = (int |grad u|^2)^{-1/2}.

#ifndef DIPOLAR_GROUND_STATE_HPP
#define DIPOLAR_GROUND_STATE_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fft.hpp"
#include "functionals.hpp"
#include "grid.hpp"

namespace dipolar {

struct GroundStateOptions {
    double tau0 = 0.5;          // initial flow step
    int max_iter = 200000;
    double tol_energy = 1e-10;  // relative energy stagnation
    double tol_grad = 1e-6;     // ||grad E - mu u||
    bool precondition = true;   // semi-implicit (1 - tau Lap / 2)^{-1}
    double collapse_cells = 4.0;   // L below collapse_cells * max(dx) => collapsed
    double collapse_factor = 8.0;  // monotone shrink factor over the window...
    int collapse_window = 200;     // ...of this many iterates
    double energy_floor = -1e4;    // "decreases without bound" proxy
    // Metastability check: local descent can converge to a stationary
    // state even when the energy is unbounded below (the collapse basin
    // sits behind a finite barrier at small scales).  After reaching a
    // stationary point, evaluate the energy of exact mesh-refined
    // squeezes u_{1/m}; if one undercuts the stationary energy, the
    // state is unstable to collapse and the run is flagged accordingly.
    bool instability_probe = true;
    std::vector<int> probe_ms = {2, 4, 8, 12, 16, 20, 24};
    int probe_max_nodes = 3200;     // per axis, skip larger probe grids
    double probe_margin = 1e-6;     // relative drop that counts as undercut
};

struct GroundStateResult {
    WaveField u;
    EnergyBreakdown energy;
    int iterations = 0;
    bool converged = false;
    bool collapse_detected = false;
    double residual = std::numeric_limits<double>::infinity();
    double mu = 0.0; // chemical potential <grad E, u>
    std::vector<double> L_history;
    std::vector<double> E_history;
    std::string notes;
};

// Resolution-based proxy for L_n -> 0: trip when L falls below a few
// cells, or when it shrinks monotonically by a large factor over the
// trailing window while the energy runs below the floor.
inline bool detect_collapse(const std::vector<double>& L_history, const Grid2D& grid,
                            const std::vector<double>& E_history = {},
                            double collapse_cells = 4.0, double collapse_factor = 8.0,
                            int window = 200, double energy_floor = -1e4) {
    if (L_history.empty()) return false;
    double floor_L = collapse_cells * std::max(grid.dx1, grid.dx2);
    if (L_history.back() < floor_L) return true;
    int n = static_cast<int>(L_history.size());
    if (n < window + 1) return false;
    bool monotone = true;
    for (int i = n - window; i < n; ++i)
        if (L_history[i] > L_history[i - 1]) {
            monotone = false;
            break;
        }
    if (!monotone) return false;
    if (!(L_history[n - window - 1] >= collapse_factor * L_history[n - 1])) return false;
    if (E_history.empty()) return false;
    return E_history.back() < energy_floor;
}

namespace gs_detail {

inline void normalize_mass(WaveField& u) {
    double m = mass(u);
    double inv = 1.0 / std::sqrt(m);
    for (Complex& v : u.values) v *= inv;
}

inline double kinetic_of(const WaveField& u) {
    WaveField uh = forward_transform(u);
    return grad_norm_sq(uh);
}

// (1 - tau Lap / 2)^{-1}, spectral.  Positive definite, identity at
// tau = 0; fixed points of the flow are unchanged.
inline WaveField smooth(const WaveField& f, double tau) {
    WaveField fh = forward_transform(f);
    const Grid2D& g = f.grid;
    for (int i = 0; i < g.n1; ++i) {
        double xi1 = g.xi1(i);
        for (int j = 0; j < g.n2; ++j) {
            double xi2 = g.xi2(j);
            fh.at(i, j) /= 1.0 + 0.5 * tau * (xi1 * xi1 + xi2 * xi2);
        }
    }
    return inverse_transform(fh);
}

} // namespace gs_detail

inline WaveField gaussian_trap_init(const Grid2D& g, const TrapSpec& trap) {
    // Width matched to the harmonic ground mode 1/sqrt(w); unit width
    // otherwise.
    double s1 = 1.0, s2 = 1.0;
    if (trap.kind == TrapSpec::Kind::Harmonic) {
        s1 = 1.0 / std::sqrt(trap.w1);
        s2 = 1.0 / std::sqrt(trap.w2);
    }
    WaveField u(g);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            double x1 = g.x1(i) / s1, x2 = g.x2(j) / s2;
            u.at(i, j) = std::exp(-0.5 * (x1 * x1 + x2 * x2));
        }
    gs_detail::normalize_mass(u);
    return u;
}

inline GroundStateResult minimize_trapped(const PhysicalParams& p, const Grid2D& grid,
                                          const GroundStateOptions& opt = {}) {
    validate(p);
    GroundStateResult res;
    WaveField u = gaussian_trap_init(grid, p.trap);
    EnergyBreakdown e = energy_2d(u, p);
    double tau = opt.tau0;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.iterations = iter + 1;
        double T = gs_detail::kinetic_of(u);
        res.L_history.push_back(1.0 / std::sqrt(T));
        res.E_history.push_back(e.total);

        if (detect_collapse(res.L_history, grid, res.E_history, opt.collapse_cells,
                            opt.collapse_factor, opt.collapse_window, opt.energy_floor)) {
            res.collapse_detected = true;
            break;
        }

        WaveField grad = gradient_energy(u, p);
        double mu = inner_real(grad, u); // mass(u) = 1
        WaveField pg = grad;
        for (std::size_t i = 0; i < pg.values.size(); ++i)
            pg.values[i] -= mu * u.values[i];
        double resid = std::sqrt(std::max(0.0, inner_real(pg, pg)));
        res.residual = resid;
        res.mu = mu;

        WaveField dir = opt.precondition ? gs_detail::smooth(pg, tau) : pg;

        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            WaveField trial = u;
            for (std::size_t i = 0; i < trial.values.size(); ++i)
                trial.values[i] -= tau * dir.values[i];
            gs_detail::normalize_mass(trial);
            EnergyBreakdown e2 = energy_2d(trial, p);
            if (std::isfinite(e2.total) && e2.total <= e.total) {
                double rel = std::abs(e2.total - e.total) /
                             std::max(1.0, std::abs(e2.total));
                u = std::move(trial);
                e = e2;
                tau = std::min(tau * 1.1, opt.tau0);
                accepted = true;
                if (rel < opt.tol_energy && resid < opt.tol_grad) {
                    res.converged = true;
                }
                break;
            }
            tau *= 0.5;
            if (opt.precondition) dir = gs_detail::smooth(pg, tau);
        }
        if (res.converged) break;
        if (!accepted) {
            // Energy cannot decrease at line-search resolution.
            res.converged = resid < 10 * opt.tol_grad;
            break;
        }
    }

    res.u = std::move(u);
    res.energy = e;

    if (res.converged && opt.instability_probe) {
        double L_conv = res.L_history.empty() ? 1.0 : res.L_history.back();
        for (int m : opt.probe_ms) {
            if (static_cast<long>(m) * grid.n1 > opt.probe_max_nodes ||
                static_cast<long>(m) * grid.n2 > opt.probe_max_nodes)
                break;
            EnergyBreakdown em = energy_2d(squeeze_refined(res.u, m), p);
            if (em.total < e.total - opt.probe_margin * (1.0 + std::abs(e.total))) {
                res.converged = false;
                res.collapse_detected = true;
                res.L_history.push_back(L_conv / m);
                res.notes = "stationary point is metastable: the squeeze u_{1/" +
                            std::to_string(m) +
                            "} lowers the energy to " + std::to_string(em.total) +
                            " (collapse basin behind a finite barrier)";
                break;
            }
        }
    }
    return res;
}

} // namespace dipolar

#endif
