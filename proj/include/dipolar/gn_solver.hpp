// Optimal constant C(a,b) of the generalized Gagliardo-Nirenberg
// inequality  F_{a,b}[|u|^2] <= C(a,b) * int|grad u|^2 * int|u|^2,
// computed by maximizing the scale-invariant quotient
//   R(u) = F_{a,b}[|u|^2] / (T(u) * M(u)),  T = int|grad u|^2, M = int|u|^2.
//
// R is invariant under amplitude scaling and, on the continuum, under
// dilations.  On a periodic grid the dilation direction is neutral to
// first order but drifts iterates toward box-scale artifacts (the
// constant field has T = 0 and F = a (M/2pi)^2, so R blows up along it
// when a > 0).  The ascent therefore projects the gradient onto the
// complement of the dilation generator u + x.grad(u) and of the mass
// direction, and rejects any step whose density leaks into the boundary
// frame.

#ifndef DIPOLAR_GN_SOLVER_HPP
#define DIPOLAR_GN_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"
#include "functionals.hpp"
#include "grid.hpp"
#include "kernels.hpp"

namespace dipolar {

struct GNError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GNConditionViolated : GNError {
    GNConditionViolated()
        : GNError("gn: neither a+b/2 nor a-b/2 is positive (trivial regime, C undefined)") {}
};
struct GNNoPositiveF : GNError {
    GNNoPositiveF() : GNError("gn: no initialization reached F > 0") {}
};
struct GNNonConvergence : GNError {
    using GNError::GNError;
};

struct GNScene {
    int n;
    double box;
};

struct GNOptions {
    double tol_rel = 1e-9;     // relative change of R
    double tol_grad = 1e-6;    // projected-gradient norm
    int max_iter = 2000;
    std::vector<GNScene> scenes = {{128, 24.0}, {256, 32.0}};
    GNScene extra_scene = {384, 40.0}; // appended if the pair disagrees
    double refine_tol = 1e-3;          // relative C agreement target
    double delocalize_tol = 1e-3;      // boundary-frame mass fraction
};

struct GridStudyEntry {
    int n;
    double box;
    double C;
};

struct GNResult {
    double C = 0.0;
    WaveField optimizer;      // rescaled so T = M = 1 (box adjusted)
    double residual = 0.0;    // projected-gradient norm at the optimum
    double err = 0.0;         // half-gap of the finest refinement pair
    std::vector<GridStudyEntry> grid_study;
    bool multistart_warning = false; // best-vs-worst init spread > refine_tol
    bool refine_warning = false;     // refinement pair still disagrees
};

namespace gn_detail {

struct QuotientState {
    double T, M, F, R;
};

// F via a precomputed symbol table (avoids re-evaluating symbol_fab).
inline double fab_energy_cached(const RealField& rho, const KernelSymbol& sym) {
    WaveField r(rho.grid);
    for (std::size_t i = 0; i < rho.values.size(); ++i) r.values[i] = rho.values[i];
    WaveField rh = forward_transform(r);
    double s = 0.0;
    for (std::size_t i = 0; i < rh.values.size(); ++i)
        s += sym.values.values[i] * std::norm(rh.values[i]);
    return s * rho.grid.freq_cell_area();
}

inline QuotientState quotient_eval(const WaveField& u, const KernelSymbol& fab) {
    QuotientState s;
    s.M = mass(u);
    WaveField uh = forward_transform(u);
    s.T = grad_norm_sq(uh);
    s.F = fab_energy_cached(density(u), fab);
    s.R = (s.T > 0 && s.M > 0) ? s.F / (s.T * s.M)
                               : std::numeric_limits<double>::quiet_NaN();
    return s;
}

// Generator of dilations at u: d = u + x.grad(u) (d/dL of L^{-1}u(x/L)
// at L=1, up to sign).  grad(u) spectral, x centered.
inline WaveField dilation_direction(const WaveField& u) {
    const Grid2D& g = u.grid;
    WaveField uh = forward_transform(u);
    WaveField d1h = uh, d2h = uh;
    for (int i = 0; i < g.n1; ++i) {
        Complex ix1(0.0, g.xi1(i));
        for (int j = 0; j < g.n2; ++j) {
            d1h.at(i, j) *= ix1;
            d2h.at(i, j) *= Complex(0.0, g.xi2(j));
        }
    }
    WaveField d1 = inverse_transform(d1h);
    WaveField d2 = inverse_transform(d2h);
    WaveField d = u;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            d.at(i, j) += g.x1(i) * d1.at(i, j) + g.x2(j) * d2.at(i, j);
    return d;
}

inline void project_out(WaveField& gvec, const WaveField& dir) {
    double dd = inner_real(dir, dir);
    if (!(dd > 0)) return;
    double gd = inner_real(dir, gvec);
    double c = gd / dd;
    for (std::size_t i = 0; i < gvec.values.size(); ++i)
        gvec.values[i] -= c * dir.values[i];
}

inline void sobolev_precondition(WaveField& gvec) {
    WaveField gh = forward_transform(gvec);
    const Grid2D& g = gvec.grid;
    for (int i = 0; i < g.n1; ++i) {
        double xi1 = g.xi1(i);
        for (int j = 0; j < g.n2; ++j) {
            double xi2 = g.xi2(j);
            gh.at(i, j) /= (1.0 + xi1 * xi1 + xi2 * xi2);
        }
    }
    gvec = inverse_transform(gh);
}

// Integer-shift the field so the density centroid sits at the center.
inline void recenter(WaveField& u) {
    const Grid2D& g = u.grid;
    double m = 0.0, c1 = 0.0, c2 = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            double d = std::norm(u.at(i, j));
            m += d;
            c1 += g.x1(i) * d;
            c2 += g.x2(j) * d;
        }
    if (!(m > 0)) return;
    int s1 = static_cast<int>(std::lround(c1 / m / g.dx1));
    int s2 = static_cast<int>(std::lround(c2 / m / g.dx2));
    if (s1 == 0 && s2 == 0) return;
    WaveField v = u;
    auto wrap = [](int k, int n) { return ((k % n) + n) % n; };
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            u.at(i, j) = v.at(wrap(i + s1, g.n1), wrap(j + s2, g.n2));
}

inline void phase_fix(WaveField& u) {
    Complex s(0, 0);
    for (const Complex& v : u.values) s += v;
    if (std::abs(s) < 1e-14) return;
    Complex ph = std::conj(s) / std::abs(s);
    for (Complex& v : u.values) v *= ph;
}

inline double boundary_fraction(const WaveField& u) {
    const Grid2D& g = u.grid;
    int f1 = std::max(1, g.n1 / 16), f2 = std::max(1, g.n2 / 16);
    double frame = 0.0, total = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            double d = std::norm(u.at(i, j));
            total += d;
            if (i < f1 || i >= g.n1 - f1 || j < f2 || j >= g.n2 - f2) frame += d;
        }
    return total > 0 ? frame / total : 0.0;
}

inline WaveField gaussian_init(const Grid2D& g, double s1, double s2) {
    WaveField u(g);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            double x1 = g.x1(i) / s1, x2 = g.x2(j) / s2;
            u.at(i, j) = std::exp(-0.5 * (x1 * x1 + x2 * x2));
        }
    double m = mass(u);
    for (Complex& v : u.values) v /= std::sqrt(m);
    return u;
}

struct AscentOutcome {
    bool ok = false;
    double R = 0.0;
    double residual = 0.0;
    WaveField u;
    std::string note;
};

inline AscentOutcome ascend(WaveField u, const KernelSymbol& fab, const GNOptions& opt) {
    AscentOutcome out;
    QuotientState st = quotient_eval(u, fab);
    if (!std::isfinite(st.R)) {
        out.note = "degenerate start";
        return out;
    }
    double tau = 0.5;
    double gnorm = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        // dR paired as 2 Re <gvec, du> dx^2 at the current (T, M, F).
        RealField rho = density(u);
        WaveField r(u.grid);
        for (std::size_t i = 0; i < rho.values.size(); ++i) r.values[i] = rho.values[i];
        WaveField conv(u.grid);
        {
            WaveField rh = forward_transform(r);
            for (std::size_t i = 0; i < rh.values.size(); ++i)
                rh.values[i] *= fab.values.values[i];
            conv = inverse_transform(rh);
        }
        WaveField lap(u.grid); // -Delta u
        {
            WaveField uh = forward_transform(u);
            const Grid2D& g = u.grid;
            for (int i = 0; i < g.n1; ++i) {
                double xi1 = g.xi1(i);
                for (int j = 0; j < g.n2; ++j) {
                    double xi2 = g.xi2(j);
                    uh.at(i, j) *= xi1 * xi1 + xi2 * xi2;
                }
            }
            lap = inverse_transform(uh);
        }
        WaveField gvec(u.grid);
        double cF = 2.0 / (st.T * st.M);
        double cT = st.F / (st.T * st.T * st.M);
        double cM = st.F / (st.T * st.M * st.M);
        for (std::size_t i = 0; i < u.values.size(); ++i)
            gvec.values[i] = cF * conv.values[i].real() * u.values[i]
                             - cT * lap.values[i] - cM * u.values[i];

        WaveField dil = dilation_direction(u);
        project_out(gvec, dil);
        project_out(gvec, u);
        gnorm = std::sqrt(std::max(0.0, inner_real(gvec, gvec)));
        sobolev_precondition(gvec);
        project_out(gvec, dil);
        project_out(gvec, u);

        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            WaveField trial = u;
            for (std::size_t i = 0; i < trial.values.size(); ++i)
                trial.values[i] += tau * gvec.values[i];
            double m = mass(trial);
            if (m > 0) {
                double inv = 1.0 / std::sqrt(m);
                for (Complex& v : trial.values) v *= inv;
            }
            QuotientState st2 = quotient_eval(trial, fab);
            if (std::isfinite(st2.R) && st2.R > st.R &&
                boundary_fraction(trial) < opt.delocalize_tol) {
                double rel = std::abs(st2.R - st.R) / std::max(1e-300, std::abs(st2.R));
                u = std::move(trial);
                st = st2;
                tau = std::min(tau * 1.8, 10.0);
                accepted = true;
                recenter(u);
                phase_fix(u);
                if (rel < opt.tol_rel && gnorm < opt.tol_grad) {
                    out.ok = true;
                    out.R = st.R;
                    out.residual = gnorm;
                    out.u = std::move(u);
                    return out;
                }
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) {
            // No ascent direction left at line-search resolution; accept
            // as converged if the gradient criterion holds.
            if (gnorm < opt.tol_grad || tau < 1e-14) {
                out.ok = gnorm < 10 * opt.tol_grad;
                out.R = st.R;
                out.residual = gnorm;
                out.u = std::move(u);
                if (!out.ok) out.note = "stalled line search";
                return out;
            }
        }
    }
    out.note = "max iterations";
    out.R = st.R;
    out.residual = gnorm;
    out.u = std::move(u);
    return out;
}

} // namespace gn_detail

// margin = C * T(u) * M(u) - F_{a,b}[|u|^2]; nonnegative (up to the
// solver residual) when C is the optimal constant.
inline double verify_inequality(const WaveField& u, double a, double b, double C) {
    double M = mass(u);
    if (!(M > 0) || !u.finite())
        throw std::invalid_argument("verify_inequality: invalid field");
    WaveField uh = forward_transform(u);
    double T = grad_norm_sq(uh);
    double F = fab_energy(density(u), a, b);
    return C * T * M - F;
}

inline GNResult compute_gn_constant(double a, double b, const GNOptions& opt = {}) {
    if (!(a + 0.5 * b > 0) && !(a - 0.5 * b > 0)) throw GNConditionViolated();

    GNResult res;
    std::vector<GNScene> scenes = opt.scenes;
    bool extra_used = false;

    for (std::size_t si = 0; si < scenes.size(); ++si) {
        const GNScene& sc = scenes[si];
        Grid2D g = make_grid(sc.n, sc.n, sc.box, sc.box);
        KernelSymbol fab = build_symbol_fab(g, a, b);

        // Isotropic plus x1-/x2-elongated starts; anisotropy reaches the
        // a+b/2 and a-b/2 frequency weights when b != 0.
        std::vector<std::pair<double, double>> sigmas = {
            {1.5, 1.5}, {2.5, 0.7}, {0.7, 2.5}};
        double bestR = -std::numeric_limits<double>::infinity();
        double worstR = std::numeric_limits<double>::infinity();
        gn_detail::AscentOutcome best;
        int ok_count = 0;
        for (auto [s1, s2] : sigmas) {
            auto run = gn_detail::ascend(gn_detail::gaussian_init(g, s1, s2), fab, opt);
            if (!run.ok) continue;
            ++ok_count;
            worstR = std::min(worstR, run.R);
            if (run.R > bestR) {
                bestR = run.R;
                best = std::move(run);
            }
        }
        if (ok_count == 0)
            throw GNNonConvergence("gn: no initialization converged on scene n=" +
                                   std::to_string(sc.n));
        if (ok_count > 1 && bestR - worstR > opt.refine_tol * std::abs(bestR))
            res.multistart_warning = true;

        res.grid_study.push_back({sc.n, sc.box, bestR});
        res.C = bestR;
        res.residual = best.residual;
        res.optimizer = std::move(best.u);

        if (si >= 1) {
            double prev = res.grid_study[si - 1].C;
            double rel = std::abs(res.C - prev) / std::max(1e-300, std::abs(res.C));
            if (rel < opt.refine_tol) break;
            if (si + 1 == scenes.size()) {
                if (!extra_used && opt.extra_scene.n > scenes.back().n) {
                    scenes.push_back(opt.extra_scene);
                    extra_used = true;
                } else {
                    res.refine_warning = true;
                }
            }
        }
    }

    if (!(res.C > 0)) throw GNNoPositiveF();
    if (res.grid_study.size() >= 2) {
        std::size_t k = res.grid_study.size();
        res.err = 0.5 * std::abs(res.grid_study[k - 1].C - res.grid_study[k - 2].C);
    }

    // Normalize the optimizer to T = M = 1: scale the amplitude by
    // T^{-1/2} and reinterpret the box as gamma * L with gamma =
    // sqrt(T/M); both leave the sample array's shape intact.
    {
        WaveField& u = res.optimizer;
        double M = mass(u);
        WaveField uh = forward_transform(u);
        double T = grad_norm_sq(uh);
        double gamma = std::sqrt(T / M);
        Grid2D g2 = make_grid(u.grid.n1, u.grid.n2, u.grid.L1 * gamma, u.grid.L2 * gamma);
        double mu = 1.0 / std::sqrt(T);
        WaveField v(g2);
        for (std::size_t i = 0; i < u.values.size(); ++i) v.values[i] = mu * u.values[i];
        res.optimizer = std::move(v);
    }
    return res;
}

} // namespace dipolar

#endif
