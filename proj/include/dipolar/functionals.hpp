// Energy functional of the trapped quasi-2D dipolar gas,
//
//   E[u] = 1/2 int |grad u|^2 + int V |u|^2
//        + ((beta - lambda + 3 n3^2 lambda)/2) int |u|^4
//        - (3 lambda / 4) int m(xi) |rho_hat|^2 dxi,   rho = |u|^2,
//
// its gradient, the high-frequency quadratic form F_{a,b}, and the map
// (beta, lambda, n3) -> (a, b) that controls stability.

#ifndef DIPOLAR_FUNCTIONALS_HPP
#define DIPOLAR_FUNCTIONALS_HPP

#include <cmath>
#include <stdexcept>

#include "fft.hpp"
#include "grid.hpp"
#include "kernels.hpp"

namespace dipolar {

struct TrapSpec {
    enum class Kind { Harmonic, Quartic, Table };
    Kind kind = Kind::Harmonic;
    double w1 = 1.0, w2 = 1.0; // harmonic frequencies, V = (w1^2 x1^2 + w2^2 x2^2)/2
    double c = 1.0;            // quartic coefficient, V = c |x|^4
    RealField table;           // tabulated V for Kind::Table (grid-bound)

    double eval(double x1, double x2) const {
        switch (kind) {
            case Kind::Harmonic:
                return 0.5 * (w1 * w1 * x1 * x1 + w2 * w2 * x2 * x2);
            case Kind::Quartic: {
                double r2 = x1 * x1 + x2 * x2;
                return c * r2 * r2;
            }
            default:
                throw std::logic_error("TrapSpec: tabulated traps are sampled, not evaluated");
        }
    }
};

inline void validate(const TrapSpec& t) {
    if (t.kind == TrapSpec::Kind::Harmonic) {
        if (!(t.w1 > 0) || !(t.w2 > 0))
            throw std::invalid_argument("trap: harmonic frequencies must be positive");
    } else if (t.kind == TrapSpec::Kind::Quartic) {
        if (!(t.c > 0))
            throw std::invalid_argument("trap: quartic coefficient must be positive");
    } else {
        for (double v : t.table.values)
            if (!(v >= 0) || !std::isfinite(v))
                throw std::invalid_argument("trap: table values must be finite and >= 0");
    }
}

inline RealField trap_on_grid(const TrapSpec& t, const Grid2D& g) {
    if (t.kind == TrapSpec::Kind::Table) {
        if (!(t.table.grid == g))
            throw std::invalid_argument("trap: table grid mismatch");
        return t.table;
    }
    RealField V(g);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            V.at(i, j) = t.eval(g.x1(i), g.x2(j));
    return V;
}

struct PhysicalParams {
    double beta = 0.0;
    double lambda = 0.0;
    double n3 = 1.0; // polarization component, |n3| <= 1
    TrapSpec trap;
    // Set by tune_to_borderline: the caller asserts C(a,b) = 1 and the
    // classifier takes the borderline branch directly.
    bool exact_borderline = false;
};

inline void validate(const PhysicalParams& p) {
    if (!std::isfinite(p.beta) || !std::isfinite(p.lambda) || !std::isfinite(p.n3))
        throw std::invalid_argument("params: non-finite value");
    if (std::abs(p.n3) > 1.0)
        throw std::invalid_argument("params: |n3| must be <= 1");
    validate(p.trap);
}

struct EffectiveParams {
    double a = 0.0;
    double b = 0.0;
    bool trivial_regime() const { return a + 0.5 * b <= 0.0 && a - 0.5 * b <= 0.0; }
};

inline EffectiveParams effective_params(const PhysicalParams& p) {
    validate(p);
    double n3sq = p.n3 * p.n3;
    EffectiveParams e;
    e.a = p.lambda - p.beta + 1.5 * p.lambda * (n3sq - 1.0);
    e.b = 3.0 * p.lambda * (n3sq - 1.0);
    return e;
}

struct EnergyBreakdown {
    double kinetic = 0, potential = 0, quartic = 0, dipolar = 0, total = 0;
    double mass = 0;
};

// int |grad u|^2 from the frequency-space field.
inline double grad_norm_sq(const WaveField& uh_freq) {
    const Grid2D& g = uh_freq.grid;
    double s = 0.0;
    for (int i = 0; i < g.n1; ++i) {
        double xi1 = g.xi1(i);
        for (int j = 0; j < g.n2; ++j) {
            double xi2 = g.xi2(j);
            s += (xi1 * xi1 + xi2 * xi2) * std::norm(uh_freq.at(i, j));
        }
    }
    return s * g.freq_cell_area();
}

inline double kinetic_energy(const WaveField& uh_freq) {
    return 0.5 * grad_norm_sq(uh_freq);
}

// F_{a,b}[rho] = int symbol_fab |rho_hat|^2 dxi (frequency-space sum).
inline double fab_energy(const RealField& rho, double a, double b) {
    WaveField r(rho.grid);
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        if (!std::isfinite(rho.values[i]))
            throw std::invalid_argument("fab_energy: non-finite density");
        r.values[i] = rho.values[i];
    }
    WaveField rh = forward_transform(r);
    const Grid2D& g = rho.grid;
    double s = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            s += symbol_fab(g.xi1(i), g.xi2(j), a, b) * std::norm(rh.at(i, j));
    return s * g.freq_cell_area();
}

// Same quantity through the Coulomb route:
//   (a - b/2) int rho^2 - b int (d^2_{x1} U_rho) rho,  U_rho = (-Delta)^{-1} rho,
// with the Poisson solve done spectrally (zero mode of U_rho set to 0) and
// the final pairing summed in position space.  Cross-check of fab_energy.
inline double fab_energy_coulomb_form(const RealField& rho, double a, double b) {
    const Grid2D& g = rho.grid;
    WaveField r(g);
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        if (!std::isfinite(rho.values[i]))
            throw std::invalid_argument("fab_energy_coulomb_form: non-finite density");
        r.values[i] = rho.values[i];
    }
    WaveField rh = forward_transform(r);
    // d^2_{x1} (-Delta)^{-1} rho  <->  -xi1^2/|xi|^2 rho_hat.  The zero
    // mode takes the angular average -1/2, the same convention that puts
    // symbol_fab(0) = a; with 0 there instead, the two forms would
    // differ by (b/2)|rho_hat(0)|^2 per frequency cell.
    WaveField wh = rh;
    for (int i = 0; i < g.n1; ++i) {
        double xi1 = g.xi1(i);
        for (int j = 0; j < g.n2; ++j) {
            double xi2 = g.xi2(j);
            double k2 = xi1 * xi1 + xi2 * xi2;
            wh.at(i, j) = (k2 == 0.0) ? wh.at(i, j) * (-0.5)
                                      : wh.at(i, j) * (-xi1 * xi1 / k2);
        }
    }
    WaveField w = inverse_transform(wh);
    double rho2 = 0.0, pairing = 0.0;
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        rho2 += rho.values[i] * rho.values[i];
        pairing += w.values[i].real() * rho.values[i];
    }
    rho2 *= g.cell_area();
    pairing *= g.cell_area();
    return (a - 0.5 * b) * rho2 - b * pairing;
}

// Physical nonlocal interaction F^int[rho] = int m(xi) |rho_hat|^2 dxi.
inline double interaction_quasi2d(const RealField& rho, double n3) {
    WaveField r(rho.grid);
    for (std::size_t i = 0; i < rho.values.size(); ++i) r.values[i] = rho.values[i];
    WaveField rh = forward_transform(r);
    const Grid2D& g = rho.grid;
    double s = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            s += symbol_quasi2d(g.xi1(i), g.xi2(j), n3) * std::norm(rh.at(i, j));
    return s * g.freq_cell_area();
}

inline EnergyBreakdown energy_2d(const WaveField& u, const PhysicalParams& p) {
    validate(p);
    if (!u.finite()) throw std::invalid_argument("energy_2d: non-finite field");
    EnergyBreakdown e;
    e.mass = mass(u);
    if (!(e.mass > 0)) throw std::invalid_argument("energy_2d: zero mass");

    const Grid2D& g = u.grid;
    WaveField uh = forward_transform(u);
    e.kinetic = kinetic_energy(uh);

    RealField V = trap_on_grid(p.trap, g);
    double pot = 0.0, quart = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        double d = std::norm(u.values[i]);
        pot += V.values[i] * d;
        quart += d * d;
    }
    e.potential = pot * g.cell_area();
    double n3sq = p.n3 * p.n3;
    e.quartic = 0.5 * (p.beta - p.lambda + 3.0 * n3sq * p.lambda) * quart * g.cell_area();

    e.dipolar = (p.lambda == 0.0)
                    ? 0.0
                    : -0.75 * p.lambda * interaction_quasi2d(density(u), p.n3);
    e.total = e.kinetic + e.potential + e.quartic + e.dipolar;
    return e;
}

// Exact mesh-refined realization of the squeeze u_L = L^{-1} u(./L)
// for L = 1/m, integer m: same physical box, mesh refined by m, samples
// m * u embedded at the center (the rescaled nodes land exactly on the
// coarse lattice, so no interpolation is involved).
inline WaveField squeeze_refined(const WaveField& u, int m) {
    if (m < 1) throw std::invalid_argument("squeeze_refined: m must be >= 1");
    const Grid2D& g = u.grid;
    if (m == 1) return u;
    Grid2D g2 = make_grid(g.n1 * m, g.n2 * m, g.L1, g.L2);
    WaveField v(g2);
    int c1 = g2.n1 / 2 - g.n1 / 2, c2 = g2.n2 / 2 - g.n2 / 2;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            v.at(c1 + i, c2 + j) = static_cast<double>(m) * u.at(i, j);
    return v;
}

// First variation dE/d(conj u): pairing is dE = 2 Re <g, du> dx^2.
inline WaveField gradient_energy(const WaveField& u, const PhysicalParams& p) {
    validate(p);
    if (!u.finite()) throw std::invalid_argument("gradient_energy: non-finite field");
    const Grid2D& g = u.grid;

    // -(1/2) Laplacian u, spectral.
    WaveField uh = forward_transform(u);
    for (int i = 0; i < g.n1; ++i) {
        double xi1 = g.xi1(i);
        for (int j = 0; j < g.n2; ++j) {
            double xi2 = g.xi2(j);
            uh.at(i, j) *= 0.5 * (xi1 * xi1 + xi2 * xi2);
        }
    }
    WaveField grad = inverse_transform(uh);

    RealField V = trap_on_grid(p.trap, g);
    double n3sq = p.n3 * p.n3;
    double qc = p.beta - p.lambda + 3.0 * n3sq * p.lambda;

    if (p.lambda != 0.0) {
        RealField rho = density(u);
        WaveField r(g);
        for (std::size_t i = 0; i < rho.values.size(); ++i) r.values[i] = rho.values[i];
        KernelSymbol m = build_symbol_quasi2d(g, p.n3);
        WaveField conv = apply_multiplier(r, m.values);
        for (std::size_t i = 0; i < u.values.size(); ++i) {
            double d = rho.values[i];
            grad.values[i] += (V.values[i] + qc * d) * u.values[i]
                              - 1.5 * p.lambda * conv.values[i].real() * u.values[i];
        }
    } else {
        for (std::size_t i = 0; i < u.values.size(); ++i) {
            double d = std::norm(u.values[i]);
            grad.values[i] += (V.values[i] + qc * d) * u.values[i];
        }
    }
    return grad;
}

} // namespace dipolar

#endif
