// Radial shooting oracle for the standard (b = 0) optimizer: the
// positive decaying solution of
//   Q'' + Q'/r - Q + Q^3 = 0,  Q'(0) = 0,
// whose squared L2 norm sets the optimal constant of
//   int |u|^4 <= C int|grad u|^2 int|u|^2,   C = 2 / ||Q||_2^2.
// Built independently of the spectral solver: fixed-step RK4 plus
// bisection on the initial height Q(0).

#ifndef ORACLES_TOWNES_HPP
#define ORACLES_TOWNES_HPP

#include <cmath>
#include <utility>

namespace oracles {

namespace townes_detail {

// RHS of the first-order system (Q, P = Q'); at r = 0 the radial term
// Q'/r has the finite limit Q''(0) = (Q - Q^3)/2.
inline void rhs(double r, double Q, double P, double& dQ, double& dP) {
    dQ = P;
    dP = (r == 0.0) ? 0.5 * (Q - Q * Q * Q) : Q - Q * Q * Q - P / r;
}

// Shoot from q0; returns +1 if the solution turns up (q0 too small),
// -1 if it crosses zero (q0 too large), 0 if it survives to r_max.
// When mass is requested, accumulates 2 pi int Q^2 r dr along the way.
inline int shoot(double q0, double r_max, double dr, double* mass_out) {
    double Q = q0, P = 0.0, r = 0.0, mass = 0.0;
    auto step = [&](double& Qv, double& Pv, double rv) {
        double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
        rhs(rv, Qv, Pv, k1q, k1p);
        rhs(rv + 0.5 * dr, Qv + 0.5 * dr * k1q, Pv + 0.5 * dr * k1p, k2q, k2p);
        rhs(rv + 0.5 * dr, Qv + 0.5 * dr * k2q, Pv + 0.5 * dr * k2p, k3q, k3p);
        rhs(rv + dr, Qv + dr * k3q, Pv + dr * k3p, k4q, k4p);
        Qv += dr / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
        Pv += dr / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    };
    int outcome = 0;
    while (r < r_max) {
        if (mass_out) mass += Q * Q * r * dr;
        step(Q, P, r);
        r += dr;
        if (Q <= 0.0) {
            outcome = -1; // crossed zero
            break;
        }
        if ((P > 0.0 && Q < q0) || Q > 1.5 * q0) {
            outcome = +1; // turned up
            break;
        }
    }
    // Partial mass is still meaningful: the bisected trajectory fails
    // only where Q is already ~1e-7, so the missing tail is negligible.
    if (mass_out) *mass_out = 2.0 * M_PI * mass;
    return outcome;
}

} // namespace townes_detail

struct TownesOracle {
    double q0;       // Q(0)
    double mass_sq;  // ||Q||_2^2
    double C_gn;     // 2 / ||Q||_2^2
};

inline TownesOracle townes_oracle(double r_max = 15.0, double dr = 5e-4) {
    double lo = 1.0, hi = 3.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        int outcome = townes_detail::shoot(mid, r_max, dr, nullptr);
        if (outcome < 0)
            hi = mid; // crossed zero: initial height too large
        else if (outcome > 0)
            lo = mid; // turned up: too small
        else
            break; // survived the whole interval at this resolution
        if (hi - lo < 1e-14) break;
    }
    double q0 = 0.5 * (lo + hi);
    // The surviving trajectory decays like e^{-r}; mass beyond the point
    // where the shot inevitably fails is O(1e-10) and ignored.
    double mass = 0.0;
    townes_detail::shoot(q0, r_max, dr, &mass);
    return {q0, mass, 2.0 / mass};
}

} // namespace oracles

#endif
