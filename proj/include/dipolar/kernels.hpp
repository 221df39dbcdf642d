// Fourier symbols of the interaction kernels, plus the real-space
// kernel K kept as a quadrature cross-check.
//
// All nonlocal terms act as Fourier multipliers.  The physical quasi-2D
// symbol is
//   m(xi) = -(1/pi) * [ (1-2*n3^2)*xi1^2 - n3^2*xi2^2 ] * G(|xi|),
//   G(k)  = int_R exp(-s^2/(4 pi)) / (k^2 + s^2) ds
//         = (pi/k) * exp(k^2/(4 pi)) * erfc(k/(2 sqrt(pi)))   (k > 0),
// with m(0) = 0.  G(k) ~ 2 pi / k^2 for large k, which is what connects
// the physical interaction to the high-frequency quadratic form F_{a,b}.

#ifndef DIPOLAR_KERNELS_HPP
#define DIPOLAR_KERNELS_HPP

#include <cmath>
#include <stdexcept>

#include "grid.hpp"
#include "quadrature.hpp"

namespace dipolar {

// Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
// Direct product is fine until erfc underflows; past that use the
// asymptotic series 1/(x sqrt(pi)) * sum (-1)^n (2n-1)!! / (2x^2)^n,
// whose truncation error at 8 terms is far below 1e-14 for x > 20.
inline double erfcx(double x) {
    if (x < 0) throw std::invalid_argument("erfcx: negative argument");
    if (x <= 20.0) return std::exp(x * x) * std::erfc(x);
    double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= 8; ++n) {
        term *= -(2.0 * n - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(M_PI));
}

// G(k) via the closed form above; G(0+) diverges like pi^{3/2}... the
// symbol always multiplies G by k^2-scale factors, so callers never need
// k = 0 (m(0) is pinned separately).
inline double kernel_G(double k) {
    if (!(k > 0)) throw std::invalid_argument("kernel_G: requires k > 0");
    return (M_PI / k) * erfcx(k / (2.0 * std::sqrt(M_PI)));
}

// High-frequency dipolar symbol: xi1^2/|xi|^2 - 1/2, zero mode 0 (its
// angular average).
inline double symbol_high_freq(double xi1, double xi2) {
    double k2 = xi1 * xi1 + xi2 * xi2;
    if (k2 == 0.0) return 0.0;
    return xi1 * xi1 / k2 - 0.5;
}

// Quadratic-form weights: ((a+b/2) xi1^2 + (a-b/2) xi2^2)/|xi|^2, zero
// mode a (angular average).
inline double symbol_fab(double xi1, double xi2, double a, double b) {
    double k2 = xi1 * xi1 + xi2 * xi2;
    if (k2 == 0.0) return a;
    return ((a + 0.5 * b) * xi1 * xi1 + (a - 0.5 * b) * xi2 * xi2) / k2;
}

// Physical quasi-2D interaction symbol m(xi); see header comment.
inline double symbol_quasi2d(double xi1, double xi2, double n3) {
    if (std::abs(n3) > 1.0)
        throw std::invalid_argument("symbol_quasi2d: |n3| must be <= 1");
    double k2 = xi1 * xi1 + xi2 * xi2;
    if (k2 == 0.0) return 0.0;
    double n3sq = n3 * n3;
    double num = (1.0 - 2.0 * n3sq) * xi1 * xi1 - n3sq * xi2 * xi2;
    return -(1.0 / M_PI) * num * kernel_G(std::sqrt(k2));
}

enum class SymbolKind { HighFreqU2D, Fab, Quasi2D };

struct KernelSymbol {
    Grid2D grid;
    SymbolKind kind;
    RealField values;
};

inline KernelSymbol build_symbol_high_freq(const Grid2D& g) {
    KernelSymbol s{g, SymbolKind::HighFreqU2D, RealField(g)};
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            s.values.at(i, j) = symbol_high_freq(g.xi1(i), g.xi2(j));
    return s;
}

inline KernelSymbol build_symbol_fab(const Grid2D& g, double a, double b) {
    KernelSymbol s{g, SymbolKind::Fab, RealField(g)};
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            s.values.at(i, j) = symbol_fab(g.xi1(i), g.xi2(j), a, b);
    return s;
}

inline KernelSymbol build_symbol_quasi2d(const Grid2D& g, double n3) {
    if (std::abs(n3) > 1.0)
        throw std::invalid_argument("build_symbol_quasi2d: |n3| must be <= 1");
    KernelSymbol s{g, SymbolKind::Quasi2D, RealField(g)};
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            s.values.at(i, j) = symbol_quasi2d(g.xi1(i), g.xi2(j), n3);
    return s;
}

// Real-space kernel K(x) = (1/(2 sqrt(2) pi^{3/2})) int_R
// exp(-s^2/2)/sqrt(|x|^2 + 2 pi s^2) ds.  Validation path only; solvers
// go through the Fourier symbols.
inline double kernel_K_realspace(double x1, double x2) {
    double r2 = x1 * x1 + x2 * x2;
    if (r2 == 0.0)
        throw std::invalid_argument("kernel_K_realspace: x = 0 excluded");
    auto integrand = [r2](double s) {
        return std::exp(-0.5 * s * s) / std::sqrt(r2 + 2.0 * M_PI * s * s);
    };
    // Gaussian factor makes the tail beyond |s| = 12 negligible.
    double I = integrate(integrand, 0.0, 12.0, 1e-13);
    return 2.0 * I / (2.0 * std::sqrt(2.0) * std::pow(M_PI, 1.5));
}

} // namespace dipolar

#endif
