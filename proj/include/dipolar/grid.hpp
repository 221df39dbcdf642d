// Periodic 2D computational box and complex scalar fields on it.
//
// Conventions: nodes x_j = (j - n/2)*dx per axis (box centered at the
// origin), frequency lattice xi_k = 2*pi*k/L with k in the symmetric
// integer range [-n/2, n/2).  Node counts must be even so the Nyquist
// row is unambiguous.

#ifndef DIPOLAR_GRID_HPP
#define DIPOLAR_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dipolar {

using Complex = std::complex<double>;

struct Grid2D {
    int n1 = 0, n2 = 0;      // node counts per axis (even, >= 16)
    double L1 = 0, L2 = 0;   // box side lengths
    double dx1 = 0, dx2 = 0; // spacings L_j / n_j

    std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }

    double x1(int i) const { return (i - n1 / 2) * dx1; }
    double x2(int j) const { return (j - n2 / 2) * dx2; }

    // Signed frequency for FFT-ordered index k in [0, n).
    double xi1(int k) const {
        int s = (k < n1 / 2) ? k : k - n1;
        return 2.0 * M_PI * s / L1;
    }
    double xi2(int k) const {
        int s = (k < n2 / 2) ? k : k - n2;
        return 2.0 * M_PI * s / L2;
    }

    double cell_area() const { return dx1 * dx2; }
    double freq_cell_area() const {
        return (2.0 * M_PI / L1) * (2.0 * M_PI / L2);
    }

    bool operator==(const Grid2D& o) const {
        return n1 == o.n1 && n2 == o.n2 && L1 == o.L1 && L2 == o.L2;
    }
};

inline Grid2D make_grid(int n1, int n2, double L1, double L2) {
    if (n1 < 16 || n2 < 16)
        throw std::invalid_argument("make_grid: node counts must be >= 16");
    if (n1 % 2 != 0 || n2 % 2 != 0)
        throw std::invalid_argument("make_grid: node counts must be even");
    if (!(L1 > 0) || !(L2 > 0))
        throw std::invalid_argument("make_grid: box lengths must be positive");
    Grid2D g;
    g.n1 = n1; g.n2 = n2;
    g.L1 = L1; g.L2 = L2;
    g.dx1 = L1 / n1;
    g.dx2 = L2 / n2;
    return g;
}

enum class Space { Position, Frequency };

// Complex scalar field sampled on a Grid2D, tagged with the space it
// currently lives in.  Row-major storage, index i*n2 + j.
struct WaveField {
    Grid2D grid;
    Space space = Space::Position;
    std::vector<Complex> values;

    WaveField() = default;
    WaveField(const Grid2D& g, Space s = Space::Position)
        : grid(g), space(s), values(g.size(), Complex(0.0, 0.0)) {}

    Complex& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n2 + j]; }
    const Complex& at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n2 + j]; }

    bool finite() const {
        for (const Complex& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }
};

// Real scalar field (densities, potentials, symbol tables).
struct RealField {
    Grid2D grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(const Grid2D& g) : grid(g), values(g.size(), 0.0) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n2 + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n2 + j]; }
};

// Sum |u|^2 dx1 dx2 over the box.
inline double mass(const WaveField& u) {
    double s = 0.0;
    for (const Complex& v : u.values) s += std::norm(v);
    return s * u.grid.cell_area();
}

// Real L2 inner product 2*Re<f,g> is what directional derivatives of the
// energy pair with; this returns Re sum conj(f) g dx^2.
inline double inner_real(const WaveField& f, const WaveField& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s += (std::conj(f.values[i]) * g.values[i]).real();
    return s * f.grid.cell_area();
}

// |u|^2 with tiny negative round-off clamped to zero.
inline RealField density(const WaveField& u) {
    RealField rho(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        double d = std::norm(u.values[i]);
        rho.values[i] = d < 0.0 ? 0.0 : d;
    }
    return rho;
}

} // namespace dipolar

#endif
