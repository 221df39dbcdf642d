// Shared fixtures for the test suite.

#ifndef TESTS_HELPERS_HPP
#define TESTS_HELPERS_HPP

#include <cmath>
#include <random>

#include "dipolar/fft.hpp"
#include "dipolar/grid.hpp"

namespace helpers {

using dipolar::Complex;
using dipolar::Grid2D;
using dipolar::WaveField;

inline WaveField gaussian(const Grid2D& g, double s1, double s2, double amp = 1.0) {
    WaveField u(g);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            double x1 = g.x1(i) / s1, x2 = g.x2(j) / s2;
            u.at(i, j) = amp * std::exp(-0.5 * (x1 * x1 + x2 * x2));
        }
    return u;
}

inline WaveField normalized(WaveField u) {
    double m = dipolar::mass(u);
    for (Complex& v : u.values) v /= std::sqrt(m);
    return u;
}

// Smooth random field: white noise in frequency space under a Gaussian
// spectral envelope, transformed back.  Deterministic per seed.
inline WaveField random_smooth(const Grid2D& g, unsigned seed, double xi_width = 2.0,
                               bool complex_valued = true) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    WaveField uh(g, dipolar::Space::Frequency);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            double k2 = g.xi1(i) * g.xi1(i) + g.xi2(j) * g.xi2(j);
            double env = std::exp(-0.5 * k2 / (xi_width * xi_width));
            uh.at(i, j) = Complex(gauss(rng), gauss(rng)) * env;
        }
    WaveField u = dipolar::inverse_transform(uh);
    if (!complex_valued)
        for (Complex& v : u.values) v = v.real();
    return normalized(std::move(u));
}

} // namespace helpers

#endif
