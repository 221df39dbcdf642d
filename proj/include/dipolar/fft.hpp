// Discrete Fourier transform pair on Grid2D, wrapping FFTW.
//
// forward_transform approximates the isometric convention
//   f_hat(xi) = (1/2pi) int f(x) e^{-i xi.x} dx
// by   u_hat_k = (dx1*dx2/(2pi)) * (-1)^(k1+k2) * DFT[u]_k,
// the sign flip accounting for the grid being centered at the origin
// (e^{-i xi_k x_j} = e^{-2pi i kj/n} e^{i pi k}).  With dxi_j = 2pi/L_j
// this makes the discrete Plancherel identity
//   sum |u|^2 dx1 dx2 = sum |u_hat|^2 dxi1 dxi2
// hold to round-off.

#ifndef DIPOLAR_FFT_HPP
#define DIPOLAR_FFT_HPP

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "grid.hpp"

namespace dipolar {

namespace detail {

// Cache of FFTW plans keyed by (n1, n2, sign).  Plans are created with
// FFTW_ESTIMATE (deterministic, no measurement randomness) and
// FFTW_UNALIGNED so they can execute on any caller buffer.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int n1, int n2, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(n1, n2, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Planning with a scratch buffer; execution uses fftw_execute_dft.
        std::vector<Complex> scratch(static_cast<std::size_t>(n1) * n2);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_2d(n1, n2, p, p, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fft: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline void execute(const Grid2D& g, std::vector<Complex>& data, int sign) {
    fftw_plan plan = PlanCache::instance().get(g.n1, g.n2, sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

// Multiply entry (k1,k2) by (-1)^(k1+k2); same pattern works in either space.
inline void checkerboard(const Grid2D& g, std::vector<Complex>& v) {
    for (int i = 0; i < g.n1; ++i) {
        std::size_t row = static_cast<std::size_t>(i) * g.n2;
        for (int j = (i & 1) ? 0 : 1; j < g.n2; j += 2) v[row + j] = -v[row + j];
    }
}

} // namespace detail

inline WaveField forward_transform(const WaveField& u) {
    if (u.space != Space::Position)
        throw std::invalid_argument("forward_transform: field not in position space");
    if (!u.finite())
        throw std::invalid_argument("forward_transform: non-finite field");
    WaveField out = u;
    detail::execute(out.grid, out.values, FFTW_FORWARD);
    detail::checkerboard(out.grid, out.values);
    const double cf = out.grid.cell_area() / (2.0 * M_PI);
    for (Complex& v : out.values) v *= cf;
    out.space = Space::Frequency;
    return out;
}

inline WaveField inverse_transform(const WaveField& uh) {
    if (uh.space != Space::Frequency)
        throw std::invalid_argument("inverse_transform: field not in frequency space");
    if (!uh.finite())
        throw std::invalid_argument("inverse_transform: non-finite field");
    WaveField out = uh;
    detail::checkerboard(out.grid, out.values);
    detail::execute(out.grid, out.values, FFTW_BACKWARD);
    const double ci = out.grid.freq_cell_area() / (2.0 * M_PI);
    for (Complex& v : out.values) v *= ci;
    out.space = Space::Position;
    return out;
}

// Apply a frequency-space multiplier table to a position-space field.
inline WaveField apply_multiplier(const WaveField& u, const RealField& symbol) {
    WaveField uh = forward_transform(u);
    for (std::size_t i = 0; i < uh.values.size(); ++i) uh.values[i] *= symbol.values[i];
    return inverse_transform(uh);
}

} // namespace dipolar

#endif
