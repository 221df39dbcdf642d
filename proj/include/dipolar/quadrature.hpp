// Adaptive 1D quadrature (Gauss-Kronrod 7-15 with bisection).  Used for
// the real-space kernel evaluation and as an independent oracle in tests.

#ifndef DIPOLAR_QUADRATURE_HPP
#define DIPOLAR_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dipolar {

namespace detail {

// Kronrod-15 nodes/weights on [-1,1]; Gauss-7 weights on the odd nodes.
inline const double gk_nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898,  0.0,                0.207784955007898,
     0.405845151377397,  0.586087235467691,  0.741531185599394,
     0.864864423359769,  0.949107912342759,  0.991455371120813};
inline const double gk_wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline const double gk_wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct PanelResult {
    double integral;
    double error;
};

inline PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double ik = 0.0, ig = 0.0;
    for (int i = 0; i < 15; ++i) {
        double fv = f(c + h * gk_nodes[i]);
        ik += gk_wk[i] * fv;
        if (i % 2 == 1) ig += gk_wg[i / 2] * fv;
    }
    ik *= h;
    ig *= h;
    double err = std::pow(200.0 * std::abs(ik - ig), 1.5);
    if (!(err < std::abs(ik - ig))) err = std::abs(ik - ig);
    return {ik, err};
}

} // namespace detail

// Integrate f over [a, b] to the requested tolerances by adaptive
// interval bisection.  Throws if the subdivision budget is exhausted.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12, double abs_tol = 1e-300,
                        int max_panels = 4000) {
    struct Panel {
        double a, b, integral, error;
    };
    auto first = detail::gk15(f, a, b);
    std::vector<Panel> panels{{a, b, first.integral, first.error}};
    for (int iter = 0; iter < max_panels; ++iter) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total += panels[i].integral;
            err += panels[i].error;
            if (panels[i].error > panels[worst].error) worst = i;
        }
        if (err <= rel_tol * std::abs(total) || err <= abs_tol) return total;
        Panel p = panels[worst];
        double m = 0.5 * (p.a + p.b);
        auto left = detail::gk15(f, p.a, m);
        auto right = detail::gk15(f, m, p.b);
        panels[worst] = {p.a, m, left.integral, left.error};
        panels.push_back({m, p.b, right.integral, right.error});
    }
    throw std::runtime_error("integrate: adaptive subdivision budget exhausted");
}

} // namespace dipolar

#endif
