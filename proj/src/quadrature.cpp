#include "pexider/quadrature.hpp"

#include <cmath>
#include <cstddef>

#include "pexider/errors.hpp"

namespace pexider {

namespace {

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

}  // namespace

QuadResult gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    const double fc = f(c);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;

    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kronrod *= h;
    gauss *= h;
    return {kronrod, std::fabs(kronrod - gauss)};
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b, tol;
        int depth;
    };
    constexpr int kMaxDepth = 52;

    double total = 0.0;
    // Explicit stack; panels split until the local estimate meets its budget.
    Panel stack[kMaxDepth * 2 + 4];
    std::size_t top = 0;
    stack[top++] = {a, b, tol, 0};
    while (top > 0) {
        Panel p = stack[--top];
        QuadResult r = gauss_kronrod_15(f, p.a, p.b);
        if (r.error <= p.tol ||
            std::fabs(p.b - p.a) < 1e-15 * (1.0 + std::fabs(p.a) + std::fabs(p.b))) {
            total += r.value;
            continue;
        }
        if (p.depth >= kMaxDepth)
            throw NumericError("quadrature did not converge on [" + std::to_string(p.a) + "," +
                               std::to_string(p.b) + "] (error " + std::to_string(r.error) + ")");
        const double m = 0.5 * (p.a + p.b);
        stack[top++] = {p.a, m, 0.5 * p.tol, p.depth + 1};
        stack[top++] = {m, p.b, 0.5 * p.tol, p.depth + 1};
    }
    return total;
}

}  // namespace pexider
