#ifndef PEXIDER_QUADRATURE_HPP
#define PEXIDER_QUADRATURE_HPP

#include <functional>

namespace pexider {

struct QuadResult {
    double value;
    double error;  // |K15 - G7| local estimate
};

/// One Gauss(7)/Kronrod(15) panel on [a,b].
QuadResult gauss_kronrod_15(const std::function<double(double)>& f, double a, double b);

/// Adaptive bisection of panels until every local error estimate is within its
/// share of `tol`.  Throws NumericError when the subdivision limit is reached
/// with the budget still exceeded.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace pexider

#endif
