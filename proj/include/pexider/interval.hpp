#ifndef PEXIDER_INTERVAL_HPP
#define PEXIDER_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "pexider/errors.hpp"

namespace pexider {

/// Absolute slack used for endpoint comparisons when deciding emptiness,
/// containment and coverage of computed intervals.
inline constexpr double kEndpointSlack = 1e-12;

/// Offset (relative to interval length) used when an endpoint limit of a
/// function is taken as a plain evaluation just inside the interval.
inline constexpr double kImageMarginRel = 1e-12;

/// Default interior margin (relative to domain length) for user-facing
/// function evaluation.
inline constexpr double kDefaultMarginRel = 1e-6;

/// A nonempty bounded open interval ]lo,hi[.  The domain object everywhere.
struct OpenInterval {
    double lo;
    double hi;

    OpenInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(std::isfinite(lo) && std::isfinite(hi)))
            throw DomainError("interval endpoints must be finite");
        if (!(lo < hi))
            throw DomainError("empty interval: lo=" + std::to_string(lo) +
                              " hi=" + std::to_string(hi));
    }

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }

    bool contains(double x, double slack = 0.0) const { return x > lo - slack && x < hi + slack; }

    /// H subset of this, up to `slack` on each endpoint.
    bool contains_interval(const OpenInterval& h, double slack = kEndpointSlack) const {
        return h.lo >= lo - slack && h.hi <= hi + slack;
    }

    bool same_as(const OpenInterval& o, double slack = kEndpointSlack) const {
        return std::fabs(lo - o.lo) <= slack && std::fabs(hi - o.hi) <= slack;
    }

    OpenInterval shrunk(double margin) const {
        if (2.0 * margin >= length())
            throw DomainError("margin " + std::to_string(margin) + " swallows interval");
        return {lo + margin, hi - margin};
    }

    std::string str() const { return "]" + std::to_string(lo) + "," + std::to_string(hi) + "["; }
};

/// ]lo,hi[ if longer than the emptiness slack, otherwise absent.
inline std::optional<OpenInterval> make_if_nonempty(double lo, double hi,
                                                    double slack = kEndpointSlack) {
    if (hi - lo > slack) return OpenInterval(lo, hi);
    return std::nullopt;
}

inline std::optional<OpenInterval> intersect(const OpenInterval& a, const OpenInterval& b) {
    return make_if_nonempty(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
}

inline OpenInterval minkowski_sum(const OpenInterval& a, const OpenInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

inline OpenInterval operator+(const OpenInterval& a, const OpenInterval& b) {
    return minkowski_sum(a, b);
}

inline OpenInterval shift(const OpenInterval& a, double c) { return {a.lo + c, a.hi + c}; }

}  // namespace pexider

#endif
