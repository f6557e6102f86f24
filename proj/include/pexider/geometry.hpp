#ifndef PEXIDER_GEOMETRY_HPP
#define PEXIDER_GEOMETRY_HPP

#include <optional>
#include <utility>

#include "pexider/fn1d.hpp"
#include "pexider/interval.hpp"

namespace pexider {

/// The open interval g1(J1)+g2(J2) for continuous strictly monotone g1, g2.
OpenInterval sumset_image(const Fn1D& g1, const Fn1D& g2, const OpenInterval& J1,
                          const OpenInterval& J2);

/// (H^-, H^+): the parts of I strictly below inf H and strictly above sup H.
/// A side is absent when H reaches the corresponding end of I.
std::pair<std::optional<OpenInterval>, std::optional<OpenInterval>> side_sets(
    const OpenInterval& H, const OpenInterval& I);

/// (2H - H) ∩ I, the reflection of H across its own points clipped to I.
/// Contains H, strictly so whenever H != I.
OpenInterval reflection_set(const OpenInterval& H, const OpenInterval& I);

/// The restricted preimage g_{3-k}^{-1}( g1(H)+g2(H) - g_k(x) ) ∩ H for
/// x in I; absent when empty.  Requires g1, g2 monotone in the same sense.
std::optional<OpenInterval> restricted_preimage(const OpenInterval& H, double x, int k,
                                                const Fn1D& g1, const Fn1D& g2,
                                                const OpenInterval& I);

/// {x in I : both restricted preimages at x are nonempty}; an open interval
/// containing H, strictly when H != I.
OpenInterval extension_set(const OpenInterval& H, const Fn1D& g1, const Fn1D& g2,
                           const OpenInterval& I);

struct IntervalSetReport {
    std::optional<OpenInterval> ext;
    std::optional<OpenInterval> ref;
    std::optional<OpenInterval> star;  // ext ∩ ref
    std::optional<OpenInterval> side_minus;
    std::optional<OpenInterval> side_plus;
};

IntervalSetReport interval_report(const OpenInterval& H, const Fn1D& g1, const Fn1D& g2,
                                  const OpenInterval& I);

}  // namespace pexider

#endif
