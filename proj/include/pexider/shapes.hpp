#ifndef PEXIDER_SHAPES_HPP
#define PEXIDER_SHAPES_HPP

#include <random>

#include "pexider/fn1d.hpp"

namespace pexider {

/// Small library of strictly monotone shapes used by the CLI, the randomized
/// suites and the tests: polynomial, exponential and shifted-logarithm forms.
namespace shapes {

Fn1D identity(const OpenInterval& I);
Fn1D affine(const OpenInterval& I, double slope, double intercept);
/// c0 + c1 x + ... (monotonicity is the caller's responsibility; builders
/// check it via sampled derivatives).
Fn1D poly(const OpenInterval& I, std::vector<double> coeffs);
/// amplitude * exp(scale x) + offset
Fn1D exponential(const OpenInterval& I, double scale, double amplitude = 1.0, double offset = 0.0);
/// scale * log(x + shift); needs x + shift > 0 on I
Fn1D log_shifted(const OpenInterval& I, double shift, double scale = 1.0);

/// A random strictly monotone shape on I with the requested direction
/// (+1/-1), values kept O(10) so exact-identity residuals stay near machine
/// precision.
Fn1D random_monotone(std::mt19937_64& rng, const OpenInterval& I, int direction);

/// A random interval within [-3,3] with length in [1,3].
OpenInterval random_interval(std::mt19937_64& rng);

/// A random subinterval of I covering at least a tenth of it; with
/// `allow_full` an exact copy of I is returned once in a while.
OpenInterval random_subinterval(std::mt19937_64& rng, const OpenInterval& I,
                                bool allow_full = false);

}  // namespace shapes

}  // namespace pexider

#endif
