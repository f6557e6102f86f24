#ifndef PEXIDER_SERIALIZE_HPP
#define PEXIDER_SERIALIZE_HPP

#include <json.hpp>

#include "pexider/geometry.hpp"
#include "pexider/verify.hpp"

namespace pexider {

/// Insertion-ordered JSON so identical inputs serialize byte-identically.
using Json = nlohmann::ordered_json;

namespace ser {

Json interval(const OpenInterval& iv);
OpenInterval to_interval(const Json& j);

Json expr(const ExprPtr& e);
ExprPtr to_expr(const Json& j);

Json fn(const Fn1D& f);
Fn1D to_fn(const Json& j);

Json residual(const ResidualReport& r);
Json affinity(const AffinityReport& r);
Json const_checks(const std::vector<ConstCheck>& cs);
Json set_report(const IntervalSetReport& r);

}  // namespace ser

}  // namespace pexider

#endif
