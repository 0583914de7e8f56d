#pragma once

#include <string>
#include <string_view>

#include "orbitchaos/core/event_set.hpp"
#include "orbitchaos/core/test_function.hpp"

namespace orbitchaos {

/// Version of the textual set/function grammar, recorded in run manifests.
inline constexpr std::string_view kGrammarVersion = "1";

// Sets
//   empty
//   box:a0,b0;a1,b1                      [a0,b0) x [a1,b1) in the unit square
//   cyl:1:[0.5,0.75);3:[0,0.5)           cylinder over a product of intervals
//   cyl:1:[0,0.5)x[0,1)                  cylinder over a product of squares
//
// Test functions (the domain decides how coordinates are named)
//   ind:<set>                            indicator
//   const:c                              constant
//   poly:x*y  poly:2*x^2-y+1             planar polynomial in x, y
//   poly:x1*x2  poly:x1^2+y3             product polynomial; x<n>, y<n> are the
//                                        components of factor n
//   trig:cos:1,0  trig:sin:0,1,0         cos / sin of 2 pi <f, flat coords>
//   cylfn:2:<function>                   function of the first 2 factors

EventSet parse_event_set(std::string_view text);
BoundedTestFunction parse_test_function(std::string_view text, FunctionDomain domain);

/// Canonical text; parse(to_string(v)) == v.
std::string to_string(const EventSet& set);
std::string to_string(const BoundedTestFunction& g);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace orbitchaos
