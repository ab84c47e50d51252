#pragma once

// Laps of f^n: maximal intervals on which f^n is monotone, found by splitting
// at the preimages of 0.

#include "bcmf/quadratic_map.hpp"

#include <cstddef>
#include <functional>

namespace bcmf {

struct Lap {
  long double lo = 0;
  long double hi = 0;
  long double image_lo = 0;  // f^n(lo)
  long double image_hi = 0;  // f^n(hi)
  const Itinerary* itinerary = nullptr;  // signs of f^i on the lap, i < n
};

/// Calls visit(lap) for every lap of f^n inside [lo, hi], left to right.
/// Throws DomainError if more than max_laps laps would be produced.
/// Returns the number of laps.
std::size_t for_each_lap(const QuadraticMap& map, double lo, double hi, std::size_t n,
                         const std::function<void(const Lap&)>& visit, std::size_t max_laps = 1u << 24);

}  // namespace bcmf
