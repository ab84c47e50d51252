#include "bcmf/laps.hpp"

#include <string>

namespace bcmf {

namespace {

struct LapWalker {
  const QuadraticMap& map;
  std::size_t n;
  const std::function<void(const Lap&)>& visit;
  std::size_t max_laps;
  std::size_t count = 0;
  Itinerary signs;

  // [lo, hi] with f^k(lo) = ylo, f^k(hi) = yhi, f^k monotone on it.
  void walk(long double lo, long double hi, long double ylo, long double yhi, std::size_t k) {
    if (k == n) {
      if (++count > max_laps)
        throw DomainError("more than " + std::to_string(max_laps) + " laps at depth " + std::to_string(n));
      visit(Lap{lo, hi, ylo, yhi, &signs});
      return;
    }
    if ((ylo < 0 && yhi > 0) || (ylo > 0 && yhi < 0)) {
      const long double c = pull_back<long double>(map.a, 0.0L, signs);
      // Keep the left-to-right order.
      step(lo, c, ylo, 0.0L, k);
      step(c, hi, 0.0L, yhi, k);
    } else {
      step(lo, hi, ylo, yhi, k);
    }
  }

  void step(long double lo, long double hi, long double ylo, long double yhi, std::size_t k) {
    if (!(hi > lo)) return;
    const int s = ylo + yhi > 0 ? 1 : -1;
    signs.push_back(static_cast<std::int8_t>(s));
    walk(lo, hi, map(ylo), map(yhi), k + 1);
    signs.pop_back();
  }
};

}  // namespace

std::size_t for_each_lap(const QuadraticMap& map, double lo, double hi, std::size_t n,
                         const std::function<void(const Lap&)>& visit, std::size_t max_laps) {
  map.validate();
  if (!(lo < hi && lo >= -1.0 && hi <= 1.0)) throw DomainError("lap range must be a subinterval of [-1, 1]");
  LapWalker w{map, n, visit, max_laps, 0, {}};
  w.signs.reserve(n);
  w.walk(lo, hi, lo, hi, 0);
  return w.count;
}

}  // namespace bcmf
