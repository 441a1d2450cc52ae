#pragma once
//
// Deterministic random sources. Table mode replays a fixed cycle of twenty
// historical draws; seeded mode is SplitMix64, bit-exact across platforms.
//

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>

#include "talespin/term.hpp"

namespace talespin {

inline constexpr std::array<double, 20> kRandomTable = {
    0.174232, 0.186011, 0.951800, 0.363587, 0.108449, 0.848878, 0.309133, 0.230964, 0.639224, 0.686739,
    0.781066, 0.983691, 0.704568, 0.636376, 0.881027, 0.194111, 0.449212, 0.110336, 0.572139, 0.149503,
};

class EmptyList : public Error {
 public:
  EmptyList() : Error("cannot pick a member of an empty list") {}
};

struct RngState {
  enum class Mode { Table, Seeded };

  Mode mode = Mode::Table;
  std::size_t table_index = 0;  // table mode, in [0, 20)
  std::uint64_t state = 0;      // seeded mode

  static RngState table(std::size_t index = 0) { return {Mode::Table, index % kRandomTable.size(), 0}; }
  static RngState seeded(std::uint64_t seed) { return {Mode::Seeded, 0, seed}; }

  friend bool operator==(const RngState&, const RngState&) = default;
};

/// Next draw in [0, 1) and the advanced state.
inline std::pair<double, RngState> next_unit(RngState rng) {
  if (rng.mode == RngState::Mode::Table) {
    double v = kRandomTable[rng.table_index];
    rng.table_index = (rng.table_index + 1) % kRandomTable.size();
    return {v, rng};
  }
  rng.state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = rng.state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z = z ^ (z >> 31);
  return {static_cast<double>(z >> 11) * 0x1.0p-53, rng};
}

/// True iff the next draw is below `p`.
inline std::pair<bool, RngState> maybe(double p, RngState rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability must lie in [0, 1]");
  auto [r, next] = next_unit(rng);
  return {r < p, next};
}

/// Index floor(R * L) of a list of length L, R being the next draw.
inline std::pair<std::size_t, RngState> rnd_index(std::size_t length, RngState rng) {
  if (length == 0) throw EmptyList();
  auto [r, next] = next_unit(rng);
  auto idx = static_cast<std::size_t>(r * static_cast<double>(length));
  return {std::min(idx, length - 1), next};
}

template <class T>
std::pair<T, RngState> rnd_member(std::span<const T> items, RngState rng) {
  auto [idx, next] = rnd_index(items.size(), rng);
  return {items[idx], next};
}

}  // namespace talespin
