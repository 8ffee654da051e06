#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace champ {

/// One bit per phase shifter, aligned with the phase section of a ParamVector.
/// 0 marks a pruned phase, clamped at exactly zero.
struct PruneMask {
  std::vector<std::uint8_t> bits;

  static PruneMask all_ones(std::size_t n) { return {std::vector<std::uint8_t>(n, 1)}; }

  std::size_t size() const noexcept { return bits.size(); }
  std::size_t zero_count() const noexcept {
    std::size_t z = 0;
    for (auto b : bits) z += (b == 0);
    return z;
  }

  bool operator==(const PruneMask&) const = default;
};

}  // namespace champ
