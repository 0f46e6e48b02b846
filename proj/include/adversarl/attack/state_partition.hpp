#pragma once

#include <cstdint>

#include "adversarl/core/types.hpp"

namespace adversarl {

/// Uniform grid of m_per_axis^dim cells over the state box. Cells are
/// half-open [lo, hi) per axis except the last, which also takes the top
/// edge. Index is row-major with axis 0 varying fastest.
class StatePartition {
 public:
  StatePartition(Box bounds, int m_per_axis);

  std::uint32_t cell_index(const StateVec& s) const;
  std::uint32_t cell_count() const noexcept { return cell_count_; }
  int cells_per_axis() const noexcept { return m_per_axis_; }

  /// Diameter of every cell; used as L_s * d_s in the lower confidence bound.
  double cell_diameter() const noexcept { return cell_diameter_; }

  /// Bounds of cell `m`.
  Box cell_box(std::uint32_t m) const;

  const Box& bounds() const noexcept { return bounds_; }

 private:
  Box bounds_;
  int m_per_axis_;
  std::uint32_t cell_count_;
  double cell_diameter_;
};

}  // namespace adversarl
