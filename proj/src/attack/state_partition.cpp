#include "adversarl/attack/state_partition.hpp"

#include <cmath>
#include <limits>

#include "adversarl/core/errors.hpp"

namespace adversarl {

StatePartition::StatePartition(Box bounds, int m_per_axis) : bounds_(std::move(bounds)), m_per_axis_(m_per_axis) {
  bounds_.validate("state partition");
  if (m_per_axis < 1) throw ContractViolation("state partition needs at least one cell per axis");
  const double total = std::pow(static_cast<double>(m_per_axis), static_cast<double>(bounds_.dim()));
  if (total > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw ContractViolation("state partition has too many cells");
  }
  cell_count_ = static_cast<std::uint32_t>(std::llround(total));
  double sq = 0.0;
  for (std::size_t i = 0; i < bounds_.dim(); ++i) {
    const double w = (bounds_.hi[i] - bounds_.lo[i]) / m_per_axis;
    sq += w * w;
  }
  cell_diameter_ = std::sqrt(sq);
}

std::uint32_t StatePartition::cell_index(const StateVec& s) const {
  if (s.dim() != bounds_.dim()) throw ContractViolation("cell_index: state dimension mismatch");
  if (!bounds_.contains(s.coords(), 1e-9)) throw ContractViolation("cell_index: state out of bounds");
  std::uint32_t index = 0;
  std::uint32_t stride = 1;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double width = (bounds_.hi[i] - bounds_.lo[i]) / m_per_axis_;
    auto bin = static_cast<long>(std::floor((s[i] - bounds_.lo[i]) / width));
    if (bin < 0) bin = 0;
    if (bin >= m_per_axis_) bin = m_per_axis_ - 1;  // top edge
    index += static_cast<std::uint32_t>(bin) * stride;
    stride *= static_cast<std::uint32_t>(m_per_axis_);
  }
  return index;
}

Box StatePartition::cell_box(std::uint32_t m) const {
  if (m >= cell_count_) throw ContractViolation("cell_box: index out of range");
  Box b{std::vector<double>(bounds_.dim()), std::vector<double>(bounds_.dim())};
  for (std::size_t i = 0; i < bounds_.dim(); ++i) {
    const std::uint32_t bin = m % static_cast<std::uint32_t>(m_per_axis_);
    m /= static_cast<std::uint32_t>(m_per_axis_);
    const double width = (bounds_.hi[i] - bounds_.lo[i]) / m_per_axis_;
    b.lo[i] = bounds_.lo[i] + width * bin;
    b.hi[i] = bin + 1 == static_cast<std::uint32_t>(m_per_axis_) ? bounds_.hi[i] : bounds_.lo[i] + width * (bin + 1);
  }
  return b;
}

}  // namespace adversarl
