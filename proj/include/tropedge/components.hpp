#pragma once

#include <cstddef>
#include <vector>

#include "tropedge/image.hpp"

namespace tropedge {

/// 8-connected component labelling of an edge map.
struct Components {
  int width = 0;
  std::vector<int> labels;          // -1 for background
  std::vector<std::size_t> sizes;   // pixel count per label

  int label(int row, int col) const noexcept {
    return labels[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t largest() const noexcept;
};

Components label_components(const EdgeMap& edges);

}  // namespace tropedge
