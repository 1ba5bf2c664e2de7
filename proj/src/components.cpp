#include "tropedge/components.hpp"

#include <algorithm>

namespace tropedge {

std::size_t Components::largest() const noexcept {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

Components label_components(const EdgeMap& edges) {
  const int h = edges.height();
  const int w = edges.width();
  Components out;
  out.width = w;
  out.labels.assign(static_cast<std::size_t>(w) * h, -1);

  std::vector<int> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t start = static_cast<std::size_t>(r) * w + c;
      if (!edges(r, c) || out.labels[start] >= 0) continue;
      const int label = static_cast<int>(out.sizes.size());
      std::size_t size = 0;
      out.labels[start] = label;
      stack.push_back(static_cast<int>(start));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        ++size;
        const int pr = idx / w;
        const int pc = idx % w;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = pr + dr;
            const int nc = pc + dc;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w || !edges(nr, nc)) continue;
            const std::size_t n = static_cast<std::size_t>(nr) * w + nc;
            if (out.labels[n] >= 0) continue;
            out.labels[n] = label;
            stack.push_back(static_cast<int>(n));
          }
        }
      }
      out.sizes.push_back(size);
    }
  }
  return out;
}

}  // namespace tropedge
