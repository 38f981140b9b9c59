#pragma once
#include <functional>
#include <numeric>
#include <vector>

namespace nilheat {

using MultiIndex = std::vector<int>;

inline int mi_degree(const MultiIndex& a) {
  return std::accumulate(a.begin(), a.end(), 0);
}

// All multi-indices in dim variables with degree <= max_degree, graded
// lexicographic order.
inline std::vector<MultiIndex> multiindices_up_to(int dim, int max_degree) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(dim), 0);
  for (int deg = 0; deg <= max_degree; ++deg) {
    // enumerate compositions of deg into dim parts, lexicographically
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == dim - 1) {
        cur[static_cast<std::size_t>(pos)] = left;
        out.push_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v) {
        cur[static_cast<std::size_t>(pos)] = v;
        rec(pos + 1, left - v);
      }
    };
    if (dim == 0) break;
    rec(0, deg);
  }
  return out;
}

}  // namespace nilheat
