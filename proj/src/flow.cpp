#include "flow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace ghforge::detail {

// Edmonds-Karp on the network s -> left -> right -> t. The middle edges are
// uncapacitated, so only the source/sink edges and the reverse middle edges
// carry residual capacities.
BipartiteFlow max_bipartite_flow(std::span<const double> left, std::span<const double> right,
                                 std::span<const char> allowed) {
  const std::size_t n = left.size(), m = right.size();
  BipartiteFlow out;
  out.flow.assign(n * m, 0.0);
  out.left_residual.assign(left.begin(), left.end());
  out.right_residual.assign(right.begin(), right.end());

  // Node numbering: left i -> i, right j -> n + j.
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(n + m);
  std::deque<std::size_t> queue;
  for (;;) {
    std::fill(parent.begin(), parent.end(), none);
    queue.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (out.left_residual[i] > 0.0) {
        parent[i] = i;  // roots point to themselves
        queue.push_back(i);
      }
    }
    std::size_t sink_side = none;
    while (!queue.empty() && sink_side == none) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (u < n) {
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t v = n + j;
          if (allowed[u * m + j] && parent[v] == none) {
            parent[v] = u;
            if (out.right_residual[j] > 0.0) {
              sink_side = j;
              break;
            }
            queue.push_back(v);
          }
        }
      } else {
        const std::size_t j = u - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (parent[i] == none && out.flow[i * m + j] > 0.0) {
            parent[i] = u;
            queue.push_back(i);
          }
        }
      }
    }
    if (sink_side == none) break;

    // Walk back to the root, collecting the bottleneck.
    double bottleneck = out.right_residual[sink_side];
    std::size_t v = n + sink_side;
    std::size_t root = none;
    while (true) {
      const std::size_t u = parent[v];
      if (v >= n) {
        // u is a left node feeding forward into v
      } else {
        // v is a left node reached backwards from right node u
        if (u == v) {
          root = v;
          break;
        }
        bottleneck = std::min(bottleneck, out.flow[v * m + (u - n)]);
      }
      v = u;
    }
    bottleneck = std::min(bottleneck, out.left_residual[root]);

    v = n + sink_side;
    out.right_residual[sink_side] -= bottleneck;
    while (true) {
      const std::size_t u = parent[v];
      if (v >= n) {
        out.flow[u * m + (v - n)] += bottleneck;
      } else {
        if (u == v) break;
        out.flow[v * m + (u - n)] -= bottleneck;
      }
      v = u;
    }
    out.left_residual[root] -= bottleneck;
    out.value += bottleneck;
  }
  return out;
}

double first_feasible(const std::vector<double>& cuts, const std::function<double(double)>& gap) {
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const double candidate = std::max(cuts[c], gap(cuts[c]));
    if (c + 1 == cuts.size() || candidate < cuts[c + 1]) return candidate;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace ghforge::detail
