// Copyright 2026 The pisched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Successive shortest augmenting paths with Dijkstra and node potentials.
// Arc costs must be nonnegative. After run() the potentials form an optimal
// dual: every residual arc has reduced cost >= 0 (up to rounding).

#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace pisched::detail {

class MinCostFlow {
 public:
  struct Arc {
    int from;
    int to;
    int cap;
    int flow;
    double cost;

    int residual() const { return cap - flow; }
  };

  explicit MinCostFlow(int nodes)
      : pot_(nodes, 0.0), dist_(nodes), via_(nodes), adj_(nodes) {}

  int add_arc(int from, int to, int cap, double cost) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({from, to, cap, 0, cost});
    arcs_.push_back({to, from, 0, 0, -cost});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  const Arc& arc(int id) const { return arcs_[id]; }
  double potential(int node) const { return pot_[node]; }

  // Pushes up to `demand` units from source to sink. Returns the amount sent.
  int run(int source, int sink, int demand) {
    int sent = 0;
    while (sent < demand && dijkstra(source, sink)) {
      int push = demand - sent;
      for (int v = sink; v != source; v = arcs_[via_[v]].from) {
        push = std::min(push, arcs_[via_[v]].residual());
      }
      for (int v = sink; v != source; v = arcs_[via_[v]].from) {
        arcs_[via_[v]].flow += push;
        arcs_[via_[v] ^ 1].flow -= push;
      }
      sent += push;
    }
    return sent;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  bool dijkstra(int source, int sink) {
    std::fill(dist_.begin(), dist_.end(), kInf);
    dist_[source] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d > dist_[v]) continue;
      for (int id : adj_[v]) {
        const Arc& a = arcs_[id];
        if (a.residual() <= 0) continue;
        // Clamp rounding noise; true reduced costs are nonnegative.
        const double reduced = std::max(0.0, a.cost + pot_[v] - pot_[a.to]);
        if (d + reduced < dist_[a.to]) {
          dist_[a.to] = d + reduced;
          via_[a.to] = id;
          heap.emplace(dist_[a.to], a.to);
        }
      }
    }
    if (dist_[sink] == kInf) return false;
    double reach = 0.0;
    for (double d : dist_) {
      if (d != kInf) reach = std::max(reach, d);
    }
    // Unreached nodes move by the largest finite distance, which keeps every
    // residual reduced cost nonnegative.
    for (std::size_t v = 0; v < dist_.size(); ++v) {
      pot_[v] += dist_[v] == kInf ? reach : dist_[v];
    }
    return true;
  }

  std::vector<Arc> arcs_;
  std::vector<double> pot_;
  std::vector<double> dist_;
  std::vector<int> via_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace pisched::detail
