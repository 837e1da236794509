// Copyright 2026 The Brushwork Authors
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

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "brushwork/losses.hpp"

namespace brushwork {
namespace {

// Min-cost flow on source -> supplies -> demands -> sink with real-valued
// capacities. Each round augments along a shortest residual path found by
// a queue-based Bellman-Ford, so reduced costs stay consistent without
// potentials.
class TransportNetwork {
 public:
  explicit TransportNetwork(int nodes) : head_(nodes, -1) {}

  void add_edge(int from, int to, double capacity, double cost) {
    edges_.push_back({to, head_[from], capacity, cost});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0.0, -cost});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  double min_cost_flow(int source, int sink, double required, double tolerance) {
    const int nodes = static_cast<int>(head_.size());
    double flow = 0, cost = 0;
    while (required - flow > tolerance) {
      std::vector<double> dist(nodes, std::numeric_limits<double>::infinity());
      std::vector<int> via(nodes, -1);
      std::vector<char> queued(nodes, 0);
      std::deque<int> queue{source};
      dist[source] = 0;
      queued[source] = 1;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        queued[u] = 0;
        for (int e = head_[u]; e != -1; e = edges_[e].next) {
          const Edge& edge = edges_[e];
          if (edge.capacity <= tolerance) continue;
          const double candidate = dist[u] + edge.cost;
          if (candidate < dist[edge.to] - 1e-15) {
            dist[edge.to] = candidate;
            via[edge.to] = e;
            if (!queued[edge.to]) {
              queued[edge.to] = 1;
              queue.push_back(edge.to);
            }
          }
        }
      }
      if (via[sink] == -1) throw std::invalid_argument("exact_ot_oracle: infeasible marginals");
      double push = required - flow;
      for (int v = sink; v != source; v = edges_[via[v] ^ 1].to)
        push = std::min(push, edges_[via[v]].capacity);
      for (int v = sink; v != source; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].capacity -= push;
        edges_[via[v] ^ 1].capacity += push;
      }
      flow += push;
      cost += push * dist[sink];
    }
    return cost;
  }

 private:
  struct Edge {
    int to;
    int next;
    double capacity;
    double cost;
  };
  std::vector<int> head_;
  std::vector<Edge> edges_;
};

}  // namespace

double exact_ot_oracle(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                       const Eigen::MatrixXd& cost) {
  if (p.size() > 64 || q.size() > 64)
    throw std::invalid_argument("exact_ot_oracle: at most 64 bins per marginal");
  if (cost.rows() != p.size() || cost.cols() != q.size())
    throw std::invalid_argument("exact_ot_oracle: cost shape does not match marginals");
  if ((p.array() < 0).any() || (q.array() < 0).any())
    throw std::invalid_argument("exact_ot_oracle: negative mass");
  const double total = p.sum();
  if (!(total > 0) || std::abs(total - q.sum()) > 1e-9 * std::max(1.0, total))
    throw std::invalid_argument("exact_ot_oracle: infeasible marginals");

  const int m = static_cast<int>(p.size()), n = static_cast<int>(q.size());
  const int source = m + n, sink = m + n + 1;
  TransportNetwork net(m + n + 2);
  for (int i = 0; i < m; ++i) net.add_edge(source, i, p[i], 0.0);
  for (int j = 0; j < n; ++j) net.add_edge(m + j, sink, q[j], 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) net.add_edge(i, m + j, total, cost(i, j));
  return net.min_cost_flow(source, sink, std::min(total, q.sum()), 1e-14 * total);
}

}  // namespace brushwork
