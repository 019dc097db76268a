#include "navishare/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace navishare::routing {

using mapstore::Direction;
using mapstore::MapGraph;

PathResult shortest_path(const MapGraph& map, const std::string& start,
                         const std::string& goal) {
  if (!map.anchors.count(start))
    throw std::runtime_error("shortest_path: unknown start anchor '" + start + "'");
  if (!map.anchors.count(goal))
    throw std::runtime_error("shortest_path: unknown goal anchor '" + goal + "'");

  struct Node {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<std::string> seq;
    bool settled = false;
  };
  std::map<std::string, Node> nodes;
  nodes[start].cost = 0.0;
  nodes[start].seq = {start};

  auto better = [](double cost, const std::vector<std::string>& seq, const Node& n) {
    if (cost < n.cost) return true;
    return cost == n.cost && !n.seq.empty() && seq < n.seq;
  };

  while (true) {
    // next unsettled node: smallest cost, ties by smallest sequence
    const std::string* current = nullptr;
    for (auto& [id, n] : nodes) {
      if (n.settled || n.seq.empty()) continue;
      if (!current || n.cost < nodes[*current].cost ||
          (n.cost == nodes[*current].cost && n.seq < nodes[*current].seq)) {
        current = &id;
      }
    }
    if (!current) break;
    Node& cur = nodes[*current];
    cur.settled = true;
    if (*current == goal) break;

    auto adj = map.adjacency.find(*current);
    if (adj == map.adjacency.end()) continue;
    for (const auto& [cid, dir] : adj->second) {
      const auto& c = map.connections.at(cid);
      const std::string& next = dir == Direction::Forward ? c.to_anchor : c.from_anchor;
      const double cost = cur.cost + c.travel_length(dir);
      std::vector<std::string> seq = cur.seq;
      seq.push_back(next);
      Node& n = nodes[next];
      if (n.settled) continue;
      if (better(cost, seq, n)) {
        n.cost = cost;
        n.seq = std::move(seq);
      }
    }
  }

  const Node& goal_node = nodes[goal];
  if (goal_node.seq.empty())
    throw std::runtime_error("shortest_path: no path from '" + start + "' to '" +
                             goal + "'");
  return {goal_node.seq, goal_node.cost};
}

std::vector<std::pair<std::string, Direction>> chosen_edges(
    const MapGraph& map, const std::vector<std::string>& sequence) {
  std::vector<std::pair<std::string, Direction>> edges;
  for (size_t i = 0; i + 1 < sequence.size(); ++i) {
    const std::string& a = sequence[i];
    const std::string& b = sequence[i + 1];
    const std::pair<std::string, Direction>* best = nullptr;
    double best_cost = 0.0;
    auto adj = map.adjacency.find(a);
    if (adj != map.adjacency.end()) {
      for (const auto& edge : adj->second) {
        const auto& c = map.connections.at(edge.first);
        const std::string& next =
            edge.second == Direction::Forward ? c.to_anchor : c.from_anchor;
        if (next != b) continue;
        const double cost = c.travel_length(edge.second);
        if (!best || cost < best_cost) {  // adjacency is id-sorted; ties keep the first
          best = &edge;
          best_cost = cost;
        }
      }
    }
    if (!best)
      throw std::runtime_error("chosen_edges: no connection between '" + a + "' and '" +
                               b + "'");
    edges.push_back(*best);
  }
  return edges;
}

namespace {

// Pose of the given anchor within the connection's trail frame, at the
// travel start (travel_start = true) or end of the traversal.
geom::Pose endpoint_pose(const mapstore::Connection& c, Direction dir, bool travel_start) {
  const bool use_from = (dir == Direction::Forward) == travel_start;
  return use_from ? c.from_pose_in_trail_frame : c.to_pose_in_trail_frame;
}

}  // namespace

Alignments exact_alignments(const MapGraph& map, const std::vector<std::string>& sequence) {
  Alignments out;
  const auto edges = chosen_edges(map, sequence);
  for (size_t j = 1; j < sequence.size() - 1 && edges.size() >= 2; ++j) {
    const auto& prev = map.connections.at(edges[j - 1].first);
    const auto& next = map.connections.at(edges[j].first);
    JunctionAlignment a;
    a.in_prev_frame = endpoint_pose(prev, edges[j - 1].second, /*travel_start=*/false);
    a.in_next_frame = endpoint_pose(next, edges[j].second, /*travel_start=*/true);
    out[sequence[j]] = a;
  }
  return out;
}

Route stitch_route(const MapGraph& map, const std::vector<std::string>& sequence,
                   const Alignments& alignments) {
  if (sequence.empty()) throw std::runtime_error("stitch_route: empty sequence");

  Route route;
  route.anchor_sequence = sequence;

  if (sequence.size() == 1) {
    const auto& a = map.anchors.at(sequence.front());
    route.polyline.points = {geom::Pose::identity(a.frame)};
    route.segment_boundaries = {0};
    return route;
  }

  const auto edges = chosen_edges(map, sequence);
  geom::Pose chain = geom::Pose::identity();  // T(nav <- segment k frame)
  for (size_t k = 0; k < edges.size(); ++k) {
    const auto& c = map.connections.at(edges[k].first);
    if (k == 0) {
      chain.frame = c.forward_trail.frame();
      route.polyline.spacing = c.forward_trail.spacing;
    } else {
      auto it = alignments.find(sequence[k]);
      if (it == alignments.end())
        throw std::runtime_error("stitch_route: missing junction localization for '" +
                                 sequence[k] + "'");
      const auto& prev_c = map.connections.at(edges[k - 1].first);
      geom::Pose t = geom::compose(it->second.in_prev_frame,
                                   geom::invert(it->second.in_next_frame));
      (void)prev_c;
      chain = geom::compose(chain, t);
    }
    route.segment_boundaries.push_back(route.polyline.points.size());
    const auto trail = c.travel_trail(edges[k].second);
    for (const auto& p : trail.points) {
      geom::Pose q = geom::compose(chain, p);
      q.frame = route.polyline.points.empty() ? chain.frame
                                              : route.polyline.points.front().frame;
      route.polyline.points.push_back(std::move(q));
    }
    route.polyline.spacing = std::max(route.polyline.spacing, trail.spacing);
    route.total_length += c.travel_length(edges[k].second);
  }
  return route;
}

}  // namespace navishare::routing
