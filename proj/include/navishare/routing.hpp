#pragma once

#include "navishare/mapstore.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace navishare::routing {

struct Route {
  std::vector<std::string> anchor_sequence;
  double total_length = 0.0;
  mapstore::BreadcrumbTrail polyline;  // in the navigation frame (first segment's)
  std::vector<size_t> segment_boundaries;  // index of each segment's first point
};

struct PathResult {
  std::vector<std::string> anchor_sequence;
  double cost = 0.0;
};

/// Dijkstra over the anchor graph with trail length as the edge weight.
/// Connections are traversable in reverse (reverse trail length when one
/// was recorded, forward length otherwise). Equal-cost ties resolve to
/// the lexicographically smallest anchor-id sequence. Throws
/// std::runtime_error naming both endpoints when no path exists.
PathResult shortest_path(const mapstore::MapGraph& map, const std::string& start,
                         const std::string& goal);

/// Pose of one junction anchor observed in the frames of the two
/// segments it joins.
struct JunctionAlignment {
  geom::Pose in_prev_frame;
  geom::Pose in_next_frame;
};

// anchor id -> its localization in both adjacent segment frames
using Alignments = std::map<std::string, JunctionAlignment>;

/// The connection (and travel direction) used for each leg of an anchor
/// sequence: the cheapest edge between the consecutive anchors, ties to
/// the smallest connection id.
std::vector<std::pair<std::string, mapstore::Direction>> chosen_edges(
    const mapstore::MapGraph& map, const std::vector<std::string>& sequence);

/// Exact alignments read straight from the stored endpoint poses of the
/// chosen connections.
Alignments exact_alignments(const mapstore::MapGraph& map,
                            const std::vector<std::string>& sequence);

/// Chains each segment's trail into the first segment's frame by
/// aligning at the shared junction anchors. Throws std::runtime_error
/// naming the anchor when a junction localization is missing.
Route stitch_route(const mapstore::MapGraph& map, const std::vector<std::string>& sequence,
                   const Alignments& alignments);

}  // namespace navishare::routing
