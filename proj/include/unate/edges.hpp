#pragma once

#include <cstddef>
#include <string>

#include "unate/hypercube.hpp"
#include "unate/oracle.hpp"

namespace unate {

enum class EdgeKind { monotone, anti_monotone };

inline const char* to_string(EdgeKind k) {
  return k == EdgeKind::monotone ? "monotone" : "anti-monotone";
}

/// A bi-chromatic hypercube edge. `base` is the endpoint with x_direction = 0;
/// the edge is monotone iff f(base) = 0.
struct LabeledEdge {
  Point base;
  std::size_t direction = 0;
  EdgeKind kind = EdgeKind::monotone;

  Point top() const { return base.flipped(direction); }

  /// From one endpoint and the already known values at both endpoints.
  static LabeledEdge from_values(const Point& endpoint, std::size_t direction, bool f_endpoint,
                                 bool f_neighbour) {
    require(f_endpoint != f_neighbour, "edge is not bi-chromatic");
    require(direction < endpoint.arity(), "edge direction out of range");
    LabeledEdge e;
    e.direction = direction;
    const bool at_bottom = !endpoint[direction];
    e.base = at_bottom ? endpoint : endpoint.flipped(direction);
    const bool f_base = at_bottom ? f_endpoint : f_neighbour;
    e.kind = f_base ? EdgeKind::anti_monotone : EdgeKind::monotone;
    return e;
  }

  /// Queries both endpoints and throws unless the edge is bi-chromatic.
  static LabeledEdge checked(const FunctionOracle& f, const Point& endpoint, std::size_t direction) {
    require(direction < endpoint.arity(), "edge direction out of range");
    const bool a = f(endpoint);
    const bool b = f(endpoint.flipped(direction));
    return from_values(endpoint, direction, a, b);
  }

  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// A monotone and an anti-monotone edge along the same direction.
struct Violation {
  std::size_t direction = 0;
  LabeledEdge monotone_edge;
  LabeledEdge anti_edge;

  /// "d=<1-based>;mono=<hex>;anti=<hex>" with each edge given by its base point.
  std::string str() const {
    return "d=" + std::to_string(direction + 1) + ";mono=" + monotone_edge.base.to_hex() +
           ";anti=" + anti_edge.base.to_hex();
  }
};

} // namespace unate
