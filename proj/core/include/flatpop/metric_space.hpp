#pragma once

#include <memory>
#include <variant>
#include <vector>

namespace flatpop {

/// Position on a Euclidean space R^d.
struct EuclideanPoint {
  std::vector<double> coords;
};

/// Position on a circle, stored as an angle wrapped to [0, 2*pi).
struct CirclePoint {
  double angle = 0.0;
};

/// Position on a metric graph: an edge index plus an arc-length offset
/// measured from the edge's first endpoint. Vertices are offset 0 (or the
/// full edge length at the second endpoint).
struct GraphPoint {
  int edge = 0;
  double offset = 0.0;
};

/// Element of a finite discrete space.
struct DiscretePoint {
  int index = 0;
};

/// Discretized trajectory: target-space samples on a fixed time grid,
/// flattened row-major as grid_index * target_dim + component.
struct TrajectoryPoint {
  std::vector<double> samples;
};

struct Point {
  using Payload =
      std::variant<EuclideanPoint, CirclePoint, GraphPoint, DiscretePoint,
                   TrajectoryPoint>;
  Payload payload;

  static Point euclidean(std::vector<double> coords);
  static Point circle(double angle);
  static Point graph(int edge, double offset);
  static Point discrete(int index);
  static Point trajectory(std::vector<double> samples);
};

bool same_point(const Point& a, const Point& b);

enum class SpaceKind { Euclidean, Circle, Graph, Discrete, Trajectory };

struct GraphEdge {
  int u = 0;
  int v = 0;
  double length = 1.0;
};

class MetricSpace;
using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Immutable Polish-space backend. Construction precomputes whatever the
/// distance oracle needs (all-pairs shortest paths for graphs); afterwards
/// distance() is pure and safe to call concurrently.
class MetricSpace {
 public:
  struct Euclidean {
    int dimension = 1;
  };
  struct Circle {
    double circumference = 0.0;
  };
  struct Discrete {
    int count = 0;
    double spacing = 1.0;
  };
  struct Graph {
    int vertex_count = 0;
    std::vector<GraphEdge> edges;
    std::vector<std::vector<double>> vertex_dist;  // all-pairs table
  };
  struct Trajectory {
    std::vector<double> grid;
    std::variant<Euclidean, Discrete> target;
  };

  static SpacePtr euclidean(int dimension);
  static SpacePtr circle(double circumference);
  static SpacePtr discrete(int count, double spacing = 1.0);
  /// Requires a connected graph with positive edge lengths; builds the
  /// all-pairs vertex distance table by Floyd-Warshall.
  static SpacePtr graph(int vertex_count, std::vector<GraphEdge> edges);
  /// Grid must be strictly increasing and nonempty; target restricted to
  /// Euclidean or discrete backends.
  static SpacePtr trajectory(std::vector<double> grid,
                             std::variant<Euclidean, Discrete> target);

  SpaceKind kind() const;
  double distance(const Point& x, const Point& y) const;
  /// True if the payload type and contents are valid for this space.
  bool contains(const Point& p) const;

  const Euclidean& as_euclidean() const;
  const Circle& as_circle() const;
  const Discrete& as_discrete() const;
  const Graph& as_graph() const;
  const Trajectory& as_trajectory() const;

  /// Point sitting at vertex v, represented on some incident edge.
  Point vertex_point(int v) const;
  /// Dimension of the flattened coordinate payload (trajectory backends).
  int trajectory_sample_dim() const;

 private:
  using Backend = std::variant<Euclidean, Circle, Discrete, Graph, Trajectory>;
  explicit MetricSpace(Backend backend) : backend_(std::move(backend)) {}
  Backend backend_;
};

/// Structural equality of two spaces (same kind and parameters). Pointer
/// equality implies structural equality but not conversely.
bool same_space(const MetricSpace& a, const MetricSpace& b);
bool same_space(const SpacePtr& a, const SpacePtr& b);

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double angle);

}  // namespace flatpop
