#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace dribbleforge {

/// Planar position in meters.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Planar vector (velocity, displacement).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Angle mapped into (-pi, pi].
inline double wrap_angle(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(a, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

/// Tolerance on the lifted in-circle determinant.
inline constexpr double kInCircleTolerance = 1e-9;
/// Distance below which two points (or a query and a vertex) coincide.
inline constexpr double kCoincidenceTolerance = 1e-9;
/// Marker for a triangle edge on the convex hull.
inline constexpr std::size_t kNoNeighbor = std::numeric_limits<std::size_t>::max();

using TriangleIndex = std::size_t;
using Triangle = std::array<std::size_t, 3>;

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
double orient2d(Point2 a, Point2 b, Point2 c);

/// Lifted 3x3 in-circle determinant. Positive when d lies inside the circle
/// through the counter-clockwise triangle (a, b, c).
double incircle(Point2 a, Point2 b, Point2 c, Point2 d);

/// Immutable Delaunay triangulation of a planar point set.
///
/// Triangles are counter-clockwise, rotated so their lowest vertex index comes
/// first, and sorted lexicographically. `adjacency()[t][k]` is the triangle
/// across the edge (v[k], v[k+1 mod 3]) of triangle t, or kNoNeighbor on the
/// hull. A built triangulation is safe to share between threads.
class Triangulation {
public:
    Triangulation() = default;

    std::span<const Point2> vertices() const { return vertices_; }
    std::span<const Triangle> triangles() const { return triangles_; }
    std::span<const Triangle> adjacency() const { return adjacency_; }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }

    /// Number of distinct undirected edges.
    std::size_t edge_count() const;

    /// Triangle containing p, or nullopt when p is strictly outside the hull.
    /// Points on shared edges or vertices resolve to the lowest-index triangle.
    std::optional<TriangleIndex> locate(Point2 p) const;

    friend bool operator==(const Triangulation&, const Triangulation&) = default;

private:
    friend Triangulation triangulate(std::span<const Point2> points);

    bool contains(TriangleIndex t, Point2 p) const;

    std::vector<Point2> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Triangle> adjacency_;
};

/// Delaunay triangulation by sweep-ordered incremental insertion with
/// in-circle edge flipping. Co-circular ties keep the diagonal touching the
/// lowest input index, so the result depends only on the input list.
///
/// Throws Error{TooFewPoints} for fewer than three points and
/// Error{DegenerateInput} for non-finite, duplicate or all-collinear input.
Triangulation triangulate(std::span<const Point2> points);

/// Free-function form of Triangulation::locate.
inline std::optional<TriangleIndex> locate(const Triangulation& tri, Point2 p) { return tri.locate(p); }

/// Inverse-distance weighted mean of three vertex values at p. A query within
/// kCoincidenceTolerance of a vertex returns that vertex's value unchanged.
double idw_interpolate(Point2 va, Point2 vb, Point2 vc, double ia, double ib, double ic, Point2 p);

} // namespace dribbleforge
