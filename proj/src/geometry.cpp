#include "dribbleforge/geometry.hpp"
#include "dribbleforge/error.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace dribbleforge {

double orient2d(Point2 a, Point2 b, Point2 c)
{
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double incircle(Point2 a, Point2 b, Point2 c, Point2 d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    return adx * (bdy * clift - blift * cdy)
         - ady * (bdx * clift - blift * cdx)
         + alift * (bdx * cdy - bdy * cdx);
}

namespace {

// Signed distance of p from the directed line a->b (positive on the left).
double signed_distance(Point2 a, Point2 b, Point2 p)
{
    const double len = distance(a, b);
    return len > 0.0 ? orient2d(a, b, p) / len : 0.0;
}

// A hull edge is visible from a new point strictly on its outer side.
constexpr double kHullVisibility = 1e-12;

std::uint64_t edge_key(std::size_t a, std::size_t b)
{
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

class Builder {
public:
    explicit Builder(std::span<const Point2> pts) : pts_(pts) {}

    std::vector<Triangle> run();

private:
    std::size_t add_triangle(Triangle t);
    void set_triangle(std::size_t slot, Triangle t);
    void insert_outside(std::size_t q);
    void legalize(std::size_t t, std::size_t q);

    std::span<const Point2> pts_;
    std::vector<Triangle> tris_;
    std::unordered_map<std::uint64_t, std::size_t> owner_; // directed edge -> triangle
    std::vector<std::size_t> hull_;                        // counter-clockwise
    std::vector<std::pair<std::size_t, std::size_t>> stack_;
    std::size_t flips_ = 0;
};

std::size_t Builder::add_triangle(Triangle t)
{
    tris_.push_back(t);
    const std::size_t slot = tris_.size() - 1;
    for (int k = 0; k < 3; ++k) {
        owner_[edge_key(t[k], t[(k + 1) % 3])] = slot;
    }
    return slot;
}

void Builder::set_triangle(std::size_t slot, Triangle t)
{
    tris_[slot] = t;
    for (int k = 0; k < 3; ++k) {
        owner_[edge_key(t[k], t[(k + 1) % 3])] = slot;
    }
}

std::vector<Triangle> Builder::run()
{
    const std::size_t n = pts_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const Point2 a = pts_[i], b = pts_[j];
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return i < j;
    });

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 a = pts_[order[i]], b = pts_[order[j]];
            if (b.x - a.x > kCoincidenceTolerance) break;
            if (distance(a, b) <= kCoincidenceTolerance) {
                throw Error(Errc::DegenerateInput,
                            "points " + std::to_string(std::min(order[i], order[j])) + " and "
                                + std::to_string(std::max(order[i], order[j])) + " coincide");
            }
        }
    }

    // The first points in sweep order may be collinear; fan them to the first
    // point off their line.
    const Point2 p0 = pts_[order[0]], p1 = pts_[order[1]];
    std::size_t k = 2;
    while (k < n && std::abs(signed_distance(p0, p1, pts_[order[k]])) <= kCoincidenceTolerance) {
        ++k;
    }
    if (k == n) {
        throw Error(Errc::DegenerateInput, "all points are collinear");
    }
    const std::size_t apex = order[k];
    const bool ccw = orient2d(p0, p1, pts_[apex]) > 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const std::size_t a = order[i], b = order[i + 1];
        add_triangle(ccw ? Triangle{a, b, apex} : Triangle{b, a, apex});
    }
    if (ccw) {
        hull_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
        hull_.assign(order.rbegin() + static_cast<std::ptrdiff_t>(n - k), order.rend());
    }
    hull_.push_back(apex);

    for (std::size_t i = k + 1; i < n; ++i) {
        insert_outside(order[i]);
    }
    return std::move(tris_);
}

// Points arrive in sweep order, so every new point lies outside the current
// hull (or on the extension of a hull edge).
void Builder::insert_outside(std::size_t q)
{
    const Point2 pq = pts_[q];
    const std::size_t m = hull_.size();
    std::vector<char> visible(m, 0);
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 a = pts_[hull_[i]], b = pts_[hull_[(i + 1) % m]];
        visible[i] = signed_distance(a, b, pq) < -kHullVisibility;
        any = any || visible[i];
    }
    if (!any || std::all_of(visible.begin(), visible.end(), [](char v) { return v != 0; })) {
        throw Error(Errc::DegenerateInput,
                    "point " + std::to_string(q) + " cannot be joined to the hull");
    }

    std::size_t start = 0;
    while (!(visible[start] && !visible[(start + m - 1) % m])) {
        ++start;
    }
    std::size_t run = 0;
    while (visible[(start + run) % m]) {
        ++run;
    }

    for (std::size_t r = 0; r < run; ++r) {
        const std::size_t a = hull_[(start + r) % m];
        const std::size_t b = hull_[(start + r + 1) % m];
        const std::size_t t = add_triangle({q, b, a});
        stack_.emplace_back(t, q);
    }

    std::vector<std::size_t> next;
    next.reserve(m - run + 2);
    for (std::size_t r = 0; r <= m - run; ++r) {
        next.push_back(hull_[(start + run + r) % m]);
    }
    next.push_back(q);
    hull_ = std::move(next);

    while (!stack_.empty()) {
        const auto [t, apex] = stack_.back();
        stack_.pop_back();
        legalize(t, apex);
    }
}

// Triangle t is (q, b, a); test the edge (b, a) opposite q against the
// triangle across it and flip when the far vertex is inside the circumcircle.
void Builder::legalize(std::size_t t, std::size_t q)
{
    Triangle tri = tris_[t];
    while (tri[0] != q) {
        std::rotate(tri.begin(), tri.begin() + 1, tri.end());
    }
    const std::size_t b = tri[1], a = tri[2];
    const auto it = owner_.find(edge_key(a, b));
    if (it == owner_.end()) {
        return;
    }
    const std::size_t u = it->second;
    const Triangle& other = tris_[u];
    std::size_t x = other[0];
    for (std::size_t v : other) {
        if (v != a && v != b) x = v;
    }

    const Point2 pq = pts_[q], pa = pts_[a], pb = pts_[b], px = pts_[x];
    const double det = incircle(pq, pb, pa, px);
    bool flip = det > kInCircleTolerance;
    if (!flip && det >= -kInCircleTolerance) {
        const std::size_t lowest = std::min({q, a, b, x});
        flip = lowest == q || lowest == x;
    }
    if (!flip || orient2d(pq, pb, px) <= 0.0 || orient2d(pq, px, pa) <= 0.0) {
        return;
    }

    if (++flips_ > 64 * pts_.size() * pts_.size() + 1024) {
        throw std::logic_error("triangulate: edge flipping did not terminate");
    }

    owner_.erase(edge_key(a, b));
    owner_.erase(edge_key(b, a));
    set_triangle(t, {q, b, x});
    set_triangle(u, {q, x, a});
    stack_.emplace_back(t, q);
    stack_.emplace_back(u, q);
}

Triangle canonical(Triangle t)
{
    while (t[0] > t[1] || t[0] > t[2]) {
        std::rotate(t.begin(), t.begin() + 1, t.end());
    }
    return t;
}

} // namespace

Triangulation triangulate(std::span<const Point2> points)
{
    if (points.size() < 3) {
        throw Error(Errc::TooFewPoints, "need at least 3 points, got " + std::to_string(points.size()));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!is_finite(points[i])) {
            throw Error(Errc::DegenerateInput, "point " + std::to_string(i) + " is not finite");
        }
    }

    std::vector<Triangle> tris = Builder(points).run();
    for (Triangle& t : tris) {
        t = canonical(t);
    }
    std::sort(tris.begin(), tris.end());

    std::unordered_map<std::uint64_t, std::size_t> owner;
    owner.reserve(tris.size() * 3);
    for (std::size_t i = 0; i < tris.size(); ++i) {
        for (int k = 0; k < 3; ++k) {
            owner[edge_key(tris[i][k], tris[i][(k + 1) % 3])] = i;
        }
    }

    Triangulation out;
    out.vertices_.assign(points.begin(), points.end());
    out.adjacency_.resize(tris.size());
    for (std::size_t i = 0; i < tris.size(); ++i) {
        for (int k = 0; k < 3; ++k) {
            const auto it = owner.find(edge_key(tris[i][(k + 1) % 3], tris[i][k]));
            out.adjacency_[i][k] = it == owner.end() ? kNoNeighbor : it->second;
        }
    }
    out.triangles_ = std::move(tris);
    return out;
}

std::size_t Triangulation::edge_count() const
{
    std::size_t interior_halves = 0, boundary = 0;
    for (const Triangle& adj : adjacency_) {
        for (std::size_t n : adj) {
            (n == kNoNeighbor ? boundary : interior_halves) += 1;
        }
    }
    return boundary + interior_halves / 2;
}

bool Triangulation::contains(TriangleIndex t, Point2 p) const
{
    const Triangle& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
        if (signed_distance(vertices_[tri[k]], vertices_[tri[(k + 1) % 3]], p) < -kCoincidenceTolerance) {
            return false;
        }
    }
    return true;
}

std::optional<TriangleIndex> Triangulation::locate(Point2 p) const
{
    if (triangles_.empty() || !is_finite(p)) {
        return std::nullopt;
    }

    // Visibility walk: step across the first edge that separates p from the
    // current triangle. Terminates on Delaunay triangulations; the step cap
    // only guards against pathological round-off.
    std::optional<TriangleIndex> found;
    TriangleIndex t = 0;
    for (std::size_t steps = 0; steps <= triangles_.size() + 8; ++steps) {
        const Triangle& tri = triangles_[t];
        int exit_edge = -1;
        for (int k = 0; k < 3; ++k) {
            if (signed_distance(vertices_[tri[k]], vertices_[tri[(k + 1) % 3]], p) < -kCoincidenceTolerance) {
                exit_edge = k;
                break;
            }
        }
        if (exit_edge < 0) {
            found = t;
            break;
        }
        const std::size_t next = adjacency_[t][static_cast<std::size_t>(exit_edge)];
        if (next == kNoNeighbor) {
            return std::nullopt;
        }
        t = next;
    }
    if (!found) {
        for (TriangleIndex i = 0; i < triangles_.size(); ++i) {
            if (contains(i, p)) return i;
        }
        return std::nullopt;
    }

    // p may sit on an edge or vertex shared with lower-index triangles.
    TriangleIndex best = *found;
    std::vector<TriangleIndex> pending{*found};
    std::unordered_set<TriangleIndex> seen{*found};
    while (!pending.empty()) {
        const TriangleIndex cur = pending.back();
        pending.pop_back();
        best = std::min(best, cur);
        for (std::size_t n : adjacency_[cur]) {
            if (n != kNoNeighbor && !seen.contains(n) && contains(n, p)) {
                seen.insert(n);
                pending.push_back(n);
            }
        }
    }
    return best;
}

double idw_interpolate(Point2 va, Point2 vb, Point2 vc, double ia, double ib, double ic, Point2 p)
{
    const double da = distance(p, va);
    const double db = distance(p, vb);
    const double dc = distance(p, vc);
    if (da <= kCoincidenceTolerance) return ia;
    if (db <= kCoincidenceTolerance) return ib;
    if (dc <= kCoincidenceTolerance) return ic;
    const double wa = 1.0 / da, wb = 1.0 / db, wc = 1.0 / dc;
    return (ia * wa + ib * wb + ic * wc) / (wa + wb + wc);
}

} // namespace dribbleforge
