#pragma once
// Triangular lattice geometry in axial coordinates.
// Site (x, y) sits at x + y e^{i pi/3}; windows are closed regions of the plane (L-infinity norm).

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace nearcrit {

inline constexpr double kSqrt3 = 1.7320508075688772935;
inline constexpr double kRowHeight = kSqrt3 / 2.0;
inline constexpr double kGeomEps = 1e-9;
inline constexpr std::int64_t kMaxExtent = std::int64_t{1} << 20;

struct SiteCoord {
    std::int32_t x = 0;
    std::int32_t y = 0;
    auto operator<=>(const SiteCoord&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

inline Point embed(SiteCoord v) { return {v.x + 0.5 * v.y, v.y * kRowHeight}; }

// Counter-clockwise from east.
inline constexpr std::array<SiteCoord, 6> kNeighborOffsets{
    SiteCoord{1, 0}, SiteCoord{0, 1}, SiteCoord{-1, 1}, SiteCoord{-1, 0}, SiteCoord{0, -1}, SiteCoord{1, -1}};

std::array<SiteCoord, 6> neighbors(SiteCoord v);
bool adjacent(SiteCoord a, SiteCoord b);

double linf(Point a, Point b);
inline double linf(SiteCoord v, Point z) { return linf(embed(v), z); }

enum class WindowKind { rectangle, ball, annulus, parallelogram };
enum class BoundarySide { left, right, top, bottom, inner, outer };

const char* to_string(WindowKind k);
const char* to_string(BoundarySide s);

// rectangle: closed [x1,x2]x[y1,y2] in the plane.
// ball(n, z): sup-norm distance to z at most n.  annulus(n1, n2, z) = ball(n2) minus ball(n1).
// parallelogram: axial box origin + [0,a) x [0,b); its sides are lattice rows and slanted columns.
class Window {
public:
    Window() = default;

    static Window rectangle(double x1, double x2, double y1, double y2);
    static Window ball(double n, Point center = {});
    static Window annulus(double n1, double n2, Point center = {});
    static Window parallelogram(SiteCoord origin, std::int32_t a, std::int32_t b);

    WindowKind kind() const { return kind_; }
    Point center() const { return center_; }
    double x1() const { return x1_; }
    double x2() const { return x2_; }
    double y1() const { return y1_; }
    double y2() const { return y2_; }
    double n1() const { return n1_; }  // annulus inner radius
    double n2() const { return n2_; }  // ball / annulus outer radius
    SiteCoord origin() const { return origin_; }
    std::int32_t width() const { return a_; }
    std::int32_t height() const { return b_; }

    bool contains(SiteCoord v) const;
    // Same shape grown by pad in every direction (annulus grows to a ball).
    Window inflated(double pad) const;
    // Axis-aligned bounding box of the region in the plane.
    void bounds(double& xlo, double& xhi, double& ylo, double& yhi) const;

    bool operator==(const Window&) const = default;

private:
    WindowKind kind_ = WindowKind::ball;
    Point center_{};
    double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
    double n1_ = 0, n2_ = 0;
    SiteCoord origin_{};
    std::int32_t a_ = 0, b_ = 0;
};

// Row range of sites with embedded x in [xlo, xhi] on row y; empty when lo > hi.
struct RowSpan {
    std::int32_t y;
    std::int32_t lo;
    std::int32_t hi;
};

// Rows of the outer shape (annulus holes are not removed), bottom to top.
std::vector<RowSpan> row_spans(const Window& w);
std::vector<SiteCoord> sites_in(const Window& w);
std::vector<SiteCoord> boundary(const Window& w, BoundarySide s);

// Number of sites of ball(r) around the origin-like center z, without enumerating.
std::int64_t ball_site_count(double r, Point z = {});

}  // namespace nearcrit
