#include "nearcrit/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "nearcrit/errors.hpp"

namespace nearcrit {

std::array<SiteCoord, 6> neighbors(SiteCoord v) {
    std::array<SiteCoord, 6> out;
    for (int k = 0; k < 6; ++k) out[k] = {v.x + kNeighborOffsets[k].x, v.y + kNeighborOffsets[k].y};
    return out;
}

bool adjacent(SiteCoord a, SiteCoord b) {
    const int dx = b.x - a.x, dy = b.y - a.y;
    for (auto o : kNeighborOffsets)
        if (o.x == dx && o.y == dy) return true;
    return false;
}

double linf(Point a, Point b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

const char* to_string(WindowKind k) {
    switch (k) {
        case WindowKind::rectangle: return "rectangle";
        case WindowKind::ball: return "ball";
        case WindowKind::annulus: return "annulus";
        case WindowKind::parallelogram: return "parallelogram";
    }
    return "?";
}

const char* to_string(BoundarySide s) {
    switch (s) {
        case BoundarySide::left: return "left";
        case BoundarySide::right: return "right";
        case BoundarySide::top: return "top";
        case BoundarySide::bottom: return "bottom";
        case BoundarySide::inner: return "inner";
        case BoundarySide::outer: return "outer";
    }
    return "?";
}

namespace {

void check_extent(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi - lo >= static_cast<double>(kMaxExtent))
        throw InvalidArgument("window extent overflow (side must be below 2^20)");
}

bool row_major_less(SiteCoord a, SiteCoord b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

}  // namespace

Window Window::rectangle(double x1, double x2, double y1, double y2) {
    if (!(x1 <= x2) || !(y1 <= y2)) throw InvalidArgument("rectangle needs x1 <= x2 and y1 <= y2");
    check_extent(x1, x2);
    check_extent(y1, y2);
    Window w;
    w.kind_ = WindowKind::rectangle;
    w.x1_ = x1, w.x2_ = x2, w.y1_ = y1, w.y2_ = y2;
    w.center_ = {(x1 + x2) / 2, (y1 + y2) / 2};
    return w;
}

Window Window::ball(double n, Point center) {
    if (!(n >= 0)) throw InvalidArgument("ball radius must be >= 0");
    check_extent(-n, n);
    Window w;
    w.kind_ = WindowKind::ball;
    w.center_ = center;
    w.n2_ = n;
    return w;
}

Window Window::annulus(double n1, double n2, Point center) {
    if (!(n1 >= 0) || !(n1 <= n2)) throw InvalidArgument("annulus needs 0 <= n1 <= n2");
    check_extent(-n2, n2);
    Window w;
    w.kind_ = WindowKind::annulus;
    w.center_ = center;
    w.n1_ = n1, w.n2_ = n2;
    return w;
}

Window Window::parallelogram(SiteCoord origin, std::int32_t a, std::int32_t b) {
    if (a < 0 || b < 0) throw InvalidArgument("parallelogram sides must be >= 0");
    if (a >= kMaxExtent || b >= kMaxExtent) throw InvalidArgument("window extent overflow (side must be below 2^20)");
    Window w;
    w.kind_ = WindowKind::parallelogram;
    w.origin_ = origin;
    w.a_ = a, w.b_ = b;
    w.center_ = embed({origin.x, origin.y});
    w.center_.x += (a - 1) / 2.0 + (b - 1) / 4.0;
    w.center_.y += (b - 1) * kRowHeight / 2.0;
    return w;
}

bool Window::contains(SiteCoord v) const {
    const Point e = embed(v);
    switch (kind_) {
        case WindowKind::rectangle:
            return e.x >= x1_ - kGeomEps && e.x <= x2_ + kGeomEps && e.y >= y1_ - kGeomEps && e.y <= y2_ + kGeomEps;
        case WindowKind::ball: return linf(e, center_) <= n2_ + kGeomEps;
        case WindowKind::annulus: {
            const double d = linf(e, center_);
            return d <= n2_ + kGeomEps && d > n1_ + kGeomEps;
        }
        case WindowKind::parallelogram:
            return v.x >= origin_.x && v.x < origin_.x + a_ && v.y >= origin_.y && v.y < origin_.y + b_;
    }
    return false;
}

void Window::bounds(double& xlo, double& xhi, double& ylo, double& yhi) const {
    switch (kind_) {
        case WindowKind::rectangle: xlo = x1_, xhi = x2_, ylo = y1_, yhi = y2_; return;
        case WindowKind::ball:
        case WindowKind::annulus:
            xlo = center_.x - n2_, xhi = center_.x + n2_, ylo = center_.y - n2_, yhi = center_.y + n2_;
            return;
        case WindowKind::parallelogram: {
            const Point o = embed(origin_);
            xlo = o.x, xhi = o.x + std::max(0, a_ - 1) + std::max(0, b_ - 1) / 2.0;
            ylo = o.y, yhi = o.y + std::max(0, b_ - 1) * kRowHeight;
            return;
        }
    }
}

Window Window::inflated(double pad) const {
    switch (kind_) {
        case WindowKind::rectangle: return rectangle(x1_ - pad, x2_ + pad, y1_ - pad, y2_ + pad);
        case WindowKind::ball:
        case WindowKind::annulus: return ball(n2_ + pad, center_);
        case WindowKind::parallelogram: {
            double xlo, xhi, ylo, yhi;
            bounds(xlo, xhi, ylo, yhi);
            return rectangle(xlo - pad, xhi + pad, ylo - pad, yhi + pad);
        }
    }
    return *this;
}

std::vector<RowSpan> row_spans(const Window& w) {
    std::vector<RowSpan> rows;
    if (w.kind() == WindowKind::parallelogram) {
        for (std::int32_t j = 0; j < w.height(); ++j)
            if (w.width() > 0) rows.push_back({w.origin().y + j, w.origin().x, w.origin().x + w.width() - 1});
        return rows;
    }
    double xlo, xhi, ylo, yhi;
    w.bounds(xlo, xhi, ylo, yhi);
    const auto y0 = static_cast<std::int32_t>(std::ceil((ylo - kGeomEps) / kRowHeight));
    const auto y1 = static_cast<std::int32_t>(std::floor((yhi + kGeomEps) / kRowHeight));
    for (std::int32_t y = y0; y <= y1; ++y) {
        const auto lo = static_cast<std::int32_t>(std::ceil(xlo - kGeomEps - 0.5 * y));
        const auto hi = static_cast<std::int32_t>(std::floor(xhi + kGeomEps - 0.5 * y));
        if (lo <= hi) rows.push_back({y, lo, hi});
    }
    return rows;
}

std::vector<SiteCoord> sites_in(const Window& w) {
    std::vector<SiteCoord> out;
    for (const auto& r : row_spans(w))
        for (std::int32_t x = r.lo; x <= r.hi; ++x) {
            const SiteCoord v{x, r.y};
            if (w.kind() != WindowKind::annulus || w.contains(v)) out.push_back(v);
        }
    return out;
}

std::vector<SiteCoord> boundary(const Window& w, BoundarySide s) {
    std::vector<SiteCoord> out;
    const auto all = sites_in(w);
    auto is_inner = [&](SiteCoord v) {
        for (auto u : neighbors(v))
            if (!w.contains(u)) return true;
        return false;
    };
    switch (s) {
        case BoundarySide::inner:
            for (auto v : all)
                if (is_inner(v)) out.push_back(v);
            return out;
        case BoundarySide::outer: {
            for (auto v : all)
                for (auto u : neighbors(v))
                    if (!w.contains(u)) out.push_back(u);
            std::sort(out.begin(), out.end(), row_major_less);
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }
        default: break;
    }
    if (w.kind() == WindowKind::annulus) throw InvalidArgument("annulus has only inner and outer boundaries");
    if (w.kind() == WindowKind::parallelogram) {
        const SiteCoord o = w.origin();
        for (auto v : all) {
            const bool hit = (s == BoundarySide::left && v.x == o.x) ||
                             (s == BoundarySide::right && v.x == o.x + w.width() - 1) ||
                             (s == BoundarySide::bottom && v.y == o.y) ||
                             (s == BoundarySide::top && v.y == o.y + w.height() - 1);
            if (hit) out.push_back(v);
        }
        return out;
    }
    double xlo, xhi, ylo, yhi;
    w.bounds(xlo, xhi, ylo, yhi);
    for (auto v : all) {
        const Point e = embed(v);
        bool hit = false;
        switch (s) {
            case BoundarySide::left: hit = e.x < xlo + 1.0 - kGeomEps; break;
            case BoundarySide::right: hit = e.x > xhi - 1.0 + kGeomEps; break;
            case BoundarySide::bottom: hit = e.y < ylo + kRowHeight - kGeomEps; break;
            case BoundarySide::top: hit = e.y > yhi - kRowHeight + kGeomEps; break;
            default: break;
        }
        if (hit) out.push_back(v);
    }
    return out;
}

std::int64_t ball_site_count(double r, Point z) {
    std::int64_t n = 0;
    for (const auto& row : row_spans(Window::ball(r, z))) n += row.hi - row.lo + 1;
    return n;
}

}  // namespace nearcrit
