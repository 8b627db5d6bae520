#include "nearcrit/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "nearcrit/errors.hpp"

namespace nearcrit {

const char* to_string(Colormap c) {
    switch (c) {
        case Colormap::tri_state: return "tri-state";
        case Colormap::burn_time: return "burn-time-gradient";
        case Colormap::holes_overlay: return "holes-overlay";
    }
    return "?";
}

Colormap colormap_from_string(const std::string& s) {
    if (s == "tri-state") return Colormap::tri_state;
    if (s == "burn-time-gradient" || s == "burn-time") return Colormap::burn_time;
    if (s == "holes-overlay") return Colormap::holes_overlay;
    throw InvalidArgument("unknown colormap '" + s + "'");
}

ImageFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == "ppm") return ImageFormat::ppm;
    if (ext == "png") return ImageFormat::png;
    if (ext == "svg") return ImageFormat::svg;
    throw InvalidArgument("unknown image extension in '" + path + "' (use .ppm, .png or .svg)");
}

Rgb Image::at(int x, int y) const {
    const std::size_t o = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
}

std::size_t Image::distinct_colors() const {
    std::set<std::uint32_t> seen;
    for (std::size_t o = 0; o + 2 < rgb.size(); o += 3)
        seen.insert(static_cast<std::uint32_t>(rgb[o]) << 16 | static_cast<std::uint32_t>(rgb[o + 1]) << 8 | rgb[o + 2]);
    return seen.size();
}

namespace {

struct Canvas {
    Image img;
    int cw = 1, ch = 1;
    int ex2min = 0, ymax = 0;

    Canvas(const Domain& d, const RenderSpec& spec) {
        if (spec.cell < 1) throw InvalidArgument("cell size must be >= 1");
        if (d.size() == 0) throw InvalidArgument("nothing to render: the window has no sites");
        cw = spec.cell;
        ch = std::max(1, static_cast<int>(std::lround(spec.cell * kRowHeight)));
        std::int64_t lo = INT64_MAX, hi = INT64_MIN, ylo = INT64_MAX, yhi = INT64_MIN;
        for (const SiteCoord v : d.sites()) {
            const std::int64_t e = 2 * std::int64_t{v.x} + v.y;
            lo = std::min(lo, e), hi = std::max(hi, e);
            ylo = std::min<std::int64_t>(ylo, v.y), yhi = std::max<std::int64_t>(yhi, v.y);
        }
        const std::int64_t w = ((hi - lo) * cw) / 2 + cw;
        const std::int64_t h = (yhi - ylo + 1) * ch;
        if (w > 32768 || h > 32768 || w * h > spec.max_pixels)
            throw InvalidArgument("canvas of " + std::to_string(w) + "x" + std::to_string(h) +
                                  " pixels exceeds the limit; lower the cell size");
        ex2min = static_cast<int>(lo), ymax = static_cast<int>(yhi);
        img.width = static_cast<int>(w), img.height = static_cast<int>(h);
        img.rgb.assign(static_cast<std::size_t>(w * h) * 3, 0);
        fill_all(kVacantColor);
    }

    void fill_all(Rgb c) {
        for (std::size_t o = 0; o < img.rgb.size(); o += 3) img.rgb[o] = c[0], img.rgb[o + 1] = c[1], img.rgb[o + 2] = c[2];
    }

    void put(int x, int y, Rgb c) {
        const std::size_t o = (static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(x)) * 3;
        img.rgb[o] = c[0], img.rgb[o + 1] = c[1], img.rgb[o + 2] = c[2];
    }

    void site(SiteCoord v, Rgb c) {
        const int x0 = ((2 * v.x + v.y - ex2min) * cw) / 2;
        const int y0 = (ymax - v.y) * ch;
        for (int y = y0; y < y0 + ch; ++y)
            for (int x = x0; x < std::min(x0 + cw, img.width); ++x) put(x, y, c);
    }

    double px(double X) const { return (X - 0.5 * ex2min) * cw + 0.5 * cw; }
    double py(double Y) const { return (ymax - Y / kRowHeight + 0.5) * ch; }
};

Rgb lerp(Rgb a, Rgb b, double f) {
    Rgb c;
    for (int k = 0; k < 3; ++k) c[k] = static_cast<std::uint8_t>(std::lround(a[k] + (b[k] - a[k]) * f));
    return c;
}

Rgb tri(std::int8_t s) { return s == 1 ? kOccupiedColor : s == -1 ? kBurntColor : kVacantColor; }

void draw_states(Canvas& cv, const SiteConfig& c) {
    const auto& d = *c.domain;
    for (std::size_t i = 0; i < c.size(); ++i) cv.site(d.site(static_cast<index_t>(i)), tri(c.state[i]));
}

}  // namespace

Image render_config(const SiteConfig& c, const RenderSpec& spec) {
    Canvas cv(*c.domain, spec);
    if (spec.colormap == Colormap::burn_time && !c.burn_time.empty()) {
        double lo = INFINITY, hi = -INFINITY;
        for (double t : c.burn_time)
            if (!std::isnan(t)) lo = std::min(lo, t), hi = std::max(hi, t);
        const auto& d = *c.domain;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double t = c.burn_time[i];
            Rgb col = tri(c.state[i]);
            if (c.state[i] == -1 && !std::isnan(t)) col = lerp(kBurnEarly, kBurnLate, hi > lo ? (t - lo) / (hi - lo) : 0.0);
            cv.site(d.site(static_cast<index_t>(i)), col);
        }
        return cv.img;
    }
    draw_states(cv, c);
    return cv.img;
}

Image render_timeline(const FireTimeline& tl, const RenderSpec& spec) {
    if (spec.time) {
        RenderSpec s = spec;
        s.colormap = Colormap::tri_state;
        return render_config(tl.state_at(*spec.time), s);
    }
    RenderSpec s = spec;
    if (s.colormap == Colormap::holes_overlay) throw InvalidArgument("holes-overlay needs a hole configuration");
    return render_config(tl.final, s);
}

Image render_holes(const SiteConfig& base, const HoleConfig& h, const RenderSpec& spec) {
    Canvas cv(*base.domain, spec);
    draw_states(cv, base);
    auto& img = cv.img;
    for (const Hole& hole : h.holes) {
        const Point z = embed(hole.center);
        const int x0 = static_cast<int>(std::floor(cv.px(z.x - hole.radius) - 0.5 * cv.cw));
        const int x1 = static_cast<int>(std::ceil(cv.px(z.x + hole.radius) + 0.5 * cv.cw)) - 1;
        const int y0 = static_cast<int>(std::floor(cv.py(z.y + hole.radius) - 0.5 * cv.ch));
        const int y1 = static_cast<int>(std::ceil(cv.py(z.y - hole.radius) + 0.5 * cv.ch)) - 1;
        const int cx0 = std::max(0, x0), cx1 = std::min(img.width - 1, x1);
        const int cy0 = std::max(0, y0), cy1 = std::min(img.height - 1, y1);
        for (int y = cy0; y <= cy1; ++y)
            for (int x = cx0; x <= cx1; ++x) {
                const bool edge = x == x0 || x == x1 || y == y0 || y == y1;
                cv.put(x, y, edge ? kHoleColor : lerp(img.at(x, y), kHoleColor, 0.5));
            }
    }
    return img;
}

void write_ppm(std::ostream& os, const Image& img, const std::string& meta) {
    os << "P6\n";
    if (!meta.empty()) {
        std::string line = meta;
        std::replace(line.begin(), line.end(), '\n', ' ');
        os << "# " << line << '\n';
    }
    os << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

namespace {

void png_write_cb(png_structp p, png_bytep data, png_size_t n) {
    auto* os = static_cast<std::ostream*>(png_get_io_ptr(p));
    os->write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void png_flush_cb(png_structp p) { static_cast<std::ostream*>(png_get_io_ptr(p))->flush(); }

}  // namespace

void write_png(std::ostream& os, const Image& img, const std::string& meta) {
    png_structp p = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!p) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(p);
    if (!info || setjmp(png_jmpbuf(p))) {
        png_destroy_write_struct(&p, &info);
        throw std::runtime_error("PNG encoding failed");
    }
    png_set_write_fn(p, &os, png_write_cb, png_flush_cb);
    png_set_IHDR(p, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_text text{};
    std::string key = "nearcrit-config";
    if (!meta.empty()) {
        text.compression = PNG_TEXT_COMPRESSION_NONE;
        text.key = key.data();
        text.text = const_cast<char*>(meta.c_str());
        text.text_length = meta.size();
        png_set_text(p, info, &text, 1);
    }
    png_write_info(p, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(p, const_cast<png_bytep>(img.rgb.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) * 3));
    png_write_end(p, nullptr);
    png_destroy_write_struct(&p, &info);
}

void write_svg(std::ostream& os, const Image& img, const std::string& meta) {
    if (!meta.empty()) {
        std::string safe = meta;
        for (std::size_t k = safe.find("--"); k != std::string::npos; k = safe.find("--", k)) safe.replace(k, 2, "- -");
        os << "<!-- " << safe << " -->\n";
    }
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << img.width << "\" height=\"" << img.height
       << "\" shape-rendering=\"crispEdges\">\n";
    char col[8];
    for (int y = 0; y < img.height; ++y) {
        int x = 0;
        while (x < img.width) {
            const Rgb c = img.at(x, y);
            int e = x + 1;
            while (e < img.width && img.at(e, y) == c) ++e;
            std::snprintf(col, sizeof col, "#%02x%02x%02x", c[0], c[1], c[2]);
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << e - x << "\" height=\"1\" fill=\"" << col
               << "\"/>\n";
            x = e;
        }
    }
    os << "</svg>\n";
}

void write_image(const std::string& path, const Image& img, const std::string& meta) {
    const ImageFormat f = format_from_path(path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    switch (f) {
        case ImageFormat::ppm: write_ppm(os, img, meta); break;
        case ImageFormat::png: write_png(os, img, meta); break;
        case ImageFormat::svg: write_svg(os, img, meta); break;
    }
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace nearcrit
