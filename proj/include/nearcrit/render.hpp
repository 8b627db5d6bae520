#pragma once
// Raster images of configurations, fire timelines and hole overlays.
//
// Site (x, y) is drawn as a cell of `cell` x round(cell * sqrt(3)/2) pixels, shifted by half a cell per row,
// so the brick layout keeps the six lattice neighbours adjacent. The top row of pixels is the highest lattice row.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nearcrit/forestfire.hpp"
#include "nearcrit/impurities.hpp"

namespace nearcrit {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kVacantColor{255, 255, 255};
inline constexpr Rgb kOccupiedColor{34, 139, 34};
inline constexpr Rgb kBurntColor{200, 30, 30};
inline constexpr Rgb kBurnEarly{8, 29, 88};     // darkest blue
inline constexpr Rgb kBurnLate{198, 219, 239};  // lightest blue
inline constexpr Rgb kHoleColor{255, 140, 0};

enum class Colormap { tri_state, burn_time, holes_overlay };
enum class ImageFormat { ppm, png, svg };

const char* to_string(Colormap c);
Colormap colormap_from_string(const std::string& s);
// By file extension: .ppm, .png, .svg.
ImageFormat format_from_path(const std::string& path);

struct RenderSpec {
    Colormap colormap = Colormap::tri_state;
    int cell = 4;
    std::optional<double> time;          // timelines: draw the state at this time (burnt in red)
    std::int64_t max_pixels = 1 << 26;
};

struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, top row first

    Rgb at(int x, int y) const;
    std::size_t distinct_colors() const;
};

Image render_config(const SiteConfig& c, const RenderSpec& spec = {});
// burn_time: burnt sites shaded from dark (earliest burn) to light (latest); tri_state: state at spec.time.
Image render_timeline(const FireTimeline& tl, const RenderSpec& spec = {});
// Base grid plus the L-infinity squares of the holes, blended half-way with the hole color and outlined.
Image render_holes(const SiteConfig& base, const HoleConfig& h, const RenderSpec& spec = {});

// `meta` (one line of JSON, say) goes into a PPM comment, a PNG tEXt chunk or an SVG comment.
void write_ppm(std::ostream& os, const Image& img, const std::string& meta = "");  // P6, 8-bit
void write_png(std::ostream& os, const Image& img, const std::string& meta = "");
void write_svg(std::ostream& os, const Image& img, const std::string& meta = "");  // one rect per run of equal color
void write_image(const std::string& path, const Image& img, const std::string& meta = "");

}  // namespace nearcrit
