#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "nearcrit/errors.hpp"
#include "nearcrit/render.hpp"

using namespace nearcrit;

namespace {

std::string bytes_of(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("single occupied cell") {
    SiteConfig c(Domain::make(Window::parallelogram({0, 0}, 1, 1)), 1);
    RenderSpec s;
    s.cell = 5;
    const Image img = render_config(c, s);
    CHECK(img.width == 5);
    CHECK(img.height == 4);
    CHECK(img.distinct_colors() == 1);
    CHECK(img.at(2, 2) == kOccupiedColor);
}

TEST_CASE("tri-state palette") {
    SiteConfig c = sample(Window::ball(10), 0.5, 3);
    for (std::size_t i = 0; i < c.size(); i += 7) c.state[i] = -1;
    const Image img = render_config(c);
    CHECK(img.distinct_colors() == 3);
    std::ostringstream os;
    write_ppm(os, img);
    const std::string head = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    CHECK(os.str().substr(0, head.size()) == head);
    CHECK(os.str().size() == head.size() + img.rgb.size());
}

TEST_CASE("brick layout keeps neighbours adjacent") {
    SiteConfig c(Domain::make(Window::ball(3)), 0);
    c.set({0, 0}, 1);
    RenderSpec s;
    s.cell = 4;
    const Image img = render_config(c, s);
    CHECK(img.distinct_colors() == 2);
    int count = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) count += img.at(x, y) == kOccupiedColor;
    CHECK(count == 4 * 3);
}

TEST_CASE("burn-time gradient runs dark to light") {
    FireOptions o;
    o.region = Window::ball(20);
    o.zeta = 0.05;
    o.t_end = INFINITY;
    const auto tl = simulate_ffwor(o, 2);
    REQUIRE(tl.burns.size() >= 2);
    RenderSpec s;
    s.colormap = Colormap::burn_time;
    s.cell = 2;
    const Image img = render_timeline(tl, s);
    int lo = 1 << 30, ymax = -(1 << 30);
    for (auto u : tl.final.domain->sites()) lo = std::min(lo, 2 * u.x + u.y), ymax = std::max(ymax, u.y);
    auto brightness = [&](SiteCoord v) {
        const Rgb c = img.at((2 * v.x + v.y - lo) * s.cell / 2, (ymax - v.y) * 2);
        return int(c[0]) + c[1] + c[2];
    };
    const auto& d = *tl.final.domain;
    const auto& first = tl.burns.front();
    const auto& last = tl.burns.back();
    CHECK(brightness(d.site(first.sites.front())) < brightness(d.site(last.sites.front())));
    CHECK(img.at(0, 0) != kBurntColor);
}

TEST_CASE("same timeline renders to identical files") {
    FireOptions o;
    o.region = Window::ball(15);
    o.zeta = 0.05;
    o.t_end = 2;
    const auto tl = simulate_ffwor(o, 9);
    RenderSpec s;
    s.colormap = Colormap::burn_time;
    for (const char* ext : {"ppm", "png", "svg"}) {
        const std::string a = std::string("render_a.") + ext, b = std::string("render_b.") + ext;
        write_image(a, render_timeline(tl, s));
        write_image(b, render_timeline(simulate_ffwor(o, 9), s));
        CHECK(bytes_of(a) == bytes_of(b));
        CHECK(!bytes_of(a).empty());
        std::remove(a.c_str());
        std::remove(b.c_str());
    }
    s.time = 1.0;
    const Image at = render_timeline(tl, s);
    CHECK(at.distinct_colors() <= 3);
}

TEST_CASE("holes overlay") {
    SiteConfig c(Domain::make(Window::ball(10)), 0);
    HoleConfig h;
    h.window = Window::ball(10);
    h.holes = {{{0, 0}, 2.0}};
    RenderSpec s;
    s.colormap = Colormap::holes_overlay;
    const Image img = render_holes(c, h, s);
    CHECK(img.distinct_colors() == 3);
    CHECK(img.at(img.width / 2, img.height / 2) != kVacantColor);
    CHECK(img.at(0, 0) == kVacantColor);
}

TEST_CASE("render errors") {
    SiteConfig c(Domain::make(Window::ball(200)), 0);
    RenderSpec s;
    s.cell = 200;
    CHECK_THROWS_AS(render_config(c, s), InvalidArgument);
    s.cell = 0;
    CHECK_THROWS_AS(render_config(c, s), InvalidArgument);
    CHECK_THROWS_AS(format_from_path("x.bmp"), InvalidArgument);
    CHECK(format_from_path("a/b.PNG") == ImageFormat::png);
    CHECK(colormap_from_string("tri-state") == Colormap::tri_state);
    CHECK_THROWS_AS(colormap_from_string("jet"), InvalidArgument);
}
