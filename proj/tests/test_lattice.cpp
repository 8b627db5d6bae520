#include <cmath>
#include <set>

#include "doctest.h"
#include "nearcrit/domain.hpp"
#include "nearcrit/errors.hpp"
#include "nearcrit/lattice.hpp"
#include "nearcrit/rng.hpp"
#include "oracles.hpp"

using namespace nearcrit;

TEST_CASE("embedding of basis and combined vectors") {
    auto e = embed({1, 0});
    CHECK(e.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.y) < 1e-12);
    e = embed({0, 1});
    CHECK(std::abs(e.x - 0.5) < 1e-12);
    CHECK(std::abs(e.y - 0.8660254037844386) < 1e-12);
    e = embed({2, -2});
    CHECK(std::abs(e.x - 1.0) < 1e-12);
    CHECK(std::abs(e.y + 1.7320508075688772) < 1e-12);
}

TEST_CASE("neighbors: offsets, symmetry, unit distance") {
    const auto nb = neighbors({0, 0});
    const std::set<SiteCoord> got(nb.begin(), nb.end());
    const std::set<SiteCoord> want{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
    CHECK(got == want);

    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const SiteCoord v{static_cast<int>(rng() % 41) - 20, static_cast<int>(rng() % 41) - 20};
        const auto nv = neighbors(v);
        const SiteCoord u = nv[rng() % 6];
        const auto nu = neighbors(u);
        CHECK(std::find(nu.begin(), nu.end(), v) != nu.end());
        const SiteCoord w{v.x + static_cast<int>(rng() % 5) - 2, v.y + static_cast<int>(rng() % 5) - 2};
        const auto nw = neighbors(w);
        CHECK((std::find(nv.begin(), nv.end(), w) != nv.end()) == (std::find(nw.begin(), nw.end(), v) != nw.end()));
    }
    for (auto u : neighbors({3, -7})) CHECK(oracle::unit_apart({3, -7}, u));
}

TEST_CASE("sites_in counts and order") {
    CHECK(sites_in(Window::ball(0)) == std::vector<SiteCoord>{{0, 0}});
    CHECK(sites_in(Window::ball(1)).size() == 7);
    CHECK(sites_in(Window::ball(2)).size() == 23);
    CHECK(sites_in(Window::ball(3)).size() == 45);
    CHECK(sites_in(Window::ball(8)).size() == 313);
    const auto b64 = sites_in(Window::ball(64));
    CHECK(b64.size() == 18889);
    CHECK(std::abs(static_cast<double>(b64.size()) / (128.0 * 128.0) / (2.0 / std::sqrt(3.0)) - 1.0) < 0.02);
    CHECK(sites_in(Window::annulus(5, 5)).empty());
    CHECK(ball_site_count(64) == 18889);

    // row-major and deterministic
    for (std::size_t i = 1; i < b64.size(); ++i)
        CHECK((b64[i - 1].y < b64[i].y || (b64[i - 1].y == b64[i].y && b64[i - 1].x < b64[i].x)));
    CHECK(sites_in(Window::ball(64)) == b64);

    // plain scan agrees, including an off-lattice center
    const Point z{0.3, -0.7};
    const auto scan = oracle::scan_sites(
        [&](double x, double y) { return std::max(std::abs(x - z.x), std::abs(y - z.y)) <= 6.5; }, 8);
    auto mine = sites_in(Window::ball(6.5, z));
    CHECK(std::set<SiteCoord>(scan.begin(), scan.end()) == std::set<SiteCoord>(mine.begin(), mine.end()));
    const auto rect = oracle::scan_sites([](double x, double y) { return x >= -2 && x <= 5.5 && y >= 0 && y <= 4; }, 8);
    mine = sites_in(Window::rectangle(-2, 5.5, 0, 4));
    CHECK(std::set<SiteCoord>(rect.begin(), rect.end()) == std::set<SiteCoord>(mine.begin(), mine.end()));
}

TEST_CASE("ball partition into inner ball and annulus") {
    for (int n2 = 1; n2 <= 64; n2 += 7)
        for (int n1 = 0; n1 < n2; n1 += 3) {
            const auto big = sites_in(Window::ball(n2));
            const auto in = sites_in(Window::ball(n1));
            const auto ring = sites_in(Window::annulus(n1, n2));
            CHECK(in.size() + ring.size() == big.size());
            std::set<SiteCoord> u(in.begin(), in.end());
            for (auto v : ring) CHECK(u.insert(v).second);
            CHECK(u == std::set<SiteCoord>(big.begin(), big.end()));
        }
}

TEST_CASE("boundaries") {
    CHECK(boundary(Window::ball(0), BoundarySide::inner) == std::vector<SiteCoord>{{0, 0}});
    auto out0 = boundary(Window::ball(0), BoundarySide::outer);
    auto nb = neighbors({0, 0});
    CHECK(std::set<SiteCoord>(out0.begin(), out0.end()) == std::set<SiteCoord>(nb.begin(), nb.end()));

    const Window b8 = Window::ball(8);
    for (auto v : boundary(b8, BoundarySide::inner)) {
        CHECK(b8.contains(v));
        bool out = false;
        for (auto u : neighbors(v)) out |= !b8.contains(u);
        CHECK(out);
    }
    for (auto v : boundary(b8, BoundarySide::outer)) CHECK_FALSE(b8.contains(v));

    // parallelogram sides are axial lines
    const Window par = Window::parallelogram({0, 0}, 4, 3);
    CHECK(boundary(par, BoundarySide::left).size() == 3);
    CHECK(boundary(par, BoundarySide::top).size() == 4);
    for (auto v : boundary(par, BoundarySide::right)) CHECK(v.x == 3);

    // rectangle sides: one site per row on left/right, one row on top/bottom
    const Window r = Window::rectangle(0, 10, 0, 6);
    const auto rows = row_spans(r);
    CHECK(boundary(r, BoundarySide::left).size() == rows.size());
    CHECK(boundary(r, BoundarySide::bottom).size() == static_cast<std::size_t>(rows.front().hi - rows.front().lo + 1));
    CHECK_THROWS_AS(boundary(Window::annulus(1, 3), BoundarySide::left), InvalidArgument);
}

TEST_CASE("extent limits") {
    CHECK_THROWS_AS(Window::ball(1 << 20), InvalidArgument);
    CHECK_THROWS_AS(Window::rectangle(0, 1 << 21, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(Window::parallelogram({0, 0}, 1 << 20, 2), InvalidArgument);
    CHECK_THROWS_AS(Window::annulus(3, 2), InvalidArgument);
}

TEST_CASE("domain neighbor table matches coordinates") {
    const Domain d(Window::annulus(2, 6, {0.5, 0.0}));
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto nb = neighbors(d.sites()[i]);
        for (int k = 0; k < 6; ++k) {
            const index_t j = d.neighbor(static_cast<index_t>(i), k);
            if (j == kNone)
                CHECK_FALSE(d.window().contains(nb[k]));
            else
                CHECK(d.sites()[j] == nb[k]);
        }
    }
}
