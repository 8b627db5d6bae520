#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nearcrit/annulus.hpp"
#include "nearcrit/errors.hpp"
#include "nearcrit/impurities.hpp"
#include "oracles.hpp"

using namespace nearcrit;

namespace {

double sup_dist(SiteCoord u, SiteCoord v) {
    const double dx = (u.x - v.x) + 0.5 * (u.y - v.y), dy = (u.y - v.y) * std::sqrt(3.0) / 2;
    return std::max(std::abs(dx), std::abs(dy));
}

HoleConfig holes_of(const Window& w, std::vector<Hole> hs) {
    HoleConfig h;
    h.window = w;
    h.holes = std::move(hs);
    return h;
}

// Brute force over every subset of the holes meeting the annulus.
bool w4_oracle(const SiteConfig& c, const HoleConfig& h, const Window& a, const oracle::ArmOracle& orc) {
    const auto& s = c.domain->sites();
    std::vector<std::size_t> rel;
    for (std::size_t k = 0; k < h.holes.size(); ++k)
        for (auto v : s)
            if (a.contains(v) && sup_dist(v, h.holes[k].center) <= h.holes[k].radius + 1e-9) {
                rel.push_back(k);
                break;
            }
    for (std::uint32_t m = 0; m < (1u << rel.size()); ++m) {
        std::vector<std::int8_t> st;
        for (auto v : orc.sites) {
            std::int8_t x = c.at(v);
            for (std::size_t j = 0; j < rel.size(); ++j)
                if ((m >> j & 1) && sup_dist(v, h.holes[rel[j]].center) <= h.holes[rel[j]].radius + 1e-9) x = 0;
            st.push_back(x);
        }
        if (orc.event(st, {1, 0, 1, 0})) return true;
    }
    return false;
}

struct SmallInstance {
    SiteConfig c;
    HoleConfig h;
};

SmallInstance small_instance(Rng& rng, const Window& a, double p) {
    SmallInstance s;
    s.c = sample(Domain::make(Window::ball(a.n2() + 1)), p, rng);
    std::vector<Hole> hs;
    const int k = 1 + static_cast<int>(rng.uniform() * 5);
    const double radii[] = {0.0, 0.5, 1.0, 1.5, 2.2};
    for (int i = 0; i < k; ++i) {
        const SiteCoord v{static_cast<int>(rng.uniform() * 11) - 5, static_cast<int>(rng.uniform() * 9) - 4};
        hs.push_back({v, radii[static_cast<int>(rng.uniform() * 5) % 5]});
    }
    s.h = holes_of(s.c.window(), hs);
    return s;
}

}  // namespace

TEST_CASE("phase classifier") {
    CHECK(classify_domain(55.0 / 48 + 0.01, 55.0 / 48 + 0.02) == PhaseDomain::I);
    CHECK(classify_domain(0.5, 0.5) == PhaseDomain::IV);
    CHECK(classify_domain(0.5, 0.6) == PhaseDomain::III);
    CHECK(classify_domain(0.5, 0.9) == PhaseDomain::II);
    CHECK(classify_domain(1.5, 1.0) == PhaseDomain::IV);
    CHECK(classify_domain(0.75, 1.0) == PhaseDomain::II);
    CHECK(classify_domain(0.6, 0.75) == PhaseDomain::III);
    CHECK(on_classifier_tie(0.75, 1.0));
    CHECK_FALSE(on_classifier_tie(1.2, 1.5));
    CHECK_THROWS_AS(classify_domain(2.0, 3.0), InvalidArgument);
    CHECK_THROWS_AS(classify_domain(1.0, 0.0), InvalidArgument);
}

TEST_CASE("tail law and its inverse") {
    const HoleParams p{32, 1.2, 1.5, 1, 1, 1};
    CHECK(p.tail(0) == 1.0);
    CHECK(p.tail(0.3) == doctest::Approx(std::exp(-1.0 / 32)));
    CHECK(p.tail(8) == doctest::Approx(std::pow(8.0, -0.8) * std::exp(-0.25)));
    for (double r : {1.0, 1.7, 8.0, 40.0, 300.0}) CHECK(p.radius(p.tail(r)) == doctest::Approx(r).epsilon(1e-10));
    CHECK(p.radius(0.999) == 0.0);
    CHECK(p.pi() == doctest::Approx(std::pow(32.0, -1.5)));
    HoleParams big = p;
    big.c1 = 5;
    CHECK(big.tail(1) == 1.0);
    CHECK(big.radius(1.0) > 1.0);
    CHECK(big.tail(big.radius(0.5)) == doctest::Approx(0.5));
    HoleParams bad = p;
    bad.alpha = 2;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("no holes when c3 = 0") {
    HoleParams p{32, 1.2, 1.5, 1, 1, 0};
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(sample_holes(Window::ball(30), p, s).holes.empty());
}

TEST_CASE("presence fraction and radius tail") {
    const HoleParams p{32, 1.2, 1.5, 1, 1, 1};
    const Window w = Window::ball(60);  // about 1.3e4 sites
    HoleSampleOptions opt;
    opt.pad = 0.0;
    const double n = static_cast<double>(ball_site_count(60));
    std::int64_t holes = 0, big = 0, trials = 40;
    for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(trials); ++s) {
        const auto h = sample_holes(w, p, s, opt);
        holes += static_cast<std::int64_t>(h.holes.size());
        for (const auto& x : h.holes) {
            CHECK(w.contains(x.center));
            big += x.radius >= 8;
        }
    }
    const double pi = p.pi(), N = n * trials;
    CHECK(std::abs(holes / N - pi) < 4 * std::sqrt(pi * (1 - pi) / N));
    const double t = p.tail(8), H = static_cast<double>(holes);
    CHECK(std::abs(big / H - t) < 4 * std::sqrt(t * (1 - t) / H));
}

TEST_CASE("per-site multiplier") {
    const HoleParams p{4, 1.2, 1.5, 1, 1, 1};
    HoleSampleOptions opt;
    opt.pad = 0.0;
    opt.multiplier = [](SiteCoord v) { return v.y >= 0 ? 8.0 : 0.0; };
    const auto h = sample_holes(Window::ball(10), p, 3, opt);
    CHECK(!h.holes.empty());
    for (const auto& x : h.holes) CHECK(x.center.y >= 0);
    const auto s = sites_in(Window::ball(10));
    CHECK(h.holes.size() == static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](SiteCoord v) { return v.y >= 0; })));
}

TEST_CASE("sampling is deterministic and padded") {
    const HoleParams p{8, 1.2, 1.5, 1, 1, 1};
    const auto a = sample_holes(Window::ball(10), p, 11), b = sample_holes(Window::ball(10), p, 11);
    CHECK(a.holes == b.holes);
    CHECK(a.pad == 32.0);
    bool outside = false;
    for (const auto& x : a.holes) outside |= !Window::ball(10).contains(x.center);
    CHECK(outside);
}

TEST_CASE("apply holes") {
    const Window w = Window::ball(8);
    const auto d = Domain::make(w);
    const SiteConfig full(d, 1);
    const auto h = holes_of(w, {{{0, 0}, 2.0}});
    const auto out = apply_holes(full, h);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK((out.state[i] == 0) == Window::ball(2).contains(d->site(i)));

    Rng rng(4);
    const auto c = sample(d, 0.6, rng);
    const auto hs = holes_of(w, {{{3, 1}, 1.5}, {{-9, 0}, 2.5}, {{0, -4}, 0.0}, {{2, 2}, 0.7}});
    const std::vector<std::size_t> none;
    CHECK(apply_holes(c, hs, &none).state == c.state);
    const std::vector<std::size_t> some{1, 3};
    for (const auto* U : {static_cast<const std::vector<std::size_t>*>(nullptr), &some}) {
        const auto o = apply_holes(c, hs, U);
        for (std::size_t i = 0; i < o.size(); ++i) {
            bool cov = false;
            for (std::size_t k = 0; k < hs.holes.size(); ++k)
                if (!U || std::find(U->begin(), U->end(), k) != U->end())
                    cov |= sup_dist(d->site(i), hs.holes[k].center) <= hs.holes[k].radius + 1e-9;
            CHECK(o.state[i] <= c.state[i]);
            CHECK(o.state[i] == (cov ? 0 : c.state[i]));
        }
    }
}

TEST_CASE("hole crossing events") {
    const Window a = Window::annulus(4, 12);
    const HoleConfig empty = holes_of(a, {});
    for (auto e : {HoleEvent::H, HoleEvent::Hbar, HoleEvent::Hbarbar, HoleEvent::Hbarbar_star, HoleEvent::big_hole})
        CHECK_FALSE(detect_hole_crossing(empty, a, e));
    CHECK(detect_hole_crossing(holes_of(a, {{{0, 0}, 12}}), a, HoleEvent::H));
    const auto cover = holes_of(a, {{{0, 0}, 16}});
    CHECK(detect_hole_crossing(cover, a, HoleEvent::H));
    CHECK_FALSE(detect_hole_crossing(cover, a, HoleEvent::Hbarbar));
    // centered on the ring at distance 8: reaches 4 and 12 without covering ball(4)
    const auto side = holes_of(a, {{{8, 0}, 5}});
    CHECK(detect_hole_crossing(side, a, HoleEvent::H));
    CHECK(detect_hole_crossing(side, a, HoleEvent::Hbar));
    CHECK(detect_hole_crossing(side, a, HoleEvent::Hbarbar));
    const auto small = holes_of(a, {{{8, 0}, 1}});
    CHECK_FALSE(detect_hole_crossing(small, a, HoleEvent::H));
    // reaches ball(2): not Hbar, still Hbarbar
    const auto deep = holes_of(a, {{{8, 0}, 6.5}});
    CHECK_FALSE(detect_hole_crossing(deep, a, HoleEvent::Hbar));
    CHECK(detect_hole_crossing(deep, a, HoleEvent::Hbarbar));
    CHECK(detect_hole_crossing(holes_of(a, {{{10, 0}, 6}}), a, HoleEvent::Hbarbar_star));
    CHECK(detect_hole_crossing(holes_of(a, {{{6, 0}, 2.1}}), Window::annulus(4, 16), HoleEvent::big_hole));
    CHECK_FALSE(detect_hole_crossing(holes_of(a, {{{6, 0}, 1.5}}), Window::annulus(4, 16), HoleEvent::big_hole));
    CHECK_THROWS_AS(detect_hole_crossing(empty, Window::annulus(4, 6), HoleEvent::Hbar), InvalidArgument);
    CHECK_THROWS_AS(detect_hole_crossing(empty, Window::ball(6), HoleEvent::H), InvalidArgument);
    CHECK(parse_hole_event("Hbarbar_star") == HoleEvent::Hbarbar_star);
    CHECK_THROWS_AS(parse_hole_event("X"), InvalidArgument);
}

TEST_CASE("hole bounds") {
    const HoleParams zero{32, 1.2, 1.5, 1, 1, 0};
    CHECK(analytic_hole_bounds(zero, 8, 16).bound_H == 0.0);
    CHECK(analytic_hole_bounds(zero, 8, 16).bound_Hbarbar == 0.0);
    const HoleParams p{32, 1.2, 1.5, 1, 1, 1};
    double prev = 1e300;
    for (double n1 : {4.0, 8.0, 16.0, 32.0}) {
        const double b = analytic_hole_bounds(p, n1, 2 * n1).bound_H;
        CHECK(b <= prev);
        prev = b;
    }
    for (double m : {16.0, 32.0, 64.0}) {
        HoleParams q = p;
        q.m = m;
        const auto b = analytic_hole_bounds(q, 8, 16);
        const Window a = Window::annulus(8, 16);
        int hits = 0, hits2 = 0;
        for (std::uint64_t s = 0; s < 10000; ++s) {
            const auto h = sample_holes(a, q, s);
            hits += detect_hole_crossing(h, a, HoleEvent::H);
            hits2 += detect_hole_crossing(h, a, HoleEvent::Hbarbar);
        }
        INFO("m=" << m << " bound " << b.bound_H);
        CHECK(hits / 1e4 <= b.bound_H);
        CHECK(hits2 / 1e4 <= b.bound_Hbarbar);
    }
    CHECK_THROWS_AS(analytic_hole_bounds(p, 8, 12), InvalidArgument);
}

TEST_CASE("W4 basic examples") {
    const Window a = Window::annulus(1, 3);
    const auto d = Domain::make(Window::ball(4));
    SiteConfig full(d, 1);
    CHECK_FALSE(detect_W4(full, holes_of(full.window(), {}), a));
    // two occupied rays and vacant elsewhere
    SiteConfig c(d, 0);
    for (int x = 1; x <= 4; ++x) c.set({x, 0}, 1), c.set({-x, 0}, 1);
    REQUIRE(detect_arm_event(c, a, ArmSpec::parse("ovov")));
    CHECK(detect_W4(c, holes_of(c.window(), {}), a));
    // a single occupied cluster that a hole splits into two rays
    SiteConfig bar = c;
    for (int y = 1; y <= 2; ++y) bar.set({-y, y}, 1), bar.set({-y + 2, y}, 1);
    bar.set({-1, 2}, 1);
    const auto split = holes_of(bar.window(), {{{-1, 2}, 0.6}, {{6, 6}, 0.0}});
    if (!detect_arm_event(bar, a, ArmSpec::parse("ovov")) && detect_arm_event(apply_holes(bar, split), a, ArmSpec::parse("ovov")))
        CHECK(detect_W4(bar, split, a));
    CHECK_THROWS_AS(detect_W4(c, holes_of(c.window(), {}), Window::ball(3)), InvalidArgument);
}

TEST_CASE("W4 against brute-force subset oracle") {
    const Window a = Window::annulus(1, 3);
    const auto dom = Domain::make(a);
    const oracle::ArmOracle orc(dom->sites(), a.center(), a.n1(), a.n2());
    Rng rng(2024);
    int yes = 0, no_plain = 0;
    for (int t = 0; t < 400; ++t) {
        const auto s = small_instance(rng, a, t % 2 ? 0.65 : 0.8);
        const bool want = w4_oracle(s.c, s.h, a, orc);
        INFO("trial " << t);
        REQUIRE(detect_W4(s.c, s.h, a) == want);
        const auto b = bracket_W4(s.c, s.h, a);
        CHECK(b.lower <= want);
        CHECK(want <= b.upper);
        if (b.exact) CHECK(b.lower == b.upper);
        yes += want;
        no_plain += want && !detect_arm_event(s.c, a, ArmSpec::parse("ovov")) &&
                    !detect_arm_event(apply_holes(s.c, s.h), a, ArmSpec::parse("ovov"));
    }
    CHECK(yes > 20);
    CHECK(no_plain > 0);
}

TEST_CASE("W4 sandwich, witness and permutation invariance") {
    const Window a = Window::annulus(2, 8);
    const HoleParams p{4, 1.2, 1.5, 1, 1, 3};
    Rng rng(77);
    const auto o4 = ArmSpec::parse("ovov"), oo = ArmSpec::parse("oo");
    for (int t = 0; t < 300; ++t) {
        const auto c = sample(Domain::make(Window::ball(9)), 0.55, rng);
        HoleSampleOptions opt;
        opt.pad = 2.0;
        auto h = sample_holes(c.window(), p, rng, opt);
        bool w;
        try {
            w = detect_W4(c, h, a);
        } catch (const TooManyHoles&) {
            continue;
        }
        if (detect_arm_event(c, a, o4) || detect_arm_event(apply_holes(c, h), a, o4)) CHECK(w);
        if (w) CHECK(detect_arm_event(c, a, oo));
        std::shuffle(h.holes.begin(), h.holes.end(), rng);
        std::reverse(h.holes.begin(), h.holes.end());
        CHECK(detect_W4(c, h, a) == w);
    }
}

TEST_CASE("hole config JSON round trip is bit exact") {
    const HoleParams p{16, 55.0 / 48 + 0.01, 1.3, 0.7, 1.1, 2.0};
    const auto h = sample_holes(Window::annulus(3, 20, {0.5, 0.25}), p, 9);
    REQUIRE(!h.holes.empty());
    const auto back = hole_config_from_json(to_json(h));
    CHECK(back.params == h.params);
    CHECK(back.window == h.window);
    CHECK(back.pad == h.pad);
    CHECK(back.holes == h.holes);
    CHECK(to_json(back) == to_json(h));
}

TEST_CASE("W4 dual search agrees with the subset search") {
    const Window a = Window::annulus(2, 10);
    const HoleParams p{6, 1.2, 1.5, 1, 1, 2};
    Rng rng(31);
    int yes = 0, searched = 0;
    for (int t = 0; t < 150; ++t) {
        const auto c = sample(Domain::make(Window::ball(11)), 0.5, rng);
        HoleSampleOptions opt;
        opt.pad = 3.0;
        const auto h = sample_holes(c.window(), p, rng, opt);
        W4Stats st;
        const bool w = detect_W4(c, h, a, 16, &st);
        searched += !st.decided_early;
        if (st.relevant > 14) continue;
        CHECK(detect_W4_by_subsets(c, h, a) == w);
        yes += w;
    }
    CHECK(yes > 5);
    CHECK(searched > 5);
}
