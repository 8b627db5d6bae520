// Python extension nearcrit._core. Structured results cross the boundary as JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "nearcrit/errors.hpp"
#include "nearcrit/experiments.hpp"
#include "nearcrit/forestfire.hpp"
#include "nearcrit/impurities.hpp"
#include "nearcrit/io.hpp"
#include "nearcrit/render.hpp"
#include "nearcrit/scales.hpp"

namespace py = pybind11;
using namespace nearcrit;

namespace {

py::dict estimate_dict(const EstimateResult& r) {
    py::dict d;
    d["p_hat"] = r.p_hat;
    d["std_err"] = r.std_err;
    d["n_samples"] = r.n_samples;
    d["seed"] = r.seed;
    return d;
}

std::string image_out(const Image& img, const std::string& path) {
    write_image(path, img);
    return path;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Near-critical site percolation on the triangular lattice";
    m.attr("T_C") = kTc;

    py::register_exception<Undecided>(m, "Undecided", PyExc_RuntimeError);
    py::register_exception<TooManyHoles>(m, "TooManyHoles", PyExc_RuntimeError);
    py::register_exception<BackendDomain>(m, "BackendDomain", PyExc_ValueError);

    py::class_<Window>(m, "Window")
        .def_static("ball", [](double n, double cx, double cy) { return Window::ball(n, {cx, cy}); }, py::arg("n"),
                    py::arg("cx") = 0.0, py::arg("cy") = 0.0)
        .def_static("annulus", [](double n1, double n2, double cx, double cy) { return Window::annulus(n1, n2, {cx, cy}); },
                    py::arg("n1"), py::arg("n2"), py::arg("cx") = 0.0, py::arg("cy") = 0.0)
        .def_static("rectangle", &Window::rectangle, py::arg("x1"), py::arg("x2"), py::arg("y1"), py::arg("y2"))
        .def_static("parallelogram",
                    [](std::int32_t a, std::int32_t b, std::int32_t x0, std::int32_t y0) {
                        return Window::parallelogram({x0, y0}, a, b);
                    },
                    py::arg("a"), py::arg("b"), py::arg("x0") = 0, py::arg("y0") = 0)
        .def_static("from_json", [](const std::string& s) { return window_from_json(Json::parse(s)); })
        .def("contains", [](const Window& w, std::int32_t x, std::int32_t y) { return w.contains({x, y}); })
        .def("to_json", [](const Window& w) { return window_to_json(w).dump(); })
        .def("site_count", [](const Window& w) { return sites_in(w).size(); })
        .def("__repr__", [](const Window& w) { return "Window(" + window_to_json(w).dump() + ")"; });

    py::class_<SiteConfig>(m, "SiteConfig")
        .def_property_readonly("window", &SiteConfig::window)
        .def_property_readonly("sites", [](const SiteConfig& c) {
            std::vector<std::pair<int, int>> out;
            for (const SiteCoord v : c.domain->sites()) out.emplace_back(v.x, v.y);
            return out;
        })
        .def_property_readonly("states", [](const SiteConfig& c) { return std::vector<int>(c.state.begin(), c.state.end()); })
        .def("at", [](const SiteConfig& c, std::int32_t x, std::int32_t y) { return static_cast<int>(c.at({x, y})); })
        .def("count", [](const SiteConfig& c, int s) { return c.count(static_cast<std::int8_t>(s)); })
        .def("to_json", [](const SiteConfig& c) { return config_to_json(c).dump(); })
        .def_static("from_json", [](const std::string& s) { return config_from_json(Json::parse(s)); })
        .def("__len__", &SiteConfig::size);

    m.def("sample", py::overload_cast<const Window&, double, std::uint64_t>(&sample), py::arg("window"), py::arg("p"),
          py::arg("seed") = 1);
    m.def("has_crossing",
          [](const SiteConfig& c, const Window& r, bool vertical, bool occupied) {
              return detect_crossing(c, r, vertical ? Orientation::vertical : Orientation::horizontal,
                                     occupied ? Color::occupied : Color::vacant);
          },
          py::arg("config"), py::arg("rect"), py::arg("vertical") = true, py::arg("occupied") = true);
    m.def("has_arm_event",
          [](const SiteConfig& c, const Window& a, const std::string& sigma) { return detect_arm_event(c, a, ArmSpec::parse(sigma)); },
          py::arg("config"), py::arg("annulus"), py::arg("sigma"));

    m.def("estimate_arm",
          [](double p, double n1, double n2, const std::string& sigma, std::int64_t samples, std::uint64_t seed, int threads) {
              EstimateResult r;
              {
                  py::gil_scoped_release nogil;
                  r = estimate_arm(p, n1, n2, ArmSpec::parse(sigma), samples, seed, threads);
              }
              return estimate_dict(r);
          },
          py::arg("p"), py::arg("n1"), py::arg("n2"), py::arg("sigma"), py::arg("samples") = 10000, py::arg("seed") = 1,
          py::arg("threads") = 1);
    m.def("estimate_crossing",
          [](double p, std::int64_t n, std::int64_t samples, std::uint64_t seed, int threads) {
              return estimate_dict(estimate_crossing(p, n, samples, seed, threads));
          },
          py::arg("p"), py::arg("n"), py::arg("samples") = 10000, py::arg("seed") = 1, py::arg("threads") = 1);
    m.def("estimate_theta",
          [](double p, std::int64_t n, std::int64_t samples, std::uint64_t seed, int threads) {
              return estimate_dict(estimate_theta(p, n, samples, seed, threads));
          },
          py::arg("p"), py::arg("n"), py::arg("samples") = 10000, py::arg("seed") = 1, py::arg("threads") = 1);
    m.def("estimate_L",
          [](double p, std::int64_t budget, std::uint64_t seed, int threads) {
              LSearchOptions o;
              o.threads = threads;
              return estimate_L(p, budget, seed, o);
          },
          py::arg("p"), py::arg("budget") = 200000, py::arg("seed") = 1, py::arg("threads") = 1);

    m.def("sample_holes_json",
          [](const Window& w, double hm, double alpha, double beta, double c1, double c2, double c3, std::uint64_t seed,
             std::optional<double> pad) {
              HoleParams hp{hm, alpha, beta, c1, c2, c3};
              HoleSampleOptions o;
              o.pad = pad;
              return to_json(sample_holes(w, hp, seed, o));
          },
          py::arg("window"), py::arg("m"), py::arg("alpha") = 1.2, py::arg("beta") = 1.5, py::arg("c1") = 1.0,
          py::arg("c2") = 1.0, py::arg("c3") = 1.0, py::arg("seed") = 1, py::arg("pad") = py::none());
    m.def("hole_json_roundtrip", [](const std::string& s) { return to_json(hole_config_from_json(s)); });
    m.def("classify_domain", [](double a, double b) { return std::string(to_string(classify_domain(a, b))); });

    py::class_<FireTimeline>(m, "FireTimeline")
        .def_readonly("seed", &FireTimeline::seed)
        .def_readonly("final", &FireTimeline::final)
        .def_readonly("end_time", &FireTimeline::end_time)
        .def_property_readonly("burns", [](const FireTimeline& tl) {
            py::list out;
            const auto& d = *tl.final.domain;
            for (const BurnEvent& b : tl.burns) {
                const SiteCoord v = d.site(b.ignited);
                out.append(py::make_tuple(b.time, py::make_tuple(v.x, v.y), b.sites.size()));
            }
            return out;
        })
        .def("state_at", &FireTimeline::state_at, py::arg("t"))
        .def("to_json", [](const FireTimeline& tl) { return timeline_json(tl); })
        .def_static("from_json", &timeline_from_json);

    m.def("simulate_fire",
          [](const Window& w, double zeta, double t_end, std::uint64_t seed, bool burn_boundary, bool recovery,
             std::optional<double> stop_ignitions_at) {
              FireOptions o;
              o.region = w;
              o.zeta = zeta;
              o.t_end = t_end;
              o.burn_boundary = burn_boundary;
              o.recovery = recovery;
              o.stop_ignitions_at = stop_ignitions_at;
              py::gil_scoped_release nogil;
              return simulate_ffwor(o, seed);
          },
          py::arg("window"), py::arg("zeta"), py::arg("t_end") = 2.0, py::arg("seed") = 1, py::arg("burn_boundary") = false,
          py::arg("recovery") = false, py::arg("stop_ignitions_at") = py::none());
    m.def("simulate_frozen",
          [](const Window& w, std::optional<std::int64_t> N, std::uint64_t seed) {
              const FrozenResult f = simulate_frozen(w, N ? *N : kFrozenNever, seed);
              return py::make_tuple(f.config, f.frozen.size(), f.blocked);
          },
          py::arg("window"), py::arg("N"), py::arg("seed") = 1);
    m.def("simulate_y",
          [](const Window& w, double zeta, double t, std::uint64_t seed, std::optional<double> pad) {
              YOptions o;
              o.pad = pad;
              const YResult y = simulate_Y(w, zeta, t, seed, o);
              return py::make_tuple(y.config, y.marks, y.clipped);
          },
          py::arg("window"), py::arg("zeta"), py::arg("t"), py::arg("seed") = 1, py::arg("pad") = py::none());
    m.def("L_fit", &L_fit, py::arg("p"));

    m.def("p_of_t", &p_of_t);
    m.def("t_of_p", &t_of_p);
    m.def("delta_k", &delta_k);
    m.def("scales_json",
          [](double zeta, int k_max, double a_L, double a_theta) {
              return scale_table_json(exceptional_sequence(zeta, k_max, ScaleBackend::analytic(a_L, a_theta)));
          },
          py::arg("zeta"), py::arg("k_max") = 4, py::arg("a_L") = 1.0, py::arg("a_theta") = 1.0);

    m.def("experiment_names", &experiment_names);
    m.def("experiment_defaults_json", [](const std::string& n) { return experiment_defaults(n).dump(); });
    m.def("run_experiment_json",
          [](const std::string& name, const std::string& params, std::uint64_t seed, const std::string& out,
             double budget, int threads) {
              ExperimentConfig c;
              c.name = name;
              try {
                  c.params = Json::parse(params);
              } catch (const Json::exception& e) {
                  throw InvalidArgument(std::string("params: ") + e.what());
              }
              c.seed = seed;
              c.out = out;
              c.budget_seconds = budget;
              c.threads = threads;
              py::gil_scoped_release nogil;
              return run_experiment(c).summary().dump();
          },
          py::arg("name"), py::arg("params") = "{}", py::arg("seed") = 1, py::arg("out") = "", py::arg("budget") = 0.0,
          py::arg("threads") = 1);

    m.def("render_config",
          [](const SiteConfig& c, const std::string& path, const std::string& colormap, int cell) {
              RenderSpec s;
              s.colormap = colormap_from_string(colormap);
              s.cell = cell;
              return image_out(render_config(c, s), path);
          },
          py::arg("config"), py::arg("path"), py::arg("colormap") = "tri-state", py::arg("cell") = 4);
    m.def("render_timeline",
          [](const FireTimeline& tl, const std::string& path, const std::string& colormap, int cell, std::optional<double> t) {
              RenderSpec s;
              s.colormap = colormap_from_string(colormap);
              s.cell = cell;
              s.time = t;
              return image_out(render_timeline(tl, s), path);
          },
          py::arg("timeline"), py::arg("path"), py::arg("colormap") = "burn-time-gradient", py::arg("cell") = 4,
          py::arg("time") = py::none());
}
