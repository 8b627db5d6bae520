// nearcrit: command-line front end.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nearcrit/errors.hpp"
#include "nearcrit/experiments.hpp"
#include "nearcrit/forestfire.hpp"
#include "nearcrit/impurities.hpp"
#include "nearcrit/io.hpp"
#include "nearcrit/render.hpp"
#include "nearcrit/scales.hpp"

using namespace nearcrit;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

std::string key_name(std::string k) {
    std::replace(k.begin(), k.end(), '_', '-');
    return k;
}

// Config files: a JSON object, or "key = value" lines with optional [subcommand] sections.
// Keys outside a section that are not global flags go to the subcommand named on the command line.
class ConfigReader : public CLI::Config {
public:
    std::vector<std::string> globals;
    std::string sub;

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

    std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
        std::stringstream ss;
        ss << is.rdbuf();
        const std::string text = ss.str();
        std::vector<CLI::ConfigItem> out;
        const std::string t = trim(text);
        if (!t.empty() && t[0] == '{') {
            Json j;
            try {
                j = Json::parse(t);
            } catch (const Json::exception& e) {
                throw CLI::ConversionError(std::string("config JSON: ") + e.what());
            }
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (it->is_object()) {
                    for (auto jt = it->begin(); jt != it->end(); ++jt) out.push_back(item(it.key(), jt.key(), inputs(*jt)));
                } else {
                    out.push_back(item("", it.key(), inputs(*it)));
                }
            }
            return out;
        }
        std::string section, line;
        std::istringstream ls(text);
        int lineno = 0;
        while (std::getline(ls, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw CLI::ConversionError("config line " + std::to_string(lineno) + ": expected key = value");
            std::string v = trim(line.substr(eq + 1));
            std::vector<std::string> in;
            if (v.size() >= 2 && v.front() == '[' && v.back() == ']') {
                std::stringstream vs(v.substr(1, v.size() - 2));
                std::string part;
                while (std::getline(vs, part, ',')) in.push_back(unquote(trim(part)));
            } else {
                in.push_back(unquote(v));
            }
            out.push_back(item(section, trim(line.substr(0, eq)), in));
        }
        return out;
    }

private:
    static std::string unquote(const std::string& v) {
        if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) return v.substr(1, v.size() - 2);
        return v;
    }
    static std::vector<std::string> inputs(const Json& v) {
        std::vector<std::string> in;
        auto one = [](const Json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
        if (v.is_array())
            for (const auto& x : v) in.push_back(one(x));
        else
            in.push_back(one(v));
        return in;
    }
    CLI::ConfigItem item(const std::string& section, const std::string& key, std::vector<std::string> in) const {
        CLI::ConfigItem c;
        c.name = key_name(key);
        if (!section.empty()) c.parents = {section};
        else if (std::find(globals.begin(), globals.end(), c.name) == globals.end() && !sub.empty()) c.parents = {sub};
        c.inputs = std::move(in);
        return c;
    }
};

// "ball:N", "annulus:N1,N2", "rect:X1,X2,Y1,Y2", "para:A,B[,X0,Y0]"
Window parse_window(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw InvalidArgument("window spec '" + spec + "' needs KIND:ARGS");
    const std::string kind = spec.substr(0, colon);
    std::vector<double> a;
    std::stringstream ss(spec.substr(colon + 1));
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            a.push_back(std::stod(part, &used));
            if (trim(part.substr(used)) != "") throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw InvalidArgument("bad number '" + part + "' in window spec");
        }
    }
    auto need = [&](std::size_t n) {
        if (a.size() != n) throw InvalidArgument("window '" + kind + "' takes " + std::to_string(n) + " numbers");
    };
    if (kind == "ball") return need(1), Window::ball(a[0]);
    if (kind == "annulus") return need(2), Window::annulus(a[0], a[1]);
    if (kind == "rect") return need(4), Window::rectangle(a[0], a[1], a[2], a[3]);
    if (kind == "para") {
        if (a.size() != 2 && a.size() != 4) throw InvalidArgument("window 'para' takes 2 or 4 numbers");
        const SiteCoord o = a.size() == 4 ? SiteCoord{static_cast<std::int32_t>(a[2]), static_cast<std::int32_t>(a[3])} : SiteCoord{};
        return Window::parallelogram(o, static_cast<std::int32_t>(a[0]), static_cast<std::int32_t>(a[1]));
    }
    throw InvalidArgument("unknown window kind '" + kind + "'");
}

struct Global {
    std::uint64_t seed = 1;
    std::string out = "-";
    int threads = 1;
    std::string config;
};

// Typed getters for every subcommand option, so the recorded configuration keeps full precision.
std::map<const CLI::App*, std::vector<std::pair<std::string, std::function<Json()>>>> g_values;

template <class T>
CLI::Option* add(CLI::App* sub, const std::string& name, T& var, const std::string& desc = "") {
    std::string key = name;
    key.erase(0, key.find_first_not_of('-'));
    g_values[sub].emplace_back(key, [&var] { return Json(var); });
    return sub->add_option(name, var, desc);
}

CLI::Option* add_flag(CLI::App* sub, const std::string& name, bool& var, const std::string& desc = "") {
    g_values[sub].emplace_back(name.substr(2), [&var] { return Json(var); });
    return sub->add_flag(name, var, desc);
}

// Effective configuration of the command: global flags plus every option of the subcommand.
Json effective(const CLI::App& sub, const Global& g) {
    Json opts = Json::object();
    for (const auto& [k, get] : g_values[&sub]) opts[k] = get();
    return {{"tool", "nearcrit"}, {"version", kVersion}, {"command", sub.get_name()}, {"seed", g.seed},
            {"threads", g.threads}, {"out", g.out}, {"config", g.config}, {"options", opts}};
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

bool wants_json(const std::string& format, const std::string& out) {
    if (format == "json") return true;
    if (format == "csv" || !format.empty()) return false;
    return out.size() > 5 && out.substr(out.size() - 5) == ".json";
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void emit_config(const SiteConfig& c, const Json& meta, const Global& g, const std::string& format) {
    Output out(g.out);
    if (wants_json(format, g.out)) {
        Json j = config_to_json(c);
        j["meta"] = meta;
        out.os() << j.dump() << '\n';
    } else {
        write_header(out.os(), meta);
        write_config_csv(out.os(), c);
    }
}

void maybe_render(const std::string& path, const Image& img, const Json& meta) {
    if (!path.empty()) write_image(path, img, meta.dump());
}

double infinite_or(const std::string& s) {
    if (s == "inf" || s == "infinity") return INFINITY;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("expected a number or 'inf', got '" + s + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-critical percolation, impurities, forest fires and exceptional scales"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_version_flag("--version", kVersion);
    Global g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--out", g.out, "Output file ('-' = stdout; a directory for experiment)");
    app.add_option("--threads", g.threads, "Worker threads (wall time only)")->check(CLI::PositiveNumber);
    auto reader = std::make_shared<ConfigReader>();
    reader->globals = {"seed", "out", "threads", "config"};
    app.config_formatter(reader);
    CLI::Option* config_opt = app.set_config("--config", "", "Config file: JSON object or key = value lines; flags override it");

    // sample-perc
    auto* sp = app.add_subcommand("sample-perc", "Bernoulli site configuration");
    std::string sp_window = "ball:16", sp_format, sp_render, cmap = "tri-state";
    double sp_p = 0.5;
    int cell = 4;
    add(sp, "--window", sp_window, "ball:N | annulus:N1,N2 | rect:X1,X2,Y1,Y2 | para:A,B[,X0,Y0]");
    add(sp, "--p", sp_p, "Occupation probability")->check(CLI::Range(0.0, 1.0));
    add(sp, "--format", sp_format, "csv | json (default from --out)")->check(CLI::IsMember({"", "csv", "json"}));
    add(sp, "--render", sp_render, "Also write an image (.ppm, .png, .svg)");
    add(sp, "--cell", cell, "Pixels per site")->check(CLI::PositiveNumber);

    // sample-holes
    auto* sh = app.add_subcommand("sample-holes", "Heavy-tailed hole configuration (JSON)");
    std::string sh_window = "ball:32", sh_render;
    HoleParams hp;
    double sh_pad = -1, sh_p = 0.5;
    add(sh, "--window", sh_window, "Window spec");
    add(sh, "--m", hp.m, "Truncation scale");
    add(sh, "--alpha", hp.alpha);
    add(sh, "--beta", hp.beta);
    add(sh, "--c1", hp.c1);
    add(sh, "--c2", hp.c2);
    add(sh, "--c3", hp.c3);
    add(sh, "--pad", sh_pad, "Center padding (default 4m)");
    add(sh, "--p", sh_p, "Base configuration for --render")->check(CLI::Range(0.0, 1.0));
    add(sh, "--render", sh_render, "Holes-overlay image");
    add(sh, "--cell", cell, "Pixels per site")->check(CLI::PositiveNumber);

    // fire
    auto* fi = app.add_subcommand("fire", "Forest fire without recovery (or with --recovery)");
    FireOptions fo;
    double fi_n = 64, fi_stop = -1;
    std::string fi_window, fi_t_end = "2", fi_format = "burns", fi_render, fi_cmap = "burn-time-gradient";
    bool fi_all = false, fi_snap = false;
    double fi_at = NAN;
    add(fi, "--zeta", fo.zeta, "Ignition rate")->check(CLI::Range(0.0, 1e12));
    add(fi, "--n", fi_n, "Box side; the region is ball(n/2)")->check(CLI::PositiveNumber);
    add(fi, "--window", fi_window, "Window spec (overrides --n)");
    add(fi, "--t-end", fi_t_end, "Final time (number or inf)");
    add_flag(fi, "--until-all-burnt", fi_all, "Run until every site is burnt (t_end = inf)");
    add(fi, "--stop-ignitions-at", fi_stop, "Discard ignitions after this time");
    add_flag(fi, "--burn-boundary", fo.burn_boundary, "Outer boundary of burnt clusters stays vacant forever");
    add_flag(fi, "--recovery", fo.recovery, "Burnt sites are born again after Exp(1)");
    add_flag(fi, "--snapshots", fi_snap, "Keep pre-burn states (memory heavy)");
    add(fi, "--format", fi_format, "burns | grid | json")->check(CLI::IsMember({"burns", "grid", "json"}));
    add(fi, "--render", fi_render, "Image of the final state");
    add(fi, "--colormap", fi_cmap, "burn-time-gradient | tri-state");
    add(fi, "--at-time", fi_at, "Render the state at this time (burnt in red)");
    add(fi, "--cell", cell, "Pixels per site")->check(CLI::PositiveNumber);

    // frozen
    auto* fr = app.add_subcommand("frozen", "N-volume-frozen percolation");
    double fr_n = 128;
    std::string fr_window, fr_N = "100", fr_format, fr_render;
    add(fr, "--n", fr_n, "Box side; the region is ball(n/2)")->check(CLI::PositiveNumber);
    add(fr, "--window", fr_window, "Window spec (overrides --n)");
    add(fr, "--N", fr_N, "Freezing volume (integer or inf)");
    add(fr, "--format", fr_format, "csv | json")->check(CLI::IsMember({"", "csv", "json"}));
    add(fr, "--render", fr_render, "Tri-state image");
    add(fr, "--cell", cell, "Pixels per site")->check(CLI::PositiveNumber);

    // y-process
    auto* yp = app.add_subcommand("y-process", "Pure birth minus independent clusters at ignition marks");
    double y_n = 64, y_zeta = 0.01, y_t = kTc, y_pad = -1, y_max_pad = -1;
    std::string y_window, y_format, y_render;
    add(yp, "--n", y_n, "Box side; the region is ball(n/2)")->check(CLI::PositiveNumber);
    add(yp, "--window", y_window, "Window spec (overrides --n)");
    add(yp, "--zeta", y_zeta)->check(CLI::Range(0.0, 1e12));
    add(yp, "--t", y_t, "Time")->check(CLI::Range(0.0, 1e12));
    add(yp, "--pad", y_pad, "Exploration pad (default min(2 L(p(tau)), max-pad))");
    add(yp, "--max-pad", y_max_pad, "Cap on the default pad (default 2 x window radius)");
    add(yp, "--format", y_format, "csv | json")->check(CLI::IsMember({"", "csv", "json"}));
    add(yp, "--render", y_render, "Tri-state image");
    add(yp, "--cell", cell, "Pixels per site")->check(CLI::PositiveNumber);

    // estimate
    auto* es = app.add_subcommand("estimate", "Monte Carlo estimators");
    std::string what, sigma = "o";
    double e_p = 0.5, e_n = 32, e_n1 = 1, e_n2 = 32;
    std::int64_t samples = 10000, budget = 200000;
    add(es, "quantity", what, "arm | crossing | L | theta")->required()->check(CLI::IsMember({"arm", "crossing", "L", "theta"}));
    add(es, "--p", e_p)->check(CLI::Range(0.0, 1.0));
    add(es, "--n", e_n, "Scale for crossing and theta")->check(CLI::PositiveNumber);
    add(es, "--n1", e_n1, "Inner radius for arm");
    add(es, "--n2", e_n2, "Outer radius for arm");
    add(es, "--sigma", sigma, "Arm colors, e.g. ovov");
    add(es, "--samples", samples)->check(CLI::PositiveNumber);
    add(es, "--budget", budget, "Samples per scale for L")->check(CLI::PositiveNumber);

    // scales
    auto* sc = app.add_subcommand("scales", "Exceptional scales");
    double s_zeta = 1e-4, a_L = 1, a_theta = 1;
    int k_max = 4;
    std::string backend = "analytic", table, s_format;
    add(sc, "--zeta", s_zeta)->check(CLI::Range(1e-300, 1.0));
    add(sc, "--k-max", k_max)->check(CLI::Range(1, 64));
    add(sc, "--backend", backend, "analytic | empirical")->check(CLI::IsMember({"analytic", "empirical"}));
    add(sc, "--table", table, "Backend CSV (quantity,p,estimate,std_err,seed) for the empirical backend");
    add(sc, "--a-L", a_L, "Analytic prefactor of L")->check(CLI::PositiveNumber);
    add(sc, "--a-theta", a_theta, "Analytic prefactor of theta")->check(CLI::PositiveNumber);
    add(sc, "--format", s_format, "csv | json")->check(CLI::IsMember({"", "csv", "json"}));
    std::string build_table;
    std::vector<double> table_ps{0.52, 0.54, 0.56, 0.58, 0.60, 0.65, 0.70};
    EmpiricalBuild eb;
    add(sc, "--build-table", build_table, "Run the Monte Carlo estimators at --ps and write a backend CSV here");
    add(sc, "--ps", table_ps, "Grid of p > 1/2 for --build-table");
    add(sc, "--L-budget", eb.L_budget, "Samples per scale in the L search")->check(CLI::PositiveNumber);
    add(sc, "--theta-samples", eb.theta_samples)->check(CLI::PositiveNumber);

    // experiment
    auto* ex = app.add_subcommand("experiment", "Run a named suite ('list' prints the names)");
    std::string ex_name, ex_params;
    std::vector<std::string> ex_kv;
    double ex_budget = 0;
    bool ex_strict = false;
    add(ex, "name", ex_name, "Suite name or 'list'")->required();
    add(ex, "--param", ex_kv, "key=value (value parsed as JSON when possible); repeatable");
    add(ex, "--params", ex_params, "Parameters as a JSON object");
    add(ex, "--budget", ex_budget, "Runtime budget in seconds (0 = unlimited)");
    add_flag(ex, "--strict", ex_strict, "Exit 1 when an assertion fails");

    // render
    auto* rd = app.add_subcommand("render", "Render a configuration, timeline or hole configuration");
    std::string rd_input, rd_base, rd_cmap;
    double rd_at = NAN;
    add(rd, "--input", rd_input, "JSON written by sample-perc, fire --format json or sample-holes")->required();
    add(rd, "--base", rd_base, "Configuration JSON under a hole overlay");
    add(rd, "--colormap", rd_cmap, "tri-state | burn-time-gradient | holes-overlay");
    add(rd, "--at-time", rd_at, "Timelines: state at this time");
    add(rd, "--cell", cell, "Pixels per site")->check(CLI::PositiveNumber);

    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        for (const auto* s : app.get_subcommands({}))
            if (s->get_name() == a) reader->sub = a;
        if (!reader->sub.empty()) break;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (config_opt->count() > 0) g.config = config_opt->as<std::string>();
        const Json meta = effective(*sub, g);
        RenderSpec rs;
        rs.cell = cell;

        if (sub == sp) {
            const SiteConfig c = sample(parse_window(sp_window), sp_p, g.seed);
            emit_config(c, meta, g, sp_format);
            maybe_render(sp_render, render_config(c, rs), meta);
        } else if (sub == sh) {
            HoleSampleOptions o;
            if (sh_pad >= 0) o.pad = sh_pad;
            const Window w = parse_window(sh_window);
            const HoleConfig h = sample_holes(w, hp, g.seed, o);
            Json j = Json::parse(to_json(h));
            j["meta"] = meta;
            Output out(g.out);
            out.os() << j.dump() << '\n';
            if (!sh_render.empty()) {
                rs.colormap = Colormap::holes_overlay;
                const SiteConfig base = sample(w, sh_p, replica_seed(g.seed, 1));
                maybe_render(sh_render, render_holes(base, h, rs), meta);
            }
        } else if (sub == fi) {
            fo.region = fi_window.empty() ? Window::ball(fi_n / 2) : parse_window(fi_window);
            fo.t_end = fi_all ? INFINITY : infinite_or(fi_t_end);
            if (fi_stop >= 0) fo.stop_ignitions_at = fi_stop;
            fo.record_snapshots = fi_snap;
            const FireTimeline tl = simulate_ffwor(fo, g.seed);
            Output out(g.out);
            if (fi_format == "json") {
                Json j = Json::parse(timeline_json(tl));
                j["meta"] = meta;
                out.os() << j.dump() << '\n';
            } else {
                Json m = meta;
                m["burns"] = tl.burns.size();
                m["end_time"] = tl.end_time;
                write_header(out.os(), m);
                if (fi_format == "grid") write_config_csv(out.os(), tl.final);
                else write_burn_csv(out.os(), tl);
            }
            if (!fi_render.empty()) {
                rs.colormap = colormap_from_string(fi_cmap);
                if (!std::isnan(fi_at)) rs.time = fi_at;
                maybe_render(fi_render, render_timeline(tl, rs), meta);
            }
        } else if (sub == fr) {
            const Window w = fr_window.empty() ? Window::ball(fr_n / 2) : parse_window(fr_window);
            const double Nd = infinite_or(fr_N);
            if (!(Nd >= 1) || (std::isfinite(Nd) && Nd != std::floor(Nd))) throw InvalidArgument("--N must be a positive integer or inf");
            const std::int64_t N = std::isinf(Nd) || Nd >= 9.2e18 ? kFrozenNever : static_cast<std::int64_t>(Nd);
            const FrozenResult f = simulate_frozen(w, N, g.seed);
            Json m = meta;
            m["frozen_clusters"] = f.frozen.size();
            m["blocked"] = f.blocked;
            emit_config(f.config, m, g, fr_format);
            maybe_render(fr_render, render_config(f.config, rs), meta);
        } else if (sub == yp) {
            const Window w = y_window.empty() ? Window::ball(y_n / 2) : parse_window(y_window);
            YOptions o;
            if (y_pad >= 0) o.pad = y_pad;
            if (y_max_pad >= 0) o.max_pad = y_max_pad;
            const YResult y = simulate_Y(w, y_zeta, y_t, g.seed, o);
            Json m = meta;
            m["marks"] = y.marks;
            m["clipped"] = y.clipped;
            emit_config(y.config, m, g, y_format);
            maybe_render(y_render, render_config(y.config, rs), meta);
        } else if (sub == es) {
            auto num = [](double v) {
                std::ostringstream o;
                o.precision(17);
                o << v;
                return o.str();
            };
            if (what == "L") {
                LSearchOptions o;
                o.threads = g.threads;
                const std::int64_t L = estimate_L(e_p, budget, g.seed, o);
                Output out(g.out);
                write_header(out.os(), meta);
                out.os() << "p,L,seed\n" << num(e_p) << ',' << L << ',' << g.seed << '\n';
            } else {
                EstimateResult r;
                std::vector<std::pair<std::string, std::vector<std::string>>> extra{{"p", {num(e_p)}}};
                if (what == "arm") {
                    r = estimate_arm(e_p, e_n1, e_n2, ArmSpec::parse(sigma), samples, g.seed, g.threads);
                    extra.push_back({"n1", {num(e_n1)}});
                    extra.push_back({"n2", {num(e_n2)}});
                    extra.push_back({"sigma", {sigma}});
                } else if (what == "crossing") {
                    r = estimate_crossing(e_p, static_cast<std::int64_t>(e_n), samples, g.seed, g.threads);
                    extra.push_back({"n", {num(std::floor(e_n))}});
                } else {
                    r = estimate_theta(e_p, static_cast<std::int64_t>(e_n), samples, g.seed, g.threads);
                    extra.push_back({"n", {num(std::floor(e_n))}});
                }
                Output out(g.out);
                write_header(out.os(), meta);
                write_estimate_csv(out.os(), {r}, extra);
            }
        } else if (sub == sc && !build_table.empty()) {
            eb.threads = g.threads;
            const ScaleBackend b = build_empirical_backend(table_ps, g.seed, eb);
            std::ofstream os(build_table);
            if (!os) throw std::runtime_error("cannot open '" + build_table + "' for writing");
            write_header(os, meta);
            write_backend_csv(os, b, g.seed);
        } else if (sub == sc) {
            const ScaleBackend b = backend == "analytic" ? ScaleBackend::analytic(a_L, a_theta) : [&] {
                if (table.empty()) throw InvalidArgument("--backend empirical needs --table");
                return read_backend_csv(read_file(table));
            }();
            const ScaleTable t = exceptional_sequence(s_zeta, k_max, b);
            Output out(g.out);
            if (wants_json(s_format, g.out)) {
                Json j = Json::parse(scale_table_json(t));
                j["meta"] = meta;
                out.os() << j.dump() << '\n';
            } else {
                Json m = meta;
                m["t_inf"] = t.t_inf, m["eps_inf"] = t.eps_inf, m["backend"] = t.backend;
                write_header(out.os(), m);
                write_scale_csv(out.os(), t);
            }
        } else if (sub == ex) {
            if (ex_name == "list") {
                Output out(g.out);
                for (const auto& n : experiment_names()) out.os() << n << '\n';
                return 0;
            }
            ExperimentConfig cfg;
            cfg.name = ex_name;
            cfg.seed = g.seed;
            cfg.threads = g.threads;
            cfg.budget_seconds = ex_budget;
            if (!ex_params.empty()) {
                try {
                    cfg.params = Json::parse(ex_params);
                } catch (const Json::exception& e) {
                    throw InvalidArgument(std::string("--params: ") + e.what());
                }
            }
            for (const auto& kv : ex_kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw InvalidArgument("--param expects key=value, got '" + kv + "'");
                const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                try {
                    cfg.params[k] = Json::parse(v);
                } catch (const Json::exception&) {
                    cfg.params[k] = v;
                }
            }
            const bool to_dir = g.out != "-" && !g.out.empty();
            if (to_dir) cfg.out = g.out;
            const ExperimentResult r = run_experiment(cfg);
            if (!to_dir) write_experiment_csv(std::cout, r);
            for (const auto& a : r.assertions)
                std::cerr << (a.passed ? "PASS " : "FAIL ") << a.name << (a.detail.empty() ? "" : " (" + a.detail + ")") << '\n';
            if (r.partial) std::cerr << "PARTIAL budget exceeded; remaining grid points skipped\n";
            if (ex_strict && !r.passed()) return 1;
        } else if (sub == rd) {
            if (g.out.empty() || g.out == "-") throw InvalidArgument("render needs --out with an image extension");
            format_from_path(g.out);
            const std::string text = read_file(rd_input);
            Json j;
            try {
                j = Json::parse(text);
            } catch (const Json::exception& e) {
                throw InvalidArgument("--input is not JSON: " + std::string(e.what()));
            }
            if (!std::isnan(rd_at)) rs.time = rd_at;
            Image img;
            if (j.contains("burns")) {
                rs.colormap = rd_cmap.empty() ? Colormap::burn_time : colormap_from_string(rd_cmap);
                img = render_timeline(timeline_from_json(text), rs);
            } else if (j.contains("holes")) {
                const HoleConfig h = hole_config_from_json(text);
                const SiteConfig base = rd_base.empty() ? SiteConfig(Domain::make(h.window), 1)
                                                        : config_from_json(Json::parse(read_file(rd_base)));
                rs.colormap = Colormap::holes_overlay;
                img = render_holes(base, h, rs);
            } else {
                rs.colormap = rd_cmap.empty() ? Colormap::tri_state : colormap_from_string(rd_cmap);
                img = render_config(config_from_json(j), rs);
            }
            write_image(g.out, img, meta.dump());
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
