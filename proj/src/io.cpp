#include "nearcrit/io.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>

#include "nearcrit/errors.hpp"

namespace nearcrit {

Json window_to_json(const Window& w) {
    Json j{{"kind", to_string(w.kind())}};
    switch (w.kind()) {
        case WindowKind::rectangle:
            j["x1"] = w.x1(), j["x2"] = w.x2(), j["y1"] = w.y1(), j["y2"] = w.y2();
            break;
        case WindowKind::ball:
            j["n"] = w.n2(), j["center"] = {w.center().x, w.center().y};
            break;
        case WindowKind::annulus:
            j["n1"] = w.n1(), j["n2"] = w.n2(), j["center"] = {w.center().x, w.center().y};
            break;
        case WindowKind::parallelogram:
            j["origin"] = {w.origin().x, w.origin().y}, j["a"] = w.width(), j["b"] = w.height();
            break;
    }
    return j;
}

Window window_from_json(const Json& j) {
    try {
        const std::string k = j.at("kind").get<std::string>();
        auto center = [&] {
            if (!j.contains("center")) return Point{};
            return Point{j["center"].at(0).get<double>(), j["center"].at(1).get<double>()};
        };
        if (k == "rectangle")
            return Window::rectangle(j.at("x1").get<double>(), j.at("x2").get<double>(), j.at("y1").get<double>(),
                                     j.at("y2").get<double>());
        if (k == "ball") return Window::ball(j.at("n").get<double>(), center());
        if (k == "annulus") return Window::annulus(j.at("n1").get<double>(), j.at("n2").get<double>(), center());
        if (k == "parallelogram")
            return Window::parallelogram({j.at("origin").at(0).get<std::int32_t>(), j.at("origin").at(1).get<std::int32_t>()},
                                         j.at("a").get<std::int32_t>(), j.at("b").get<std::int32_t>());
        throw InvalidArgument("unknown window kind '" + k + "'");
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("bad window JSON: ") + e.what());
    }
}

namespace {

void put_time(std::ostream& os, const std::vector<double>& t, std::size_t i) {
    os << ',';
    if (!t.empty() && !std::isnan(t[i])) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", t[i]);
        os << buf;
    }
}

Json times_json(const std::vector<double>& t) {
    Json a = Json::array();
    for (double x : t) a.push_back(std::isnan(x) ? Json(nullptr) : Json(x));
    return a;
}

std::vector<double> times_from(const Json& a) {
    std::vector<double> t;
    for (const auto& x : a) t.push_back(x.is_null() ? std::nan("") : x.get<double>());
    return t;
}

}  // namespace

void write_config_csv(std::ostream& os, const SiteConfig& c) {
    const bool b = !c.birth_time.empty(), u = !c.burn_time.empty();
    os << "x,y,state" << (b ? ",birth_time" : "") << (u ? ",burn_time" : "") << '\n';
    const Domain& d = *c.domain;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const SiteCoord v = d.site(static_cast<index_t>(i));
        os << v.x << ',' << v.y << ',' << int(c.state[i]);
        if (b) put_time(os, c.birth_time, i);
        if (u) put_time(os, c.burn_time, i);
        os << '\n';
    }
}

Json config_to_json(const SiteConfig& c) {
    Json j{{"window", window_to_json(c.window())}};
    Json s = Json::array();
    for (auto x : c.state) s.push_back(int(x));
    j["state"] = std::move(s);
    if (!c.birth_time.empty()) j["birth_time"] = times_json(c.birth_time);
    if (!c.burn_time.empty()) j["burn_time"] = times_json(c.burn_time);
    return j;
}

SiteConfig config_from_json(const Json& j) {
    SiteConfig c(Domain::make(window_from_json(j.at("window"))), 0);
    const auto& s = j.at("state");
    if (s.size() != c.size()) throw InvalidArgument("state length does not match the window");
    for (std::size_t i = 0; i < c.size(); ++i) c.state[i] = static_cast<std::int8_t>(s[i].get<int>());
    if (j.contains("birth_time")) c.birth_time = times_from(j["birth_time"]);
    if (j.contains("burn_time")) c.burn_time = times_from(j["burn_time"]);
    return c;
}

void write_header(std::ostream& os, const Json& meta) {
    for (auto it = meta.begin(); it != meta.end(); ++it)
        os << "# " << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
}

void write_estimate_csv(std::ostream& os, const std::vector<EstimateResult>& rows,
                        const std::vector<std::pair<std::string, std::vector<std::string>>>& extra) {
    for (const auto& [name, col] : extra) {
        if (col.size() != rows.size()) throw InvalidArgument("extra column '" + name + "' has the wrong length");
        os << name << ',';
    }
    os << "p_hat,std_err,n_samples,seed\n";
    char buf[64];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& e : extra) os << e.second[r] << ',';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", rows[r].p_hat, rows[r].std_err);
        os << buf << ',' << rows[r].n_samples << ',' << rows[r].seed << '\n';
    }
}

std::string content_hash(const Json& j) {
    const std::string body = j.dump();
    const std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
    unsigned char md[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned char x : md) out += hex[x >> 4], out += hex[x & 15];
    return out;
}

}  // namespace nearcrit
