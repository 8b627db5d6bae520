#include "nearcrit/scales.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nearcrit/errors.hpp"
#include "nearcrit/io.hpp"
#include "nearcrit/percolation.hpp"
#include "nearcrit/rng.hpp"

namespace nearcrit {

namespace {

constexpr double kLExp = -4.0 / 3.0;
constexpr double kThetaExp = 5.0 / 36.0;

// increasing == true: make y nondecreasing (pool adjacent violators), then strictly monotone
void monotone(std::vector<double>& y, bool increasing) {
    const double sgn = increasing ? 1.0 : -1.0;
    std::vector<double> v, w;
    std::vector<std::size_t> len;
    for (double x : y) {
        v.push_back(sgn * x), w.push_back(1.0), len.push_back(1);
        while (v.size() > 1 && v[v.size() - 2] > v.back()) {
            const double nw = w[w.size() - 2] + w.back();
            const double nv = (v[v.size() - 2] * w[w.size() - 2] + v.back() * w.back()) / nw;
            const std::size_t nl = len[len.size() - 2] + len.back();
            v.pop_back(), w.pop_back(), len.pop_back();
            v.back() = nv, w.back() = nw, len.back() = nl;
        }
    }
    std::size_t i = 0;
    for (std::size_t b = 0; b < v.size(); ++b)
        for (std::size_t j = 0; j < len[b]; ++j) y[i++] = sgn * v[b];
    for (std::size_t j = 1; j < y.size(); ++j)
        if (sgn * (y[j] - y[j - 1]) < 1e-9) y[j] = y[j - 1] + sgn * 1e-9;
}

double eps_of_p(double p) { return t_of_p(p) - kTc; }

}  // namespace

double p_of_t(double t) {
    if (!(t >= 0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and >= 0");
    return -std::expm1(-t);
}

double t_of_p(double p) {
    if (!(p >= 0 && p < 1)) throw InvalidArgument("p must lie in [0, 1)");
    return -std::log1p(-p);
}

double ScaleBackend::Curve::eval(double lx) const {
    if (lx <= x.front()) return y.front() + left_slope * (lx - x.front());
    if (lx >= x.back()) return y.back() + right_slope * (lx - x.back());
    const auto it = std::upper_bound(x.begin(), x.end(), lx);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double f = (lx - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + f * (y[j] - y[j - 1]);
}

ScaleBackend ScaleBackend::analytic(double a_L, double a_theta) {
    if (!(a_L > 0) || !(a_theta > 0)) throw InvalidArgument("prefactors must be > 0");
    ScaleBackend b;
    b.kind_ = Kind::analytic;
    b.aL_ = a_L, b.at_ = a_theta;
    b.lo_ = 0, b.hi_ = HUGE_VAL;
    return b;
}

ScaleBackend ScaleBackend::empirical(std::vector<Point> L_table, std::vector<Point> theta_table, double reach) {
    if (L_table.empty() || theta_table.empty()) throw InvalidArgument("empirical backend needs both tables");
    if (!(reach >= 1)) throw InvalidArgument("reach must be >= 1");
    ScaleBackend b;
    b.kind_ = Kind::empirical;
    b.reach_ = reach;
    auto curve = [](std::vector<Point>& tab, bool increasing, double exponent) {
        for (const auto& q : tab)
            if (!(q.p > 0.5 && q.p < 1) || !(q.value > 0)) throw InvalidArgument("table points need p in (1/2, 1) and value > 0");
        std::sort(tab.begin(), tab.end(), [](const Point& a, const Point& c) { return a.p < c.p; });
        Curve c;
        for (const auto& q : tab) {
            const double lx = std::log(eps_of_p(q.p));
            if (!c.x.empty() && lx <= c.x.back()) throw InvalidArgument("duplicate p in table");
            c.x.push_back(lx), c.y.push_back(std::log(q.value));
        }
        monotone(c.y, increasing);
        const std::size_t n = c.x.size();
        auto ok = [&](double s) { return increasing ? s > 1e-6 : s < -1e-6; };
        if (n >= 2) {
            const double sl = (c.y[1] - c.y[0]) / (c.x[1] - c.x[0]);
            const double sr = (c.y[n - 1] - c.y[n - 2]) / (c.x[n - 1] - c.x[n - 2]);
            c.left_slope = ok(sl) ? sl : exponent;
            c.right_slope = ok(sr) ? sr : exponent;
        } else {
            c.left_slope = c.right_slope = exponent;
        }
        return c;
    };
    b.lt_ = std::move(L_table), b.tt_ = std::move(theta_table);
    b.cl_ = curve(b.lt_, false, kLExp);
    b.ct_ = curve(b.tt_, true, kThetaExp);
    const double xl = std::min(b.cl_.x.front(), b.ct_.x.front()), xh = std::max(b.cl_.x.back(), b.ct_.x.back());
    b.lo_ = std::exp(xl) / reach, b.hi_ = std::exp(xh) * reach;
    return b;
}

std::string ScaleBackend::id() const {
    char buf[128];
    if (kind_ == Kind::analytic) {
        std::snprintf(buf, sizeof buf, "analytic(a_L=%.17g,a_theta=%.17g)", aL_, at_);
    } else {
        std::snprintf(buf, sizeof buf, "empirical(L:%zu,theta:%zu,p=[%.4g,%.4g],reach=%.3g)", lt_.size(), tt_.size(),
                      std::min(lt_.front().p, tt_.front().p), std::max(lt_.back().p, tt_.back().p), reach_);
    }
    return buf;
}

void ScaleBackend::check(double eps) const {
    if (!(eps > 0) || !std::isfinite(eps)) throw BackendDomain("eps = t - t_c must be finite and > 0");
    if (kind_ == Kind::empirical && (eps < lo_ || eps > hi_)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "eps = %.6g outside the empirical backend domain [%.6g, %.6g]", eps, lo_, hi_);
        throw BackendDomain(buf);
    }
}

double ScaleBackend::L(double eps) const {
    check(eps);
    const double v = kind_ == Kind::analytic ? aL_ * std::pow(eps, kLExp) : std::exp(cl_.eval(std::log(eps)));
    if (!(v > 0) || !std::isfinite(v)) throw BackendDomain("L(t) overflows");
    return v;
}

double ScaleBackend::theta(double eps) const {
    check(eps);
    const double v = kind_ == Kind::analytic ? at_ * std::pow(eps, kThetaExp) : std::exp(ct_.eval(std::log(eps)));
    if (!(v > 0) || !std::isfinite(v)) throw BackendDomain("theta(t) out of range");
    return v;
}

double ScaleBackend::L_inverse(double M) const {
    if (!(M > 0) || !std::isfinite(M)) throw BackendDomain("length must be finite and > 0");
    double eps;
    if (kind_ == Kind::analytic) {
        eps = std::pow(M / aL_, 1.0 / kLExp);
    } else {
        const double ly = std::log(M);
        const auto& c = cl_;
        if (ly >= c.y.front()) {
            eps = std::exp(c.x.front() + (ly - c.y.front()) / c.left_slope);
        } else if (ly <= c.y.back()) {
            eps = std::exp(c.x.back() + (ly - c.y.back()) / c.right_slope);
        } else {
            std::size_t j = 1;
            while (c.y[j] > ly) ++j;
            const double f = (ly - c.y[j - 1]) / (c.y[j] - c.y[j - 1]);
            eps = std::exp(c.x[j - 1] + f * (c.x[j] - c.x[j - 1]));
        }
    }
    check(eps);
    return eps;
}

ScaleBackend build_empirical_backend(const std::vector<double>& ps, std::uint64_t seed, const EmpiricalBuild& opt) {
    std::vector<ScaleBackend::Point> lt, tt;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double p = ps[i];
        if (!(p > 0.5 && p < 1)) throw InvalidArgument("empirical grid needs p in (1/2, 1)");
        LSearchOptions lo;
        lo.threads = opt.threads;
        const auto L = estimate_L(p, opt.L_budget, hash_combine(seed, 2 * i), lo);
        const auto th = estimate_theta(p, std::max<std::int64_t>(64, 2 * L), opt.theta_samples,
                                       hash_combine(seed, 2 * i + 1), opt.threads);
        lt.push_back({p, static_cast<double>(L), 0.0});
        tt.push_back({p, th.p_hat, th.std_err});
    }
    return ScaleBackend::empirical(lt, tt);
}

void write_backend_csv(std::ostream& os, const ScaleBackend& b, std::uint64_t seed) {
    os << "quantity,p,estimate,std_err,seed\n";
    char buf[128];
    for (const auto& [name, tab] : {std::pair{"L", &b.L_table()}, std::pair{"theta", &b.theta_table()}})
        for (const auto& q : *tab) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,", name, q.p, q.value, q.std_err);
            os << buf << seed << '\n';
        }
}

ScaleBackend read_backend_csv(const std::string& text, double reach) {
    std::istringstream in(text);
    std::string line;
    std::vector<ScaleBackend::Point> lt, tt;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            if (line.rfind("quantity,", 0) == 0) continue;
        }
        std::istringstream ls(line);
        std::string q, p, v, se;
        std::getline(ls, q, ','), std::getline(ls, p, ','), std::getline(ls, v, ','), std::getline(ls, se, ',');
        try {
            const ScaleBackend::Point pt{std::stod(p), std::stod(v), se.empty() ? 0.0 : std::stod(se)};
            if (q == "L") lt.push_back(pt);
            else if (q == "theta") tt.push_back(pt);
            else throw InvalidArgument("unknown quantity '" + q + "'");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const InvalidArgument*>(&e)) throw;
            throw InvalidArgument("bad backend CSV line: " + line);
        }
    }
    return ScaleBackend::empirical(lt, tt, reach);
}

namespace {

// Root of an increasing function of log s, bracketed by doubling steps from s0.
template <class F>
double log_bisect(F f, double s0) {
    double lo = s0, hi = s0;
    if (f(s0) < 0) {
        do {
            lo = hi, hi *= 2;
            if (!std::isfinite(hi)) throw BackendDomain("no bracket within the backend domain");
        } while (f(hi) < 0);
    } else {
        do {
            hi = lo, lo /= 2;
            if (!(lo > 0)) throw BackendDomain("no bracket within the backend domain");
        } while (f(lo) >= 0);
    }
    while (hi / lo - 1 > 1e-14) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

void check_zeta(double zeta) {
    if (!(zeta > 0) || !std::isfinite(zeta)) throw InvalidArgument("zeta must be > 0");
}

}  // namespace

double psi_eps(double zeta, double eps, const ScaleBackend& b) {
    check_zeta(zeta);
    const double L = b.L(eps);
    const double target = 1.0 / (zeta * L * L);
    if (!(target > 0) || !std::isfinite(target)) throw BackendDomain("psi target out of range");
    // s theta(s) is increasing from 0 to infinity
    const double lt = std::log(target);
    auto f = [&](double s) { return std::log(s) + std::log(b.theta(s)) - lt; };
    const double start = b.kind() == ScaleBackend::Kind::analytic ? 1.0 : std::sqrt(b.eps_min() * b.eps_max());
    return log_bisect(f, start);
}

double psi_inverse_eps(double zeta, double target_eps, const ScaleBackend& b) {
    check_zeta(zeta);
    const double need = 1.0 / std::sqrt(zeta * b.theta(target_eps) * target_eps);
    return b.L_inverse(need);
}

double psi(double zeta, double t, const ScaleBackend& b) { return kTc + psi_eps(zeta, t - kTc, b); }

double psi_inverse(double zeta, double t_target, const ScaleBackend& b) {
    return kTc + psi_inverse_eps(zeta, t_target - kTc, b);
}

double t_infinity_eps(double zeta, const ScaleBackend& b, double grid) {
    check_zeta(zeta);
    if (!(grid > 1)) throw InvalidArgument("scan ratio must be > 1");
    auto f = [&](double e) { return psi_eps(zeta, e, b) - e; };
    double top = std::min(2 * kTc, b.eps_max());
    while (f(top) <= 0) {
        top *= 2;
        if (top > b.eps_max()) throw BackendDomain("psi_zeta(t) <= t on the whole scanned range");
    }
    double e = top;
    while (true) {
        const double next = e / grid;
        if (next < b.eps_min() || next < 1e-300) throw BackendDomain("no fixed point of psi_zeta above t_c");
        if (f(next) <= 0) {
            double lo = next, hi = e;
            while (hi / lo - 1 > 1e-14) {
                const double mid = std::sqrt(lo * hi);
                if (mid <= lo || mid >= hi) break;
                (f(mid) <= 0 ? lo : hi) = mid;
            }
            return std::sqrt(lo * hi);
        }
        e = next;
    }
}

double t_infinity(double zeta, const ScaleBackend& b, double grid) { return kTc + t_infinity_eps(zeta, b, grid); }

Rational delta_k_exact(int k) {
    if (k < 0) throw InvalidArgument("k must be >= 0");
    Rational q = 1;
    for (int i = 0; i < k; ++i) q *= Rational(41, 96);
    return Rational(36, 55) * (1 - q);
}

double delta_k(int k) { return delta_k_exact(k).convert_to<double>(); }

double asymptotic_m_k(double zeta, int k) {
    check_zeta(zeta);
    return std::pow(zeta, -4.0 / 3.0 * delta_k(k));
}

ScaleTable exceptional_sequence(double zeta, int k_max, const ScaleBackend& b) {
    check_zeta(zeta);
    if (k_max < 0) throw InvalidArgument("k_max must be >= 0");
    ScaleTable t;
    t.zeta = zeta;
    t.backend = b.id();
    t.eps_inf = t_infinity_eps(zeta, b);
    t.t_inf = kTc + t.eps_inf;
    if (!(t.eps_inf < kTc)) throw InvalidArgument("t_inf(zeta) >= 2 t_c; zeta too large");
    double eps = kTc;
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) {
            const double next = psi_inverse_eps(zeta, eps, b);
            if (!(next < eps) || !(next > t.eps_inf)) throw BackendDomain("exceptional sequence left the backend domain");
            eps = next;
        }
        t.rows.push_back({k, kTc + eps, eps, b.L(eps), delta_k(k)});
    }
    return t;
}

void write_scale_csv(std::ostream& os, const ScaleTable& t) {
    os << "k,t_k,eps_k,m_k,delta_k\n";
    char buf[160];
    for (const auto& r : t.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.k, r.t_k, r.eps_k, r.m_k, r.delta_k);
        os << buf;
    }
}

std::string scale_table_json(const ScaleTable& t) {
    Json rows = Json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"k", r.k}, {"t_k", r.t_k}, {"eps_k", r.eps_k}, {"m_k", r.m_k}, {"delta_k", r.delta_k},
                        {"delta_k_exact", delta_k_exact(r.k).str()}});
    Json j{{"zeta", t.zeta}, {"t_inf", t.t_inf}, {"eps_inf", t.eps_inf}, {"backend", t.backend}, {"rows", rows}};
    return j.dump(2);
}

EpsTilde epsilon_tilde_M(double zeta, double M, const ScaleBackend& b) {
    const double eps = b.L_inverse(M);
    const double et = psi_eps(zeta, eps, b);
    return {et, b.L(et)};
}

}  // namespace nearcrit
