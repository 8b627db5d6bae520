#include "nearcrit/stats.hpp"

#include <cmath>

#include "nearcrit/errors.hpp"

namespace nearcrit {

std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (ph + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() != w.size() || x.size() < 2) throw InvalidArgument("fit needs >= 2 points");
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sw += w[i], sx += w[i] * x[i], sy += w[i] * y[i];
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.slope_se = std::sqrt(1.0 / sxx);
    f.slope_lo = f.slope - 1.959963984540054 * f.slope_se;
    f.slope_hi = f.slope + 1.959963984540054 * f.slope_se;
    return f;
}

LineFit loglog_binomial_fit(const std::vector<double>& n, const std::vector<double>& p, const std::vector<double>& p_se) {
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (p[i] <= 0.0) continue;
        x.push_back(std::log(n[i]));
        y.push_back(std::log(p[i]));
        const double s = p_se[i] / p[i];
        w.push_back(s > 0 ? 1.0 / (s * s) : 1e12);
    }
    return weighted_line_fit(x, y, w);
}

double joint_se(double a, double b) { return std::sqrt(a * a + b * b); }

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe r;
    r.n = static_cast<std::int64_t>(v.size());
    if (v.empty()) return r;
    double s = 0;
    for (double x : v) s += x;
    r.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return r;
}

}  // namespace nearcrit
