#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace nearcrit {

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t n, double z);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double slope_lo = 0.0;  // 95%
    double slope_hi = 0.0;
};

// Weighted least squares y = a + b x with weights w (inverse variances).
LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w);

// Log-log fit of binomial estimates p(n); weights from the delta-method variance of log p.
LineFit loglog_binomial_fit(const std::vector<double>& n, const std::vector<double>& p, const std::vector<double>& p_se);

// Standard error of a difference of two independent means.
double joint_se(double se_a, double se_b);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t n = 0;
};
MeanSe mean_se(const std::vector<double>& v);

}  // namespace nearcrit
