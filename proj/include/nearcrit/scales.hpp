#pragma once
// Near-critical time calculus: p(t) = 1 - e^-t, the map psi_zeta, exceptional times t_k and scales m_k.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace nearcrit {

inline const double kTc = 0.69314718055994530942;  // ln 2

double p_of_t(double t);
double t_of_p(double p);

using Rational = boost::multiprecision::cpp_rational;

// Characteristic length L(t) and density theta(t) as functions of eps = t - t_c > 0.
class ScaleBackend {
public:
    enum class Kind { analytic, empirical };

    struct Point {
        double p;
        double value;
        double std_err = 0.0;
    };

    // L = a_L eps^-4/3, theta = a_theta eps^5/36
    static ScaleBackend analytic(double a_L = 1.0, double a_theta = 1.0);
    // Monotone log-log interpolants through Monte Carlo points (p > 1/2). Outside the table the end segments are
    // continued (with the analytic exponent if an end segment is flat); eps beyond `reach` times the table range
    // in either direction is out of the domain.
    static ScaleBackend empirical(std::vector<Point> L_table, std::vector<Point> theta_table, double reach = 1e4);

    Kind kind() const { return kind_; }
    std::string id() const;

    double L(double eps) const;
    double theta(double eps) const;
    double L_inverse(double M) const;  // eps with L(eps) = M
    double eps_min() const { return lo_; }
    double eps_max() const { return hi_; }

    const std::vector<Point>& L_table() const { return lt_; }
    const std::vector<Point>& theta_table() const { return tt_; }
    double a_L() const { return aL_; }
    double a_theta() const { return at_; }

private:
    struct Curve {
        std::vector<double> x, y;  // log eps, log value
        double left_slope = 0, right_slope = 0;
        double eval(double lx) const;
    };

    Kind kind_ = Kind::analytic;
    double aL_ = 1, at_ = 1;
    std::vector<Point> lt_, tt_;
    Curve cl_, ct_;
    double lo_ = 0, hi_ = 0;
    double reach_ = 0;
    void check(double eps) const;
};

// Empirical tables from the percolation estimators: L at each p and theta at radius max(64, 2 L).
struct EmpiricalBuild {
    std::int64_t L_budget = 200000;
    std::int64_t theta_samples = 2000;
    int threads = 1;
};
ScaleBackend build_empirical_backend(const std::vector<double>& ps, std::uint64_t seed, const EmpiricalBuild& opt = {});
void write_backend_csv(std::ostream& os, const ScaleBackend& b, std::uint64_t seed);
ScaleBackend read_backend_csv(const std::string& text, double reach = 1e4);

// Root s > 0 of L(eps)^2 theta(s) s = 1/zeta; eps-based to keep precision near t_c.
double psi_eps(double zeta, double eps, const ScaleBackend& b);
double psi_inverse_eps(double zeta, double target_eps, const ScaleBackend& b);
double psi(double zeta, double t, const ScaleBackend& b);
double psi_inverse(double zeta, double t_target, const ScaleBackend& b);

// Largest fixed point of psi_zeta, found by a descending geometric scan (ratio grid) then bisection.
double t_infinity_eps(double zeta, const ScaleBackend& b, double grid = 1.05);
double t_infinity(double zeta, const ScaleBackend& b, double grid = 1.05);

Rational delta_k_exact(int k);  // 36/55 (1 - (41/96)^k)
double delta_k(int k);
double asymptotic_m_k(double zeta, int k);  // zeta^(-4/3 delta_k)

struct ScaleRow {
    int k;
    double t_k;
    double eps_k;
    double m_k;
    double delta_k;
};

struct ScaleTable {
    double zeta = 0;
    double t_inf = 0;
    double eps_inf = 0;
    std::string backend;
    std::vector<ScaleRow> rows;
};

ScaleTable exceptional_sequence(double zeta, int k_max, const ScaleBackend& b);
void write_scale_csv(std::ostream& os, const ScaleTable& t);
std::string scale_table_json(const ScaleTable& t);

struct EpsTilde {
    double eps_tilde;
    double M_tilde;
};
// t_c + eps_tilde = psi_zeta(L^-1(M)), M_tilde = L(t_c + eps_tilde).
EpsTilde epsilon_tilde_M(double zeta, double M, const ScaleBackend& b);

}  // namespace nearcrit
