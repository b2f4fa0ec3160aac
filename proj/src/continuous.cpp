#include "ghzprism/continuous.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"

namespace ghz {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0) r += kTwoPi;
    return r;
}

double interp_periodic(const std::vector<double>& v, double wv) {
    const int n = static_cast<int>(v.size());
    const double h = kTwoPi / n;
    const double u = wrap_2pi(wv) / h;
    const int j = static_cast<int>(u);
    const double frac = u - j;
    return v[j % n] * (1.0 - frac) + v[(j + 1) % n] * frac;
}
}  // namespace

WindowWidth::WindowWidth(double d) : delta(d) {
    if (!(d > 0.0) || d > std::numbers::pi / 3.0 + 1e-12)
        throw std::domain_error(
            "window width must lie in (0, pi/3]: the forced bands of f "
            "must stay disjoint");
}

double ContinuousSettings::sum_mod_2pi() const { return wrap_2pi(alpha + beta + gamma); }

double window_kernel(double s, double delta) {
    if (s <= 0.0 || s >= 3.0 * delta) return 0.0;
    if (s <= delta) return 0.5 * s * s;
    if (s <= 2.0 * delta) return 0.5 * s * s - 1.5 * (s - delta) * (s - delta);
    const double r = 3.0 * delta - s;
    return 0.5 * r * r;
}

double target_rhs(double w) { return (1.0 - std::cos(w)) / 8.0; }

double DensitySolution::step() const { return kTwoPi / grid_n; }

double DensitySolution::single_efficiency() const { return delta / kTwoPi; }

double DensitySolution::f_at(double wv) const { return interp_periodic(f, wv); }

double DensitySolution::rho_at(double wv) const { return interp_periodic(rho, wv); }

double DensitySolution::max_rho() const {
    return *std::max_element(rho.begin(), rho.end());
}

void DensitySolution::validate(double tol) const {
    const double a = 3.0 * delta;
    const double pi = std::numbers::pi;
    double measure = 0.0;
    for (int j = 0; j < grid_n; ++j) {
        if (f[j] < -1e-12 || f[j] > 0.25 + 1e-12)
            throw std::logic_error("DensitySolution: f outside [0, 1/4]");
        if (rho[j] < 0.0) throw std::logic_error("DensitySolution: negative rho");
        if (w[j] <= a + 1e-12 && std::abs(f[j]) > tol)
            throw std::logic_error("DensitySolution: f not ~0 on the zero band");
        if (w[j] >= pi && w[j] <= pi + a + 1e-12 && std::abs(f[j] - 0.25) > tol)
            throw std::logic_error("DensitySolution: f not ~1/4 on the quarter band");
        measure += rho[j];
    }
    measure *= kTwoPi * kTwoPi * step();
    if (std::abs(measure - 1.0) > 1e-6)
        throw std::logic_error("DensitySolution: total measure != 1");
}

namespace {

// Trapezoid weights for integral(K(s) v(w0+s) ds) sampled at the grid step.
std::vector<double> kernel_weights(double delta, double h) {
    const int nk = static_cast<int>(std::floor(3.0 * delta / h)) + 1;
    std::vector<double> tw(nk);
    for (int k = 0; k < nk; ++k) tw[k] = window_kernel(k * h, delta);
    tw[0] *= 0.5;
    return tw;
}

double kernel_integral(const DensitySolution& sol, double w0,
                       const std::vector<double>& values,
                       const std::vector<double>& tw) {
    const double h = sol.step();
    double acc = 0.0;
    for (std::size_t k = 0; k < tw.size(); ++k)
        acc += tw[k] * interp_periodic(values, w0 + static_cast<double>(k) * h);
    return acc * h;
}

}  // namespace

double lhs_ratio(const DensitySolution& sol, double w0) {
    const auto tw = kernel_weights(sol.delta, sol.step());
    std::vector<double> frho(sol.rho.size());
    for (std::size_t j = 0; j < frho.size(); ++j) frho[j] = sol.f[j] * sol.rho[j];
    const double denom = kernel_integral(sol, w0, sol.rho, tw);
    if (denom <= 0.0)
        throw DegenerateDensity("lhs_ratio: vanishing kernel-weighted density");
    return kernel_integral(sol, w0, frho, tw) / denom;
}

double triple_probability(const DensitySolution& sol, double w0) {
    // Refined trapezoid: K is evaluated analytically between grid nodes,
    // rho by linear interpolation, so the quadrature bias stays well below
    // the statistical resolution of large Monte Carlo runs.
    const int refine = 4;
    const double hs = sol.step() / refine;
    const int m = static_cast<int>(std::floor(3.0 * sol.delta / hs)) + 1;
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
        const double s = k * hs;
        const double kv = window_kernel(s, sol.delta) * (k == 0 ? 0.5 : 1.0);
        acc += kv * sol.rho_at(w0 + s);
    }
    return acc * hs;
}

DensitySolution solve_densities(WindowWidth delta, int grid_n, double tol,
                                int max_iter) {
    const double pi = std::numbers::pi;
    if (grid_n < 256 || grid_n % 2 != 0)
        throw std::invalid_argument("solve_densities: grid_n must be even and >= 256");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_densities: tol must be > 0");

    const int n = grid_n;
    const int half = n / 2;
    const double h = kTwoPi / n;
    const double a = 3.0 * delta.delta;
    const auto tw = kernel_weights(delta.delta, h);
    const int nk = static_cast<int>(tw.size());

    std::vector<double> t(half);
    for (int i = 0; i < half; ++i) t[i] = target_rhs(i * h);

    // Band layout on the grid. The quarter band starts exactly at node n/2,
    // and the pi-shift symmetry f(w + pi) = 1/4 - f(w), rho(w + pi) = rho(w)
    // maps nodes to nodes, so only half the unknowns are solved for.
    const int zero_end = static_cast<int>(std::floor((a + 1e-12) / h));  // last zero node
    const int gap_begin = zero_end + 1;                                  // first free node
    const int ng = std::max(0, half - gap_begin);

    // Unknowns: theta (rho = exp(theta), pi-periodic) and f on the first gap.
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(half);
    Eigen::VectorXd fg(ng);
    for (int m = 0; m < ng; ++m)
        fg[m] = std::clamp(target_rhs((gap_begin + m) * h - 1.5 * delta.delta), 0.0, 0.25);

    std::vector<double> f(n), rho(n), numer(half), denom(half), lhs(half);
    Eigen::VectorXd r(half);

    const auto assemble = [&](const Eigen::VectorXd& th, const Eigen::VectorXd& fgv) {
        for (int j = 0; j < half; ++j) {
            rho[j] = std::exp(th[j]);
            rho[j + half] = rho[j];
        }
        std::fill(f.begin(), f.end(), 0.0);
        for (int j = half; j < n; ++j)
            if (j * h <= pi + a + 1e-12) f[j] = 0.25;
        for (int m = 0; m < ng; ++m) {
            f[gap_begin + m] = fgv[m];
            f[gap_begin + m + half] = 0.25 - fgv[m];
        }
        for (int i = 0; i < half; ++i) {
            double nu = 0.0, de = 0.0;
            for (int k = 0; k < nk; ++k) {
                const int j = (i + k) % n;
                nu += tw[k] * f[j] * rho[j];
                de += tw[k] * rho[j];
            }
            numer[i] = nu * h;
            denom[i] = de * h;
            lhs[i] = numer[i] / denom[i];
            r[i] = lhs[i] - t[i];
        }
    };

    assemble(theta, fg);
    double cost = 0.5 * r.squaredNorm();
    double max_res = r.cwiseAbs().maxCoeff();
    double mu = 1e-3;
    const double inner_target = tol * 0.1;
    const int nv = half + ng;
    Eigen::MatrixXd J(half, nv);

    for (int it = 0; it < max_iter && max_res > inner_target; ++it) {
        J.setZero();
        for (int i = 0; i < half; ++i) {
            const double inv_d = 1.0 / denom[i];
            for (int k = 0; k < nk; ++k) {
                const int j = (i + k) % n;
                const double base = h * tw[k] * inv_d;
                J(i, j % half) += base * (f[j] - lhs[i]) * rho[j];  // d/d theta
                if (ng > 0) {
                    if (j >= gap_begin && j < gap_begin + ng)
                        J(i, half + (j - gap_begin)) += base * rho[j];
                    else if (j - half >= gap_begin && j - half < gap_begin + ng)
                        J(i, half + (j - half - gap_begin)) -= base * rho[j];
                }
            }
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::VectorXd diag = JtJ.diagonal().cwiseMax(1e-12);

        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += mu * diag;
            const Eigen::VectorXd dx = A.ldlt().solve(-g);
            Eigen::VectorXd th2 = theta + dx.head(half);
            Eigen::VectorXd fg2 = fg + dx.tail(ng);
            for (int j = 0; j < half; ++j) th2[j] = std::clamp(th2[j], -30.0, 30.0);
            for (int m = 0; m < ng; ++m) fg2[m] = std::clamp(fg2[m], 0.0, 0.25);
            assemble(th2, fg2);
            const double c2 = 0.5 * r.squaredNorm();
            if (c2 < cost) {
                theta = th2;
                fg = fg2;
                cost = c2;
                max_res = r.cwiseAbs().maxCoeff();
                mu = std::max(mu * 0.5, 1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
            if (mu > 1e14) break;
        }
        if (!accepted) {
            assemble(theta, fg);  // restore state of the best iterate
            break;
        }
    }

    assemble(theta, fg);
    max_res = r.cwiseAbs().maxCoeff();
    if (max_res > tol)
        throw SolverFailure("solve_densities: residual " + std::to_string(max_res) +
                                " above tolerance " + std::to_string(tol),
                            max_res);

    // Normalize so the eight region densities sum to measure 1:
    // 4 f rho + 4 (1/4 - f) rho = rho, and the cube integral of rho(x+y+z)
    // equals (2 pi)^2 * integral of rho over one period.
    double z = 0.0;
    for (int j = 0; j < n; ++j) z += rho[j];
    z *= kTwoPi * kTwoPi * h;
    DensitySolution sol;
    sol.delta = delta.delta;
    sol.grid_n = n;
    sol.w.resize(n);
    sol.f = f;
    sol.rho.resize(n);
    for (int j = 0; j < n; ++j) {
        sol.w[j] = j * h;
        sol.rho[j] = rho[j] / z;
    }
    sol.residual = max_res;
    return sol;
}

std::vector<std::pair<double, double>> triple_efficiency_curve(
    const DensitySolution& sol, int points) {
    if (points < 2) throw std::invalid_argument("triple_efficiency_curve: points < 2");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(points);
    for (int m = 0; m < points; ++m) {
        const double w0 = kTwoPi * m / points;
        curve.emplace_back(w0, triple_probability(sol, w0));
    }
    return curve;
}

double conditional_prob_continuous(const DensitySolution& sol,
                                   const ContinuousSettings& settings,
                                   const OutcomeSign& signs) {
    const double w0 = settings.sum_mod_2pi();
    const auto tw = kernel_weights(sol.delta, sol.step());
    const int parity = signs.product();
    std::vector<double> region(sol.rho.size());
    for (std::size_t j = 0; j < region.size(); ++j)
        region[j] = (parity > 0 ? sol.f[j] : 0.25 - sol.f[j]) * sol.rho[j];
    const double denom = kernel_integral(sol, w0, sol.rho, tw);
    if (denom <= 1e-15)
        throw DegenerateDensity(
            "conditional_prob_continuous: zero triple efficiency at settings");
    return kernel_integral(sol, w0, region, tw) / denom;
}

void save_solution(const DensitySolution& sol, const std::string& path) {
    nlohmann::json j;
    j["delta"] = sol.delta;
    j["grid_n"] = sol.grid_n;
    j["w"] = sol.w;
    j["f"] = sol.f;
    j["rho"] = sol.rho;
    j["residual"] = sol.residual;
    j["single_efficiency"] = sol.single_efficiency();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_solution: cannot open " + path);
    out << j.dump(2) << "\n";
}

DensitySolution load_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_solution: cannot open " + path);
    nlohmann::json j;
    in >> j;
    DensitySolution sol;
    sol.delta = j.at("delta").get<double>();
    sol.grid_n = j.at("grid_n").get<int>();
    sol.w = j.at("w").get<std::vector<double>>();
    sol.f = j.at("f").get<std::vector<double>>();
    sol.rho = j.at("rho").get<std::vector<double>>();
    sol.residual = j.at("residual").get<double>();
    if (static_cast<int>(sol.w.size()) != sol.grid_n ||
        static_cast<int>(sol.f.size()) != sol.grid_n ||
        static_cast<int>(sol.rho.size()) != sol.grid_n)
        throw std::runtime_error("load_solution: inconsistent array sizes in " + path);
    return sol;
}

}  // namespace ghz
