/**
 * @file quadrature.hpp
 * @brief Composite Gauss-Legendre rules on [a, b] split at breakpoints, with
 *        spectral cumulative integration for nested (iterated) integrals, and
 *        fixed-step RK4 for matrix ODEs.
 */
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace holonomy {
namespace quad {

/**
 * K-point Gauss-Legendre rule on [0, 1] and its cumulative matrix
 * C(i, j) = int_0^{x_i} l_j(u) du, l_j the Lagrange basis on the nodes.
 */
struct GaussRule {
    Eigen::VectorXd x, w;
    Eigen::MatrixXd C;
};

namespace detail {

inline GaussRule build_rule(int K)
{
    GaussRule r;
    // Golub-Welsch on the Legendre Jacobi matrix
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K, K);
    for (int i = 1; i < K; ++i) {
        double b = i / std::sqrt(4.0 * i * i - 1.0);
        J(i, i - 1) = J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Eigen::VectorXd xi = es.eigenvalues();
    r.x = (xi.array() + 1.0) / 2.0;
    r.w = es.eigenvectors().row(0).transpose().array().square();   // sums to 1
    // Legendre values P_m(xi_i) and antiderivatives int_{-1}^{xi_i} P_m
    Eigen::MatrixXd V(K, K), W(K, K);
    for (int i = 0; i < K; ++i) {
        double z = xi(i);
        std::vector<double> P(K + 1);
        P[0] = 1.0;
        if (K >= 1) P[1] = z;
        for (int m = 1; m < K; ++m) P[m + 1] = ((2.0 * m + 1.0) * z * P[m] - m * P[m - 1]) / (m + 1.0);
        for (int m = 0; m < K; ++m) {
            V(i, m) = P[m];
            W(i, m) = (m == 0) ? (z + 1.0) : (P[m + 1] - P[m - 1]) / (2.0 * m + 1.0);
        }
    }
    // l_j = sum_m c(m, j) P_m with V c = I; map [-1,1] lengths to [0,1]
    Eigen::MatrixXd c = V.partialPivLu().inverse();
    r.C = 0.5 * W * c;
    return r;
}

}  // namespace detail

/// Cached rule for K points (thread safe).
inline const GaussRule& gauss_rule(int K)
{
    if (K < 1 || K > 64) throw std::invalid_argument("Gauss order must be in [1, 64]");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[K];
    if (!slot) slot = std::make_unique<GaussRule>(detail::build_rule(K));
    return *slot;
}

/**
 * Panels of [a, b]: the pieces between breakpoints, each cut into equal
 * panels no wider than max_width.
 */
inline std::vector<std::pair<double, double>> panels(double a, double b, std::vector<double> breaks,
                                                     double max_width)
{
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double c : breaks)
        if (c > pts.back() + 1e-13 && c < b - 1e-13) pts.push_back(c);
    pts.push_back(b);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double len = pts[i + 1] - pts[i];
        int m = std::max(1, static_cast<int>(std::ceil(len / max_width - 1e-12)));
        for (int j = 0; j < m; ++j)
            out.emplace_back(pts[i] + len * j / m, j + 1 == m ? pts[i + 1] : pts[i] + len * (j + 1) / m);
    }
    return out;
}

/**
 * Composite node set with per-node weights, used for plain and cumulative
 * integration of matrix-valued functions.
 */
struct Grid {
    int K = 0;
    std::vector<std::pair<double, double>> pans;
    std::vector<double> nodes, weights;

    Grid(double a, double b, const std::vector<double>& breaks, double max_width, int order)
        : K(order), pans(panels(a, b, breaks, max_width))
    {
        const GaussRule& r = gauss_rule(K);
        for (auto [lo, hi] : pans)
            for (int j = 0; j < K; ++j) {
                nodes.push_back(lo + (hi - lo) * r.x(j));
                weights.push_back((hi - lo) * r.w(j));
            }
    }

    std::size_t size() const { return nodes.size(); }

    /**
     * F(x_i) = int_a^{x_i} f for f given at the nodes; also returns the total
     * integral over [a, b] through @p total.
     */
    template <typename M>
    std::vector<M> cumulative(const std::vector<M>& f, M& total) const
    {
        const GaussRule& r = gauss_rule(K);
        std::vector<M> out(f.size());
        M run = f.empty() ? M() : M(f[0] * 0.0);
        for (std::size_t p = 0; p < pans.size(); ++p) {
            double h = pans[p].second - pans[p].first;
            std::size_t base = p * K;
            for (int i = 0; i < K; ++i) {
                M acc = run;
                for (int j = 0; j < K; ++j) acc += (h * r.C(i, j)) * f[base + j];
                out[base + i] = acc;
            }
            for (int j = 0; j < K; ++j) run += (h * r.w(j)) * f[base + j];
        }
        total = run;
        return out;
    }
};

/**
 * Split [a, b] at breakpoints into RK4 steps, ceil(steps_per_unit * length)
 * per piece (at least one).
 */
inline std::vector<double> step_points(double a, double b, std::vector<double> breaks, int steps_per_unit)
{
    std::vector<double> out{a};
    for (auto [lo, hi] : panels(a, b, std::move(breaks), 1e300)) {
        int m = std::max(1, static_cast<int>(std::ceil(steps_per_unit * (hi - lo) - 1e-9)));
        for (int j = 1; j <= m; ++j) out.push_back(j == m ? hi : lo + (hi - lo) * j / m);
    }
    return out;
}

}  // namespace quad
}  // namespace holonomy
