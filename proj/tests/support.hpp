#pragma once

// Shared oracles for the test suite: an O(n log n) empirical Kendall tau,
// dense 6-variate Gaussian linear algebra, and a direct product-quadrature
// likelihood evaluator.  All deliberately independent of the library's own
// vine/likelihood code paths.

#include "vinemeta/dvine.hpp"
#include "vinemeta/likelihood.hpp"
#include "vinemeta/normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace testsupport {

// ---- empirical Kendall tau (merge-sort inversion count, no ties) ----------

inline long long merge_count(std::vector<double>& a, std::vector<double>& buf,
                             std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    long long inv = merge_count(a, buf, lo, mid) + merge_count(a, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[i] <= a[j])
            buf[k++] = a[i++];
        else {
            inv += static_cast<long long>(mid - i);
            buf[k++] = a[j++];
        }
    }
    while (i < mid) buf[k++] = a[i++];
    while (j < hi) buf[k++] = a[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, a.begin() + lo);
    return inv;
}

inline double kendall_tau_empirical(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> y(pts.size()), buf(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) y[i] = pts[i].second;
    long long inv = merge_count(y, buf, 0, y.size());
    double n = static_cast<double>(pts.size());
    return 1.0 - 4.0 * static_cast<double>(inv) / (n * (n - 1.0));
}

// ---- dense 6x6 Gaussian machinery -----------------------------------------

using Mat6 = std::array<std::array<double, 6>, 6>;

/// Correlation matrix implied by the path structure: adjacent entries are the
/// edge correlations, distant ones their products along the path.
inline Mat6 structured_sigma(const std::array<double, 5>& rho) {
    Mat6 s{};
    for (int i = 0; i < 6; ++i) s[i][i] = 1.0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            double r = 1.0;
            for (int k = i; k < j; ++k) r *= rho[k];
            s[i][j] = s[j][i] = r;
        }
    return s;
}

/// Invert in place by Gauss-Jordan, returning the determinant.
inline double invert6(Mat6& a) {
    Mat6 inv{};
    for (int i = 0; i < 6; ++i) inv[i][i] = 1.0;
    double det = 1.0;
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int r = col + 1; r < 6; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(inv[piv], inv[col]);
            det = -det;
        }
        double d = a[col][col];
        if (std::fabs(d) < 1e-300) throw std::runtime_error("singular matrix");
        det *= d;
        for (int j = 0; j < 6; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (int r = 0; r < 6; ++r) {
            if (r == col) continue;
            double m = a[r][col];
            for (int j = 0; j < 6; ++j) {
                a[r][j] -= m * a[col][j];
                inv[r][j] -= m * inv[col][j];
            }
        }
    }
    a = inv;
    return det;
}

/// 6-variate Gaussian copula density at uniforms u under correlation sigma.
inline double gaussian_copula_density(const Mat6& sigma,
                                      const std::array<double, 6>& u) {
    Mat6 inv = sigma;
    double det = invert6(inv);
    std::array<double, 6> z;
    for (int i = 0; i < 6; ++i) z[i] = vinemeta::norm_quantile(u[i]);
    double q = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            q += z[i] * (inv[i][j] - (i == j ? 1.0 : 0.0)) * z[j];
    return std::exp(-0.5 * q) / std::sqrt(det);
}

// ---- direct product-quadrature likelihood (normal margins, all-BVN) -------

/// One study's likelihood by brute 6-dimensional product quadrature of the
/// dense-Gaussian-copula integrand; independent of the dependent-grid path.
inline double dense_mvn_study_loglik(const vinemeta::ModelParams& params,
                                     const vinemeta::StudyTable& st, int nq) {
    using namespace vinemeta;
    if (params.margins != MarginFamily::Normal)
        throw std::runtime_error("oracle requires normal margins");
    std::array<double, 5> rho;
    const VineSpec spec = params.vine();
    for (int k = 0; k < 5; ++k) {
        if (spec.edges[k].family() != CopulaFamily::BVN)
            throw std::runtime_error("oracle requires all-BVN edges");
        rho[k] = spec.edges[k].theta();
    }
    Mat6 a = structured_sigma(rho);
    const double det = invert6(a);  // a is now sigma^{-1}
    for (int i = 0; i < 6; ++i) a[i][i] -= 1.0;

    const QuadratureRule rule = gauss_legendre(nq);
    std::vector<double> z(nq), logw(nq);
    for (int q = 0; q < nq; ++q) {
        z[q] = norm_quantile(rule.nodes[q]);
        logw[q] = std::log(rule.weights[q]);
    }
    const auto pm = position_margins(params);
    std::array<double, 6> yv{}, nv{};
    std::array<int, 6> arm{};
    double logc = 0.0;
    const std::array<const std::array<int, 4>*, 2> counts = {&st.non_diseased,
                                                             &st.diseased};
    for (int t = 0; t < 2; ++t) {
        int n = 0;
        for (int yk : *counts[t]) n += yk;
        if (n > 0) {
            logc += std::lgamma(n + 1.0);
            for (int yk : *counts[t]) logc -= std::lgamma(yk + 1.0);
        }
    }
    for (int p = 0; p < 6; ++p) {
        arm[p] = label_arm(params.order[p]);
        yv[p] = (*counts[arm[p]])[label_cell(params.order[p])];
        int n = 0;
        for (int yk : *counts[arm[p]]) n += yk;
        nv[p] = n;
    }

    // depth-first over the product grid, carrying the partial quadratic form
    double total = 0.0;
    std::array<int, 6> q{};
    std::array<double, 6> zs{};
    struct Frame {
        double quad, lw, lin, s1, s0;
    };
    std::function<void(int, Frame)> go = [&](int d, Frame f) {
        if (d == 6) {
            double logpmf = f.lin;
            if (nv[0] + nv[1] + nv[2] + nv[3] + nv[4] + nv[5] > 0) {
                // subtract each arm's normalizer once
                double d1 = std::log1p(f.s1), d0 = std::log1p(f.s0);
                double n1 = 0, n0 = 0;
                for (int p = 0; p < 6; ++p)
                    (arm[p] == 1 ? n1 : n0) = nv[p];
                logpmf -= n1 * d1 + n0 * d0;
            }
            total += std::exp(f.lw + logpmf - 0.5 * f.quad);
            return;
        }
        for (q[d] = 0; q[d] < nq; ++q[d]) {
            Frame g = f;
            double zd = z[q[d]];
            zs[d] = zd;
            g.quad += a[d][d] * zd * zd;
            for (int i = 0; i < d; ++i) g.quad += 2.0 * a[i][d] * zs[i] * zd;
            g.lw += logw[q[d]];
            double x = pm[d].normal.mu + pm[d].normal.sigma * zd;
            g.lin += yv[d] * x;
            (arm[d] == 1 ? g.s1 : g.s0) += std::exp(x);
            go(d + 1, g);
        }
    };
    go(0, {0.0, -0.5 * std::log(det), 0.0, 0.0, 0.0});
    return std::log(total) + logc;
}

}  // namespace testsupport
