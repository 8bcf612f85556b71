#include "treeshift/series.hpp"

#include <cmath>
#include <stdexcept>

namespace treeshift {

namespace {

void require_parameter(int a) {
    if (a < 1) throw std::invalid_argument("series parameter a must be a positive integer");
}

void require_inside_disc(std::complex<double> u) {
    if (!(std::abs(u) < 1.0)) throw std::invalid_argument("series argument must satisfy |u| < 1");
}

// Sums sum_{n>=1} c_n u^n where c_1 = first and c_{n+1} = c_n * ratio(n), with
// ratio(n) non-increasing in n.  The geometric tail bound uses the current
// ratio, which dominates all later ones.
template <typename Ratio>
std::complex<double> sum_series(std::complex<double> u, double first, Ratio ratio) {
    std::complex<double> sum{0.0, 0.0};
    std::complex<double> term = first * u;
    const double abs_u = std::abs(u);
    for (int n = 1; n <= kSeriesTermCap; ++n) {
        sum += term;
        const double q = abs_u * ratio(n);
        if (q < 1.0) {
            const double tail = std::abs(term) * q / (1.0 - q);
            if (tail <= 1e-12 * std::max(1.0, std::abs(sum))) return sum;
        }
        term *= u * ratio(n);
    }
    throw std::runtime_error("series cap too small: argument too close to the unit circle");
}

}  // namespace

double binomial_series_coefficient(int n, int a) {
    require_parameter(a);
    if (n < 0) throw std::invalid_argument("series index n must be non-negative");
    double value = 1.0;
    for (int j = 1; j <= n; ++j) {
        value *= static_cast<double>(a - 1 + j) / static_cast<double>(j);
    }
    return value;
}

double moment_norm_square(int d, int a, int n) {
    require_parameter(a);
    if (d < 0 || n < 0) throw std::invalid_argument("moment indices must be non-negative");
    double value = 1.0;
    for (int j = 1; j <= n; ++j) {
        value *= static_cast<double>(d + j) / static_cast<double>(d + a - 1 + j);
    }
    return value;
}

double branch_series_coefficient(int m, int n, int a) {
    require_parameter(a);
    if (m < 0 || n < 0) throw std::invalid_argument("series indices must be non-negative");
    double value = 1.0;
    for (int j = 2; j <= a; ++j) {
        value *= static_cast<double>(m + n + j) / static_cast<double>(m + j);
    }
    return value;
}

double branch_series_ratio(int m, int n, int a) {
    require_parameter(a);
    return static_cast<double>(m + n + a + 1) / static_cast<double>(m + n + 2);
}

std::complex<double> root_series(std::complex<double> u, int a) {
    require_parameter(a);
    require_inside_disc(u);
    // c_1 = a, c_{n+1}/c_n = (n+a)/(n+1), decreasing toward 1.
    return sum_series(u, static_cast<double>(a), [a](int n) {
        return static_cast<double>(n + a) / static_cast<double>(n + 1);
    });
}

std::complex<double> branch_series(std::complex<double> u, int m, int a) {
    require_parameter(a);
    if (m < 0) throw std::invalid_argument("branch index m must be non-negative");
    require_inside_disc(u);
    return sum_series(u, branch_series_coefficient(m, 1, a), [m, a](int n) {
        return branch_series_ratio(m, n, a);
    });
}

}  // namespace treeshift
