#pragma once

#include <complex>

namespace treeshift {

// Exact-in-double evaluation of the factorial-ratio quantities behind the
// Bergman-type kernels, plus adaptive power-series summation on the disc.

// Binomial coefficient C(n+a-1, n) — the coefficient of u^n in (1-u)^{-a}.
double binomial_series_coefficient(int n, int a);

// ||z^n g||^2 for a unit vector g supported on generation d:
//   (d+a-1)! (d+n)! / ((d+n+a-1)! d!).
double moment_norm_square(int d, int a, int n);

// a_{m,n} = (m+n+a)! (m+1)! / ((m+a)! (m+n+1)!), the branch diagonal series
// coefficients; a_{m,0} = 1 and a_{m,n} is increasing in n for a >= 2.
double branch_series_coefficient(int m, int n, int a);

// Ratio a_{m,n+1}/a_{m,n} = (m+n+a+1)/(m+n+2); used for tail bounds.
double branch_series_ratio(int m, int n, int a);

// Sum_{n>=1} C(n+a-1,n) u^n = (1-u)^{-a} - 1, summed adaptively for |u| < 1.
std::complex<double> root_series(std::complex<double> u, int a);

// Sum_{n>=1} a_{m,n} u^n, summed adaptively for |u| < 1.
std::complex<double> branch_series(std::complex<double> u, int m, int a);

// Shared adaptive summation control: terms are added until the geometric tail
// bound drops below 1e-12 relative to the partial sum; exceeding the term cap
// throws std::runtime_error("series cap too small ...").
inline constexpr int kSeriesTermCap = 200000;

}  // namespace treeshift
