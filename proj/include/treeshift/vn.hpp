#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "treeshift/commutant.hpp"
#include "treeshift/kernels.hpp"
#include "treeshift/linalg.hpp"
#include "treeshift/shift.hpp"

namespace treeshift {

// A single-variable polynomial sample with the generator provenance kept.
struct PolynomialSample {
    ComplexVector coefficients;  // degree = size - 1
    std::uint64_t seed = 0;      // 0 for handcrafted samples

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    std::complex<double> value(std::complex<double> z) const;
    ComplexMatrix apply(const Matrix& s) const;  // p(S), Horner
};

// Seeded, reproducible samples: degrees uniform in 0..max_degree and
// coefficients uniform in the closed unit disc (mt19937_64 driven).
std::vector<PolynomialSample> sample_polynomials(std::uint64_t seed, int count, int max_degree);

enum class Domain { disc, polydisc, ball };

// Equispaced distinguished-boundary grid; at arity 1 (the only arity the
// toolkit instantiates) all three domains share the unit circle.
std::vector<std::complex<double>> boundary_grid(Domain domain, int grid_size);

struct SupNormEstimate {
    double value = 0.0;      // grid maximum of |p|
    int grid_size = 0;
    double error_bar = 0.0;  // derivative-based bound on the grid gap
};

// Maximum of |p| over the boundary grid (maximum principle moves the sup to
// the boundary).  Throws std::invalid_argument for grid_size < 64.
SupNormEstimate sup_norm_estimate(const PolynomialSample& p, Domain domain, int grid_size);

// ||p(S)|| - ||p||_{infty, D} (grid estimate); <= grid tolerance for
// contractions, genuinely positive for expansive weights.
double vn_defect(const TruncatedShift& shift, const PolynomialSample& p, int grid_size = 1024);

struct MatrixVnReport {
    double operator_value = 0.0;   // ||(p_ij(S))|| on the m-fold direct sum
    double sup_value = 0.0;        // sup-grid of ||(p_ij(z))|| in operator norm
    double defect = 0.0;           // operator_value - sup_value
    double inflation_bound = 0.0;  // m * max_ij sup |p_ij| (coarse cross-check)
    bool inflation_sane = false;   // sup_value <= inflation_bound + tol
};

// Matrix-valued von Neumann probe for an m x m polynomial matrix, m <= 4.
MatrixVnReport matrix_vn_defect(const TruncatedShift& shift, const MatrixMultiplier& p,
                                int grid_size = 1024);

// Minimum eigenvalue of
//   sum_{j=0}^k (-1)^j C(k,j) sum_{|alpha|=j} j!/alpha! T^{*alpha} T^{alpha}
// for a tuple of commuting matrices.  Throws std::invalid_argument when the
// tuple does not commute pairwise to 1e-10, or k is out of 1..8 / d out of
// 1..4.
double ball_positivity_defect(const std::vector<ComplexMatrix>& tuple, int k);

struct ApproximantSequence {
    ComplexVector target;              // Taylor coefficients of phi
    std::vector<ComplexVector> sigma;  // Cesaro means sigma_0 .. sigma_{n_max}
    double bound_constant = 1.0;       // M (classical value 1 on the disc)
    double sup_phi_grid = 0.0;         // ||phi||_{infty, grid}
    double max_sigma_sup = 0.0;        // max_n ||sigma_n||_{infty, grid}
    double final_gap = 0.0;            // max_{|w| = 0.95} |sigma_{n_max}(w) - phi(w)|
};

// Fejer/Cesaro means of the Taylor series: sigma_n has coefficients
// (1 - k/(n+1)) c_k, k <= n.  Grid-verifies the uniform bound and the
// pointwise convergence at radius 0.95.
ApproximantSequence fejer_approximants(const ComplexVector& phi, int n_max, int grid_size = 1024);

struct EigenlineRecovery {
    ComplexVector phi_coefficients;  // fitted scalar polynomial
    bool line_preserved = false;     // A* maps every sampled section into its own line
    double line_distance = 0.0;      // worst relative distance from the line
    double g_independence = 0.0;     // max over frame pairs |phi_gj(w) - phi_gk(w)|
    double sup_phi = 0.0;            // max |phi(w)| over the grid
    double a_norm = 0.0;
    bool norm_bound_holds = false;   // sup_phi <= ||A|| + 1e-9
    double action_residual = 0.0;    // max ||(A f)(w) - phi(w) f(w)|| over probes
    double fit_residual = 0.0;       // pointwise phi values vs fitted polynomial
};

// The reflexivity mechanism: an operator whose adjoint preserves every
// section line acts as a multiplier; extract phi(w) per (w, frame vector),
// check g-independence, the norm bound, and the action identity.  A failed
// line-preservation precondition is reported (line_preserved = false), not
// thrown.
EigenlineRecovery eigenline_multiplier_recovery(const KernelModel& model, const ComplexMatrix& a,
                                                const std::vector<std::complex<double>>& grid,
                                                int fit_degree = -1);

struct WotProbe {
    std::vector<double> residuals;  // r_n = |<(sigma_n(S) - M_phi) f, h>|
    double uniform_bound = 0.0;     // max_n ||sigma_n(S)||
    double bound_reference = 0.0;   // K * M * ||phi||_{infty, grid}, K = M = 1
    bool uniformly_bounded = false;
};

// Weak-operator-topology convergence probe: matrix-entry residuals of the
// Cesaro approximants against the multiplier, plus the uniform norm bound.
WotProbe wot_convergence_probe(const KernelModel& model, const ComplexVector& phi_coefficients,
                               const ComplexVector& f, const ComplexVector& h, int n_max,
                               int grid_size = 1024);

}  // namespace treeshift
