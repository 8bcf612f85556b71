#pragma once

#include <complex>
#include <string>
#include <vector>

#include "treeshift/kernels.hpp"
#include "treeshift/linalg.hpp"

namespace treeshift {

// Commutant {S}' of a square matrix, computed as the null space of
// X -> SX - XS through the Kronecker system (I (x) S - S^T (x) I) vec(X).
struct CommutantReport {
    int ambient_dimension = 0;
    int dimension = 0;
    std::vector<Matrix> basis;             // orthonormal in the Frobenius inner product
    double max_commutation_residual = 0.0;  // max ||S X - X S|| over the basis
    bool ambiguous = false;                 // rank decision near the tolerance
    double max_pairwise_commutator = 0.0;   // max ||X Y - Y X|| over basis pairs
    bool abelian = false;
    int star_commutant_dimension = 0;       // dim {S, S*}'
    bool irreducible = false;               // star commutant trivial
};

// Throws std::invalid_argument when S is not square or larger than 400.
CommutantReport commutant_basis(const Matrix& s, double rel_tol = 1e-10);

// JSON serialization (sorted keys, witness matrices dense row-major).
std::string commutant_report_json(const CommutantReport& report);

// A B(E)-valued polynomial Phi(z) = sum_k coefficients[k] z^k.
struct MatrixMultiplier {
    std::vector<ComplexMatrix> coefficients;  // all dim E x dim E

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    int dim_e() const;
    ComplexMatrix value(std::complex<double> w) const;

    static MatrixMultiplier constant(const ComplexMatrix& c);
    // p(z) * I_e for a scalar polynomial given by its coefficients.
    static MatrixMultiplier scalar(const std::vector<std::complex<double>>& poly, int dim_e);
};

// (Phi f) through the identification: coefficient-space convolution truncated
// at the horizon.  Throws std::invalid_argument when deg Phi + deg f exceeds
// the horizon (the convolution would not be faithful).
ComplexVector apply_matrix_multiplier(const KernelModel& model, const MatrixMultiplier& phi,
                                      const ComplexVector& f);

// The induced operator M_Phi on the truncation (horizon-compressed, so no
// degree guard: columns of too-high degree are cut, exactly like P M_Phi P).
ComplexMatrix multiplier_operator(const KernelModel& model, const MatrixMultiplier& phi);

// || M_Phi M_z - M_z M_Phi || with columns restricted to the degree-compatible
// sub-block (tree depth <= N - 1 - deg Phi), where both orders of application
// are faithful to the infinite-dimensional composition.
double commutation_defect(const KernelModel& model, const MatrixMultiplier& phi);

struct AbelianIrreducibilityReport {
    CommutantReport report;            // commutant of the truncated shift
    bool matches_dim_e = false;        // abelian verdict == (dim E == 1)
    // Witnesses, populated when dim E >= 2 (zeros otherwise):
    double witness_commutator = 0.0;       // ||[M_C1, M_C2]|| for non-commuting constants
    double projection_idempotency = 0.0;   // ||P^2 - P|| for P = M_{x (x) x}
    double projection_commutation = 0.0;   // commutation defect of the constant projection
    double projection_orthogonality = 0.0; // ||P* - P|| (0 iff the reduction is orthogonal)
};

AbelianIrreducibilityReport abelian_and_irreducibility_test(const KernelModel& model);

struct MultiplierRecovery {
    MatrixMultiplier multiplier;
    double precondition_defect = 0.0;  // ||S T - T S|| on the compatible sub-block
    double fit_residual = 0.0;         // max |Phi(w) - fit(w)| entrywise over the grid
    double sup_phi = 0.0;              // max ||Phi(w)|| over the grid
    double norm_bound = 0.0;           // ||T|| * sup_w cond(kappa(w,w))
    bool norm_bound_holds = false;     // sup_phi <= norm_bound + 1e-8
    double chain_ratio = 0.0;          // sup ||Phi(w) kappa(w,w)|| / ||kappa(w,w)||
    bool chain_holds = false;          // chain_ratio <= ||T|| + 1e-8
    std::vector<std::complex<double>> skipped_points;  // near-singular kappa(w,w)
};

// Recover the multiplier symbol of an operator T commuting with the shift:
// per grid point solve T* kappa(.,w)g = kappa(.,w) Phi(w)* g over the section
// frame, then fit a matrix polynomial of the given degree (default N/2).
// Throws std::invalid_argument when the commutation precondition fails
// (> 1e-8) or the grid is smaller than the number of fit coefficients.
MultiplierRecovery multiplier_recovery(const KernelModel& model, const ComplexMatrix& t,
                                       const std::vector<std::complex<double>>& grid,
                                       int fit_degree = -1);

// || P (M_rec - T) P || for the square compression P onto tree depth
// <= N - 1 - fit degree: the honest finite-scale reproduction check.
double reproduction_defect(const KernelModel& model, const MultiplierRecovery& recovery,
                           const ComplexMatrix& t);

}  // namespace treeshift
