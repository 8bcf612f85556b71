#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "treeshift/linalg.hpp"
#include "treeshift/shift.hpp"

namespace treeshift {

// A B(E)-valued reproducing kernel model on the unit disc together with the
// unitary identification between the truncated shift on l2(V) and the
// multiplication operator M_z on the function space.
//
// Conventions shared by both families:
//  - E carries a fixed real orthonormal frame (the columns of e_basis());
//    kernel values are matrices in that frame.
//  - The function-space orthonormal basis is enumerated in BFS order: ONB
//    element j corresponds to tree vertex j under the identification, and is
//    supported on a single generation.
//  - Functions are handled in tree coordinates (length = vertex count);
//    "power coordinates" is the dim E x (N+1) matrix of Taylor coefficients
//    in the E frame, truncated at the horizon N.
class KernelModel {
  public:
    virtual ~KernelModel() = default;

    virtual std::string name() const = 0;
    virtual const TruncatedShift& shift() const = 0;
    const DirectedTree& tree() const { return *shift().tree; }
    int dim_e() const { return static_cast<int>(e_basis().cols()); }
    int horizon() const { return shift().horizon(); }
    int dimension() const { return shift().dimension(); }

    // kappa(z, w) in the E frame, adaptively summed to a 1e-12 tail.
    virtual ComplexMatrix eval(std::complex<double> z, std::complex<double> w) const = 0;
    // Plain partial sum with `terms` series terms (test oracle).
    virtual ComplexMatrix eval_partial(std::complex<double> z, std::complex<double> w,
                                       int terms) const = 0;

    // Orthonormal frame of E in tree coordinates (dim V x dim E, real).
    virtual const Matrix& e_basis() const = 0;

    // j-th function-space ONB element in tree coordinates.
    virtual Vector onb_tree_column(int j) const = 0;

    // Value of ONB element j at w, in the E frame.
    virtual ComplexVector onb_value(int j, std::complex<double> w) const = 0;

    // Taylor coefficients of the section kappa(., w) g (g in the E frame),
    // computed from the kernel coefficient tables.
    virtual ComplexMatrix section_power(std::complex<double> w, const ComplexVector& g) const = 0;

    // Power coordinates <-> tree coordinates.  from_power drops coefficients
    // the truncation cannot represent (the horizon cut); to_power inverts it
    // on the represented range.
    virtual ComplexVector from_power(const ComplexMatrix& power) const = 0;
    virtual ComplexMatrix to_power(const ComplexVector& f) const = 0;

    // Relative l2 bound for the part of a section lost to the horizon cut at
    // radius |w| = r (worst case over unit g).
    virtual double section_tail_bound(double r) const = 0;

    // Family-specific closed-form bound for the eigenvalue ratio of
    // kappa(w,w); +infinity where the family's bound is not valid.
    virtual double condition_bound(double r) const = 0;

    // ---- shared non-virtual helpers ----

    // Section in tree coordinates via the kernel coefficient route.
    ComplexVector section_series(std::complex<double> w, const ComplexVector& g) const;
    // Section via pointwise ONB values: coefficient of ONB element j is
    // <g, phi_j(w)>_E.  Independent of the kernel coefficient tables.
    ComplexVector section_basis(std::complex<double> w, const ComplexVector& g) const;
    // f(w) in the E frame from tree coordinates.
    ComplexVector value_at(const ComplexVector& f, std::complex<double> w) const;
    // The unitary identification W (columns = onb_tree_column), dim V square.
    Matrix identification() const;
};

// Bergman-type shift kernel on an arbitrary tree: diagonal in the adapted E
// frame; strand 0 (root) has coefficients C(n+a-1, n), the strands of a
// branching vertex v have coefficients a_{d_v, n}.
class BergmanTreeKernel final : public KernelModel {
  public:
    BergmanTreeKernel(const DirectedTree& tree, int a);

    std::string name() const override;
    const TruncatedShift& shift() const override { return shift_; }
    ComplexMatrix eval(std::complex<double> z, std::complex<double> w) const override;
    ComplexMatrix eval_partial(std::complex<double> z, std::complex<double> w,
                               int terms) const override;
    const Matrix& e_basis() const override { return e_basis_; }
    Vector onb_tree_column(int j) const override;
    ComplexVector onb_value(int j, std::complex<double> w) const override;
    ComplexMatrix section_power(std::complex<double> w, const ComplexVector& g) const override;
    ComplexVector from_power(const ComplexMatrix& power) const override;
    ComplexMatrix to_power(const ComplexVector& f) const override;
    double section_tail_bound(double r) const override;
    double condition_bound(double r) const override;

    int parameter_a() const { return a_; }
    // generation that carries strand i (0 for the root strand, d_v + 1 else).
    int strand_generation(int i) const { return strand_generation_[static_cast<std::size_t>(i)]; }
    // series index of strand i (-1 semantics folded in: root uses binomials).
    int strand_m(int i) const { return strand_m_[static_cast<std::size_t>(i)]; }
    // closed-form diagonal entry of kappa(w,w) for strand i at u = |w|^2.
    double diagonal_series(int i, double u) const;
    // ||z^n g_i||^2 from the closed form.
    double strand_moment(int i, int n) const;
    // m0 = max depth of a branching vertex; indexes the slowest diagonal
    // strand, which carries the minimal eigenvalue of kappa(w,w).
    int m0() const;
    // ONB layout: which strand / degree vertex j carries.
    int strand_of(int j) const { return onb_strand_of_[static_cast<std::size_t>(j)]; }
    int degree_of(int j) const { return onb_degree_of_[static_cast<std::size_t>(j)]; }

  private:
    int a_;
    TruncatedShift shift_;
    Matrix e_basis_;
    std::vector<int> strand_generation_;  // per strand
    std::vector<int> strand_m_;           // -1 for the root strand, d_v else
    std::vector<int> onb_strand_of_;            // vertex index -> strand
    std::vector<int> onb_degree_of_;            // vertex index -> n
    std::vector<std::vector<double>> moment_;   // [strand][n] = ||z^n g_i||^2
};

// Two-parameter tridiagonal-type kernel on the two-ray tree (dim E = 2, frame
// {x, y/||y||}); off-diagonal coupling alpha_0 s sqrt(2) z^2 conj(w) makes it
// non-diagonal.
class TridiagonalKernel final : public KernelModel {
  public:
    TridiagonalKernel(const DirectedTree& tree, double s, double t);

    std::string name() const override;
    const TruncatedShift& shift() const override { return shift_; }
    ComplexMatrix eval(std::complex<double> z, std::complex<double> w) const override;
    ComplexMatrix eval_partial(std::complex<double> z, std::complex<double> w,
                               int terms) const override;
    const Matrix& e_basis() const override { return e_basis_; }
    Vector onb_tree_column(int j) const override;
    ComplexVector onb_value(int j, std::complex<double> w) const override;
    ComplexMatrix section_power(std::complex<double> w, const ComplexVector& g) const override;
    ComplexVector from_power(const ComplexMatrix& power) const override;
    ComplexMatrix to_power(const ComplexVector& f) const override;
    double section_tail_bound(double r) const override;
    double condition_bound(double r) const override;

    double parameter_s() const { return s_; }
    double parameter_t() const { return t_; }
    double alpha(int k) const;
    double coefficient_a(int k) const;  // a_k of the ONB normalization
    double coefficient_b(int k) const;
    // k1, k2, and the eigenvalues x_+/x_- of kappa(w,w) at |w| = r.
    double k1(double r) const;
    double k2(double r) const;
    EigRange closed_form_eigenvalues(double r) const;

  private:
    double s_;
    double t_;
    TruncatedShift shift_;
    Matrix e_basis_;
};

// ---- diagnostics ----

struct ConditionData {
    double mu_min = 0.0;
    double mu_max = 0.0;
    double ratio = 0.0;
    double bound = 0.0;        // family closed-form bound (may be +inf)
    double closed_min = 0.0;   // family closed-form eigenvalues
    double closed_max = 0.0;
};
ConditionData condition_ratio(const KernelModel& model, std::complex<double> w);

// Min eigenvalue of the Gram matrix [<kappa(w_i, w_j) g_j, g_i>].
double gram_min_eigenvalue(const KernelModel& model,
                           const std::vector<std::complex<double>>& points,
                           const std::vector<ComplexVector>& vectors);

// |<f, kappa(., w) g>_H - <f(w), g>_E| with the two sides computed through
// independent data (kernel coefficient tables vs pointwise basis values).
double reproducing_residual(const KernelModel& model, const ComplexVector& f,
                            std::complex<double> w, const ComplexVector& g);

// ||(S* - conj(w)) v|| / ||v|| for the truncated section v = kappa(., w) g.
double eigenvector_residual(const KernelModel& model, std::complex<double> w,
                            const ComplexVector& g);

struct EigenvectorStructure {
    double max_relative_residual = 0.0;  // worst over the E frame
    int null_dimension = 0;              // dim null(S* - conj(w)) on interior rows
    bool null_ambiguous = false;
    double principal_angle = 0.0;        // sections span vs numeric null space
    double tail_bound = 0.0;             // section tail estimate at |w|
};
// Throws std::invalid_argument when the tail bound exceeds tail_budget.
EigenvectorStructure eigenvector_structure(const KernelModel& model, std::complex<double> w,
                                           double tail_budget = 1e-8);

struct PolynomialBoundWitness {
    int degree = 0;                // degree of the fitted polynomial in |w|^2
    std::vector<double> coefficients;
    double sup_residual = 0.0;     // max |ratio - p| over the grid
    double sup_ratio = 0.0;
    bool fits = false;             // sup_residual <= 0.05 * max(1, sup_ratio)
};
// Least-squares fit of the condition ratio by a polynomial in u = |w|^2 over
// a grid of u values in [0, 0.99]; tries degrees 0..max_degree and keeps the
// first that fits (or the best one, flagged fits=false).
PolynomialBoundWitness polynomial_bound_witness(const KernelModel& model,
                                                const std::vector<double>& u_grid,
                                                int max_degree = 12);

struct AssumptionCheck {
    // sup over n of max_{j,k} ||z^n g_k||^2 / ||z^n g_j||^2; a finite sup is
    // what lets scalar-coefficient estimates transfer across the E frame.
    double norm_ratio_sup = 0.0;
    // measured sup of ||f_{g,h}||/||f|| over the E frame pairs and probe f's,
    // where f_{g,h}(w) = <f(w), g>_E h.
    double functional_ratio = 0.0;
    bool holds = false;            // functional_ratio <= sqrt(norm_ratio_sup) + tol
};
AssumptionCheck assumption_check(const KernelModel& model);

struct IdentificationCheck {
    double unitarity_defect = 0.0;     // ||W* W - I||
    double intertwining_defect = 0.0;  // ||S W - W Mz_onb||
    double moment_defect = 0.0;        // max rel. gap ||S^n g_i|| vs closed form
};
IdentificationCheck identification_check(const KernelModel& model);

}  // namespace treeshift
