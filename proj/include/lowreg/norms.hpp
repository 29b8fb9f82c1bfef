#pragma once

#include "lowreg/fields.hpp"
#include "lowreg/interpolation.hpp"
#include "lowreg/mesh.hpp"
#include "lowreg/quadrature.hpp"

#include <span>
#include <vector>

namespace lowreg {

/// Admissible integrability exponents are q in (2d/(2+d), 2].
bool q_admissible(int dim, double q);
void check_q(int dim, double q);
/// 1 + d(1/2 - 1/q): the power of h_K multiplying the L^q term.
double lq_term_exponent(int dim, double q);
/// 2d((d+2)/(2d) - 1/q): the power of h_{K-} in the Nitsche residual term.
double residual_exponent(int dim, double q);

struct NormOptions {
    int cell_degree = 6;
    int pair_level = 0; // 0 selects default_pair_level(dim)
};

double l2_norm_cell(const SimplicialMesh& mesh, const VectorFn& g, int k, int degree = 6);
/// (int_K |g|^q)^{1/q}; rejects q outside the admissible interval.
double lq_norm_cell(const SimplicialMesh& mesh, const VectorFn& g, double q, int k, int degree = 6);

/// ||v - u_h||_{L2(K)} and the same for the curl (Nedelec0) or divergence (RT0).
double l2_error_cell(const AnalyticField& field, const FEFunction& u, int k, int degree = 6);
double l2_error_cell(const AnalyticField& field, const BrokenFEFunction& u, int k, int degree = 6);
double derivative_error_cell(const AnalyticField& field, const FEFunction& u, int k, int degree = 6);

/// Sobolev-Slobodeckij seminorm (int int |g(x)-g(y)|^2 / |x-y|^{d+2r})^{1/2}
/// over the union of the given simplices, r in (0,1).
double fractional_seminorm(std::span<const Simplex> region, const VectorFn& g, double r, int level = 0);
double fractional_seminorm_cell(const SimplicialMesh& mesh, const VectorFn& g, double r, int k, int level = 0);
double fractional_seminorm(const SimplicialMesh& mesh, const VectorFn& g, double r, const Patch& patch,
                           int level = 0);
/// |g|_{H^1(K)} from a Jacobian evaluator.
double h1_seminorm_cell(const SimplicialMesh& mesh, const MatrixFn& jacobian, int k, int degree = 6);
/// |v|_{H^r(K)}: fractional for r < 1, H^1 (needs field.jacobian) for r = 1.
double regularity_seminorm_cell(const AnalyticField& field, const SimplicialMesh& mesh, double r, int k,
                                const NormOptions& opt = {});

/// L2(F) norm of the tangential (Nedelec0) or normal (RT0) jump across facet
/// f; single-sided trace on boundary facets.
double jump_norm_face(const FEFunction& u, int f, int degree = 4);
double jump_norm_face(const BrokenFEFunction& u, int f, int degree = 4);

/// Per-cell ingredients of the localized bounds.
struct CellBoundTerms {
    double h = 0.0;
    double seminorm = 0.0;    // |v|_{H^r(K)}
    double derivative = 0.0;  // ||rot v||_{L^q(K)} or ||div v||_{L^q(K)}
    double t1 = 0.0;          // h^r |v|_{H^r(K)}
    double t2 = 0.0;          // h^{1+d(1/2-1/q)} ||rot/div v||_{L^q(K)}
};

/// space = Nedelec0 uses rot v, RT0 uses div v.
std::vector<CellBoundTerms> cell_bound_terms(const AnalyticField& field, const SimplicialMesh& mesh, Family space,
                                             double r, double q, const NormOptions& opt = {});
/// Sum of t1 + t2 over the edge patch (Nedelec0) or face patch (RT0) of K.
double patch_bound(const SimplicialMesh& mesh, std::span<const CellBoundTerms> terms, int k, Family space);
double bound_rhs_nedelec(const AnalyticField& field, const SimplicialMesh& mesh, int k, double r, double q,
                         const NormOptions& opt = {});
double bound_rhs_rt(const AnalyticField& field, const SimplicialMesh& mesh, int k, double r, double q,
                    const NormOptions& opt = {});
/// (sum_K t1^2 + t2^2)^{1/2}.
double global_bound_rhs(std::span<const CellBoundTerms> terms);
double global_bound_rhs(const AnalyticField& field, const SimplicialMesh& mesh, double r, double q, Family space,
                        const NormOptions& opt = {});

/// (||e||^2 + l_D^2 ||rot e||^2)^{1/2}.
double hcurl_norm(double l2, double rot_l2, double length_scale);
double hcurl_norm(const AnalyticField& field, const FEFunction& u, int degree = 6);

/// Effectivity is NaN for cells whose bound is below 1e-8 times the largest
/// cell bound; max_effectivity skips them.
struct CellErrorTable {
    std::vector<double> lhs;
    std::vector<double> rhs;
    std::vector<double> effectivity;
    std::vector<double> h;
    std::vector<std::vector<int>> patch;

    double max_effectivity() const;
};

/// Localized comparison of ||v - u||_{L2(K)} with the patch bound.
CellErrorTable cell_error_table(const AnalyticField& field, const FEFunction& u,
                                std::span<const CellBoundTerms> terms, int degree = 6);

} // namespace lowreg
