#pragma once

#include "mucap/types.hpp"

namespace mucap {

// Weighted sum-capacity instance for single-antenna users: L channel rows,
// weights sorted descending and summing to one (the encoding order).
struct WeightedInstance {
    MatrixXcd rows;     // L x M
    VectorXd weights;   // mu, descending, sum 1
    double rho = 0.0;

    void require_valid() const;  // throws DomainError
};

// f_l: residual of h_l against span{h_1..h_{l-1}} (successive projections);
// g_l: residual against the span of all other rows.
struct ProjectionSet {
    MatrixXcd f;
    MatrixXcd g;
    VectorXd f_norms_sq;
    VectorXd g_norms_sq;
};

ProjectionSet successive_projections(const MatrixXcd& rows);

// KKT solution of the decoupled weighted allocation over gains a_l:
// rho_l = mu_l rho + mu_l sum_i 1/a_i - 1/a_l on the active set, negative
// entries deactivated iteratively. full_sum=false switches the interior sum
// to i != l (the as-printed variant, which does not sum to rho).
VectorXd kkt_power_allocation(const VectorXd& norms_sq, const VectorXd& weights,
                              double rho, bool full_sum = true);

VectorXd asymptotic_allocation(const VectorXd& weights, double rho);

enum class WeightedForm { dpc, zf };

// Affine weighted capacity at the weight-proportional allocation:
// sum mu_l log2(1 + rho mu_l ||f_l||^2) (dpc) or with ||g_l||^2 (zf).
double weighted_capacity_affine(const ProjectionSet& proj, const VectorXd& weights,
                                double rho, WeightedForm which);

// sum mu_l log2(||f_l||^2 / ||g_l||^2), >= 0.
double weighted_loss(const ProjectionSet& proj, const VectorXd& weights);

// Exact objective sum_l mu_l log2(1 + p_l h_l S_{l-1}^{-1} h_l^H) at a given
// power split, S_{l-1} = I + sum_{j<l} p_j h_j^H h_j.
double weighted_dpc_objective(const MatrixXcd& rows, const VectorXd& weights,
                              const VectorXd& powers);

struct WeightedSolveOptions {
    double tol_bits = 1e-8;
    long max_iters = 5000;
};

struct WeightedSolution {
    double value_bits = 0.0;
    VectorXd powers;
    long iterations = 0;
};

// Best power split found by multi-start projected gradient ascent (the
// objective is not jointly concave). Starts: weight-proportional, KKT on the
// successive-projection norms, uniform, and one vertex-leaning point per user.
WeightedSolution weighted_dpc_exact(const WeightedInstance& instance,
                                    const WeightedSolveOptions& opts = {});

} // namespace mucap
