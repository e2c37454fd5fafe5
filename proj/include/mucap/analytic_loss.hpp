#pragma once

#include <vector>

#include "mucap/types.hpp"

namespace mucap {

// Ingredients of the closed-form expected DPC-ZF loss, at composite-row
// granularity (for single-antenna users rows == users).
struct WishartSpec {
    VectorXd kappa_rows;   // linear K-factor per row
    MatrixXcd los_gram;    // row Gram of the LOS component (LN x LN)
    int bs_antennas = 0;
    int rx_per_user = 1;

    int num_rows() const { return static_cast<int>(kappa_rows.size()); }
    static WishartSpec from_profiles(const SystemConfig& config,
                                     const std::vector<UserProfile>& profiles);
};

// Shifted covariance: (kappa+I)^-1 + (1/M) sqrt(kappa(kappa+I)^-1) G
// sqrt(kappa(kappa+I)^-1), the central-Wishart surrogate's covariance.
MatrixXcd sigma_hat(const VectorXd& kappa_diag, const MatrixXcd& los_gram,
                    int bs_antennas);

// Eigenvalue convention for the non-central expected log-det.
//  kappa_scaled: eigenvalues of sqrt(kappa) G sqrt(kappa) -- the whitened
//    noncentrality -- plus the matching log2|Sigma| term. This is the form
//    the Monte Carlo oracle validates.
//  literal: eigenvalues of the unscaled LOS Gram, no covariance term.
enum class EigSource { kappa_scaled, literal };

// E{log2 1/gamma} bracket. `literal` divides by (M - LN) as stated;
// `digamma_corrected` replaces it by exp(psi(M - LN + 1)), the exact central
// Wishart value.
enum class GammaBracket { literal, digamma_corrected };

// Sum of delta_m over the non-central eigenvalues (plus the covariance term
// under kappa_scaled). Rows with zero K-factor make the noncentrality
// singular; such specs must go through the central path and are rejected
// here with a DomainError.
double expected_logdet_noncentral_bits(const WishartSpec& spec,
                                       EigSource source = EigSource::kappa_scaled);

// LN-stream sum of log2((SigmaHat^-1)_rr / (M - LN)). Requires M > LN.
double expected_log_inv_gamma_bits(const WishartSpec& spec,
                                   GammaBracket bracket = GammaBracket::literal);

// Closed-form expected DPC-ZF loss: the two terms above, or the exact
// central-Wishart expressions when every K-factor is zero (Rayleigh).
LossEstimate expected_loss_dpc_zf_analytic(
    const WishartSpec& spec, EigSource source = EigSource::kappa_scaled,
    GammaBracket bracket = GammaBracket::literal);

} // namespace mucap
