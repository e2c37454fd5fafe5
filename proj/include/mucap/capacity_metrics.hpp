#pragma once

#include <vector>

#include "mucap/precoding.hpp"
#include "mucap/types.hpp"

namespace mucap {

struct DpcOptions {
    double tol_bits = 1e-8;   // stop when successive objectives differ less
    long max_iters = 10000;
};

// Sum-power iterative waterfilling on the dual MAC, run on the L*N x L*N row
// Gram of the composite channel so per-iteration cost is independent of M.
// solve() warm-starts from the previous covariances (scaled to the new
// power), which makes SNR sweeps over one realization cheap.
class DpcSolver {
public:
    DpcSolver(const MatrixXcd& composite, int rx_per_user,
              const DpcOptions& opts = {});
    double solve(double rho);  // bits; throws ConvergenceError
    long last_iterations() const { return last_iters_; }

private:
    double objective() const;
    MatrixXcd gram_;
    int num_users_;
    int rx_;
    DpcOptions opts_;
    std::vector<MatrixXcd> q_;  // dual MAC covariances
    double last_rho_ = 0.0;
    long last_iters_ = 0;
};

double dpc_sum_capacity(const MatrixXcd& composite, int rx_per_user, double rho,
                        const DpcOptions& opts = {});

// High-SNR affine forms: S_inf [log2 rho - log2 S_inf] + capacity offset.
double dpc_affine(const MatrixXcd& composite, double rho);
double zf_sum_capacity(const PrecoderSet& precoders, double rho);
double zf_affine(const PrecoderSet& precoders, double rho);
double bd_sum_capacity(const PrecoderSet& precoders, double rho);
double bd_affine(const PrecoderSet& precoders, double rho);

// SNR-free asymptotic losses (difference of the affine offsets): always >= 0.
double loss_dpc_zf(const MatrixXcd& composite, const PrecoderSet& zf);
double loss_dpc_bd(const MatrixXcd& composite, const PrecoderSet& bd);

struct CapacityReport {
    double c_dpc = 0.0;
    double c_zf = 0.0;
    double c_bd = 0.0;
    double affine_dpc = 0.0;
    double affine_zf = 0.0;
    double affine_bd = 0.0;
    double loss_dpc_zf = 0.0;
    double loss_dpc_bd = 0.0;
};

// Everything at once for a realization: ZF treats each receive antenna as a
// separate stream, BD uses the per-user blocks.
CapacityReport capacity_report(const ChannelRealization& chan, double rho,
                               const DpcOptions& opts = {});

} // namespace mucap
