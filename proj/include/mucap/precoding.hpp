#pragma once

#include <vector>

#include "mucap/types.hpp"

namespace mucap {

// Per-user precoding matrices plus the equivalent channel they induce.
// Columns are unit-norm. For ZF, stream_gains_sq holds |g_{l,n}|^2 for the
// L*N streams in (user, antenna) order and the scalar gains are made real
// positive by rotating the columns. For BD, equivalent_channels holds the
// N x N matrices G_l = H_l W_l and stream_gains_sq holds the eigenvalues of
// G_l^H G_l (ascending within each user).
struct PrecoderSet {
    enum class Kind { zf, bd };
    Kind kind = Kind::zf;
    int rx_per_user = 1;
    std::vector<MatrixXcd> W;                    // L matrices, M x N
    VectorXd stream_gains_sq;                    // L*N entries
    std::vector<MatrixXcd> equivalent_channels;  // BD only
};

struct PowerAllocation {
    VectorXd powers;
    double total = 0.0;
};

// Right pseudo-inverse ZF on the composite channel; every receive antenna is
// treated as its own stream (rx_per_user only sets how columns are grouped
// into per-user W matrices). Throws SingularMatrixError (with the smallest
// singular value) when H is not full row rank.
PrecoderSet zf_precoder(const MatrixXcd& composite, int rx_per_user = 1);

// Block diagonalization: W_l spans the null space of the other users' stacked
// channels, aligned with the right singular vectors of the projected own
// channel. Throws ConfigurationError when the null space is too small.
PrecoderSet bd_precoder(const std::vector<MatrixXcd>& user_blocks);

// max sum log2(1 + p_k g_k) subject to sum p <= rho: water level found by
// bisection (1e-12 relative) and finished in closed form on the active set,
// so the powers sum to rho exactly.
PowerAllocation waterfill(const VectorXd& gains, double rho);

} // namespace mucap
