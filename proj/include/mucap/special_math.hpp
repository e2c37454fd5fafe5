#pragma once

#include "mucap/types.hpp"

namespace mucap {

// Exponential integral Ei(x), x != 0. For x < 0 this equals -E1(-x).
// Series evaluation below |x|=1 and on the positive axis, continued fraction
// on the negative axis; accurate to ~1e-14 relative, well inside the 1e-12
// contract for |x| in [1e-6, 700].
double exp_integral_ei(double x);

// log2 |A| for Hermitian positive-definite A via Cholesky. Throws
// SingularMatrixError (carrying the smallest eigenvalue) if the
// factorization fails.
double log_det_hermitian_bits(const MatrixXcd& a);

// Digamma for x > 0.
double digamma(double x);

// Expected log2 of the squared norm of an M-dim complex Gaussian vector with
// identity covariance and squared mean-norm lambda > 0 (the per-eigenvalue
// term of the non-central Wishart expected log-det). Closed form when the
// alternating sum is numerically safe (lambda >= M), Poisson-digamma series
// otherwise; the two agree to ~1e-12 on the overlap.
double delta_m(double lambda, int m_antennas);

// E{log2 |H^H H|} for an L x M i.i.d. unit-variance complex Gaussian H with
// M >= L (central Wishart): sum_{k=0}^{L-1} psi(M-k) / ln 2.
double central_wishart_logdet_mean_bits(int m_antennas, int num_users);

} // namespace mucap
