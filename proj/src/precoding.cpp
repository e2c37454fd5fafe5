#include "mucap/precoding.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "mucap/errors.hpp"

namespace mucap {

PrecoderSet zf_precoder(const MatrixXcd& composite, int rx_per_user) {
    const Eigen::Index rows = composite.rows();
    const Eigen::Index cols = composite.cols();
    if (rows < 1 || cols < rows) {
        throw DomainError("zf_precoder: need a wide matrix (M >= L*N >= 1)");
    }
    if (rx_per_user < 1 || rows % rx_per_user != 0) {
        throw DomainError("zf_precoder: rx_per_user must divide the row count");
    }
    Eigen::JacobiSVD<MatrixXcd> svd(composite,
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double thresh = static_cast<double>(std::max(rows, cols)) *
                          std::numeric_limits<double>::epsilon() * sv(0);
    if (sv(rows - 1) <= thresh) {
        throw SingularMatrixError("zf_precoder: channel is rank deficient",
                                  sv(rows - 1));
    }
    // right pseudo-inverse V S^-1 U^H, one column per stream
    MatrixXcd pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() *
                     svd.matrixU().adjoint();

    PrecoderSet set;
    set.kind = PrecoderSet::Kind::zf;
    set.rx_per_user = rx_per_user;
    set.stream_gains_sq.resize(rows);
    const Eigen::Index L = rows / rx_per_user;
    for (Eigen::Index l = 0; l < L; ++l) {
        MatrixXcd w(cols, rx_per_user);
        for (Eigen::Index n = 0; n < rx_per_user; ++n) {
            const Eigen::Index k = l * rx_per_user + n;
            VectorXcd col = pinv.col(k);
            col /= col.norm();
            Complex g = composite.row(k) * col;
            col *= std::conj(g) / std::abs(g);  // make the gain real positive
            w.col(n) = col;
            set.stream_gains_sq(k) = std::norm(composite.row(k) * col);
        }
        set.W.push_back(std::move(w));
    }
    return set;
}

namespace {

// Orthonormal basis of the null space of `a` (full SVD route). For an empty
// stack (single user) that is all of C^M.
MatrixXcd null_space_basis(const MatrixXcd& a, Eigen::Index m) {
    if (a.rows() == 0) {
        return MatrixXcd::Identity(m, m);
    }
    Eigen::JacobiSVD<MatrixXcd> svd(a, Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    const double thresh = static_cast<double>(std::max(a.rows(), a.cols())) *
                          std::numeric_limits<double>::epsilon() *
                          (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > thresh) ++rank;
    }
    return svd.matrixV().rightCols(m - rank);
}

} // namespace

PrecoderSet bd_precoder(const std::vector<MatrixXcd>& user_blocks) {
    const int L = static_cast<int>(user_blocks.size());
    if (L < 1) {
        throw DomainError("bd_precoder: need at least one user block");
    }
    const Eigen::Index N = user_blocks[0].rows();
    const Eigen::Index M = user_blocks[0].cols();
    for (const auto& b : user_blocks) {
        if (b.rows() != N || b.cols() != M) {
            throw DomainError("bd_precoder: user blocks must share one shape");
        }
    }
    if (M < L * N) {
        throw ConfigurationError("bd_precoder: M >= L*N required");
    }

    PrecoderSet set;
    set.kind = PrecoderSet::Kind::bd;
    set.rx_per_user = static_cast<int>(N);
    set.stream_gains_sq.resize(L * N);
    set.W.reserve(L);
    set.equivalent_channels.reserve(L);

    MatrixXcd others((L - 1) * N, M);
    for (int l = 0; l < L; ++l) {
        Eigen::Index r = 0;
        for (int j = 0; j < L; ++j) {
            if (j == l) continue;
            others.middleRows(r, N) = user_blocks[j];
            r += N;
        }
        const MatrixXcd v = null_space_basis(others, M);
        if (v.cols() < N) {
            throw ConfigurationError(
                "bd_precoder: interference null space smaller than N");
        }
        const MatrixXcd eff = user_blocks[l] * v;  // N x dim
        Eigen::JacobiSVD<MatrixXcd> svd(eff,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
        MatrixXcd w = v * svd.matrixV().leftCols(N);
        MatrixXcd g = user_blocks[l] * w;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g.adjoint() * g,
                                                    Eigen::EigenvaluesOnly);
        set.stream_gains_sq.segment(l * N, N) = es.eigenvalues();
        set.W.push_back(std::move(w));
        set.equivalent_channels.push_back(std::move(g));
    }
    return set;
}

PowerAllocation waterfill(const VectorXd& gains, double rho) {
    const Eigen::Index k = gains.size();
    if (k == 0) {
        throw DomainError("waterfill: empty gain list");
    }
    if (!(rho > 0.0)) {
        throw DomainError("waterfill: rho must be > 0");
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(gains(i) > 0.0)) {
            throw DomainError("waterfill: gains must be > 0");
        }
    }
    const VectorXd inv = gains.cwiseInverse();
    double lo = inv.minCoeff();
    double hi = rho / static_cast<double>(k) + inv.maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double nu = 0.5 * (lo + hi);
        const double s = (VectorXd::Constant(k, nu) - inv).cwiseMax(0.0).sum();
        if (s > rho) {
            hi = nu;
        } else {
            lo = nu;
        }
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    // exact water level on the identified active set; drop any stragglers
    double nu = 0.5 * (lo + hi);
    PowerAllocation alloc;
    alloc.total = rho;
    alloc.powers = VectorXd::Zero(k);
    for (int pass = 0; pass < static_cast<int>(k) + 1; ++pass) {
        double inv_sum = 0.0;
        long active = 0;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (nu > inv(i)) {
                inv_sum += inv(i);
                ++active;
            }
        }
        if (active == 0) {  // numerical corner: put everything on the best gain
            Eigen::Index best;
            inv.minCoeff(&best);
            alloc.powers.setZero();
            alloc.powers(best) = rho;
            return alloc;
        }
        const double nu_exact = (rho + inv_sum) / static_cast<double>(active);
        bool consistent = true;
        for (Eigen::Index i = 0; i < k; ++i) {
            const bool in = nu > inv(i);
            if (in && nu_exact <= inv(i)) consistent = false;
        }
        nu = nu_exact;
        if (consistent) break;
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        alloc.powers(i) = std::max(nu - inv(i), 0.0);
    }
    return alloc;
}

} // namespace mucap
