#include "mucap/capacity_metrics.hpp"

#include <cmath>

#include "mucap/errors.hpp"
#include "mucap/special_math.hpp"

namespace mucap {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212;

double capacity_from_gains(const VectorXd& gains_sq, double rho) {
    const PowerAllocation alloc = waterfill(gains_sq, rho);
    double bits = 0.0;
    for (Eigen::Index i = 0; i < gains_sq.size(); ++i) {
        bits += std::log1p(alloc.powers(i) * gains_sq(i)) / kLn2;
    }
    return bits;
}

double affine_from_gains(const VectorXd& gains_sq, double rho) {
    const double sn = static_cast<double>(gains_sq.size());
    double offset = 0.0;
    for (Eigen::Index i = 0; i < gains_sq.size(); ++i) {
        offset += std::log2(gains_sq(i));
    }
    return sn * (std::log2(rho) - std::log2(sn)) + offset;
}

MatrixXcd hermitianized_gram(const MatrixXcd& h) {
    MatrixXcd g = h * h.adjoint();
    return 0.5 * (g + g.adjoint().eval());
}

// sqrt of a small Hermitian PSD block
MatrixXcd psd_sqrt(const MatrixXcd& q) {
    if (q.rows() == 1) {
        return MatrixXcd::Constant(1, 1, std::sqrt(std::max(q(0, 0).real(), 0.0)));
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(q);
    return es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

} // namespace

DpcSolver::DpcSolver(const MatrixXcd& composite, int rx_per_user,
                     const DpcOptions& opts)
    : gram_(hermitianized_gram(composite)),
      num_users_(static_cast<int>(composite.rows()) / rx_per_user),
      rx_(rx_per_user),
      opts_(opts) {
    if (rx_per_user < 1 || composite.rows() % rx_per_user != 0) {
        throw DomainError("DpcSolver: rx_per_user must divide the row count");
    }
}

double DpcSolver::objective() const {
    const int total = num_users_ * rx_;
    MatrixXcd r = MatrixXcd::Zero(total, total);
    for (int l = 0; l < num_users_; ++l) {
        r.block(l * rx_, l * rx_, rx_, rx_) = psd_sqrt(q_[l]);
    }
    MatrixXcd s = r * gram_ * r;
    return log_det_hermitian_bits(MatrixXcd::Identity(total, total) +
                                  0.5 * (s + s.adjoint().eval()));
}

double DpcSolver::solve(double rho) {
    if (!(rho > 0.0)) {
        throw DomainError("DpcSolver: rho must be > 0");
    }
    const int L = num_users_;
    const int N = rx_;
    const int total = L * N;
    if (q_.empty()) {
        q_.assign(L, MatrixXcd::Identity(N, N) * (rho / total));
    } else {
        const double scale = rho / last_rho_;
        for (auto& q : q_) q *= scale;
    }
    last_rho_ = rho;

    double prev = objective();
    for (long it = 1; it <= opts_.max_iters; ++it) {
        // effective per-user channels with the others' covariances as noise,
        // all through Woodbury on the Gram blocks
        std::vector<MatrixXcd> rsqrt(L);
        for (int l = 0; l < L; ++l) rsqrt[l] = psd_sqrt(q_[l]);

        VectorXd all_eigs(total);
        std::vector<MatrixXcd> vecs(L);
        MatrixXcd ro = MatrixXcd::Zero((L - 1) * N, (L - 1) * N);
        MatrixXcd koo((L - 1) * N, (L - 1) * N);
        MatrixXcd kol((L - 1) * N, N);
        for (int l = 0; l < L; ++l) {
            MatrixXcd f;
            if (L == 1) {
                f = gram_;
            } else {
                int r = 0;
                for (int j = 0; j < L; ++j) {
                    if (j == l) continue;
                    ro.block(r * N, r * N, N, N) = rsqrt[j];
                    int ccol = 0;
                    for (int j2 = 0; j2 < L; ++j2) {
                        if (j2 == l) continue;
                        koo.block(r * N, ccol * N, N, N) =
                            gram_.block(j * N, j2 * N, N, N);
                        ++ccol;
                    }
                    kol.block(r * N, 0, N, N) = gram_.block(j * N, l * N, N, N);
                    ++r;
                }
                const MatrixXcd b = ro * kol;
                MatrixXcd a = MatrixXcd::Identity((L - 1) * N, (L - 1) * N) +
                              ro * koo * ro;
                Eigen::LLT<MatrixXcd> llt(0.5 * (a + a.adjoint().eval()));
                f = gram_.block(l * N, l * N, N, N) - b.adjoint() * llt.solve(b);
            }
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (f + f.adjoint().eval()));
            vecs[l] = es.eigenvectors();
            all_eigs.segment(l * N, N) = es.eigenvalues().cwiseMax(0.0);
        }

        // joint waterfill over every eigenmode; zero-gain modes get no power
        VectorXd powers = VectorXd::Zero(total);
        {
            std::vector<Eigen::Index> keep;
            for (Eigen::Index i = 0; i < total; ++i) {
                if (all_eigs(i) > 1e-300) keep.push_back(i);
            }
            if (keep.empty()) {
                throw ConvergenceError("DpcSolver: zero effective channel", prev, it);
            }
            VectorXd g(keep.size());
            for (size_t i = 0; i < keep.size(); ++i) g(i) = all_eigs(keep[i]);
            const PowerAllocation alloc = waterfill(g, rho);
            for (size_t i = 0; i < keep.size(); ++i) powers(keep[i]) = alloc.powers(i);
        }

        const double mix = 1.0 / L;
        for (int l = 0; l < L; ++l) {
            const MatrixXcd s = vecs[l] *
                                powers.segment(l * N, N).asDiagonal() *
                                vecs[l].adjoint();
            q_[l] = mix * s + (1.0 - mix) * q_[l];
        }

        const double cur = objective();
        if (std::abs(cur - prev) < opts_.tol_bits) {
            last_iters_ = it;
            return cur;
        }
        prev = cur;
    }
    throw ConvergenceError("DpcSolver: no convergence", prev, opts_.max_iters);
}

double dpc_sum_capacity(const MatrixXcd& composite, int rx_per_user, double rho,
                        const DpcOptions& opts) {
    DpcSolver solver(composite, rx_per_user, opts);
    return solver.solve(rho);
}

double dpc_affine(const MatrixXcd& composite, double rho) {
    const double sn = static_cast<double>(composite.rows());
    return sn * (std::log2(rho) - std::log2(sn)) +
           log_det_hermitian_bits(hermitianized_gram(composite));
}

double zf_sum_capacity(const PrecoderSet& p, double rho) {
    return capacity_from_gains(p.stream_gains_sq, rho);
}

double zf_affine(const PrecoderSet& p, double rho) {
    return affine_from_gains(p.stream_gains_sq, rho);
}

double bd_sum_capacity(const PrecoderSet& p, double rho) {
    return capacity_from_gains(p.stream_gains_sq, rho);
}

double bd_affine(const PrecoderSet& p, double rho) {
    return affine_from_gains(p.stream_gains_sq, rho);
}

namespace {

double loss_from_gains(const MatrixXcd& composite, const VectorXd& gains_sq) {
    double offset = 0.0;
    for (Eigen::Index i = 0; i < gains_sq.size(); ++i) {
        offset += std::log2(gains_sq(i));
    }
    return log_det_hermitian_bits(hermitianized_gram(composite)) - offset;
}

} // namespace

double loss_dpc_zf(const MatrixXcd& composite, const PrecoderSet& zf) {
    return loss_from_gains(composite, zf.stream_gains_sq);
}

double loss_dpc_bd(const MatrixXcd& composite, const PrecoderSet& bd) {
    // product of |G_l^H G_l| equals the product of all stored eigenvalues
    return loss_from_gains(composite, bd.stream_gains_sq);
}

CapacityReport capacity_report(const ChannelRealization& chan, double rho,
                               const DpcOptions& opts) {
    CapacityReport rep;
    const PrecoderSet zf = zf_precoder(chan.H, chan.rx_per_user);
    const PrecoderSet bd = bd_precoder(chan.user_blocks());
    rep.c_dpc = dpc_sum_capacity(chan.H, chan.rx_per_user, rho, opts);
    rep.c_zf = zf_sum_capacity(zf, rho);
    rep.c_bd = bd_sum_capacity(bd, rho);
    rep.affine_dpc = dpc_affine(chan.H, rho);
    rep.affine_zf = zf_affine(zf, rho);
    rep.affine_bd = bd_affine(bd, rho);
    rep.loss_dpc_zf = loss_dpc_zf(chan.H, zf);
    rep.loss_dpc_bd = loss_dpc_bd(chan.H, bd);
    return rep;
}

} // namespace mucap
