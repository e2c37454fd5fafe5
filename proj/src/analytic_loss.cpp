#include "mucap/analytic_loss.hpp"

#include <cmath>

#include "mucap/channel_model.hpp"
#include "mucap/errors.hpp"
#include "mucap/special_math.hpp"

namespace mucap {

namespace {
constexpr double kLn2 = 0.69314718055994530941723212;
}

WishartSpec WishartSpec::from_profiles(const SystemConfig& config,
                                       const std::vector<UserProfile>& profiles) {
    config.require_valid();
    if (profiles.size() != static_cast<size_t>(config.num_users)) {
        throw DomainError("WishartSpec: profiles length must equal L");
    }
    const int N = config.rx_per_user;
    const int rows = config.total_streams();
    WishartSpec spec;
    spec.bs_antennas = config.bs_antennas;
    spec.rx_per_user = N;
    spec.kappa_rows.resize(rows);
    MatrixXcd los(rows, config.bs_antennas);
    for (int l = 0; l < config.num_users; ++l) {
        los.middleRows(l * N, N) = los_steering_matrix(
            profiles[l], config.bs_antennas, N, config.d_over_lambda);
        spec.kappa_rows.segment(l * N, N).setConstant(profiles[l].kappa_linear());
    }
    MatrixXcd g = los * los.adjoint();
    spec.los_gram = 0.5 * (g + g.adjoint().eval());
    return spec;
}

MatrixXcd sigma_hat(const VectorXd& kappa_diag, const MatrixXcd& los_gram,
                    int bs_antennas) {
    const Eigen::Index n = kappa_diag.size();
    if (los_gram.rows() != n || los_gram.cols() != n) {
        throw DomainError("sigma_hat: kappa and LOS Gram dimensions disagree");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (kappa_diag(i) < 0.0) {
            throw DomainError("sigma_hat: K-factors must be >= 0");
        }
    }
    const VectorXd shrink =
        (kappa_diag.array() / (kappa_diag.array() + 1.0)).sqrt().matrix();
    MatrixXcd out = shrink.asDiagonal() * los_gram * shrink.asDiagonal();
    out /= static_cast<double>(bs_antennas);
    out += (kappa_diag.array() + 1.0).inverse().matrix().asDiagonal();
    return 0.5 * (out + out.adjoint().eval());
}

double expected_logdet_noncentral_bits(const WishartSpec& spec, EigSource source) {
    const int rows = spec.num_rows();
    if (rows < 1) {
        throw DomainError("expected_logdet_noncentral_bits: empty spec");
    }
    VectorXd lams;
    double cov_term = 0.0;
    if (source == EigSource::literal) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(spec.los_gram,
                                                    Eigen::EigenvaluesOnly);
        lams = es.eigenvalues();
    } else {
        const VectorXd scale = spec.kappa_rows.cwiseSqrt();
        MatrixXcd m = scale.asDiagonal() * spec.los_gram * scale.asDiagonal();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (m + m.adjoint().eval()),
                                                    Eigen::EigenvaluesOnly);
        lams = es.eigenvalues();
        for (int r = 0; r < rows; ++r) {
            cov_term -= std::log2(1.0 + spec.kappa_rows(r));
        }
    }
    const double floor = 1e-9 * std::max(1.0, lams.cwiseAbs().maxCoeff());
    double sum = cov_term;
    for (Eigen::Index i = 0; i < lams.size(); ++i) {
        if (lams(i) <= floor) {
            throw DomainError(
                "expected_logdet_noncentral_bits: zero noncentral eigenvalue; "
                "use the central Wishart mean for Rayleigh rows");
        }
        sum += delta_m(lams(i), spec.bs_antennas);
    }
    return sum;
}

double expected_log_inv_gamma_bits(const WishartSpec& spec, GammaBracket bracket) {
    const int rows = spec.num_rows();
    const int m = spec.bs_antennas;
    if (rows < 1) {
        throw DomainError("expected_log_inv_gamma_bits: empty spec");
    }
    if (m <= rows) {
        throw DomainError("expected_log_inv_gamma_bits: requires M > L*N");
    }
    const MatrixXcd sh = sigma_hat(spec.kappa_rows, spec.los_gram, m);
    const MatrixXcd inv = sh.llt().solve(MatrixXcd::Identity(rows, rows));
    double sum = 0.0;
    for (int r = 0; r < rows; ++r) {
        const double d = inv(r, r).real();
        if (!(d > 0.0)) {
            throw SingularMatrixError("expected_log_inv_gamma_bits: SigmaHat "
                                      "not positive definite", d);
        }
        if (bracket == GammaBracket::literal) {
            sum += std::log2(d / static_cast<double>(m - rows));
        } else {
            sum += std::log2(d) - digamma(static_cast<double>(m - rows + 1)) / kLn2;
        }
    }
    return sum;
}

LossEstimate expected_loss_dpc_zf_analytic(const WishartSpec& spec,
                                           EigSource source,
                                           GammaBracket bracket) {
    LossEstimate est;
    est.method = LossEstimate::Method::analytic;
    est.half_width_95 = 0.0;
    est.trials_used = 0;
    const int rows = spec.num_rows();
    if (rows == 0) {
        est.value_bits = 0.0;  // empty system loses nothing
        return est;
    }
    const bool all_rayleigh = (spec.kappa_rows.array() == 0.0).all();
    double logdet;
    if (all_rayleigh) {
        logdet = central_wishart_logdet_mean_bits(spec.bs_antennas, rows);
        const int m = spec.bs_antennas;
        if (m <= rows) {
            throw DomainError("expected_loss_dpc_zf_analytic: requires M > L*N");
        }
        double bracket_sum;
        if (bracket == GammaBracket::literal) {
            bracket_sum = -rows * std::log2(static_cast<double>(m - rows));
        } else {
            bracket_sum = -rows * digamma(static_cast<double>(m - rows + 1)) / kLn2;
        }
        est.value_bits = logdet + bracket_sum;
        return est;
    }
    logdet = expected_logdet_noncentral_bits(spec, source);
    est.value_bits = logdet + expected_log_inv_gamma_bits(spec, bracket);
    return est;
}

} // namespace mucap
