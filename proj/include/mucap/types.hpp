#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mucap {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Base-station / user-population geometry and operating grid. Antenna counts
// follow the usual broadcast-channel convention: bs_antennas transmit
// elements serving num_users terminals with rx_per_user antennas each.
struct SystemConfig {
    int bs_antennas = 0;            // M
    int num_users = 0;              // L
    int rx_per_user = 1;            // N
    double d_over_lambda = 0.5;     // ULA element spacing in wavelengths
    std::vector<double> snr_grid_db;
    double cell_radius_m = 100.0;   // geometry metadata only; no path loss
    std::uint64_t seed = 0;

    int total_streams() const { return num_users * rx_per_user; }

    // Returns human-readable invariant violations (empty when valid).
    std::vector<std::string> violations() const;
    void require_valid() const;  // throws ConfigError on violations
};

struct UserProfile {
    double kappa_db = 0.0;   // Ricean K-factor, dB
    double aod_rad = 0.0;    // LOS departure angle
    double aoa_rad = 0.0;    // LOS arrival angle (used when rx_per_user > 1)
    double weight = 0.0;     // mu_l, weighted-capacity mode only

    double kappa_linear() const { return std::pow(10.0, kappa_db / 10.0); }
};

// One draw of the composite small-scale fading channel. Rows are grouped per
// user: user l owns rows [l*rx_per_user, (l+1)*rx_per_user).
struct ChannelRealization {
    MatrixXcd H;        // (L*N) x M composite channel
    MatrixXcd H_los;    // same shape, deterministic LOS mean component
    int rx_per_user = 1;

    int num_users() const { return static_cast<int>(H.rows()) / rx_per_user; }
    auto user_block(int l) const { return H.middleRows(l * rx_per_user, rx_per_user); }
    auto los_block(int l) const { return H_los.middleRows(l * rx_per_user, rx_per_user); }
    std::vector<MatrixXcd> user_blocks() const;
};

// A capacity-loss value plus how it was obtained.
struct LossEstimate {
    enum class Method { monte_carlo, analytic };
    double value_bits = 0.0;
    Method method = Method::analytic;
    double half_width_95 = 0.0;  // 0 for analytic values
    long trials_used = 0;
};

} // namespace mucap
