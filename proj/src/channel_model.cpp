#include "mucap/channel_model.hpp"

#include <cmath>

#include "mucap/errors.hpp"

namespace mucap {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<std::string> SystemConfig::violations() const {
    std::vector<std::string> v;
    if (num_users < 1 || rx_per_user < 1) {
        v.push_back("L >= 1 and N >= 1 required");
    }
    if (bs_antennas < num_users * rx_per_user) {
        v.push_back("M >= L*N required (M=" + std::to_string(bs_antennas) +
                    ", L*N=" + std::to_string(num_users * rx_per_user) + ")");
    }
    if (!(d_over_lambda > 0.0)) {
        v.push_back("d_over_lambda must be > 0");
    }
    if (snr_grid_db.empty()) {
        v.push_back("snr_grid_db must be non-empty");
    }
    if (!(cell_radius_m > 0.0)) {
        v.push_back("cell_radius_m must be > 0");
    }
    return v;
}

void SystemConfig::require_valid() const {
    auto v = violations();
    if (!v.empty()) {
        std::string msg = "invalid SystemConfig:";
        for (const auto& s : v) msg += " [" + s + "]";
        throw ConfigError(msg, std::move(v));
    }
}

std::vector<MatrixXcd> ChannelRealization::user_blocks() const {
    std::vector<MatrixXcd> out;
    out.reserve(num_users());
    for (int l = 0; l < num_users(); ++l) out.emplace_back(user_block(l));
    return out;
}

KappaLaw KappaLaw::fixed(double db) {
    KappaLaw law;
    law.kind = Kind::fixed;
    law.fixed_db = db;
    return law;
}

KappaLaw KappaLaw::lognormal(double mean_db, double var_db) {
    if (var_db < 0.0) {
        throw DomainError("KappaLaw::lognormal: variance must be >= 0");
    }
    KappaLaw law;
    law.kind = Kind::lognormal;
    law.mean_db = mean_db;
    law.var_db = var_db;
    return law;
}

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial_stream)
    : seed_(seed), trial_stream_(trial_stream) {}

TrialRng TrialRng::for_trial(std::uint64_t seed, std::uint64_t case_key,
                             std::uint64_t trial_index) {
    return TrialRng(seed, simd::mix64(simd::mix64(case_key) + trial_index));
}

void TrialRng::normals(Draw d, double* out, std::size_t n) {
    const int idx = static_cast<int>(d);
    const simd::StreamKey key{seed_,
                              simd::mix64(trial_stream_ + static_cast<std::uint64_t>(idx))};
    simd::normal_fill(key, cursor_[idx], n, out);
    cursor_[idx] += simd::blocks_for_pairs(n);
}

void TrialRng::uniforms(Draw d, double* out, std::size_t n) {
    const int idx = static_cast<int>(d);
    const simd::StreamKey key{seed_,
                              simd::mix64(trial_stream_ + static_cast<std::uint64_t>(idx))};
    simd::uniform_fill(key, cursor_[idx], n, out);
    cursor_[idx] += simd::blocks_for_pairs(n);
}

double TrialRng::uniform(Draw d) {
    double x;
    uniforms(d, &x, 1);
    return x;
}

double TrialRng::normal(Draw d) {
    double x;
    normals(d, &x, 1);
    return x;
}

MatrixXcd los_steering_matrix(const UserProfile& profile, int bs_antennas,
                              int rx_per_user, double d_over_lambda) {
    if (bs_antennas < 1 || rx_per_user < 1) {
        throw DomainError("los_steering_matrix: antenna counts must be >= 1");
    }
    const double ctx = -kTwoPi * d_over_lambda * std::sin(profile.aod_rad);
    const double crx = -kTwoPi * d_over_lambda * std::sin(profile.aoa_rad);
    std::vector<double> phase(std::max(bs_antennas, rx_per_user));
    std::vector<double> s(phase.size()), c(phase.size());

    for (int m = 0; m < bs_antennas; ++m) phase[m] = ctx * m;
    simd::sincos_fill(phase.data(), bs_antennas, s.data(), c.data());
    VectorXcd a_tx(bs_antennas);
    for (int m = 0; m < bs_antennas; ++m) a_tx[m] = Complex(c[m], s[m]);

    for (int n = 0; n < rx_per_user; ++n) phase[n] = crx * n;
    simd::sincos_fill(phase.data(), rx_per_user, s.data(), c.data());
    VectorXcd a_rx(rx_per_user);
    for (int n = 0; n < rx_per_user; ++n) a_rx[n] = Complex(c[n], s[n]);

    return a_rx * a_tx.adjoint();
}

std::vector<UserProfile> draw_user_profiles(const SystemConfig& config,
                                            const std::vector<KappaLaw>& laws,
                                            TrialRng& rng,
                                            const VectorXd& weights) {
    config.require_valid();
    const int L = config.num_users;
    if (laws.empty() || (laws.size() != 1 && laws.size() != static_cast<size_t>(L))) {
        throw DomainError("draw_user_profiles: need 1 shared law or L per-user laws");
    }
    if (weights.size() != 0 && weights.size() != L) {
        throw DomainError("draw_user_profiles: weights must have length L");
    }

    std::vector<double> gauss(L), u_aod(L), u_aoa(L);
    rng.normals(TrialRng::Draw::kappa, gauss.data(), L);
    rng.uniforms(TrialRng::Draw::aod, u_aod.data(), L);
    rng.uniforms(TrialRng::Draw::aoa, u_aoa.data(), L);

    std::vector<UserProfile> profiles(L);
    for (int l = 0; l < L; ++l) {
        const KappaLaw& law = laws.size() == 1 ? laws[0] : laws[l];
        UserProfile& p = profiles[l];
        if (law.kind == KappaLaw::Kind::fixed) {
            p.kappa_db = law.fixed_db;
        } else {
            p.kappa_db = law.mean_db + std::sqrt(law.var_db) * gauss[l];
        }
        p.aod_rad = kTwoPi * u_aod[l];
        p.aoa_rad = kTwoPi * u_aoa[l];
        p.weight = weights.size() == L ? weights[l] : 1.0 / L;
    }
    return profiles;
}

ChannelRealization draw_channel(const SystemConfig& config,
                                const std::vector<UserProfile>& profiles,
                                TrialRng& rng) {
    config.require_valid();
    const int L = config.num_users;
    const int N = config.rx_per_user;
    const int M = config.bs_antennas;
    if (profiles.size() != static_cast<size_t>(L)) {
        throw DomainError("draw_channel: profiles length must equal L");
    }

    ChannelRealization chan;
    chan.rx_per_user = N;
    chan.H.resize(L * N, M);
    chan.H_los.resize(L * N, M);

    // One fill for the whole stochastic part; entries consumed user-major,
    // row-major, re/im interleaved.
    std::vector<double> z(static_cast<size_t>(L) * N * M * 2);
    rng.normals(TrialRng::Draw::fading, z.data(), z.size());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    size_t zi = 0;
    for (int l = 0; l < L; ++l) {
        const double kap = profiles[l].kappa_linear();
        const double los_amp = std::sqrt(kap / (kap + 1.0));
        const double nlos_amp = std::sqrt(1.0 / (1.0 + kap));
        const MatrixXcd hbar = los_steering_matrix(profiles[l], M, N, config.d_over_lambda);
        chan.H_los.middleRows(l * N, N) = hbar;
        for (int n = 0; n < N; ++n) {
            for (int m = 0; m < M; ++m) {
                const Complex tilde(z[zi] * inv_sqrt2, z[zi + 1] * inv_sqrt2);
                zi += 2;
                chan.H(l * N + n, m) = los_amp * hbar(n, m) + nlos_amp * tilde;
            }
        }
    }
    return chan;
}

} // namespace mucap
