#pragma once

#include <cstdint>
#include <vector>

#include "mucap/simd/kernels.hpp"
#include "mucap/types.hpp"

namespace mucap {

// Ricean K-factor draw law. "lognormal" is Gaussian in the dB domain
// (mean_db, var_db in dB^2), converted to linear before use.
struct KappaLaw {
    enum class Kind { fixed, lognormal };
    Kind kind = Kind::fixed;
    double fixed_db = 0.0;
    double mean_db = 0.0;
    double var_db = 0.0;

    static KappaLaw fixed(double db);
    static KappaLaw lognormal(double mean_db, double var_db);  // throws on var < 0
};

// Deterministic per-trial randomness: counter-based substreams keyed by
// (seed, trial stream), one independent substream per draw purpose. Trials
// can therefore run on any worker in any order and reproduce bit-identically.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t trial_stream);
    static TrialRng for_trial(std::uint64_t seed, std::uint64_t case_key,
                              std::uint64_t trial_index);

    enum class Draw : std::uint32_t { kappa = 0, aod, aoa, fading, misc, count_ };

    void normals(Draw d, double* out, std::size_t n);
    void uniforms(Draw d, double* out, std::size_t n);
    double uniform(Draw d);
    double normal(Draw d);

private:
    std::uint64_t seed_;
    std::uint64_t trial_stream_;
    std::uint64_t cursor_[static_cast<int>(Draw::count_)] = {};
};

// Rank-one LOS block: receive steering (arrival angle) times the conjugated
// transmit steering (departure angle); every entry has unit modulus.
MatrixXcd los_steering_matrix(const UserProfile& profile, int bs_antennas,
                              int rx_per_user, double d_over_lambda);

// L user profiles: K-factors from `laws` (one shared law or one per user),
// LOS angles i.i.d. uniform on [0, 2pi), weights uniform 1/L unless
// `weights` supplies mu (must then have length L).
std::vector<UserProfile> draw_user_profiles(const SystemConfig& config,
                                            const std::vector<KappaLaw>& laws,
                                            TrialRng& rng,
                                            const VectorXd& weights = VectorXd());

ChannelRealization draw_channel(const SystemConfig& config,
                                const std::vector<UserProfile>& profiles,
                                TrialRng& rng);

} // namespace mucap
