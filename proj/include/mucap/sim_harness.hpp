#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mucap/capacity_metrics.hpp"
#include "mucap/channel_model.hpp"
#include "mucap/types.hpp"

namespace mucap {

enum class Metric {
    c_dpc,
    c_zf,
    c_bd,
    loss_mc,          // asymptotic DPC-vs-linear loss (ZF at N=1, BD at N>1)
    loss_analytic,    // closed-form expected DPC-ZF loss (N=1 only)
    weighted_gap,     // exact minus weight-proportional weighted capacity
    condition_number_db,
};

const char* metric_name(Metric m);
std::optional<Metric> metric_from_name(const std::string& name);
bool metric_is_per_snr(Metric m);

// One Monte Carlo ensemble: a system shape, K-factor law(s), and requested
// outputs. `kappa_laws` holds one shared law or L per-user laws.
struct CaseSpec {
    std::string label;
    SystemConfig config;
    std::vector<KappaLaw> kappa_laws;
    VectorXd weights;  // descending mu, required only for weighted_gap
    std::vector<Metric> outputs;
    long trials = 2000;

    void require_valid() const;  // throws ExperimentError
};

struct Experiment {
    std::string name;
    std::vector<CaseSpec> cases;
};

struct ResultRow {
    std::string experiment;  // "<name>.<case label>"
    double snr_db = 0.0;
    std::string metric;
    double mean = 0.0;
    double ci95 = 0.0;
    long trials = 0;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides config.seed
    std::optional<long> trials;
    int workers = 1;
    DpcOptions dpc;
    double max_failure_fraction = 0.01;
};

// Raw per-trial samples of one case; column j of a per-SNR metric is the
// j-th grid point, SNR-free metrics have a single column. Failed trials are
// excluded everywhere and listed in `failed`.
struct CaseSamples {
    std::vector<Metric> metrics;
    std::map<Metric, MatrixXd> samples;   // rows = successful trials
    std::vector<long> failed;             // trial indices
    std::vector<std::string> failure_messages;
    long trials_requested = 0;
};

CaseSamples run_case(const Experiment& parent, const CaseSpec& spec,
                     const RunOptions& opts);

// Deterministic for a fixed seed at any worker count: trials use disjoint
// counter-based substreams and the reduction runs in trial order.
std::vector<ResultRow> run_experiment(const Experiment& exp,
                                      const RunOptions& opts);

std::vector<Experiment> builtin_experiments();

// mean +/- half-width of a sample set (normal approximation)
struct MeanCi {
    double mean = 0.0;
    double ci95 = 0.0;
    long n = 0;
};
MeanCi mean_ci(const VectorXd& samples);

} // namespace mucap
