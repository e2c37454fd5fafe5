#include "mucap/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mucap/analytic_loss.hpp"
#include "mucap/errors.hpp"
#include "mucap/precoding.hpp"
#include "mucap/weighted_capacity.hpp"

namespace mucap {

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::c_dpc: return "c_dpc";
        case Metric::c_zf: return "c_zf";
        case Metric::c_bd: return "c_bd";
        case Metric::loss_mc: return "loss_mc";
        case Metric::loss_analytic: return "loss_analytic";
        case Metric::weighted_gap: return "weighted_gap";
        case Metric::condition_number_db: return "condition_number_db";
    }
    return "?";
}

std::optional<Metric> metric_from_name(const std::string& name) {
    for (Metric m : {Metric::c_dpc, Metric::c_zf, Metric::c_bd, Metric::loss_mc,
                     Metric::loss_analytic, Metric::weighted_gap,
                     Metric::condition_number_db}) {
        if (name == metric_name(m)) return m;
    }
    return std::nullopt;
}

bool metric_is_per_snr(Metric m) {
    switch (m) {
        case Metric::c_dpc:
        case Metric::c_zf:
        case Metric::c_bd:
        case Metric::weighted_gap:
            return true;
        default:
            return false;
    }
}

void CaseSpec::require_valid() const {
    config.require_valid();
    if (trials < 1) {
        throw ExperimentError("case '" + label + "': trials must be >= 1");
    }
    if (outputs.empty()) {
        throw ExperimentError("case '" + label + "': no output metrics");
    }
    if (kappa_laws.size() != 1 &&
        kappa_laws.size() != static_cast<size_t>(config.num_users)) {
        throw ExperimentError("case '" + label +
                              "': need one shared K-factor law or one per user");
    }
    for (Metric m : outputs) {
        if (m == Metric::loss_analytic && config.rx_per_user != 1) {
            throw ExperimentError("case '" + label +
                                  "': loss_analytic requires N = 1");
        }
        if (m == Metric::weighted_gap) {
            if (config.rx_per_user != 1) {
                throw ExperimentError("case '" + label +
                                      "': weighted_gap requires N = 1");
            }
            if (weights.size() != config.num_users) {
                throw ExperimentError("case '" + label +
                                      "': weighted_gap needs L weights");
            }
            for (Eigen::Index l = 0; l + 1 < weights.size(); ++l) {
                if (weights(l) < weights(l + 1)) {
                    throw ExperimentError("case '" + label +
                                          "': weights must be descending");
                }
            }
            if (std::abs(weights.sum() - 1.0) > 1e-12) {
                throw ExperimentError("case '" + label +
                                      "': weights must sum to 1");
            }
        }
    }
}

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct TrialOutput {
    bool failed = false;
    std::string message;
    std::map<Metric, VectorXd> values;
};

TrialOutput compute_trial(const CaseSpec& spec, std::uint64_t seed,
                          std::uint64_t case_key, long trial,
                          const DpcOptions& dpc_opts) {
    TrialOutput out;
    try {
        const SystemConfig& cfg = spec.config;
        const int snr_points = static_cast<int>(cfg.snr_grid_db.size());
        TrialRng rng = TrialRng::for_trial(seed, case_key, trial);
        const auto profiles =
            draw_user_profiles(cfg, spec.kappa_laws, rng, spec.weights);
        const ChannelRealization chan = draw_channel(cfg, profiles, rng);

        auto wants = [&spec](Metric m) {
            return std::find(spec.outputs.begin(), spec.outputs.end(), m) !=
                   spec.outputs.end();
        };

        std::optional<PrecoderSet> zf;
        std::optional<PrecoderSet> bd;
        const bool single_antenna = cfg.rx_per_user == 1;
        if (wants(Metric::c_zf) || (wants(Metric::loss_mc) && single_antenna)) {
            zf = zf_precoder(chan.H, cfg.rx_per_user);
        }
        if (wants(Metric::c_bd) || (wants(Metric::loss_mc) && !single_antenna)) {
            bd = bd_precoder(chan.user_blocks());
        }

        if (wants(Metric::c_dpc)) {
            DpcSolver solver(chan.H, cfg.rx_per_user, dpc_opts);
            VectorXd v(snr_points);
            for (int i = 0; i < snr_points; ++i) {
                v(i) = solver.solve(std::pow(10.0, cfg.snr_grid_db[i] / 10.0));
            }
            out.values[Metric::c_dpc] = v;
        }
        if (wants(Metric::c_zf)) {
            VectorXd v(snr_points);
            for (int i = 0; i < snr_points; ++i) {
                v(i) = zf_sum_capacity(*zf, std::pow(10.0, cfg.snr_grid_db[i] / 10.0));
            }
            out.values[Metric::c_zf] = v;
        }
        if (wants(Metric::c_bd)) {
            VectorXd v(snr_points);
            for (int i = 0; i < snr_points; ++i) {
                v(i) = bd_sum_capacity(*bd, std::pow(10.0, cfg.snr_grid_db[i] / 10.0));
            }
            out.values[Metric::c_bd] = v;
        }
        if (wants(Metric::loss_mc)) {
            VectorXd v(1);
            v(0) = single_antenna ? loss_dpc_zf(chan.H, *zf)
                                  : loss_dpc_bd(chan.H, *bd);
            out.values[Metric::loss_mc] = v;
        }
        if (wants(Metric::loss_analytic)) {
            const WishartSpec wish = WishartSpec::from_profiles(cfg, profiles);
            VectorXd v(1);
            v(0) = expected_loss_dpc_zf_analytic(wish).value_bits;
            out.values[Metric::loss_analytic] = v;
        }
        if (wants(Metric::weighted_gap)) {
            VectorXd v(snr_points);
            for (int i = 0; i < snr_points; ++i) {
                const double rho = std::pow(10.0, cfg.snr_grid_db[i] / 10.0);
                WeightedInstance inst{chan.H, spec.weights, rho};
                const double exact = weighted_dpc_exact(inst).value_bits;
                const double asym = weighted_dpc_objective(
                    chan.H, spec.weights,
                    asymptotic_allocation(spec.weights, rho));
                v(i) = exact - asym;
            }
            out.values[Metric::weighted_gap] = v;
        }
        if (wants(Metric::condition_number_db)) {
            MatrixXcd gram = chan.H * chan.H.adjoint();
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
                0.5 * (gram + gram.adjoint().eval()), Eigen::EigenvaluesOnly);
            VectorXd v(1);
            v(0) = 10.0 * std::log10(es.eigenvalues().maxCoeff() /
                                     es.eigenvalues().minCoeff());
            out.values[Metric::condition_number_db] = v;
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.message = e.what();
        out.values.clear();
    }
    return out;
}

} // namespace

MeanCi mean_ci(const VectorXd& samples) {
    MeanCi r;
    r.n = samples.size();
    if (r.n == 0) return r;
    // compensated two-pass mean/variance so the reduction is exactly
    // reproducible for a fixed sample order
    double sum = 0.0, comp = 0.0;
    for (Eigen::Index i = 0; i < samples.size(); ++i) {
        const double y = samples(i) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    r.mean = sum / static_cast<double>(r.n);
    if (r.n >= 2) {
        double ss = 0.0;
        comp = 0.0;
        for (Eigen::Index i = 0; i < samples.size(); ++i) {
            const double d = samples(i) - r.mean;
            const double y = d * d - comp;
            const double t = ss + y;
            comp = (t - ss) - y;
            ss = t;
        }
        const double sd = std::sqrt(ss / static_cast<double>(r.n - 1));
        r.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(r.n));
    }
    return r;
}

CaseSamples run_case(const Experiment& parent, const CaseSpec& spec,
                     const RunOptions& opts) {
    CaseSpec resolved = spec;
    if (opts.trials) resolved.trials = *opts.trials;
    resolved.require_valid();
    const std::uint64_t seed = opts.seed.value_or(resolved.config.seed);
    const std::uint64_t case_key = fnv1a64(parent.name + "." + resolved.label);
    const long trials = resolved.trials;

    std::vector<TrialOutput> outputs(trials);
    const int workers = std::max(1, opts.workers);
    if (workers == 1) {
        for (long t = 0; t < trials; ++t) {
            outputs[t] = compute_trial(resolved, seed, case_key, t, opts.dpc);
        }
    } else {
        std::atomic<long> next{0};
        auto worker = [&]() {
            for (;;) {
                const long t = next.fetch_add(1);
                if (t >= trials) return;
                outputs[t] = compute_trial(resolved, seed, case_key, t, opts.dpc);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    CaseSamples result;
    result.metrics = resolved.outputs;
    result.trials_requested = trials;
    for (long t = 0; t < trials; ++t) {
        if (outputs[t].failed) {
            result.failed.push_back(t);
            result.failure_messages.push_back(outputs[t].message);
        }
    }
    const long ok = trials - static_cast<long>(result.failed.size());
    if (static_cast<double>(result.failed.size()) >
        opts.max_failure_fraction * static_cast<double>(trials)) {
        throw ExperimentError(
            "case '" + resolved.label + "': " +
            std::to_string(result.failed.size()) + "/" + std::to_string(trials) +
            " trials failed (first: " +
            (result.failure_messages.empty() ? "" : result.failure_messages[0]) +
            ")");
    }
    for (Metric m : resolved.outputs) {
        const int cols = metric_is_per_snr(m)
                             ? static_cast<int>(resolved.config.snr_grid_db.size())
                             : 1;
        MatrixXd mat(ok, cols);
        long r = 0;
        for (long t = 0; t < trials; ++t) {
            if (outputs[t].failed) continue;
            mat.row(r++) = outputs[t].values[m].transpose();
        }
        result.samples[m] = std::move(mat);
    }
    return result;
}

std::vector<ResultRow> run_experiment(const Experiment& exp,
                                      const RunOptions& opts) {
    std::vector<ResultRow> rows;
    for (const CaseSpec& spec : exp.cases) {
        const CaseSamples samples = run_case(exp, spec, opts);
        const auto& grid = spec.config.snr_grid_db;
        for (Metric m : samples.metrics) {
            const MatrixXd& mat = samples.samples.at(m);
            for (size_t gi = 0; gi < grid.size(); ++gi) {
                const Eigen::Index col =
                    metric_is_per_snr(m) ? static_cast<Eigen::Index>(gi) : 0;
                const MeanCi mc = mean_ci(mat.col(col));
                rows.push_back(ResultRow{exp.name + "." + spec.label, grid[gi],
                                         metric_name(m), mc.mean, mc.ci95,
                                         mc.n});
            }
        }
    }
    return rows;
}

namespace {

SystemConfig base_config(int m, int l, int n, std::vector<double> grid) {
    SystemConfig cfg;
    cfg.bs_antennas = m;
    cfg.num_users = l;
    cfg.rx_per_user = n;
    cfg.d_over_lambda = 0.5;  // half-wavelength ULA (3.7 GHz, 8.1 cm carrier)
    cfg.cell_radius_m = 100.0;
    cfg.seed = 0;
    cfg.snr_grid_db = std::move(grid);
    return cfg;
}

const std::vector<double> kWideGrid = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
const std::vector<double> kWeightedGrid = {0, 5, 10, 15, 20, 25, 30};

} // namespace

std::vector<Experiment> builtin_experiments() {
    std::vector<Experiment> out;

    {
        // expected sum capacity vs SNR under Rayleigh / low-K / high-K
        Experiment fig1{"fig1", {}};
        struct Sub {
            const char* tag;
            KappaLaw law;
        };
        const Sub subs[] = {
            {"rayleigh", KappaLaw::fixed(-std::numeric_limits<double>::infinity())},
            {"k1db", KappaLaw::fixed(1.0)},
            {"k20db", KappaLaw::fixed(20.0)},
        };
        for (const Sub& s : subs) {
            CaseSpec n1;
            n1.label = std::string(s.tag) + ".n1";
            n1.config = base_config(64, 8, 1, kWideGrid);
            n1.kappa_laws = {s.law};
            n1.outputs = {Metric::c_dpc, Metric::c_zf, Metric::condition_number_db};
            fig1.cases.push_back(n1);

            CaseSpec n2;
            n2.label = std::string(s.tag) + ".n2";
            n2.config = base_config(64, 4, 2, kWideGrid);
            n2.kappa_laws = {s.law};
            n2.outputs = {Metric::c_dpc, Metric::c_bd};
            fig1.cases.push_back(n2);
        }
        out.push_back(std::move(fig1));
    }

    {
        // per-user lognormal K-factors, M = 64 vs M = 32
        Experiment fig2{"fig2", {}};
        for (int m : {64, 32}) {
            CaseSpec n1;
            n1.label = "m" + std::to_string(m) + ".n1";
            n1.config = base_config(m, 8, 1, kWideGrid);
            n1.kappa_laws = {KappaLaw::lognormal(9.0, 5.0)};
            n1.outputs = {Metric::c_dpc, Metric::c_zf};
            fig2.cases.push_back(n1);

            CaseSpec n2;
            n2.label = "m" + std::to_string(m) + ".n2";
            n2.config = base_config(m, 4, 2, kWideGrid);
            n2.kappa_laws = {KappaLaw::lognormal(9.0, 5.0)};
            n2.outputs = {Metric::c_dpc, Metric::c_bd};
            fig2.cases.push_back(n2);
        }
        out.push_back(std::move(fig2));
    }

    {
        // expected loss: Monte Carlo vs closed form (ZF), Monte Carlo (BD)
        Experiment fig3{"fig3", {}};
        CaseSpec n1;
        n1.label = "n1";
        n1.config = base_config(64, 8, 1, kWideGrid);
        n1.kappa_laws = {KappaLaw::lognormal(9.0, 5.0)};
        n1.outputs = {Metric::loss_mc, Metric::loss_analytic};
        fig3.cases.push_back(n1);

        CaseSpec n2;
        n2.label = "n2";
        n2.config = base_config(64, 4, 2, kWideGrid);
        n2.kappa_laws = {KappaLaw::lognormal(9.0, 5.0)};
        n2.outputs = {Metric::loss_mc};
        fig3.cases.push_back(n2);
        out.push_back(std::move(fig3));
    }

    {
        // weighted-capacity gap on three fixed realizations
        Experiment fig4{"fig4", {}};
        for (int r = 1; r <= 3; ++r) {
            CaseSpec c;
            c.label = "chan" + std::to_string(r);
            c.config = base_config(32, 2, 1, kWeightedGrid);
            c.kappa_laws = {KappaLaw::fixed(9.0), KappaLaw::lognormal(9.0, 5.0)};
            c.weights = VectorXd(2);
            c.weights << 0.6, 0.4;
            c.outputs = {Metric::weighted_gap};
            c.trials = 1;
            fig4.cases.push_back(c);
        }
        out.push_back(std::move(fig4));
    }

    return out;
}

} // namespace mucap
