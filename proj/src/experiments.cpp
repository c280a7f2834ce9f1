#include "relaysim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace relaysim::experiments {

namespace {

constexpr int kMaxRedrawAttempts = 64;
constexpr double kMaxRedrawFraction = 1e-3;

struct PointParams {
    double source_power;
    double relay_power;
    double interference_power;
    int num_relays;
    int num_interferers;
};

PointParams point_params(const SweepSpec& spec, double sweep_value) {
    PointParams p{spec.fixed.source_power, spec.fixed.relay_power,
                  spec.fixed.interference_power, spec.fixed.num_relays,
                  spec.fixed.num_interferers};
    switch (spec.variable) {
        case SweepVariable::RelayPower: p.relay_power = db_to_linear(sweep_value); break;
        case SweepVariable::SourcePower: p.source_power = db_to_linear(sweep_value); break;
        case SweepVariable::InterferencePower:
            p.interference_power = db_to_linear(sweep_value);
            break;
        case SweepVariable::NumRelays: p.num_relays = static_cast<int>(sweep_value); break;
    }
    return p;
}

struct TrialOutcome {
    std::vector<double> snr;   // per scheme, spec order
    std::vector<double> rate;
    int attempts = 1;
};

TrialOutcome run_trial(const PointParams& p, const std::vector<Scheme>& schemes,
                       std::uint64_t seed, std::uint64_t point_idx, std::uint64_t trial_idx) {
    TrialOutcome out;
    out.snr.resize(schemes.size());
    out.rate.resize(schemes.size());
    for (int attempt = 0; attempt < kMaxRedrawAttempts; ++attempt) {
        channel::RngStream rng(seed, channel::substream_id(point_idx, trial_idx, attempt));
        try {
            twohop::TwoHopNetwork net;
            net.source_power = p.source_power;
            net.relay_total_power = p.relay_power;
            net.f = channel::sample_cn01_vector(p.num_relays, rng);
            net.g = channel::sample_cn01_vector(p.num_relays, rng);
            const auto env = channel::sample_interference_env(p.num_relays, p.num_interferers,
                                                             p.interference_power, rng);
            net.noise_cov = channel::interference_covariance(env, 1.0, p.num_relays);
            for (std::size_t s = 0; s < schemes.size(); ++s) {
                const auto eval = twohop::evaluate_scheme(net, schemes[s]);
                out.snr[s] = eval.snr;
                out.rate[s] = eval.rate_bits;
            }
            out.attempts = attempt + 1;
            return out;
        } catch (const RelayError&) {
            continue;  // degenerate draw; redraw on a fresh substream
        }
    }
    throw RelayError("run_trial: exceeded redraw attempts");
}

int effective_workers(int workers, int trials) {
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
    }
    return std::clamp(workers, 1, std::max(1, trials));
}

// Evaluates all trials of one sweep point. Outcomes land in trial order so
// aggregation downstream is independent of the parallel schedule.
std::vector<TrialOutcome> run_point(const PointParams& p, const std::vector<Scheme>& schemes,
                                    std::uint64_t seed, std::uint64_t point_idx, int trials,
                                    int workers) {
    std::vector<TrialOutcome> outcomes(trials);
    workers = effective_workers(workers, trials);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int t = w; t < trials; t += workers) {
                    outcomes[t] = run_trial(p, schemes, seed, point_idx, t);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return outcomes;
}

long count_redraws(const std::vector<TrialOutcome>& outcomes) {
    long redraws = 0;
    for (const auto& o : outcomes) {
        redraws += o.attempts - 1;
    }
    return redraws;
}

void check_redraw_budget(long redraws, int trials) {
    if (redraws > kMaxRedrawFraction * trials) {
        std::ostringstream msg;
        msg << "sweep point unreliable: " << redraws << " of " << trials
            << " trials were redrawn";
        throw RelayError(msg.str());
    }
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

MeanStderr aggregate(const std::vector<double>& values) {
    MeanStderr out;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    out.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.stderr_of_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return out;
}

}  // namespace

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::RelayPower: return "relay_power";
        case SweepVariable::SourcePower: return "source_power";
        case SweepVariable::InterferencePower: return "interference_power";
        case SweepVariable::NumRelays: return "num_relays";
    }
    return "?";
}

SweepVariable sweep_variable_from_string(const std::string& name) {
    if (name == "relay_power") return SweepVariable::RelayPower;
    if (name == "source_power") return SweepVariable::SourcePower;
    if (name == "interference_power") return SweepVariable::InterferencePower;
    if (name == "num_relays") return SweepVariable::NumRelays;
    throw RelayError("unknown sweep variable: " + name);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void validate(const SweepSpec& spec) {
    if (spec.grid.empty()) {
        throw RelayError("sweep spec: grid must be nonempty");
    }
    if (!std::is_sorted(spec.grid.begin(), spec.grid.end()) ||
        std::adjacent_find(spec.grid.begin(), spec.grid.end()) != spec.grid.end()) {
        throw RelayError("sweep spec: grid must be strictly increasing");
    }
    if (spec.trials < 1) {
        throw RelayError("sweep spec: trials must be >= 1");
    }
    if (spec.schemes.empty()) {
        throw RelayError("sweep spec: scheme set must be nonempty");
    }
    if (spec.fixed.num_relays < 1 || spec.fixed.num_interferers < 0) {
        throw RelayError("sweep spec: invalid fixed parameters");
    }
    if (spec.variable == SweepVariable::NumRelays) {
        for (const double v : spec.grid) {
            if (v < 1.0 || v != std::floor(v)) {
                throw RelayError("sweep spec: relay-count grid must hold positive integers");
            }
        }
    }
}

SweepResult run_sweep(const SweepSpec& spec, int workers) {
    validate(spec);
    SweepResult result;
    result.variable = spec.variable;
    for (std::size_t pt = 0; pt < spec.grid.size(); ++pt) {
        const PointParams p = point_params(spec, spec.grid[pt]);
        const auto outcomes = run_point(p, spec.schemes, spec.seed, pt, spec.trials, workers);
        const long redraws = count_redraws(outcomes);
        check_redraw_budget(redraws, spec.trials);
        result.redraws_per_point.push_back(redraws);
        result.redrawn_trials += redraws;

        std::vector<double> snr(spec.trials), rate(spec.trials);
        for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
            for (int t = 0; t < spec.trials; ++t) {
                snr[t] = outcomes[t].snr[s];
                rate[t] = outcomes[t].rate[s];
            }
            const MeanStderr snr_stats = aggregate(snr);
            const MeanStderr rate_stats = aggregate(rate);
            SweepCell cell;
            cell.sweep_value = spec.grid[pt];
            cell.scheme = spec.schemes[s];
            cell.trials = spec.trials;
            cell.mean_snr = snr_stats.mean;
            cell.mean_rate_bits = rate_stats.mean;
            cell.stderr_rate = rate_stats.stderr_of_mean;
            result.cells.push_back(cell);
        }
    }
    return result;
}

bool OrderingReport::all_hold(double stderr_slack) const {
    for (const auto& point : points) {
        for (const auto& ineq : point.chain) {
            if (!ineq.holds(stderr_slack)) {
                return false;
            }
        }
    }
    return true;
}

OrderingReport verify_ordering(const SweepSpec& spec, int workers) {
    validate(spec);
    // The chain needs all four benchmark schemes regardless of what the
    // caller asked to sweep.
    SweepSpec chain_spec = spec;
    chain_spec.schemes = twohop::all_benchmark_schemes();
    const auto& schemes = chain_spec.schemes;

    OrderingReport report;
    for (std::size_t pt = 0; pt < chain_spec.grid.size(); ++pt) {
        const PointParams p = point_params(chain_spec, chain_spec.grid[pt]);
        const auto outcomes =
            run_point(p, schemes, chain_spec.seed, pt, chain_spec.trials, workers);
        check_redraw_budget(count_redraws(outcomes), chain_spec.trials);

        OrderingPointReport point;
        point.sweep_value = chain_spec.grid[pt];
        std::vector<double> diff(chain_spec.trials);
        for (std::size_t s = 0; s + 1 < schemes.size(); ++s) {
            for (int t = 0; t < chain_spec.trials; ++t) {
                diff[t] = outcomes[t].snr[s] - outcomes[t].snr[s + 1];
            }
            const MeanStderr stats = aggregate(diff);
            OrderingInequality ineq;
            ineq.better = schemes[s];
            ineq.worse = schemes[s + 1];
            ineq.mean_gap = stats.mean;
            ineq.stderr_gap = stats.stderr_of_mean;
            point.chain.push_back(ineq);
        }
        report.points.push_back(std::move(point));
    }
    return report;
}

SaturationReport interference_saturation(int num_relays, int num_interferers,
                                         double source_power, double relay_power,
                                         const std::vector<double>& pi_grid, int trials,
                                         std::uint64_t seed, int workers) {
    if (num_relays < 2) {
        throw RelayError("interference_saturation: needs at least two relays");
    }
    if (pi_grid.empty()) {
        throw RelayError("interference_saturation: empty interference grid");
    }
    const std::vector<Scheme> schemes = {Scheme::S11, Scheme::S00};
    SaturationReport report;
    report.pi_grid = pi_grid;
    for (std::size_t pt = 0; pt < pi_grid.size(); ++pt) {
        PointParams p{source_power, relay_power, pi_grid[pt], num_relays, num_interferers};
        const auto outcomes = run_point(p, schemes, seed, pt, trials, workers);
        check_redraw_budget(count_redraws(outcomes), trials);
        std::vector<double> r11(trials), r00(trials);
        for (int t = 0; t < trials; ++t) {
            r11[t] = outcomes[t].rate[0];
            r00[t] = outcomes[t].rate[1];
        }
        const MeanStderr s11 = aggregate(r11);
        const MeanStderr s00 = aggregate(r00);
        report.mean_rate_s11.push_back(s11.mean);
        report.mean_rate_s00.push_back(s00.mean);
        report.stderr_rate_s11.push_back(s11.stderr_of_mean);
        report.stderr_rate_s00.push_back(s00.stderr_of_mean);
    }
    report.s11_floor =
        std::log2(1.0 + 0.5 * source_power * static_cast<double>(num_relays - 1));
    report.s11_plateau = report.mean_rate_s11.back() > report.s11_floor;
    report.s00_collapse = report.mean_rate_s00.back() < 0.25 * report.mean_rate_s00.front();
    return report;
}

}  // namespace relaysim::experiments
