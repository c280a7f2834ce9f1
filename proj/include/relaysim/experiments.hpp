#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relaysim/channel.hpp"
#include "relaysim/twohop.hpp"

namespace relaysim::experiments {

using twohop::Scheme;

enum class SweepVariable { RelayPower, SourcePower, InterferencePower, NumRelays };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& name);

// Baseline operating point; the swept variable is overridden per grid
// value. Powers are linear.
struct FixedParams {
    double source_power = 10.0;        // P
    double relay_power = 10.0;         // P_R
    double interference_power = 10.0;  // P_I, split equally across interferers
    int num_relays = 2;                // N
    int num_interferers = 1;           // Q
};

struct SweepSpec {
    SweepVariable variable = SweepVariable::RelayPower;
    // Power sweeps are gridded in dB (converted to linear internally);
    // the relay-count sweep takes plain counts.
    std::vector<double> grid;
    FixedParams fixed;
    int trials = 20000;
    std::uint64_t seed = 1;
    std::vector<Scheme> schemes = twohop::all_benchmark_schemes();
};

void validate(const SweepSpec& spec);

double db_to_linear(double db);

struct SweepCell {
    double sweep_value = 0.0;  // as given in the grid
    Scheme scheme = Scheme::S11;
    long trials = 0;
    double mean_snr = 0.0;
    double mean_rate_bits = 0.0;
    double stderr_rate = 0.0;  // sample std of the rate / sqrt(trials)
};

struct SweepResult {
    SweepVariable variable = SweepVariable::RelayPower;
    std::vector<SweepCell> cells;        // grid-major, schemes in spec order
    std::vector<long> redraws_per_point; // one entry per grid point
    long redrawn_trials = 0;
};

// Monte Carlo sweep: per trial draw f, g ~ CN(0, I), draw the interferer
// channels, build K, and evaluate every requested scheme on the same
// channel realization. Bit-identical output for a fixed spec regardless of
// worker count (workers = 0 picks the hardware concurrency). A trial that
// fails numerically is redrawn on a fresh substream; a sweep point with
// more than 0.1% redraws raises RelayError.
SweepResult run_sweep(const SweepSpec& spec, int workers = 0);

// One link of the expected-SNR chain E[SNR_a] >= E[SNR_b], judged on the
// paired per-trial difference.
struct OrderingInequality {
    Scheme better = Scheme::S11;
    Scheme worse = Scheme::S10;
    double mean_gap = 0.0;    // mean(snr_better - snr_worse)
    double stderr_gap = 0.0;  // stderr of the paired difference
    double margin() const { return stderr_gap > 0.0 ? mean_gap / stderr_gap : 0.0; }
    bool holds(double stderr_slack = 1.0) const { return mean_gap >= -stderr_slack * stderr_gap; }
};

struct OrderingPointReport {
    double sweep_value = 0.0;
    std::vector<OrderingInequality> chain;  // S11>=S10, S10>=S00, S00>=SIID
};

struct OrderingReport {
    std::vector<OrderingPointReport> points;
    bool all_hold(double stderr_slack = 1.0) const;
};

// Evaluates the scheme chain at every grid point of the spec.
OrderingReport verify_ordering(const SweepSpec& spec, int workers = 0);

struct SaturationReport {
    std::vector<double> pi_grid;  // linear interference powers
    std::vector<double> mean_rate_s11;
    std::vector<double> mean_rate_s00;
    std::vector<double> stderr_rate_s11;
    std::vector<double> stderr_rate_s00;
    double s11_floor = 0.0;      // log2(1 + (N-1) * P * 0.5)
    bool s11_plateau = false;    // R11 at the top grid point stays above the floor
    bool s00_collapse = false;   // R00 at the top point < 25% of its first-point value
};

// Interference saturation study (single-interferer setup): rate of S11 and
// S00 across a grid of linear interference powers. The (N-1)-based floor is
// a high-relay-power property: it is only attainable when relay_power
// dominates the received interference power, because the power constraint
// charges the relays for amplifying interference.
SaturationReport interference_saturation(int num_relays, int num_interferers, double source_power,
                                         double relay_power, const std::vector<double>& pi_grid,
                                         int trials, std::uint64_t seed, int workers = 0);

}  // namespace relaysim::experiments
