#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relaysim/channel.hpp"
#include "relaysim/threehop.hpp"
#include "relaysim/twohop.hpp"

// Verification layer: search oracles that re-derive optimal SNRs without
// touching the closed-form solve paths, plus the acceptance checks built
// on them. Surfaced through `relaysim verify` and the acceptance test
// binary; nothing in here feeds back into the implementation.
namespace relaysim::verify {

// Multi-source destination SNR expanded from first principles (scalar MAC
// view); reduces to the single-user SNR at L = 1.
double multisource_snr_of_gain(const twohop::MultiSourceTwoHopNetwork& net,
                               const ComplexVector& d);

// Feasible gain sampled CN(0, I) then scaled onto the power constraint.
ComplexVector random_feasible_gain(const twohop::TwoHopNetwork& net, channel::RngStream& rng);

// Best SNR among `probes` random feasible gains (lower bound on the
// optimum).
double random_probe_best_snr(const twohop::TwoHopNetwork& net, long probes, std::uint64_t seed);

// Projected coordinate-ascent maximization of the destination SNR over
// feasible gains. Works directly on the SNR definition; independent of the
// closed-form solve.
double ascent_oracle_snr(const twohop::TwoHopNetwork& net, int restarts = 3,
                         std::uint64_t seed = 11);
double multisource_ascent_oracle_snr(const twohop::MultiSourceTwoHopNetwork& net,
                                     int restarts = 3, std::uint64_t seed = 11);

// One verification row: margin >= 0 iff the check passed; the margin is
// the remaining slack normalized by the check's tolerance (statistical
// checks report gap/stderr slack).
struct CheckResult {
    std::string name;
    double expected = 0.0;
    double achieved = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct CriterionResult {
    std::string title;
    std::vector<CheckResult> checks;
    bool pass = true;

    void add(CheckResult check);
};

struct VerifyOptions {
    std::uint64_t seed = 20260810;
    int ordering_trials = 20000;      // scheme-chain and saturation studies
    int oracle_instances = 100;       // random instances for oracle equivalence
    long probes = 100000;             // random feasible gains per instance
    long expectation_draws = 100000;  // f draws for the closed-form means
    int reciprocity_cases = 1000;
    double big_power = 1e6;           // stands in for infinity in limit checks
};

// The full acceptance suite. Returns one CriterionResult per criterion;
// every check row is also streamed to `progress` when given.
std::vector<CriterionResult> run_acceptance_suite(const VerifyOptions& options,
                                                  std::ostream* progress = nullptr);

}  // namespace relaysim::verify
