#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relaysim/twohop.hpp"

namespace relaysim::threehop {

// Three-hop parallel relay network: source (power P0) -> N stage-1 relays
// over f -> M stage-2 relays over H (M x N) -> destination over g. Local
// noise at both relay stages and the destination has unit variance. Once
// stage-1 gains are fixed, stage-1 noise propagates through H and the rest
// of the network is a two-hop network with correlated noise.
struct ThreeHopNetwork {
    double p0 = 1.0;
    ComplexVector f;   // length N
    double p1 = 1.0;
    ComplexMatrix h;   // M x N
    double p2 = 1.0;
    ComplexVector g;   // length M

    int stage1_relays() const { return static_cast<int>(f.size()); }
    int stage2_relays() const { return static_cast<int>(g.size()); }
};

void validate(const ThreeHopNetwork& net);

struct StageGains {
    ComplexVector d1;  // length N
    ComplexVector d2;  // length M
};

struct TraceEntry {
    int iteration = 0;
    double snr = 0.0;
    // Half-steps alternate between optimizing in the forward network and in
    // the reciprocal (direction-flipped) network.
    bool reciprocal_frame = false;
};

struct OptimizationTrace {
    std::vector<TraceEntry> iterations;
    bool converged = false;
    StageGains final;  // feasible in the forward network, canonical phase

    double final_snr() const { return iterations.empty() ? 0.0 : iterations.back().snr; }
};

// Destination SNR |g^T D2 H D1 f|^2 P0 / (||g^T D2 H D1||^2 + ||g^T D2||^2 + 1).
double snr3(const ThreeHopNetwork& net, const StageGains& gains);

// Scales d1 so that Tr(D1 D1^H (f f^H P0 + I)) = P1 exactly.
ComplexVector normalize_stage1(const ThreeHopNetwork& net, const ComplexVector& d1);

// Scales d2 so the stage-2 power constraint holds; the constraint depends
// on d1 because stage-1 output (signal plus forwarded noise) is what the
// stage-2 relays amplify.
ComplexVector normalize_stage2(const ThreeHopNetwork& net, const ComplexVector& d1,
                               const ComplexVector& d2);

double stage1_constraint_residual(const ThreeHopNetwork& net, const ComplexVector& d1);
double stage2_constraint_residual(const ThreeHopNetwork& net, const ComplexVector& d1,
                                  const ComplexVector& d2);

// With stage-1 gains fixed, the network collapses to a two-hop network
// with effective source channel H D1 f and relay noise covariance
// H D1 D1^H H^H + I. Throws InfeasibleGain when d1 violates its constraint
// beyond tolerance (pass check_feasibility = false to reduce with an
// arbitrary d1).
twohop::TwoHopNetwork reduce_to_twohop(const ThreeHopNetwork& net, const ComplexVector& d1,
                                       bool check_feasibility = true);

// Direction-flipped network: the destination becomes the source, stage
// roles swap, and the same per-hop powers apply. The returned gains are
// the original ones rescaled (kappa_2 d2 feeding stage 1, kappa_1 d1
// feeding stage 2) so that they are feasible in the reciprocal network.
// Capacity (hence SNR) is preserved.
std::pair<ThreeHopNetwork, StageGains> reciprocal(const ThreeHopNetwork& net,
                                                  const StageGains& gains);

// Deterministic default start: co-phased equal-magnitude stage-1 gains,
// d1_i proportional to e^{-j arg f_i}.
ComplexVector default_d1_init(const ThreeHopNetwork& net);

// Alternating optimization: fix d1, reduce to a two-hop network and give
// stage 2 its optimal gain; flip the network and repeat for the other
// stage; iterate until the SNR gain over a full forward+reciprocal cycle
// drops below tol (relative). Every half-step maximizes over one stage, so
// the SNR trace is nondecreasing. Global optimality is not guaranteed.
OptimizationTrace optimize(const ThreeHopNetwork& net,
                           const std::optional<ComplexVector>& d1_init = std::nullopt,
                           double tol = 1e-9, int max_cycles = 500);

// Best of several starts: the deterministic default plus (num_starts - 1)
// seeded random initializations. Returns all traces; best() is the one
// with the highest final SNR.
struct MultiStartResult {
    std::vector<OptimizationTrace> traces;
    std::size_t best_index = 0;

    const OptimizationTrace& best() const { return traces[best_index]; }
};
MultiStartResult optimize_multistart(const ThreeHopNetwork& net, int num_starts = 5,
                                     std::uint64_t seed = 1, double tol = 1e-9,
                                     int max_cycles = 500);

// High-power limiting behavior, evaluated at `big_power` standing in for
// infinity. Returns property name -> (expected, achieved):
//   p1p2_simo      P1,P2 -> inf : SNR -> P0 ||f||^2
//   p0p1_miso      P0,P1 -> inf : SNR -> P2 ||g||^2
//   p0p2_mimo      P0,P2 -> inf : SNR -> P1 lambda_max(H^H H)
//   p2_reduced     P2 -> inf    : SNR -> search optimum over d1 of the
//                                 reduced multi-antenna-destination network
//   p0_reduced     P0 -> inf    : the mirror image via reciprocity
std::map<std::string, std::pair<double, double>> limit_checks(const ThreeHopNetwork& net,
                                                              double big_power = 1e6);

// Search utility behind the p2/p0_reduced limit properties: maximizes
// P0 f_new^H K^{-1} f_new over stage-1-feasible d1 by random restarts plus
// coordinate ascent. Independent of the alternating optimizer.
double search_reduced_simo_optimum(const ThreeHopNetwork& net, int restarts = 40,
                                   std::uint64_t seed = 7);

}  // namespace relaysim::threehop
