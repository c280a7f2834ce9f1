#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relaysim/numerics.hpp"

namespace relaysim::twohop {

// Two-hop parallel amplify-and-forward relay network: a single-antenna
// source with power P talks to N relays over channel f; the relays scale
// and forward over channel g to a single-antenna destination under a joint
// transmit power budget P_R. Relay noise has covariance K (off-diagonal
// entries encode correlation, e.g. from common interference); destination
// noise variance is fixed at 1.
struct TwoHopNetwork {
    double source_power = 1.0;       // P
    ComplexVector f;                 // source -> relays, length N
    double relay_total_power = 1.0;  // P_R
    ComplexVector g;                 // relays -> destination, length N
    ComplexMatrix noise_cov;         // K, N x N Hermitian PSD, positive diagonal

    int num_relays() const { return static_cast<int>(f.size()); }
};

// Throws unless dimensions agree, powers are positive and K has a strictly
// positive diagonal. Called by every operation that consumes the network.
void validate(const TwoHopNetwork& net);

struct SourceTerm {
    ComplexVector f;      // length N
    double power = 1.0;   // P_k
};

struct MultiSourceTwoHopNetwork {
    std::vector<SourceTerm> sources;  // L >= 1
    double relay_total_power = 1.0;
    ComplexVector g;
    ComplexMatrix noise_cov;

    int num_relays() const { return static_cast<int>(g.size()); }
    int num_sources() const { return static_cast<int>(sources.size()); }
};

void validate(const MultiSourceTwoHopNetwork& net);

// The benchmark schemes. The two digits read "noise correlated? /
// correlation known at the relays?": S11 exploits the full covariance, S10
// uses the uncorrelated-noise gain but lives in correlated noise, S00 is
// the genuinely uncorrelated network, SIID replaces K with its
// trace-matched i.i.d. equivalent. LocalCsi and NoCsi restrict channel
// knowledge instead of correlation knowledge.
enum class Scheme { S11, S10, S00, SIID, LocalCsi, NoCsi };

const std::vector<Scheme>& all_benchmark_schemes();  // S11, S10, S00, SIID
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SchemeEval {
    Scheme scheme = Scheme::S11;
    ComplexVector gain;       // canonical phase, satisfies the scheme's power constraint
    double snr = 0.0;
    double rate_bits = 0.0;   // log2(1 + snr)
};

double rate_bits_from_snr(double snr);

// Destination SNR for an arbitrary (not necessarily power-feasible) gain
// vector d:   |d^T G f|^2 P / (conj(d o g)^H K conj(d o g) + 1).
double snr_of_gain(const TwoHopNetwork& net, const ComplexVector& d);

// Per-relay transmit powers are |d_i|^2 (|f_i|^2 P + K_ii); this scales d
// by a positive real constant so they sum to exactly P_R.
ComplexVector normalize_power(const TwoHopNetwork& net, const ComplexVector& d);

// Residual of the sum power constraint, relative to P_R (0 when d is
// exactly feasible).
double power_constraint_residual(const TwoHopNetwork& net, const ComplexVector& d);

// Optimal single-user gain with full correlation knowledge:
//   A   = K o gg^H P_R + ff^H P o I + K o I
//   SNR = P P_R (f o g)^H A^{-1} (f o g)
//   d   = kappa (A^{-1} (f o g))^*
SchemeEval optimal_gain_s11(const TwoHopNetwork& net);

// Optimal gain for the uncorrelated network (noise covariance K o I). The
// reported SNR is evaluated under K o I.
SchemeEval optimal_gain_s00(const TwoHopNetwork& net);

// Correlation-blind relays in correlated noise: the gain equals d_00 but
// the SNR is evaluated under the true covariance K.
SchemeEval eval_scheme_s10(const TwoHopNetwork& net);

// Optimal gain when K is replaced by its trace-matched i.i.d. equivalent;
// SNR evaluated under (Tr K / N) I.
SchemeEval eval_scheme_siid(const TwoHopNetwork& net);

// Relays know only their own forward/backward channels: each relay cancels
// the phases of f_i and g_i and spends an equal share of the power budget.
// A relay with a zero channel contributes zero gain. use_true_covariance
// selects whether the SNR is evaluated under K or K o I.
SchemeEval eval_scheme_local_csi(const TwoHopNetwork& net, bool use_true_covariance);

// Fixed gain chosen independently of the channels (default all-ones),
// power-normalized; SNR under K or K o I.
SchemeEval eval_scheme_no_csi(const TwoHopNetwork& net, bool use_true_covariance,
                              const std::optional<ComplexVector>& fixed_gain = std::nullopt);

// Maximum sum-rate gain for the multi-source network:
//   SNR = P_R lambda_max(A^{-1} B),  B = sum_k (f_k o g)(f_k o g)^H P_k,
// computed via a power iteration on the Hermitian-similar L^{-1} B L^{-H}.
SchemeEval optimal_gain_multisource(const MultiSourceTwoHopNetwork& net);

// P_R -> infinity limit: the network is a SIMO receiver with noise K,
// C = log2(1 + P f^H K^{-1} f). Throws SingularK for singular K (the
// infinite-capacity regime).
double simo_limit_rate(const TwoHopNetwork& net);

// P -> infinity limit: MISO transmission, C = log2(1 + P_R ||g||^2).
double miso_limit_rate(const TwoHopNetwork& net);

// Closed-form high-P_R SNR limits for the four benchmark schemes.
std::map<Scheme, double> high_pr_snr_formulas(const TwoHopNetwork& net);

// Expectations of the high-P_R SNRs over f ~ CN(0, I), as closed forms in
// K alone: E[SNR_11] = P sum_i 1/lambda_i, E[SNR_00] = P sum_i 1/K_ii,
// E[SNR_iid] = N P / (sum_i K_ii / N). S10 has no closed form and is
// omitted.
std::map<Scheme, double> expected_high_pr_snr(const ComplexMatrix& k, double p);

// Dispatcher used by the Monte Carlo and CLI layers. LocalCsi and NoCsi
// are evaluated under the true covariance.
SchemeEval evaluate_scheme(const TwoHopNetwork& net, Scheme scheme);

}  // namespace relaysim::twohop
