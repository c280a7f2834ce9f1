#pragma once

#include <cstdint>
#include <vector>

#include "relaysim/numerics.hpp"

namespace relaysim::channel {

// Counter-based deterministic random stream. A stream is identified by
// (seed, stream_id); identical identifiers reproduce identical draws and
// distinct stream_ids give statistically independent sequences, which is
// what makes parallel Monte Carlo trials reproducible regardless of the
// execution order.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // Uniform on (0, 1] (the left-open interval keeps log() finite).
    double uniform01();

    // One draw of a circularly-symmetric complex Gaussian with unit
    // variance: real and imaginary parts independent N(0, 1/2).
    Complex cn01();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Mixes several identifiers into a single substream id. Used to derive one
// stream per (sweep point, trial, redraw attempt) without collisions.
std::uint64_t substream_id(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);

ComplexVector sample_cn01_vector(int n, RngStream& rng);

struct InterferenceEnv {
    std::vector<ComplexVector> interferer_channels;  // each of length N
    std::vector<double> interferer_powers;           // linear units

    int num_interferers() const { return static_cast<int>(interferer_channels.size()); }
    double total_power() const;
};

// K = sum_k h_k h_k^H P_k + local_noise_var * I. Hermitian positive
// definite by construction. n is the relay count; pass n < 0 to infer it
// from the interferer channels (requires a nonempty environment).
ComplexMatrix interference_covariance(const InterferenceEnv& env, double local_noise_var,
                                      int n = -1);

// Draws q interferer channels CN(0, I_n) with the total power split
// equally across interferers.
InterferenceEnv sample_interference_env(int n, int q, double total_power, RngStream& rng);

// (Tr(K)/N) * I — the trace-matched i.i.d. stand-in for K.
ComplexMatrix iid_equivalent_covariance(const ComplexMatrix& k);

}  // namespace relaysim::channel
