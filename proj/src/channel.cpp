#include "relaysim/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace relaysim::channel {

namespace {

// splitmix64 finalizer: a 64-bit bijective mixer with good avalanche.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(mix64(seed) ^ stream_id)) {}

std::uint64_t RngStream::next_u64() {
    return mix64(key_ ^ mix64(counter_++ * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

double RngStream::uniform01() {
    // 53 random bits; map to (0, 1] so that -log() stays finite.
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

Complex RngStream::cn01() {
    // Box-Muller in polar form: |z| = sqrt(-ln u1) gives E|z|^2 = 1.
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return Complex(r * std::cos(theta), r * std::sin(theta));
}

std::uint64_t substream_id(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix64(a);
    h = mix64(h ^ mix64(b + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ mix64(c + 0x85ebca77c2b2ae63ULL));
    return h;
}

ComplexVector sample_cn01_vector(int n, RngStream& rng) {
    if (n < 1) {
        throw DimensionMismatch("sample_cn01_vector: n must be >= 1");
    }
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = rng.cn01();
    }
    return v;
}

double InterferenceEnv::total_power() const {
    return std::accumulate(interferer_powers.begin(), interferer_powers.end(), 0.0);
}

ComplexMatrix interference_covariance(const InterferenceEnv& env, double local_noise_var,
                                      int n) {
    if (env.interferer_channels.size() != env.interferer_powers.size()) {
        throw DimensionMismatch("interference_covariance: channel/power list lengths differ");
    }
    if (!(local_noise_var > 0.0)) {
        throw RelayError("interference_covariance: local noise variance must be positive");
    }
    Eigen::Index dim = n;
    for (const auto& h : env.interferer_channels) {
        if (dim < 0) {
            dim = h.size();
        } else if (h.size() != dim) {
            throw DimensionMismatch("interference_covariance: interferer channel length mismatch");
        }
    }
    if (dim < 0) {
        throw DimensionMismatch(
            "interference_covariance: empty environment needs an explicit relay count");
    }
    ComplexMatrix k = local_noise_var * ComplexMatrix::Identity(dim, dim);
    for (std::size_t q = 0; q < env.interferer_channels.size(); ++q) {
        const ComplexVector& h = env.interferer_channels[q];
        k += env.interferer_powers[q] * (h * h.adjoint());
    }
    return k;
}

InterferenceEnv sample_interference_env(int n, int q, double total_power, RngStream& rng) {
    if (q < 0) {
        throw DimensionMismatch("sample_interference_env: q must be >= 0");
    }
    InterferenceEnv env;
    env.interferer_channels.reserve(q);
    env.interferer_powers.assign(q, q > 0 ? total_power / q : 0.0);
    for (int k = 0; k < q; ++k) {
        env.interferer_channels.push_back(sample_cn01_vector(n, rng));
    }
    return env;
}

ComplexMatrix iid_equivalent_covariance(const ComplexMatrix& k) {
    if (k.rows() != k.cols()) {
        throw DimensionMismatch("iid_equivalent_covariance: matrix must be square");
    }
    const double mean_diag = k.trace().real() / static_cast<double>(k.rows());
    return mean_diag * ComplexMatrix::Identity(k.rows(), k.cols());
}

}  // namespace relaysim::channel
