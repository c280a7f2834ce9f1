#include "relaysim/threehop.hpp"

#include <cmath>

#include "relaysim/channel.hpp"

namespace relaysim::threehop {

using numerics::canonical_phase;

namespace {

constexpr double kFeasibilityTol = 1e-6;

// Per-relay weights of the stage-1 constraint: Tr(D1 D1^H (ff^H P0 + I))
// = sum_i |d1_i|^2 (|f_i|^2 P0 + 1).
Eigen::VectorXd stage1_weights(const ThreeHopNetwork& net) {
    Eigen::VectorXd w(net.f.size());
    for (Eigen::Index i = 0; i < net.f.size(); ++i) {
        w(i) = std::norm(net.f(i)) * net.p0 + 1.0;
    }
    return w;
}

// Per-relay weights of the stage-2 constraint given d1: relay i of stage 2
// receives |(H D1 f)_i|^2 P0 signal power plus ||(H D1)_{i,:}||^2 forwarded
// noise plus its own unit noise.
Eigen::VectorXd stage2_weights(const ThreeHopNetwork& net, const ComplexVector& d1) {
    const ComplexMatrix s = net.h * d1.asDiagonal();  // H D1
    const ComplexVector f_new = s * net.f;
    Eigen::VectorXd w(net.g.size());
    for (Eigen::Index i = 0; i < net.g.size(); ++i) {
        w(i) = std::norm(f_new(i)) * net.p0 + s.row(i).squaredNorm() + 1.0;
    }
    return w;
}

double weighted_power(const Eigen::VectorXd& w, const ComplexVector& d) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        total += std::norm(d(i)) * w(i);
    }
    return total;
}

ComplexVector scale_to(const Eigen::VectorXd& w, const ComplexVector& d, double budget,
                       const char* who) {
    const double used = weighted_power(w, d);
    if (!(used > 0.0)) {
        throw ZeroGain(std::string(who) + ": gain vector spends no power");
    }
    return d * std::sqrt(budget / used);
}

}  // namespace

void validate(const ThreeHopNetwork& net) {
    const Eigen::Index n = net.f.size();
    const Eigen::Index m = net.g.size();
    if (n < 1 || m < 1) {
        throw DimensionMismatch("three-hop network: each relay stage needs at least one relay");
    }
    if (net.h.rows() != m || net.h.cols() != n) {
        throw DimensionMismatch("three-hop network: H must be M x N");
    }
    if (!(net.p0 > 0.0) || !(net.p1 > 0.0) || !(net.p2 > 0.0)) {
        throw RelayError("three-hop network: powers must be positive");
    }
}

double snr3(const ThreeHopNetwork& net, const StageGains& gains) {
    validate(net);
    if (gains.d1.size() != net.f.size() || gains.d2.size() != net.g.size()) {
        throw DimensionMismatch("snr3: gain lengths do not match the network");
    }
    const Eigen::RowVectorXcd front = (net.g.cwiseProduct(gains.d2)).transpose();  // g^T D2
    const Eigen::RowVectorXcd through = front * net.h * gains.d1.asDiagonal();     // g^T D2 H D1
    const Complex signal = (through * net.f).value();
    const double noise = through.squaredNorm() + front.squaredNorm() + 1.0;
    return std::norm(signal) * net.p0 / noise;
}

ComplexVector normalize_stage1(const ThreeHopNetwork& net, const ComplexVector& d1) {
    validate(net);
    if (d1.size() != net.f.size()) {
        throw DimensionMismatch("normalize_stage1: gain length mismatch");
    }
    return scale_to(stage1_weights(net), d1, net.p1, "normalize_stage1");
}

ComplexVector normalize_stage2(const ThreeHopNetwork& net, const ComplexVector& d1,
                               const ComplexVector& d2) {
    validate(net);
    if (d1.size() != net.f.size() || d2.size() != net.g.size()) {
        throw DimensionMismatch("normalize_stage2: gain length mismatch");
    }
    return scale_to(stage2_weights(net, d1), d2, net.p2, "normalize_stage2");
}

double stage1_constraint_residual(const ThreeHopNetwork& net, const ComplexVector& d1) {
    return std::abs(weighted_power(stage1_weights(net), d1) - net.p1) / net.p1;
}

double stage2_constraint_residual(const ThreeHopNetwork& net, const ComplexVector& d1,
                                  const ComplexVector& d2) {
    return std::abs(weighted_power(stage2_weights(net, d1), d2) - net.p2) / net.p2;
}

twohop::TwoHopNetwork reduce_to_twohop(const ThreeHopNetwork& net, const ComplexVector& d1,
                                       bool check_feasibility) {
    validate(net);
    if (d1.size() != net.f.size()) {
        throw DimensionMismatch("reduce_to_twohop: d1 length mismatch");
    }
    if (check_feasibility && stage1_constraint_residual(net, d1) > kFeasibilityTol) {
        throw InfeasibleGain("reduce_to_twohop: d1 violates the stage-1 power constraint");
    }
    const ComplexMatrix s = net.h * d1.asDiagonal();  // H D1
    twohop::TwoHopNetwork reduced;
    reduced.source_power = net.p0;
    reduced.f = s * net.f;
    reduced.relay_total_power = net.p2;
    reduced.g = net.g;
    reduced.noise_cov =
        s * s.adjoint() + ComplexMatrix::Identity(net.g.size(), net.g.size());
    return reduced;
}

std::pair<ThreeHopNetwork, StageGains> reciprocal(const ThreeHopNetwork& net,
                                                  const StageGains& gains) {
    validate(net);
    if (gains.d1.size() != net.f.size() || gains.d2.size() != net.g.size()) {
        throw DimensionMismatch("reciprocal: gain lengths do not match the network");
    }
    ThreeHopNetwork flipped;
    flipped.p0 = net.p2;
    flipped.f = net.g;
    flipped.p1 = net.p1;
    flipped.h = net.h.transpose();
    flipped.p2 = net.p0;
    flipped.g = net.f;

    StageGains flipped_gains;
    // kappa_2 d2 satisfies the reciprocal stage-1 constraint, then kappa_1 d1
    // the reciprocal stage-2 constraint (which depends on kappa_2 d2).
    flipped_gains.d1 = normalize_stage1(flipped, gains.d2);
    flipped_gains.d2 = normalize_stage2(flipped, flipped_gains.d1, gains.d1);
    return {std::move(flipped), std::move(flipped_gains)};
}

ComplexVector default_d1_init(const ThreeHopNetwork& net) {
    ComplexVector d1(net.f.size());
    for (Eigen::Index i = 0; i < d1.size(); ++i) {
        d1(i) = std::polar(1.0, -std::arg(net.f(i)));
    }
    return d1;
}

OptimizationTrace optimize(const ThreeHopNetwork& net,
                           const std::optional<ComplexVector>& d1_init, double tol,
                           int max_cycles) {
    validate(net);
    ComplexVector start = d1_init.value_or(default_d1_init(net));
    if (start.size() != net.f.size()) {
        throw DimensionMismatch("optimize: d1 initialization has wrong length");
    }

    OptimizationTrace trace;
    ThreeHopNetwork cur = net;
    StageGains gains;
    gains.d1 = normalize_stage1(cur, start);
    gains.d2 = twohop::optimal_gain_s11(reduce_to_twohop(cur, gains.d1)).gain;

    int step = 0;
    bool reciprocal_frame = false;
    double cycle_start_snr = snr3(cur, gains);
    trace.iterations.push_back({step, cycle_start_snr, reciprocal_frame});

    for (int cycle = 0; cycle < max_cycles && !trace.converged; ++cycle) {
        // Two half-steps: optimize the first stage in the flipped network,
        // then come back and re-optimize the second stage.
        for (int half = 0; half < 2; ++half) {
            std::tie(cur, gains) = reciprocal(cur, gains);
            reciprocal_frame = !reciprocal_frame;
            gains.d2 = twohop::optimal_gain_s11(reduce_to_twohop(cur, gains.d1)).gain;
            trace.iterations.push_back({++step, snr3(cur, gains), reciprocal_frame});
        }
        const double snr = trace.iterations.back().snr;
        if (snr - cycle_start_snr <= tol * std::max(cycle_start_snr, 1e-300)) {
            trace.converged = true;
        }
        cycle_start_snr = snr;
    }

    gains.d1 = canonical_phase(gains.d1);
    gains.d2 = canonical_phase(gains.d2);
    trace.final = gains;
    return trace;
}

MultiStartResult optimize_multistart(const ThreeHopNetwork& net, int num_starts,
                                     std::uint64_t seed, double tol, int max_cycles) {
    validate(net);
    if (num_starts < 1) {
        throw RelayError("optimize_multistart: need at least one start");
    }
    MultiStartResult result;
    result.traces.reserve(num_starts);
    for (int s = 0; s < num_starts; ++s) {
        std::optional<ComplexVector> init;
        if (s > 0) {
            channel::RngStream rng(seed, channel::substream_id(0x3507u, s));
            init = channel::sample_cn01_vector(net.stage1_relays(), rng);
        }
        result.traces.push_back(optimize(net, init, tol, max_cycles));
        if (result.traces[s].final_snr() > result.traces[result.best_index].final_snr()) {
            result.best_index = s;
        }
    }
    return result;
}

double search_reduced_simo_optimum(const ThreeHopNetwork& net, int restarts,
                                   std::uint64_t seed) {
    validate(net);
    const Eigen::Index n = net.f.size();
    const Eigen::VectorXd w1 = stage1_weights(net);

    const auto objective = [&](const ComplexVector& d1) {
        const ComplexMatrix s = net.h * d1.asDiagonal();
        const ComplexVector f_new = s * net.f;
        const ComplexMatrix k =
            s * s.adjoint() + ComplexMatrix::Identity(net.g.size(), net.g.size());
        return net.p0 * std::real(f_new.dot(numerics::solve_hermitian(k, f_new)));
    };

    double best = 0.0;
    for (int r = 0; r < restarts; ++r) {
        channel::RngStream rng(seed, channel::substream_id(0x51310u, r));
        ComplexVector d1 = r == 0 ? default_d1_init(net) : channel::sample_cn01_vector(n, rng);
        d1 = scale_to(w1, d1, net.p1, "search_reduced_simo_optimum");
        double value = objective(d1);

        // Coordinate-wise ascent over the real and imaginary parts with a
        // shrinking step; re-projection onto the constraint after each move.
        double step = 0.5;
        long budget = 400000;
        while (step > 1e-7 && budget > 0) {
            bool improved = false;
            budget -= 4 * n;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (const Complex dir : {Complex(1, 0), Complex(0, 1)}) {
                    for (const double sign : {1.0, -1.0}) {
                        ComplexVector cand = d1;
                        cand(i) += sign * step * dir * std::sqrt(net.p1 / w1(i));
                        cand = scale_to(w1, cand, net.p1, "search_reduced_simo_optimum");
                        const double cand_value = objective(cand);
                        if (cand_value > value) {
                            value = cand_value;
                            d1 = cand;
                            improved = true;
                        }
                    }
                }
            }
            if (!improved) {
                step *= 0.5;
            }
        }
        best = std::max(best, value);
    }
    return best;
}

std::map<std::string, std::pair<double, double>> limit_checks(const ThreeHopNetwork& net,
                                                              double big_power) {
    validate(net);
    std::map<std::string, std::pair<double, double>> out;

    // The alternating optimizer has no global-optimality guarantee, so the
    // achieved side of every limit uses a small multistart.
    const auto optimized_snr = [&](double p0, double p1, double p2) {
        ThreeHopNetwork mod = net;
        mod.p0 = p0;
        mod.p1 = p1;
        mod.p2 = p2;
        return optimize_multistart(mod, 5, 0x11417).best().final_snr();
    };

    // P1, P2 -> inf: single-hop SIMO with matched combining.
    out["p1p2_simo"] = {net.p0 * net.f.squaredNorm(),
                        optimized_snr(net.p0, big_power, big_power)};

    // P0, P1 -> inf: single-hop MISO from the stage-2 relays.
    out["p0p1_miso"] = {net.p2 * net.g.squaredNorm(),
                        optimized_snr(big_power, big_power, net.p2)};

    // P0, P2 -> inf: rank-one beamforming over the point-to-point MIMO
    // channel H with power P1.
    const ComplexMatrix hth = net.h.adjoint() * net.h;
    out["p0p2_mimo"] = {net.p1 * numerics::principal_eigenpair(hth).first,
                        optimized_snr(big_power, net.p1, big_power)};

    // P2 -> inf: two-hop network with a multi-antenna destination; optimum
    // over d1 found by search.
    {
        ThreeHopNetwork mod = net;
        mod.p2 = big_power;
        out["p2_reduced"] = {search_reduced_simo_optimum(mod),
                             optimized_snr(net.p0, net.p1, big_power)};
    }

    // P0 -> inf: the mirror image, searched in the flipped network.
    {
        ThreeHopNetwork flipped;
        flipped.p0 = net.p2;
        flipped.f = net.g;
        flipped.p1 = net.p1;
        flipped.h = net.h.transpose();
        flipped.p2 = big_power;
        flipped.g = net.f;
        out["p0_reduced"] = {search_reduced_simo_optimum(flipped),
                             optimized_snr(big_power, net.p1, net.p2)};
    }
    return out;
}

}  // namespace relaysim::threehop
