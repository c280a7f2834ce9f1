#include "relaysim/twohop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relaysim::twohop {

using numerics::canonical_phase;
using numerics::hadamard;
using numerics::solve_hermitian;

namespace {

// Diagonal of (ff^H P + K) o I: the per-relay received power that the sum
// power constraint weighs |d_i|^2 against.
Eigen::VectorXd constraint_weights(const TwoHopNetwork& net) {
    const Eigen::Index n = net.f.size();
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i) = std::norm(net.f(i)) * net.source_power + net.noise_cov(i, i).real();
    }
    return w;
}

double constraint_value(const Eigen::VectorXd& weights, const ComplexVector& d) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        total += std::norm(d(i)) * weights(i);
    }
    return total;
}

ComplexVector scale_to_budget(const Eigen::VectorXd& weights, const ComplexVector& d,
                              double budget) {
    const double used = constraint_value(weights, d);
    if (!(used > 0.0)) {
        throw ZeroGain("normalize_power: gain vector spends no power");
    }
    return d * std::sqrt(budget / used);
}

// Denominator matrix A of the constrained SNR quotient for a caller-chosen
// covariance. K o gg^H P_R is the same matrix as G K G^H.
ComplexMatrix snr_denominator_matrix(const TwoHopNetwork& net, const ComplexMatrix& k) {
    const Eigen::Index n = net.f.size();
    ComplexMatrix a = hadamard(k, ComplexMatrix(net.g * net.g.adjoint())) * net.relay_total_power;
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) += std::norm(net.f(i)) * net.source_power + k(i, i).real();
    }
    return a;
}

// Closed-form optimal gain and SNR for a caller-chosen covariance (S11
// uses the true K, S00/SIID substitute their modeled covariance). Both the
// gain and the SNR are computed in the network whose relay noise
// covariance is `k`.
SchemeEval closed_form_optimum(const TwoHopNetwork& net, const ComplexMatrix& k, Scheme label) {
    TwoHopNetwork model = net;
    model.noise_cov = k;
    const ComplexVector fg = hadamard(net.f, net.g);
    const ComplexMatrix a = snr_denominator_matrix(net, k);
    ComplexVector x;
    try {
        x = solve_hermitian(a, fg);
    } catch (const NotPositiveDefinite&) {
        throw NotPositiveDefinite("optimal gain: matrix A is degenerate");
    }
    SchemeEval eval;
    eval.scheme = label;
    eval.snr = net.source_power * net.relay_total_power * std::real(fg.dot(x));
    eval.rate_bits = rate_bits_from_snr(eval.snr);
    eval.gain = canonical_phase(normalize_power(model, x.conjugate()));
    return eval;
}

double quadratic_form(const ComplexMatrix& m, const ComplexVector& v) {
    return std::real(v.dot(m * v));  // v^H M v
}

}  // namespace

void validate(const TwoHopNetwork& net) {
    const Eigen::Index n = net.f.size();
    if (n < 1) {
        throw DimensionMismatch("two-hop network: needs at least one relay");
    }
    if (net.g.size() != n || net.noise_cov.rows() != n || net.noise_cov.cols() != n) {
        std::ostringstream msg;
        msg << "two-hop network: inconsistent dimensions (f " << n << ", g " << net.g.size()
            << ", K " << net.noise_cov.rows() << "x" << net.noise_cov.cols() << ")";
        throw DimensionMismatch(msg.str());
    }
    if (!(net.source_power > 0.0) || !(net.relay_total_power > 0.0)) {
        throw RelayError("two-hop network: powers must be positive");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(net.noise_cov(i, i).real() > 0.0)) {
            throw RelayError("two-hop network: noise covariance diagonal must be positive");
        }
    }
}

void validate(const MultiSourceTwoHopNetwork& net) {
    if (net.sources.empty()) {
        throw DimensionMismatch("multi-source network: needs at least one source");
    }
    const Eigen::Index n = net.g.size();
    if (n < 1 || net.noise_cov.rows() != n || net.noise_cov.cols() != n) {
        throw DimensionMismatch("multi-source network: inconsistent dimensions");
    }
    for (const auto& s : net.sources) {
        if (s.f.size() != n) {
            throw DimensionMismatch("multi-source network: source channel length mismatch");
        }
        if (!(s.power > 0.0)) {
            throw RelayError("multi-source network: source powers must be positive");
        }
    }
    if (!(net.relay_total_power > 0.0)) {
        throw RelayError("multi-source network: relay power must be positive");
    }
}

const std::vector<Scheme>& all_benchmark_schemes() {
    static const std::vector<Scheme> schemes = {Scheme::S11, Scheme::S10, Scheme::S00,
                                                Scheme::SIID};
    return schemes;
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::S11: return "S11";
        case Scheme::S10: return "S10";
        case Scheme::S00: return "S00";
        case Scheme::SIID: return "SIID";
        case Scheme::LocalCsi: return "LOCAL_CSI";
        case Scheme::NoCsi: return "NO_CSI";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "S11") return Scheme::S11;
    if (upper == "S10") return Scheme::S10;
    if (upper == "S00") return Scheme::S00;
    if (upper == "SIID") return Scheme::SIID;
    if (upper == "LOCAL_CSI" || upper == "LOCALCSI") return Scheme::LocalCsi;
    if (upper == "NO_CSI" || upper == "NOCSI") return Scheme::NoCsi;
    throw RelayError("unknown scheme name: " + name);
}

double rate_bits_from_snr(double snr) { return std::log2(1.0 + snr); }

double snr_of_gain(const TwoHopNetwork& net, const ComplexVector& d) {
    validate(net);
    if (d.size() != net.f.size()) {
        throw DimensionMismatch("snr_of_gain: gain vector length mismatch");
    }
    const ComplexVector dg = hadamard(d, net.g);
    const Complex signal = (dg.transpose() * net.f).value();  // d^T G f
    const ComplexVector c = dg.conjugate();
    const double noise = quadratic_form(net.noise_cov, c) + 1.0;
    return std::norm(signal) * net.source_power / noise;
}

ComplexVector normalize_power(const TwoHopNetwork& net, const ComplexVector& d) {
    validate(net);
    if (d.size() != net.f.size()) {
        throw DimensionMismatch("normalize_power: gain vector length mismatch");
    }
    return scale_to_budget(constraint_weights(net), d, net.relay_total_power);
}

double power_constraint_residual(const TwoHopNetwork& net, const ComplexVector& d) {
    const double used = constraint_value(constraint_weights(net), d);
    return std::abs(used - net.relay_total_power) / net.relay_total_power;
}

SchemeEval optimal_gain_s11(const TwoHopNetwork& net) {
    validate(net);
    return closed_form_optimum(net, net.noise_cov, Scheme::S11);
}

SchemeEval optimal_gain_s00(const TwoHopNetwork& net) {
    validate(net);
    const ComplexMatrix diag_k = net.noise_cov.diagonal().asDiagonal();
    return closed_form_optimum(net, diag_k, Scheme::S00);
}

SchemeEval eval_scheme_s10(const TwoHopNetwork& net) {
    // d_10 = d_00: the relays normalize against their true marginals (the
    // diagonal of K) but never see the off-diagonal correlation. Only the
    // SNR changes, evaluated under the true covariance.
    SchemeEval eval = optimal_gain_s00(net);
    eval.scheme = Scheme::S10;
    eval.snr = snr_of_gain(net, eval.gain);
    eval.rate_bits = rate_bits_from_snr(eval.snr);
    return eval;
}

SchemeEval eval_scheme_siid(const TwoHopNetwork& net) {
    validate(net);
    const double mean_diag = net.noise_cov.trace().real() / net.f.size();
    const ComplexMatrix k_iid =
        mean_diag * ComplexMatrix::Identity(net.f.size(), net.f.size());
    return closed_form_optimum(net, k_iid, Scheme::SIID);
}

SchemeEval eval_scheme_local_csi(const TwoHopNetwork& net, bool use_true_covariance) {
    validate(net);
    const Eigen::Index n = net.f.size();
    ComplexVector d(n);
    const Eigen::VectorXd weights = constraint_weights(net);
    bool any_active = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (net.f(i) == Complex(0, 0) || net.g(i) == Complex(0, 0)) {
            d(i) = Complex(0, 0);
            continue;
        }
        any_active = true;
        const double phase = -(std::arg(net.f(i)) + std::arg(net.g(i)));
        // Equal per-relay transmit power: |d_i|^2 (|f_i|^2 P + K_ii) equal
        // across active relays.
        d(i) = std::polar(1.0 / std::sqrt(weights(i)), phase);
    }
    if (!any_active) {
        throw ZeroChannel("local CSI: every relay has a zero channel");
    }
    SchemeEval eval;
    eval.scheme = Scheme::LocalCsi;
    eval.gain = canonical_phase(normalize_power(net, d));
    if (use_true_covariance) {
        eval.snr = snr_of_gain(net, eval.gain);
    } else {
        TwoHopNetwork diag_net = net;
        diag_net.noise_cov = net.noise_cov.diagonal().asDiagonal();
        eval.snr = snr_of_gain(diag_net, eval.gain);
    }
    eval.rate_bits = rate_bits_from_snr(eval.snr);
    return eval;
}

SchemeEval eval_scheme_no_csi(const TwoHopNetwork& net, bool use_true_covariance,
                              const std::optional<ComplexVector>& fixed_gain) {
    validate(net);
    ComplexVector d = fixed_gain.value_or(ComplexVector::Ones(net.f.size()));
    if (d.size() != net.f.size()) {
        throw DimensionMismatch("no CSI: fixed gain length mismatch");
    }
    SchemeEval eval;
    eval.scheme = Scheme::NoCsi;
    eval.gain = canonical_phase(normalize_power(net, d));
    if (use_true_covariance) {
        eval.snr = snr_of_gain(net, eval.gain);
    } else {
        TwoHopNetwork diag_net = net;
        diag_net.noise_cov = net.noise_cov.diagonal().asDiagonal();
        eval.snr = snr_of_gain(diag_net, eval.gain);
    }
    eval.rate_bits = rate_bits_from_snr(eval.snr);
    return eval;
}

SchemeEval optimal_gain_multisource(const MultiSourceTwoHopNetwork& net) {
    validate(net);
    const Eigen::Index n = net.g.size();

    ComplexMatrix a =
        hadamard(net.noise_cov, ComplexMatrix(net.g * net.g.adjoint())) * net.relay_total_power;
    Eigen::VectorXd weights(n);  // diagonal of (sum_k f_k f_k^H P_k + K) o I
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = net.noise_cov(i, i).real();
        for (const auto& s : net.sources) {
            diag += std::norm(s.f(i)) * s.power;
        }
        a(i, i) += diag;
        weights(i) = diag;
    }
    ComplexMatrix b = ComplexMatrix::Zero(n, n);
    for (const auto& s : net.sources) {
        const ComplexVector fg = hadamard(s.f, net.g);
        b += s.power * (fg * fg.adjoint());
    }

    // lambda_max(A^{-1} B) through the Hermitian-similar L^{-1} B L^{-H}.
    ComplexMatrix l;
    try {
        l = numerics::cholesky(a);
    } catch (const NotPositiveDefinite&) {
        throw NotPositiveDefinite("multi-source optimal gain: matrix A is degenerate");
    }
    const ComplexMatrix lb = numerics::forward_solve(l, b);  // L^{-1} B
    // (L^{-1} B)^H = B L^{-H} since B is Hermitian, so one more forward
    // solve yields L^{-1} B L^{-H}.
    const ComplexMatrix c = numerics::forward_solve(l, ComplexMatrix(lb.adjoint()));
    auto [lambda, w] = numerics::principal_eigenpair(c);

    SchemeEval eval;
    eval.scheme = Scheme::S11;
    eval.snr = net.relay_total_power * lambda;
    eval.rate_bits = rate_bits_from_snr(eval.snr);

    // v_max(A^{-1} B) = L^{-H} w; gain = kappa v^*.
    ComplexVector v = numerics::adjoint_solve(l, ComplexMatrix(w)).col(0);
    eval.gain = canonical_phase(scale_to_budget(weights, v.conjugate(), net.relay_total_power));
    return eval;
}

double simo_limit_rate(const TwoHopNetwork& net) {
    validate(net);
    ComplexVector x;
    try {
        x = solve_hermitian(net.noise_cov, net.f);
    } catch (const NotPositiveDefinite&) {
        throw SingularK("SIMO limit: noise covariance is singular (infinite capacity)");
    }
    return rate_bits_from_snr(net.source_power * std::real(net.f.dot(x)));
}

double miso_limit_rate(const TwoHopNetwork& net) {
    validate(net);
    return rate_bits_from_snr(net.relay_total_power * net.g.squaredNorm());
}

std::map<Scheme, double> high_pr_snr_formulas(const TwoHopNetwork& net) {
    validate(net);
    const double p = net.source_power;
    const Eigen::Index n = net.f.size();

    ComplexVector kinv_f;
    try {
        kinv_f = solve_hermitian(net.noise_cov, net.f);
    } catch (const NotPositiveDefinite&) {
        throw SingularK("high-P_R limits: noise covariance is singular");
    }

    ComplexVector diag_scaled(n);  // (K o I)^{-1} f
    for (Eigen::Index i = 0; i < n; ++i) {
        diag_scaled(i) = net.f(i) / net.noise_cov(i, i).real();
    }
    const double s00 = p * std::real(net.f.dot(diag_scaled));
    const double s10 = s00 * s00 / (p * quadratic_form(net.noise_cov, diag_scaled));

    std::map<Scheme, double> out;
    out[Scheme::S11] = p * std::real(net.f.dot(kinv_f));
    out[Scheme::S10] = s10;
    out[Scheme::S00] = s00;
    out[Scheme::SIID] = p * net.f.squaredNorm() / (net.noise_cov.trace().real() / n);
    return out;
}

std::map<Scheme, double> expected_high_pr_snr(const ComplexMatrix& k, double p) {
    if (k.rows() != k.cols() || k.rows() < 1) {
        throw DimensionMismatch("expected_high_pr_snr: K must be square");
    }
    const Eigen::Index n = k.rows();
    ComplexMatrix kinv;
    try {
        kinv = solve_hermitian(k, ComplexMatrix(ComplexMatrix::Identity(n, n)));
    } catch (const NotPositiveDefinite&) {
        throw SingularK("expected_high_pr_snr: K is singular");
    }
    double sum_inv_diag = 0.0;
    double trace = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        sum_inv_diag += 1.0 / k(i, i).real();
        trace += k(i, i).real();
    }
    std::map<Scheme, double> out;
    out[Scheme::S11] = p * kinv.trace().real();  // sum_i 1/lambda_i
    out[Scheme::S00] = p * sum_inv_diag;
    out[Scheme::SIID] = static_cast<double>(n) * p / (trace / static_cast<double>(n));
    return out;
}

SchemeEval evaluate_scheme(const TwoHopNetwork& net, Scheme scheme) {
    switch (scheme) {
        case Scheme::S11: return optimal_gain_s11(net);
        case Scheme::S10: return eval_scheme_s10(net);
        case Scheme::S00: return optimal_gain_s00(net);
        case Scheme::SIID: return eval_scheme_siid(net);
        case Scheme::LocalCsi: return eval_scheme_local_csi(net, true);
        case Scheme::NoCsi: return eval_scheme_no_csi(net, true);
    }
    throw RelayError("evaluate_scheme: unknown scheme");
}

}  // namespace relaysim::twohop
