#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relaysim/channel.hpp"
#include "relaysim/experiments.hpp"
#include "relaysim/numerics.hpp"
#include "relaysim/threehop.hpp"
#include "relaysim/twohop.hpp"
#include "relaysim/verify.hpp"

namespace py = pybind11;
using namespace relaysim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Relay gain optimization for two- and three-hop amplify-and-forward "
              "networks with correlated relay noise";

    py::register_exception<RelayError>(m, "RelayError");

    // ---------------------------------------------------------- numerics
    py::class_<numerics::HermitianCheckReport>(m, "HermitianCheckReport")
        .def_readonly("is_hermitian", &numerics::HermitianCheckReport::is_hermitian)
        .def_readonly("max_asymmetry", &numerics::HermitianCheckReport::max_asymmetry)
        .def_readonly("is_positive_definite",
                      &numerics::HermitianCheckReport::is_positive_definite);
    m.def("hermitian_check", &numerics::hermitian_check, py::arg("m"),
          py::arg("tol") = numerics::kHermitianTol);
    m.def("cholesky", &numerics::cholesky, py::arg("m"),
          "Lower-triangular L with L @ L.conj().T == m");
    m.def("solve_hermitian",
          py::overload_cast<const ComplexMatrix&, const ComplexVector&>(
              &numerics::solve_hermitian),
          py::arg("m"), py::arg("b"));
    m.def("principal_eigenpair", &numerics::principal_eigenpair, py::arg("m"),
          "(lambda_max, unit eigenvector) of a Hermitian PSD matrix");
    m.def("hadamard",
          py::overload_cast<const ComplexVector&, const ComplexVector&>(&numerics::hadamard),
          py::arg("a"), py::arg("b"));
    m.def("canonical_phase", &numerics::canonical_phase, py::arg("v"));

    // ----------------------------------------------------------- channel
    py::class_<channel::RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id"))
        .def_property_readonly("seed", &channel::RngStream::seed)
        .def_property_readonly("stream_id", &channel::RngStream::stream_id)
        .def("next_u64", &channel::RngStream::next_u64)
        .def("uniform01", &channel::RngStream::uniform01)
        .def("cn01", &channel::RngStream::cn01);
    m.def("sample_cn01_vector", &channel::sample_cn01_vector, py::arg("n"), py::arg("rng"));

    py::class_<channel::InterferenceEnv>(m, "InterferenceEnv")
        .def(py::init<>())
        .def_readwrite("interferer_channels", &channel::InterferenceEnv::interferer_channels)
        .def_readwrite("interferer_powers", &channel::InterferenceEnv::interferer_powers)
        .def_property_readonly("total_power", &channel::InterferenceEnv::total_power);
    m.def("interference_covariance", &channel::interference_covariance, py::arg("env"),
          py::arg("local_noise_var"), py::arg("n") = -1);
    m.def("sample_interference_env", &channel::sample_interference_env, py::arg("n"),
          py::arg("q"), py::arg("total_power"), py::arg("rng"));
    m.def("iid_equivalent_covariance", &channel::iid_equivalent_covariance, py::arg("k"));

    // ------------------------------------------------------------ twohop
    py::enum_<twohop::Scheme>(m, "Scheme")
        .value("S11", twohop::Scheme::S11)
        .value("S10", twohop::Scheme::S10)
        .value("S00", twohop::Scheme::S00)
        .value("SIID", twohop::Scheme::SIID)
        .value("LOCAL_CSI", twohop::Scheme::LocalCsi)
        .value("NO_CSI", twohop::Scheme::NoCsi);

    py::class_<twohop::TwoHopNetwork>(m, "TwoHopNetwork")
        .def(py::init([](double p, const ComplexVector& f, double pr, const ComplexVector& g,
                         const ComplexMatrix& k) {
                 twohop::TwoHopNetwork net{p, f, pr, g, k};
                 twohop::validate(net);
                 return net;
             }),
             py::arg("P"), py::arg("f"), py::arg("P_R"), py::arg("g"), py::arg("K"))
        .def_readwrite("P", &twohop::TwoHopNetwork::source_power)
        .def_readwrite("f", &twohop::TwoHopNetwork::f)
        .def_readwrite("P_R", &twohop::TwoHopNetwork::relay_total_power)
        .def_readwrite("g", &twohop::TwoHopNetwork::g)
        .def_readwrite("K", &twohop::TwoHopNetwork::noise_cov)
        .def_property_readonly("num_relays", &twohop::TwoHopNetwork::num_relays);

    py::class_<twohop::SourceTerm>(m, "SourceTerm")
        .def(py::init([](const ComplexVector& f, double p) {
                 return twohop::SourceTerm{f, p};
             }),
             py::arg("f"), py::arg("P"))
        .def_readwrite("f", &twohop::SourceTerm::f)
        .def_readwrite("P", &twohop::SourceTerm::power);

    py::class_<twohop::MultiSourceTwoHopNetwork>(m, "MultiSourceTwoHopNetwork")
        .def(py::init([](const std::vector<twohop::SourceTerm>& sources, double pr,
                         const ComplexVector& g, const ComplexMatrix& k) {
                 twohop::MultiSourceTwoHopNetwork net{sources, pr, g, k};
                 twohop::validate(net);
                 return net;
             }),
             py::arg("sources"), py::arg("P_R"), py::arg("g"), py::arg("K"))
        .def_readwrite("sources", &twohop::MultiSourceTwoHopNetwork::sources)
        .def_readwrite("P_R", &twohop::MultiSourceTwoHopNetwork::relay_total_power)
        .def_readwrite("g", &twohop::MultiSourceTwoHopNetwork::g)
        .def_readwrite("K", &twohop::MultiSourceTwoHopNetwork::noise_cov);

    py::class_<twohop::SchemeEval>(m, "SchemeEval")
        .def_readonly("scheme", &twohop::SchemeEval::scheme)
        .def_readonly("gain", &twohop::SchemeEval::gain)
        .def_readonly("snr", &twohop::SchemeEval::snr)
        .def_readonly("rate_bits", &twohop::SchemeEval::rate_bits)
        .def("__repr__", [](const twohop::SchemeEval& e) {
            return "<SchemeEval " + twohop::to_string(e.scheme) +
                   " snr=" + std::to_string(e.snr) + ">";
        });

    m.def("snr_of_gain", &twohop::snr_of_gain, py::arg("net"), py::arg("d"));
    m.def("normalize_power", &twohop::normalize_power, py::arg("net"), py::arg("d"));
    m.def("optimal_gain_s11", &twohop::optimal_gain_s11, py::arg("net"));
    m.def("optimal_gain_s00", &twohop::optimal_gain_s00, py::arg("net"));
    m.def("eval_scheme_s10", &twohop::eval_scheme_s10, py::arg("net"));
    m.def("eval_scheme_siid", &twohop::eval_scheme_siid, py::arg("net"));
    m.def("eval_scheme_local_csi", &twohop::eval_scheme_local_csi, py::arg("net"),
          py::arg("use_true_covariance") = true);
    m.def("eval_scheme_no_csi", &twohop::eval_scheme_no_csi, py::arg("net"),
          py::arg("use_true_covariance") = true,
          py::arg("fixed_gain") = std::optional<ComplexVector>());
    m.def("optimal_gain_multisource", &twohop::optimal_gain_multisource, py::arg("net"));
    m.def("evaluate_scheme", &twohop::evaluate_scheme, py::arg("net"), py::arg("scheme"));
    m.def("simo_limit_rate", &twohop::simo_limit_rate, py::arg("net"));
    m.def("miso_limit_rate", &twohop::miso_limit_rate, py::arg("net"));
    m.def("high_pr_snr_formulas", &twohop::high_pr_snr_formulas, py::arg("net"));
    m.def("expected_high_pr_snr", &twohop::expected_high_pr_snr, py::arg("K"), py::arg("P"));
    m.def("rate_bits_from_snr", &twohop::rate_bits_from_snr, py::arg("snr"));

    // ---------------------------------------------------------- threehop
    py::class_<threehop::ThreeHopNetwork>(m, "ThreeHopNetwork")
        .def(py::init([](double p0, const ComplexVector& f, double p1, const ComplexMatrix& h,
                         double p2, const ComplexVector& g) {
                 threehop::ThreeHopNetwork net{p0, f, p1, h, p2, g};
                 threehop::validate(net);
                 return net;
             }),
             py::arg("P0"), py::arg("f"), py::arg("P1"), py::arg("H"), py::arg("P2"),
             py::arg("g"))
        .def_readwrite("P0", &threehop::ThreeHopNetwork::p0)
        .def_readwrite("f", &threehop::ThreeHopNetwork::f)
        .def_readwrite("P1", &threehop::ThreeHopNetwork::p1)
        .def_readwrite("H", &threehop::ThreeHopNetwork::h)
        .def_readwrite("P2", &threehop::ThreeHopNetwork::p2)
        .def_readwrite("g", &threehop::ThreeHopNetwork::g);

    py::class_<threehop::StageGains>(m, "StageGains")
        .def(py::init([](const ComplexVector& d1, const ComplexVector& d2) {
                 return threehop::StageGains{d1, d2};
             }),
             py::arg("d1"), py::arg("d2"))
        .def_readwrite("d1", &threehop::StageGains::d1)
        .def_readwrite("d2", &threehop::StageGains::d2);

    py::class_<threehop::TraceEntry>(m, "TraceEntry")
        .def_readonly("iteration", &threehop::TraceEntry::iteration)
        .def_readonly("snr", &threehop::TraceEntry::snr)
        .def_readonly("reciprocal_frame", &threehop::TraceEntry::reciprocal_frame);

    py::class_<threehop::OptimizationTrace>(m, "OptimizationTrace")
        .def_readonly("iterations", &threehop::OptimizationTrace::iterations)
        .def_readonly("converged", &threehop::OptimizationTrace::converged)
        .def_readonly("final", &threehop::OptimizationTrace::final)
        .def_property_readonly("final_snr", &threehop::OptimizationTrace::final_snr);

    py::class_<threehop::MultiStartResult>(m, "MultiStartResult")
        .def_readonly("traces", &threehop::MultiStartResult::traces)
        .def_readonly("best_index", &threehop::MultiStartResult::best_index)
        .def_property_readonly("best", [](const threehop::MultiStartResult& r) {
            return r.best();
        });

    m.def("snr3", &threehop::snr3, py::arg("net"), py::arg("gains"));
    m.def("normalize_stage1", &threehop::normalize_stage1, py::arg("net"), py::arg("d1"));
    m.def("normalize_stage2", &threehop::normalize_stage2, py::arg("net"), py::arg("d1"),
          py::arg("d2"));
    m.def("reduce_to_twohop", &threehop::reduce_to_twohop, py::arg("net"), py::arg("d1"),
          py::arg("check_feasibility") = true);
    m.def("reciprocal", &threehop::reciprocal, py::arg("net"), py::arg("gains"));
    m.def("optimize", &threehop::optimize, py::arg("net"),
          py::arg("d1_init") = std::optional<ComplexVector>(), py::arg("tol") = 1e-9,
          py::arg("max_cycles") = 500);
    m.def("optimize_multistart", &threehop::optimize_multistart, py::arg("net"),
          py::arg("num_starts") = 5, py::arg("seed") = 1, py::arg("tol") = 1e-9,
          py::arg("max_cycles") = 500);
    m.def("limit_checks", &threehop::limit_checks, py::arg("net"),
          py::arg("big_power") = 1e6);

    // -------------------------------------------------------- experiments
    py::enum_<experiments::SweepVariable>(m, "SweepVariable")
        .value("RELAY_POWER", experiments::SweepVariable::RelayPower)
        .value("SOURCE_POWER", experiments::SweepVariable::SourcePower)
        .value("INTERFERENCE_POWER", experiments::SweepVariable::InterferencePower)
        .value("NUM_RELAYS", experiments::SweepVariable::NumRelays);

    py::class_<experiments::FixedParams>(m, "FixedParams")
        .def(py::init<>())
        .def_readwrite("P", &experiments::FixedParams::source_power)
        .def_readwrite("P_R", &experiments::FixedParams::relay_power)
        .def_readwrite("P_I", &experiments::FixedParams::interference_power)
        .def_readwrite("N", &experiments::FixedParams::num_relays)
        .def_readwrite("Q", &experiments::FixedParams::num_interferers);

    py::class_<experiments::SweepSpec>(m, "SweepSpec")
        .def(py::init<>())
        .def_readwrite("variable", &experiments::SweepSpec::variable)
        .def_readwrite("grid", &experiments::SweepSpec::grid)
        .def_readwrite("fixed", &experiments::SweepSpec::fixed)
        .def_readwrite("trials", &experiments::SweepSpec::trials)
        .def_readwrite("seed", &experiments::SweepSpec::seed)
        .def_readwrite("schemes", &experiments::SweepSpec::schemes);

    py::class_<experiments::SweepCell>(m, "SweepCell")
        .def_readonly("sweep_value", &experiments::SweepCell::sweep_value)
        .def_readonly("scheme", &experiments::SweepCell::scheme)
        .def_readonly("trials", &experiments::SweepCell::trials)
        .def_readonly("mean_snr", &experiments::SweepCell::mean_snr)
        .def_readonly("mean_rate_bits", &experiments::SweepCell::mean_rate_bits)
        .def_readonly("stderr_rate", &experiments::SweepCell::stderr_rate);

    py::class_<experiments::SweepResult>(m, "SweepResult")
        .def_readonly("variable", &experiments::SweepResult::variable)
        .def_readonly("cells", &experiments::SweepResult::cells)
        .def_readonly("redraws_per_point", &experiments::SweepResult::redraws_per_point)
        .def_readonly("redrawn_trials", &experiments::SweepResult::redrawn_trials);

    py::class_<experiments::OrderingInequality>(m, "OrderingInequality")
        .def_readonly("better", &experiments::OrderingInequality::better)
        .def_readonly("worse", &experiments::OrderingInequality::worse)
        .def_readonly("mean_gap", &experiments::OrderingInequality::mean_gap)
        .def_readonly("stderr_gap", &experiments::OrderingInequality::stderr_gap)
        .def("margin", &experiments::OrderingInequality::margin)
        .def("holds", &experiments::OrderingInequality::holds,
             py::arg("stderr_slack") = 1.0);

    py::class_<experiments::OrderingPointReport>(m, "OrderingPointReport")
        .def_readonly("sweep_value", &experiments::OrderingPointReport::sweep_value)
        .def_readonly("chain", &experiments::OrderingPointReport::chain);

    py::class_<experiments::OrderingReport>(m, "OrderingReport")
        .def_readonly("points", &experiments::OrderingReport::points)
        .def("all_hold", &experiments::OrderingReport::all_hold,
             py::arg("stderr_slack") = 1.0);

    py::class_<experiments::SaturationReport>(m, "SaturationReport")
        .def_readonly("pi_grid", &experiments::SaturationReport::pi_grid)
        .def_readonly("mean_rate_s11", &experiments::SaturationReport::mean_rate_s11)
        .def_readonly("mean_rate_s00", &experiments::SaturationReport::mean_rate_s00)
        .def_readonly("stderr_rate_s11", &experiments::SaturationReport::stderr_rate_s11)
        .def_readonly("stderr_rate_s00", &experiments::SaturationReport::stderr_rate_s00)
        .def_readonly("s11_floor", &experiments::SaturationReport::s11_floor)
        .def_readonly("s11_plateau", &experiments::SaturationReport::s11_plateau)
        .def_readonly("s00_collapse", &experiments::SaturationReport::s00_collapse);

    m.def("run_sweep", &experiments::run_sweep, py::arg("spec"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("verify_ordering", &experiments::verify_ordering, py::arg("spec"),
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("interference_saturation", &experiments::interference_saturation,
          py::arg("num_relays"), py::arg("num_interferers"), py::arg("source_power"),
          py::arg("relay_power"), py::arg("pi_grid"), py::arg("trials"), py::arg("seed"),
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("db_to_linear", &experiments::db_to_linear, py::arg("db"));

    // ------------------------------------------------------------- verify
    py::class_<verify::CheckResult>(m, "CheckResult")
        .def_readonly("name", &verify::CheckResult::name)
        .def_readonly("expected", &verify::CheckResult::expected)
        .def_readonly("achieved", &verify::CheckResult::achieved)
        .def_readonly("margin", &verify::CheckResult::margin)
        .def_readonly("pass_", &verify::CheckResult::pass);

    m.def("multisource_snr_of_gain", &verify::multisource_snr_of_gain, py::arg("net"),
          py::arg("d"));

    m.attr("__version__") = "0.1.0";
}
