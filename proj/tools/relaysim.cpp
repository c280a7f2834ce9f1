// relaysim: compute optimal amplify-and-forward relay gains, run the
// three-hop alternating optimizer, and reproduce the Monte Carlo scheme
// comparisons. Reads JSON configs, writes CSV.
//
// Exit codes: 0 success, 1 config error, 2 numerical failure.
#include <atomic>
#include <cctype>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relaysim/experiments.hpp"
#include "relaysim/threehop.hpp"
#include "relaysim/twohop.hpp"
#include "relaysim/verify.hpp"

using json = nlohmann::json;
using namespace relaysim;

namespace {

std::atomic<bool> g_interrupted{false};

void handle_interrupt(int) { g_interrupted.store(true); }

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------- parsing

double parse_power(const json& value, const std::string& key) {
    if (value.is_number()) {
        return value.get<double>();
    }
    if (value.is_string()) {
        std::string text = value.get<std::string>();
        const auto pos = text.find("dB");
        if (pos == std::string::npos) {
            throw ConfigError(key + ": power strings must end in 'dB'");
        }
        try {
            const double db = std::stod(text.substr(0, pos));
            return experiments::db_to_linear(db);
        } catch (const std::exception&) {
            throw ConfigError(key + ": cannot parse power value '" + text + "'");
        }
    }
    throw ConfigError(key + ": expected a number or a 'dB' string");
}

Complex parse_complex(const json& value, const std::string& key) {
    if (value.is_number()) {
        return Complex(value.get<double>(), 0.0);
    }
    if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
        return Complex(value[0].get<double>(), value[1].get<double>());
    }
    throw ConfigError(key + ": complex numbers are [re, im] pairs");
}

ComplexVector parse_vector(const json& value, const std::string& key) {
    if (!value.is_array() || value.empty()) {
        throw ConfigError(key + ": expected a nonempty array");
    }
    ComplexVector v(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = parse_complex(value[i], key);
    }
    return v;
}

ComplexMatrix parse_matrix(const json& value, const std::string& key) {
    if (!value.is_array() || value.empty()) {
        throw ConfigError(key + ": expected a nonempty array of rows");
    }
    const std::size_t rows = value.size();
    std::size_t cols = 0;
    ComplexMatrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!value[r].is_array() || value[r].empty()) {
            throw ConfigError(key + ": each row must be a nonempty array");
        }
        if (r == 0) {
            cols = value[r].size();
            m.resize(rows, cols);
        } else if (value[r].size() != cols) {
            throw ConfigError(key + ": ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_complex(value[r][c], key);
        }
    }
    return m;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

const json& require(const json& config, const std::string& key) {
    if (!config.contains(key)) {
        throw ConfigError("config is missing required key '" + key + "'");
    }
    return config.at(key);
}

std::vector<twohop::Scheme> parse_schemes(const json& config) {
    if (!config.contains("schemes")) {
        return twohop::all_benchmark_schemes();
    }
    std::vector<twohop::Scheme> schemes;
    for (const auto& name : config.at("schemes")) {
        try {
            schemes.push_back(twohop::scheme_from_string(name.get<std::string>()));
        } catch (const RelayError& e) {
            throw ConfigError(e.what());
        }
    }
    if (schemes.empty()) {
        throw ConfigError("schemes: list must be nonempty");
    }
    return schemes;
}

// ------------------------------------------------------------- formatting

struct Formatter {
    int precision = 6;
    bool full = false;

    std::string operator()(double v) const {
        char buf[64];
        if (full) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
        } else {
            std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
        }
        return buf;
    }
};

void append_gain_columns(std::ostream& out, const Formatter& fmt, const ComplexVector& gain) {
    for (Eigen::Index i = 0; i < gain.size(); ++i) {
        out << ',' << fmt(gain(i).real()) << ',' << fmt(gain(i).imag());
    }
}

void gain_headers(std::ostream& out, const std::string& prefix, int n) {
    for (int i = 1; i <= n; ++i) {
        out << ',' << prefix << i << "_re," << prefix << i << "_im";
    }
}

struct CommonOptions {
    std::string config_path;
    std::string out_path;         // empty = stdout
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> trials_flag;
    std::optional<int> starts_flag;
    std::string trace_path;
    bool full_precision = false;
};

std::uint64_t resolve_seed(const CommonOptions& opts, const json& config,
                           std::uint64_t fallback) {
    if (opts.seed_flag) {
        return *opts.seed_flag;  // flag wins
    }
    if (const char* env = std::getenv("RELAYSIM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("RELAYSIM_SEED is not a valid unsigned integer");
        }
    }
    if (config.contains("seed")) {
        return config.at("seed").get<std::uint64_t>();
    }
    return fallback;
}

Formatter make_formatter(const CommonOptions& opts, const json& config) {
    Formatter fmt;
    fmt.precision = config.value("precision", 6);
    fmt.full = opts.full_precision;
    return fmt;
}

class OutputStream {
public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw ConfigError("cannot open output file: " + path);
            }
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// ------------------------------------------------------------- commands

twohop::TwoHopNetwork parse_two_hop(const json& config) {
    twohop::TwoHopNetwork net;
    net.source_power = parse_power(require(config, "P"), "P");
    net.relay_total_power = parse_power(require(config, "P_R"), "P_R");
    net.f = parse_vector(require(config, "f"), "f");
    net.g = parse_vector(require(config, "g"), "g");
    if (config.contains("K")) {
        net.noise_cov = parse_matrix(config.at("K"), "K");
    } else {
        net.noise_cov = ComplexMatrix::Identity(net.f.size(), net.f.size());
    }
    return net;
}

int cmd_two_hop(const CommonOptions& opts) {
    const json config = load_config(opts.config_path);
    const auto net = parse_two_hop(config);
    const auto schemes = parse_schemes(config);
    const Formatter fmt = make_formatter(opts, config);

    OutputStream out_stream(opts.out_path);
    std::ostream& out = out_stream.get();
    out << "scheme,snr,rate_bits";
    gain_headers(out, "d", net.num_relays());
    out << '\n';
    for (const auto scheme : schemes) {
        twohop::SchemeEval eval;
        try {
            eval = twohop::evaluate_scheme(net, scheme);
        } catch (const RelayError& e) {
            std::cerr << "numerical failure in scheme " << twohop::to_string(scheme) << ": "
                      << e.what() << "\n";
            return 2;
        }
        out << twohop::to_string(scheme) << ',' << fmt(eval.snr) << ',' << fmt(eval.rate_bits);
        append_gain_columns(out, fmt, eval.gain);
        out << '\n';
    }
    return 0;
}

int cmd_multi_source(const CommonOptions& opts) {
    const json config = load_config(opts.config_path);
    twohop::MultiSourceTwoHopNetwork net;
    for (const auto& source : require(config, "sources")) {
        twohop::SourceTerm term;
        term.f = parse_vector(require(source, "f"), "sources[].f");
        term.power = parse_power(require(source, "P"), "sources[].P");
        net.sources.push_back(std::move(term));
    }
    net.relay_total_power = parse_power(require(config, "P_R"), "P_R");
    net.g = parse_vector(require(config, "g"), "g");
    if (config.contains("K")) {
        net.noise_cov = parse_matrix(config.at("K"), "K");
    } else {
        net.noise_cov = ComplexMatrix::Identity(net.g.size(), net.g.size());
    }
    const Formatter fmt = make_formatter(opts, config);

    twohop::SchemeEval eval;
    try {
        eval = twohop::optimal_gain_multisource(net);
    } catch (const RelayError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    OutputStream out_stream(opts.out_path);
    std::ostream& out = out_stream.get();
    out << "scheme,snr,rate_bits";
    gain_headers(out, "d", net.num_relays());
    out << '\n';
    out << twohop::to_string(eval.scheme) << ',' << fmt(eval.snr) << ','
        << fmt(eval.rate_bits);
    append_gain_columns(out, fmt, eval.gain);
    out << '\n';
    return 0;
}

int cmd_three_hop(const CommonOptions& opts) {
    const json config = load_config(opts.config_path);
    threehop::ThreeHopNetwork net;
    net.p0 = parse_power(require(config, "P0"), "P0");
    net.p1 = parse_power(require(config, "P1"), "P1");
    net.p2 = parse_power(require(config, "P2"), "P2");
    net.f = parse_vector(require(config, "f"), "f");
    net.h = parse_matrix(require(config, "H"), "H");
    net.g = parse_vector(require(config, "g"), "g");

    const double tol = config.value("tol", 1e-9);
    const int max_iters = config.value("max_iters", 500);
    const std::uint64_t seed = resolve_seed(opts, config, 1);
    const Formatter fmt = make_formatter(opts, config);

    // Explicit initializations win over seeded random multistart.
    std::vector<std::optional<ComplexVector>> inits;
    if (config.contains("inits")) {
        for (const auto& init : config.at("inits")) {
            inits.emplace_back(parse_vector(init, "inits[]"));
        }
        if (inits.empty()) {
            throw ConfigError("inits: list must be nonempty when present");
        }
    } else {
        const int starts = opts.starts_flag.value_or(config.value("starts", 5));
        if (starts < 1) {
            throw ConfigError("starts: must be >= 1");
        }
        inits.emplace_back(std::nullopt);  // deterministic default
        for (int s = 1; s < starts; ++s) {
            channel::RngStream rng(seed, channel::substream_id(0x3507u, s));
            inits.emplace_back(channel::sample_cn01_vector(net.stage1_relays(), rng));
        }
    }

    std::vector<threehop::OptimizationTrace> traces;
    bool any_converged = false;
    for (std::size_t s = 0; s < inits.size(); ++s) {
        try {
            traces.push_back(threehop::optimize(net, inits[s], tol, max_iters));
        } catch (const RelayError& e) {
            std::cerr << "numerical failure in start " << s << ": " << e.what() << "\n";
            return 2;
        }
        if (!traces.back().converged) {
            std::cerr << "start " << s << ": no convergence within " << max_iters
                      << " cycles\n";
        }
        any_converged = any_converged || traces.back().converged;
    }

    if (!opts.trace_path.empty()) {
        std::ofstream trace_out(opts.trace_path);
        if (!trace_out) {
            throw ConfigError("cannot open trace file: " + opts.trace_path);
        }
        trace_out << "start,iteration,frame,snr\n";
        for (std::size_t s = 0; s < traces.size(); ++s) {
            for (const auto& entry : traces[s].iterations) {
                trace_out << s << ',' << entry.iteration << ','
                          << (entry.reciprocal_frame ? "reciprocal" : "forward") << ','
                          << fmt(entry.snr) << '\n';
            }
        }
    }

    OutputStream out_stream(opts.out_path);
    std::ostream& out = out_stream.get();
    out << "start,iterations,converged,snr,rate_bits";
    gain_headers(out, "d1_", net.stage1_relays());
    gain_headers(out, "d2_", net.stage2_relays());
    out << '\n';
    std::size_t best = 0;
    for (std::size_t s = 0; s < traces.size(); ++s) {
        if (traces[s].final_snr() > traces[best].final_snr()) {
            best = s;
        }
    }
    const auto emit_row = [&](const std::string& label, const threehop::OptimizationTrace& t) {
        out << label << ',' << (t.iterations.size() - 1) << ','
            << (t.converged ? "true" : "false") << ',' << fmt(t.final_snr()) << ','
            << fmt(twohop::rate_bits_from_snr(t.final_snr()));
        append_gain_columns(out, fmt, t.final.d1);
        append_gain_columns(out, fmt, t.final.d2);
        out << '\n';
    };
    for (std::size_t s = 0; s < traces.size(); ++s) {
        emit_row(std::to_string(s), traces[s]);
    }
    emit_row("best", traces[best]);
    return any_converged ? 0 : 2;
}

experiments::SweepSpec parse_sweep_spec(const json& config, const CommonOptions& opts) {
    experiments::SweepSpec spec;
    try {
        spec.variable = experiments::sweep_variable_from_string(
            require(config, "sweep_variable").get<std::string>());
    } catch (const RelayError& e) {
        throw ConfigError(e.what());
    }
    for (const auto& v : require(config, "grid")) {
        if (!v.is_number()) {
            throw ConfigError("grid: entries must be numbers");
        }
        spec.grid.push_back(v.get<double>());
    }
    if (config.contains("fixed")) {
        const json& fixed = config.at("fixed");
        if (fixed.contains("P")) spec.fixed.source_power = parse_power(fixed.at("P"), "fixed.P");
        if (fixed.contains("P_R"))
            spec.fixed.relay_power = parse_power(fixed.at("P_R"), "fixed.P_R");
        if (fixed.contains("P_I"))
            spec.fixed.interference_power = parse_power(fixed.at("P_I"), "fixed.P_I");
        if (fixed.contains("N")) spec.fixed.num_relays = fixed.at("N").get<int>();
        if (fixed.contains("Q")) spec.fixed.num_interferers = fixed.at("Q").get<int>();
    }
    spec.trials = opts.trials_flag.value_or(config.value("trials", 20000));
    spec.seed = resolve_seed(opts, config, 1);
    spec.schemes = parse_schemes(config);
    try {
        experiments::validate(spec);
    } catch (const RelayError& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

int cmd_sweep(const CommonOptions& opts) {
    const json config = load_config(opts.config_path);
    const auto spec = parse_sweep_spec(config, opts);
    const Formatter fmt = make_formatter(opts, config);

    OutputStream out_stream(opts.out_path);
    std::ostream& out = out_stream.get();
    out << "sweep_var,sweep_value,scheme,trials,mean_snr,mean_rate_bits,stderr_rate\n";
    out.flush();

    // One grid point at a time so partial results survive an interrupt.
    for (const double value : spec.grid) {
        if (g_interrupted.load()) {
            out << "TRUNCATED,,,,,,\n";
            out.flush();
            return 0;
        }
        experiments::SweepSpec point = spec;
        point.grid = {value};
        experiments::SweepResult result;
        try {
            result = experiments::run_sweep(point);
        } catch (const RelayError& e) {
            std::cerr << "numerical failure at sweep value " << value << ": " << e.what()
                      << "\n";
            return 2;
        }
        for (const auto& cell : result.cells) {
            out << experiments::to_string(spec.variable) << ',' << fmt(cell.sweep_value) << ','
                << twohop::to_string(cell.scheme) << ',' << cell.trials << ','
                << fmt(cell.mean_snr) << ',' << fmt(cell.mean_rate_bits) << ','
                << fmt(cell.stderr_rate) << '\n';
        }
        out.flush();
    }
    return 0;
}

int cmd_verify(const CommonOptions& opts) {
    json config = json::object();
    if (!opts.config_path.empty()) {
        config = load_config(opts.config_path);
    }
    verify::VerifyOptions options;
    options.seed = resolve_seed(opts, config, options.seed);
    options.ordering_trials = opts.trials_flag.value_or(
        config.value("trials", options.ordering_trials));
    options.oracle_instances = config.value("instances", options.oracle_instances);
    options.probes = config.value("probes", options.probes);
    options.expectation_draws = config.value("expectation_draws", options.expectation_draws);
    options.reciprocity_cases = config.value("reciprocity_cases", options.reciprocity_cases);
    options.big_power = config.value("big_power", options.big_power);
    const Formatter fmt = make_formatter(opts, config);

    std::vector<verify::CriterionResult> results;
    try {
        results = verify::run_acceptance_suite(options, nullptr);
    } catch (const RelayError& e) {
        std::cerr << "numerical failure in verification: " << e.what() << "\n";
        return 2;
    }
    OutputStream out_stream(opts.out_path);
    std::ostream& out = out_stream.get();
    out << "check_name,expected,achieved,margin,pass\n";
    bool all_pass = true;
    for (const auto& criterion : results) {
        for (const auto& check : criterion.checks) {
            out << check.name << ',' << fmt(check.expected) << ',' << fmt(check.achieved)
                << ',' << fmt(check.margin) << ',' << (check.pass ? "true" : "false") << '\n';
        }
        all_pass = all_pass && criterion.pass;
    }
    return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relay gain optimization and Monte Carlo simulation for two- and "
                 "three-hop amplify-and-forward relay networks"};
    app.require_subcommand(1);

    CommonOptions opts;
    const auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* config_opt = cmd->add_option("--config", opts.config_path, "JSON config file");
        if (config_required) {
            config_opt->required();
        }
        cmd->add_option("--out", opts.out_path, "output CSV path (default stdout)");
        cmd->add_option("--seed", opts.seed_flag, "override the RNG seed");
        cmd->add_option("--trials", opts.trials_flag, "override the Monte Carlo trial count");
        cmd->add_option("--starts", opts.starts_flag, "number of optimizer starts");
        cmd->add_option("--trace", opts.trace_path, "per-iteration trace CSV (three-hop)");
        cmd->add_flag("--full-precision", opts.full_precision,
                      "emit full double precision instead of fixed decimals");
    };

    auto* two_hop = app.add_subcommand("two-hop", "evaluate schemes on a two-hop network");
    add_common(two_hop, true);
    auto* three_hop =
        app.add_subcommand("three-hop", "alternating optimization of a three-hop network");
    add_common(three_hop, true);
    auto* multi_source =
        app.add_subcommand("multi-source", "optimal sum-rate gain for a multi-source network");
    add_common(multi_source, true);
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep, CSV per (point, scheme)");
    add_common(sweep, true);
    auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
    add_common(verify_cmd, false);

    CLI11_PARSE(app, argc, argv);

    std::signal(SIGINT, handle_interrupt);
    std::signal(SIGTERM, handle_interrupt);

    try {
        if (two_hop->parsed()) return cmd_two_hop(opts);
        if (three_hop->parsed()) return cmd_three_hop(opts);
        if (multi_source->parsed()) return cmd_multi_source(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (verify_cmd->parsed()) return cmd_verify(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const RelayError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
