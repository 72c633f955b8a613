#include "ustat/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "ustat/bounds.hpp"
#include "ustat/csv_io.hpp"
#include "ustat/distributions.hpp"
#include "ustat/error.hpp"
#include "ustat/format.hpp"
#include "ustat/kernels.hpp"
#include "ustat/montecarlo.hpp"
#include "ustat/robust.hpp"
#include "ustat/ustat_core.hpp"

namespace ustat::cli {

using nlohmann::json;

void to_json(json& j, const RunConfig& cfg) {
    j = json::object();
    j["subcommand"] = cfg.subcommand;
    j["format"] = cfg.format;
    j["seed"] = cfg.seed;
    if (!cfg.kernel.empty()) j["kernel"] = cfg.kernel;
    if (!cfg.input.empty()) j["input"] = cfg.input;
    if (!cfg.type.empty()) j["type"] = cfg.type;
    if (!cfg.dist.empty()) j["dist"] = cfg.dist;
    if (cfg.n) j["n"] = *cfg.n;
    if (cfg.m) j["m"] = *cfg.m;
    if (cfg.delta) j["delta"] = *cfg.delta;
    if (cfg.sup_norm) j["sup_norm"] = *cfg.sup_norm;
    if (cfg.variance) j["variance"] = *cfg.variance;
    if (cfg.c1) j["c1"] = *cfg.c1;
    if (cfg.c2) j["c2"] = *cfg.c2;
    if (cfg.tail_at) j["tail_at"] = *cfg.tail_at;
    if (cfg.blocks) j["blocks"] = *cfg.blocks;
    if (cfg.trials) j["trials"] = *cfg.trials;
    if (cfg.kernel_mean) j["kernel_mean"] = *cfg.kernel_mean;
    if (!cfg.n_grid.empty()) j["n_grid"] = cfg.n_grid;
    if (cfg.q) j["q"] = *cfg.q;
    if (cfg.probes) j["probes"] = *cfg.probes;
    if (cfg.samples) j["samples"] = *cfg.samples;
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& into) {
    if (const auto it = j.find(key); it != j.end()) into = it->get<T>();
}

template <typename T>
void read_field(const json& j, const char* key, std::optional<T>& into) {
    if (const auto it = j.find(key); it != j.end()) into = it->get<T>();
}

}  // namespace

void from_json(const json& j, RunConfig& cfg) {
    read_field(j, "subcommand", cfg.subcommand);
    read_field(j, "format", cfg.format);
    read_field(j, "seed", cfg.seed);
    read_field(j, "kernel", cfg.kernel);
    read_field(j, "input", cfg.input);
    read_field(j, "type", cfg.type);
    read_field(j, "dist", cfg.dist);
    read_field(j, "n", cfg.n);
    read_field(j, "m", cfg.m);
    read_field(j, "delta", cfg.delta);
    read_field(j, "sup_norm", cfg.sup_norm);
    read_field(j, "variance", cfg.variance);
    read_field(j, "c1", cfg.c1);
    read_field(j, "c2", cfg.c2);
    read_field(j, "tail_at", cfg.tail_at);
    read_field(j, "blocks", cfg.blocks);
    read_field(j, "trials", cfg.trials);
    read_field(j, "kernel_mean", cfg.kernel_mean);
    read_field(j, "n_grid", cfg.n_grid);
    read_field(j, "q", cfg.q);
    read_field(j, "probes", cfg.probes);
    read_field(j, "samples", cfg.samples);
}

namespace {

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io_error, "cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail(ErrorCode::parse_error, "config '" + path + "': " + e.what());
    }
    try {
        cfg = j.get<RunConfig>();
    } catch (const json::exception& e) {
        fail(ErrorCode::parse_error, "config '" + path + "': " + e.what());
    }
}

const CLI::Validator kOpenUnitInterval(
    [](std::string& s) {
        double v = 0.0;
        try {
            v = std::stod(s);
        } catch (...) {
            return std::string("value '" + s + "' is not a real");
        }
        if (!(v > 0.0 && v < 1.0)) {
            return std::string("value " + s + " must lie in the open interval (0,1)");
        }
        return std::string();
    },
    "FLOAT in (0,1)", "open_unit");

void require_field(bool present, const std::string& subcommand, const char* flag) {
    if (!present) {
        fail(ErrorCode::parse_error, subcommand + ": missing required " + std::string(flag));
    }
}

void validate_required(const RunConfig& cfg) {
    const std::string& sc = cfg.subcommand;
    if (sc == "estimate") {
        require_field(!cfg.kernel.empty(), sc, "--kernel");
        require_field(!cfg.input.empty(), sc, "--input");
    } else if (sc == "k3") {
        require_field(!cfg.input.empty(), sc, "--input");
    } else if (sc == "bound") {
        require_field(!cfg.type.empty(), sc, "--type");
        require_field(cfg.n.has_value(), sc, "--n");
        require_field(cfg.m.has_value(), sc, "--m");
        require_field(cfg.delta.has_value(), sc, "--delta");
    } else if (sc == "mom") {
        require_field(!cfg.kernel.empty(), sc, "--kernel");
        require_field(!cfg.input.empty(), sc, "--input");
        require_field(cfg.blocks.has_value() || cfg.delta.has_value(), sc,
                      "--blocks or --delta");
    } else if (sc == "verify") {
        require_field(!cfg.kernel.empty(), sc, "--kernel");
        require_field(!cfg.dist.empty(), sc, "--dist");
        require_field(cfg.n.has_value(), sc, "--n");
        require_field(cfg.trials.has_value(), sc, "--trials");
        require_field(cfg.delta.has_value(), sc, "--delta");
    } else if (sc == "rate") {
        require_field(!cfg.kernel.empty(), sc, "--kernel");
        require_field(!cfg.dist.empty(), sc, "--dist");
        require_field(!cfg.n_grid.empty(), sc, "--n-grid");
        require_field(cfg.trials.has_value(), sc, "--trials");
    } else if (sc == "degeneracy") {
        require_field(!cfg.kernel.empty(), sc, "--kernel");
        require_field(!cfg.dist.empty(), sc, "--dist");
        require_field(cfg.q.has_value(), sc, "--q");
        require_field(cfg.probes.has_value(), sc, "--probes");
        require_field(cfg.samples.has_value(), sc, "--samples");
    }
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig cfg;

    // config file first, so explicit flags override its values
    for (std::size_t i = 0; i < args.size(); ++i) {
        constexpr std::string_view eq = "--config=";
        if (args[i] == "--config" && i + 1 < args.size()) {
            load_config_file(args[i + 1], cfg);
        } else if (args[i].rfind(eq, 0) == 0) {
            load_config_file(args[i].substr(eq.size()), cfg);
        }
    }

    CLI::App app{"U-statistics, concentration bounds, and seeded Monte Carlo verification"};
    app.require_subcommand(0, 1);

    std::string config_path;  // consumed above; registered so CLI11 accepts it
    const auto add_common = [&](CLI::App* sc) {
        sc->add_option("--format", cfg.format, "output format: text, csv, or json")
            ->check(CLI::IsMember({"text", "csv", "json"}));
        sc->add_option("--seed", cfg.seed, "master RNG seed");
        sc->add_option("--config", config_path,
                       "JSON config supplying defaults (the echo of a --format json run)");
        return sc;
    };

    auto* estimate = add_common(app.add_subcommand("estimate", "U-statistic of a CSV sample"));
    estimate->add_option("--kernel", cfg.kernel, "variance | product | variance-clipped:<lo>:<hi>");
    estimate->add_option("--input", cfg.input, "headerless single-column CSV of reals");

    auto* k3 = add_common(app.add_subcommand("k3", "third k-statistic of a CSV sample"));
    k3->add_option("--input", cfg.input, "headerless single-column CSV of reals");

    auto* bound = add_common(app.add_subcommand("bound", "evaluate a concentration bound"));
    bound->add_option("--type", cfg.type, "hoeffding | bernstein | ag-bounded | ag-variance")
        ->check(CLI::IsMember({"hoeffding", "bernstein", "ag-bounded", "ag-variance"}));
    bound->add_option("--n", cfg.n, "sample size")->check(CLI::PositiveNumber);
    bound->add_option("--m", cfg.m, "kernel order")->check(CLI::PositiveNumber);
    bound->add_option("--delta", cfg.delta, "confidence parameter")->check(kOpenUnitInterval);
    bound->add_option("--sup-norm", cfg.sup_norm, "known bound on |h|")
        ->check(CLI::NonNegativeNumber);
    bound->add_option("--variance", cfg.variance, "Var h(X_1..X_m)")
        ->check(CLI::NonNegativeNumber);
    bound->add_option("--c1", cfg.c1, "Arcones-Gine constant")->check(CLI::PositiveNumber);
    bound->add_option("--c2", cfg.c2, "Arcones-Gine constant")->check(CLI::PositiveNumber);
    bound->add_option("--tail-at", cfg.tail_at, "evaluate the tail at this t instead")
        ->check(CLI::NonNegativeNumber);

    auto* mom = add_common(app.add_subcommand("mom", "median-of-means estimate"));
    mom->add_option("--kernel", cfg.kernel, "mean | variance | product | variance-clipped:...");
    mom->add_option("--input", cfg.input, "headerless single-column CSV of reals");
    auto* mom_blocks =
        mom->add_option("--blocks", cfg.blocks, "explicit block count V")
            ->check(CLI::PositiveNumber);
    mom->add_option("--delta", cfg.delta, "drive V = ceil(log(1/delta))")
        ->check(kOpenUnitInterval)
        ->excludes(mom_blocks);

    auto* verify = add_common(
        app.add_subcommand("verify", "empirical tail vs. bounds over a t grid"));
    verify->add_option("--kernel", cfg.kernel, "kernel name");
    verify->add_option("--dist", cfg.dist, "uniform:a:b | normal:mu:sigma | pareto:alpha:xmin | t:nu");
    verify->add_option("--n", cfg.n, "sample size per trial")->check(CLI::PositiveNumber);
    verify->add_option("--trials", cfg.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    verify->add_option("--delta", cfg.delta, "confidence parameter for the t grid")
        ->check(kOpenUnitInterval);
    verify->add_option("--sup-norm", cfg.sup_norm, "override the kernel sup_norm")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--variance", cfg.variance, "kernel variance (overrides the closed form)")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--kernel-mean", cfg.kernel_mean,
                       "m_h to center on (overrides closed form and prepass)");

    auto* rate = add_common(app.add_subcommand("rate", "median deviation of U_n across an n grid"));
    rate->add_option("--kernel", cfg.kernel, "kernel name");
    rate->add_option("--dist", cfg.dist, "distribution spec");
    rate->add_option("--n-grid", cfg.n_grid, "strictly increasing n values (comma separated)")
        ->delimiter(',');
    rate->add_option("--trials", cfg.trials, "trials per grid point")->check(CLI::PositiveNumber);
    rate->add_option("--kernel-mean", cfg.kernel_mean, "m_h to center on");

    auto* degeneracy = add_common(
        app.add_subcommand("degeneracy", "probe whether a kernel is conditionally constant"));
    degeneracy->add_option("--kernel", cfg.kernel, "kernel name");
    degeneracy->add_option("--dist", cfg.dist, "distribution spec");
    degeneracy->add_option("--q", cfg.q, "number of fixed leading arguments (1 <= q < m)")
        ->check(CLI::PositiveNumber);
    degeneracy->add_option("--probes", cfg.probes, "number of fixed prefixes")
        ->check(CLI::PositiveNumber);
    degeneracy->add_option("--samples", cfg.samples, "Monte Carlo draws per probe")
        ->check(CLI::PositiveNumber);

    if (args.empty()) {
        fail(ErrorCode::parse_error, "a subcommand is required\n\n" + app.help());
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream out_stream, err_stream;
        const int code = app.exit(e, out_stream, err_stream);
        if (code == 0) throw HelpRequested{out_stream.str()};
        std::string msg = err_stream.str();
        while (!msg.empty() && msg.back() == '\n') msg.pop_back();
        fail(ErrorCode::parse_error, msg);
    }

    CLI::App* chosen = nullptr;
    for (auto* sc : app.get_subcommands()) chosen = sc;
    if (chosen == nullptr) {
        // config file named the subcommand and the command line only tweaked flags
        if (cfg.subcommand.empty()) {
            fail(ErrorCode::parse_error, "a subcommand is required\n\n" + app.help());
        }
    } else {
        cfg.subcommand = chosen->get_name();
        // an explicit --delta replaces a config-supplied block count (and vice
        // versa); the pair is mutually exclusive on the command line itself
        if (chosen == mom) {
            if (mom->count("--delta") > 0 && mom->count("--blocks") == 0) cfg.blocks.reset();
            if (mom->count("--blocks") > 0 && mom->count("--delta") == 0) cfg.delta.reset();
        }
    }

    validate_required(cfg);
    return cfg;
}

namespace {

int env_workers() {
    const char* raw = std::getenv("USTAT_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    const long v = std::strtol(raw, nullptr, 10);
    return v > 0 ? static_cast<int>(v) : 0;
}

json echo_of(const RunConfig& cfg) {
    json j = cfg;
    return j;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text, json echo) {
    if (cfg.format == "json") {
        out << echo.dump(2) << "\n";
    } else {
        out << text;
    }
}

int run_estimate(const RunConfig& cfg, std::ostream& out) {
    const Kernel kernel = kernel_from_name(cfg.kernel);
    const Sample sample = read_sample_csv(cfg.input);
    const double value = u_statistic(kernel, sample);

    if (cfg.format == "csv") {
        fail(ErrorCode::invalid_config, "estimate: --format csv applies to verify and rate only");
    }
    json echo = echo_of(cfg);
    echo["outputs"] = {{"estimate", value}, {"n", sample.size()}};
    emit(cfg, out, format_g15(value) + "\n", std::move(echo));
    return 0;
}

int run_k3(const RunConfig& cfg, std::ostream& out) {
    const Sample sample = read_sample_csv(cfg.input);
    const double value = k3_statistic(sample);

    if (cfg.format == "csv") {
        fail(ErrorCode::invalid_config, "k3: --format csv applies to verify and rate only");
    }
    json echo = echo_of(cfg);
    echo["outputs"] = {{"estimate", value}, {"n", sample.size()}};
    emit(cfg, out, format_g15(value) + "\n", std::move(echo));
    return 0;
}

BoundKind bound_kind_from_name(const std::string& name) {
    if (name == "hoeffding") return BoundKind::hoeffding;
    if (name == "bernstein") return BoundKind::bernstein;
    if (name == "ag-bounded") return BoundKind::arcones_gine_bounded;
    if (name == "ag-variance") return BoundKind::arcones_gine_variance;
    fail(ErrorCode::parse_error, "--type: unknown bound '" + name +
                                     "' (hoeffding, bernstein, ag-bounded, ag-variance)");
}

int run_bound(const RunConfig& cfg, std::ostream& out) {
    BoundQuery query;
    query.n = *cfg.n;
    query.m = *cfg.m;
    query.delta = *cfg.delta;
    query.sup_norm = cfg.sup_norm;
    query.variance = cfg.variance;
    query.c1 = cfg.c1;
    query.c2 = cfg.c2;
    const BoundResult result = evaluate_bound(bound_kind_from_name(cfg.type), query, cfg.tail_at);

    if (cfg.format == "csv") {
        fail(ErrorCode::invalid_config, "bound: --format csv applies to verify and rate only");
    }
    std::string text;
    json outputs;
    outputs["k"] = query.blocks();
    if (result.threshold) {
        text = "threshold=" + format_g15(*result.threshold) + "\n";
        outputs["kind"] = "threshold";
        outputs["value"] = *result.threshold;
    } else {
        text = "tail=" + format_g15(*result.tail_probability) + "\n";
        outputs["kind"] = "tail";
        outputs["value"] = *result.tail_probability;
    }
    json echo = echo_of(cfg);
    echo["outputs"] = std::move(outputs);
    emit(cfg, out, text, std::move(echo));
    return 0;
}

int run_mom(const RunConfig& cfg, std::ostream& out) {
    const Sample sample = read_sample_csv(cfg.input);

    MoMConfig mc;
    if (cfg.blocks) {
        mc.blocks = cfg.blocks;
    } else {
        mc.delta = cfg.delta;
    }

    double value = 0.0;
    BlockCount used{};
    if (cfg.kernel == "mean") {
        used = resolve_block_count(mc, static_cast<std::int64_t>(sample.size()), 1);
        value = median_of_means(sample, mc);
    } else {
        const Kernel kernel = kernel_from_name(cfg.kernel);
        used = resolve_block_count(mc, static_cast<std::int64_t>(sample.size()), kernel.order);
        value = mom_u_statistic(kernel, sample, mc);
    }

    if (cfg.format == "csv") {
        fail(ErrorCode::invalid_config, "mom: --format csv applies to verify and rate only");
    }
    RunConfig resolved = cfg;
    resolved.blocks = used.blocks;  // the effective V; reruns reuse it directly
    resolved.delta.reset();
    json echo = echo_of(resolved);
    echo["outputs"] = {{"estimate", value}, {"blocks_used", used.blocks}, {"clamped", used.clamped}};
    emit(cfg, out, "estimate=" + format_g15(value) + "\nblocks=" + std::to_string(used.blocks) + "\n",
         std::move(echo));
    return 0;
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
    const Kernel kernel = kernel_from_name(cfg.kernel);
    const Distribution dist = parse_distribution(cfg.dist);
    McOptions opts;
    opts.workers = env_workers();
    opts.kernel_mean_override = cfg.kernel_mean;

    const VerifyReport report = ustat::run_verify(dist, kernel, *cfg.n, *cfg.trials, *cfg.delta,
                                                  cfg.seed, opts, cfg.sup_norm, cfg.variance);
    const std::string csv = verify_csv(report);

    RunConfig resolved = cfg;
    resolved.sup_norm = report.query.sup_norm;
    resolved.variance = report.query.variance;
    resolved.kernel_mean = report.kernel_mean;
    json echo = echo_of(resolved);
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"t", row.t},
                        {"empirical_tail", row.empirical_tail},
                        {"hoeffding_tail", row.hoeffding_tail},
                        {"bernstein_tail", row.bernstein_tail}});
    }
    echo["outputs"] = {{"k", report.query.blocks()},
                       {"threshold", report.threshold},
                       {"kernel_mean_estimated", report.kernel_mean_estimated},
                       {"rows", std::move(rows)}};
    emit(cfg, out, csv, std::move(echo));
    return 0;
}

int run_rate(const RunConfig& cfg, std::ostream& out) {
    const Kernel kernel = kernel_from_name(cfg.kernel);
    const Distribution dist = parse_distribution(cfg.dist);
    McOptions opts;
    opts.workers = env_workers();
    opts.kernel_mean_override = cfg.kernel_mean;

    const RateReport report =
        rate_experiment(dist, kernel, cfg.n_grid, *cfg.trials, cfg.seed, opts);
    const std::string csv = rate_csv(report);

    json points = json::array();
    for (const auto& p : report.points) {
        points.push_back({{"n", p.n}, {"median_abs_dev", p.median_abs_dev}});
    }
    json echo = echo_of(cfg);
    echo["outputs"] = {{"points", std::move(points)},
                       {"slope", report.slope},
                       {"intercept", report.intercept}};
    emit(cfg, out, csv, std::move(echo));
    return 0;
}

int run_degeneracy(const RunConfig& cfg, std::ostream& out) {
    const Kernel kernel = kernel_from_name(cfg.kernel);
    const Distribution dist = parse_distribution(cfg.dist);
    McOptions opts;
    opts.workers = env_workers();

    const DegeneracyReport report =
        check_degeneracy(dist, kernel, *cfg.q, *cfg.probes, *cfg.samples, cfg.seed, opts);

    if (cfg.format == "csv") {
        fail(ErrorCode::invalid_config, "degeneracy: --format csv applies to verify and rate only");
    }
    const std::string text = "spread=" + format_g15(report.max_conditional_spread) +
                             "\npooled_se=" + format_g15(report.pooled_se) +
                             "\nconstant=" + (report.is_constant_within_tol ? "true" : "false") +
                             "\n";
    json echo = echo_of(cfg);
    echo["outputs"] = {{"max_conditional_spread", report.max_conditional_spread},
                       {"pooled_se", report.pooled_se},
                       {"is_constant_within_tol", report.is_constant_within_tol},
                       {"probe_means", report.probe_means},
                       {"probe_std_errors", report.probe_std_errors}};
    emit(cfg, out, text, std::move(echo));
    return 0;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out) {
    if (cfg.subcommand == "estimate") return run_estimate(cfg, out);
    if (cfg.subcommand == "k3") return run_k3(cfg, out);
    if (cfg.subcommand == "bound") return run_bound(cfg, out);
    if (cfg.subcommand == "mom") return run_mom(cfg, out);
    if (cfg.subcommand == "verify") return run_verify(cfg, out);
    if (cfg.subcommand == "rate") return run_rate(cfg, out);
    if (cfg.subcommand == "degeneracy") return run_degeneracy(cfg, out);
    fail(ErrorCode::invalid_config, "unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace ustat::cli
