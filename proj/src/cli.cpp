#include "abstop/cli.hpp"

#include "abstop/boundary_solver.hpp"
#include "abstop/bridge_simulator.hpp"
#include "abstop/error.hpp"
#include "abstop/json_format.hpp"
#include "abstop/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace abstop::cli {
namespace {

// Extremum report is attached to sweeps whose range covers this window.
constexpr double kExtremaLo = 0.3;
constexpr double kExtremaHi = 1.3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveArgs {
    double alpha = 0.0;
};

struct SweepArgs {
    double from = 0.0;
    double to = 0.0;
    std::size_t points = 0;
    std::string out;
};

struct SimulateArgs {
    double alpha = 0.0;
    std::size_t paths = 100000;
    std::size_t steps = 4000;
    std::uint64_t seed = 0;
    std::optional<double> boundary;
};

struct VerifyArgs {
    double tol_scale = 1.0;
    std::size_t paths = 100000;
    std::size_t steps = 4000;
    std::uint64_t seed = 1;
};

class JsonObject {
public:
    JsonObject& add(std::string_view key, double value) { return raw(key, json::number(value)); }
    JsonObject& add(std::string_view key, std::size_t value) { return raw(key, std::to_string(value)); }
    JsonObject& add(std::string_view key, std::string_view value) { return raw(key, json::string(value)); }
    [[nodiscard]] std::string str() const { return text_ + "}"; }

private:
    JsonObject& raw(std::string_view key, const std::string& value) {
        text_ += text_.size() == 1 ? "" : ",";
        text_ += json::string(key) + ":" + value;
        return *this;
    }
    std::string text_ = "{";
};

int do_solve(const SolveArgs& args, std::ostream& out) {
    if (!(args.alpha > 0.0)) {
        throw UsageError("solve: --alpha must be > 0 (alpha = 0 has V = 0 and no stopping boundary)");
    }
    const StoppingSolution s = solve_constants(args.alpha);
    out << JsonObject()
               .add("alpha", s.alpha)
               .add("B", s.B)
               .add("C", s.C)
               .add("V", s.V)
               .add("regime", to_string(s.regime))
               .str()
        << '\n';
    return kExitOk;
}

int do_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    if (!(args.from >= 0.0) || !(args.to > args.from)) {
        throw UsageError("sweep: requires 0 <= --from < --to");
    }
    if (args.points < 2) {
        throw UsageError("sweep: --points must be >= 2");
    }
    const double from = std::max(args.from, kSweepAlphaFloor);
    if (!(args.to > from)) {
        throw UsageError("sweep: --to must exceed the alpha floor 0.01");
    }
    const std::vector<SweepRow> rows = sweep(from, args.to, args.points);
    std::ofstream file(args.out);
    if (!file) {
        throw UsageError("sweep: cannot open `" + args.out + "` for writing");
    }
    write_sweep_csv(file, rows);
    file.close();
    if (!file) {
        throw Error(ErrorKind::domain, "sweep: failed writing `" + args.out + "`");
    }

    std::size_t failed = 0;
    for (const SweepRow& row : rows) {
        if (!row.ok()) {
            ++failed;
            err << "sweep: alpha=" << json::number(row.alpha) << ": " << *row.error << '\n';
        }
    }
    JsonObject report;
    report.add("rows", rows.size()).add("failed", failed).add("out", args.out);
    if (from <= kExtremaLo && args.to >= kExtremaHi) {
        std::vector<SweepRow> window;
        std::copy_if(rows.begin(), rows.end(), std::back_inserter(window),
                     [](const SweepRow& r) { return r.alpha >= kExtremaLo && r.alpha <= kExtremaHi; });
        try {
            const Extrema e = locate_extrema(window);
            report.add("alpha_local_min", e.alpha_local_min)
                .add("V_local_min", e.V_local_min)
                .add("alpha_local_max", e.alpha_local_max)
                .add("V_local_max", e.V_local_max);
        } catch (const Error& ex) {
            err << "sweep: " << ex.what() << '\n';
        }
    }
    out << report.str() << '\n';
    return kExitOk;
}

int do_simulate(const SimulateArgs& args, std::ostream& out) {
    if (!(args.alpha >= 0.0)) {
        throw UsageError("simulate: --alpha must be >= 0");
    }
    if (args.paths < 100) {
        throw UsageError("simulate: --paths must be >= 100");
    }
    if (args.steps < 2) {
        throw UsageError("simulate: --steps must be >= 2");
    }
    if (args.boundary && !(*args.boundary > 0.0)) {
        throw UsageError("simulate: --boundary must be > 0");
    }
    double B = 1.0;
    double V = 0.0;
    if (args.alpha > 0.0) {
        const StoppingSolution s = solve_constants(args.alpha);
        B = s.B;
        V = s.V;
    }
    if (args.boundary) {
        B = *args.boundary;
    }
    PathConfig config;
    config.alpha = args.alpha;
    config.n_steps = args.steps;
    config.grid = GridKind::geometric;
    config.seed = args.seed;
    const McEstimate mc = estimate_value(config, B, args.paths, V);
    out << JsonObject()
               .add("mean", mc.mean)
               .add("stderr", mc.std_error)
               .add("analytic_V", mc.analytic_v)
               .add("z_score", mc.z_score)
               .add("mean_tau", mc.mean_stop_time)
               .str()
        << '\n';
    return kExitOk;
}

int do_verify(const VerifyArgs& args, std::ostream& out) {
    if (!(args.tol_scale > 0.0)) {
        throw UsageError("verify: --tol-scale must be > 0");
    }
    if (args.paths < 100 || args.steps < 2) {
        throw UsageError("verify: requires --paths >= 100 and --steps >= 2");
    }
    SuiteOptions options;
    options.tol_scale = args.tol_scale;
    options.mc_paths = args.paths;
    options.mc_steps = args.steps;
    options.seed = args.seed;
    const std::vector<VerificationReport> reports = run_verification_suite(options);
    out << to_json(reports) << '\n';
    const bool all = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
    return all ? kExitOk : kExitFailure;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal stopping of the alpha-Brownian bridge", "abstop"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Boundary and value constants for one alpha");
    solve->add_option("--alpha", solve_args.alpha, "Mean-reversion strength (> 0)")->required();

    SweepArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Solve over an alpha grid and write CSV");
    sweep_cmd->add_option("--from", sweep_args.from, "First alpha (clamped to 0.01)")->required();
    sweep_cmd->add_option("--to", sweep_args.to, "Last alpha")->required();
    sweep_cmd->add_option("--points", sweep_args.points, "Grid size (>= 2)")->required();
    sweep_cmd->add_option("--out", sweep_args.out, "CSV output path")->required();

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the stopped value");
    simulate->add_option("--alpha", sim_args.alpha, "Mean-reversion strength (>= 0)")->required();
    simulate->add_option("--paths", sim_args.paths, "Number of paths")->capture_default_str();
    simulate->add_option("--steps", sim_args.steps, "Geometric grid steps")->capture_default_str();
    simulate->add_option("--seed", sim_args.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--boundary", sim_args.boundary, "Override the boundary constant B");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Run every oracle and Monte Carlo check");
    verify->add_option("--tol-scale", verify_args.tol_scale, "Multiply every tolerance")->capture_default_str();
    verify->add_option("--paths", verify_args.paths, "Monte Carlo paths")->capture_default_str();
    verify->add_option("--steps", verify_args.steps, "Monte Carlo steps")->capture_default_str();
    verify->add_option("--seed", verify_args.seed, "Monte Carlo seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) {
            return do_solve(solve_args, out);
        }
        if (sweep_cmd->parsed()) {
            return do_sweep(sweep_args, out, err);
        }
        if (simulate->parsed()) {
            return do_simulate(sim_args, out);
        }
        return do_verify(verify_args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace abstop::cli
