// purity-lab command line front end.
//
//   purity-lab analyze --state "ghz(3) x bell" [--rate --np --profile ...]
//   purity-lab analyze --file state.json --np
//
// Exit codes: 0 success, 1 parse/validation failure, 2 dimension cap
// exceeded. With --exit-by-verdict: 0 separable / necessary-condition-passed,
// 3 entanglement detected, 4 inconclusive.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "purity_lab/purity_lab.hpp"

namespace {

using namespace purity_lab;

struct AnalyzeOptions {
    std::string state_expr;
    std::string file_path;
    bool want_rate = false;
    bool want_np = false;
    bool want_profile = false;
    double tol = kPurityTol;
    std::size_t max_dim = kDefaultDimCap;
    int workers = 1;
    std::string format; // "", "json", "text"
    bool normalize = false;
    bool no_timing = false;
    bool exit_by_verdict = false;
};

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

int verdict_exit_code(const report::Report& rep) {
    if (rep.verdict == "separable" || rep.verdict == "necessary-condition-passed") return 0;
    if (rep.verdict == "inconclusive-no-pure-substates") return 4;
    return 3;
}

struct LoadedInput {
    std::variant<PureState, DensityMatrix> state;
    std::vector<std::string> warnings;
    report::InputEcho echo;
};

LoadedInput load_input(const AnalyzeOptions& opt) {
    std::optional<LoadedInput> in;
    if (!opt.state_expr.empty()) {
        // interactive convenience: expressions renormalize by default
        const ket::StateExpr expr = ket::parse(opt.state_expr);
        ket::EvalResult result = ket::evaluate(expr, NormalizePolicy::Lenient, opt.max_dim);
        in.emplace(LoadedInput{std::move(result.state), std::move(result.warnings), {}});
        in->echo.expression = opt.state_expr;
    } else {
        const NormalizePolicy policy =
            opt.normalize ? NormalizePolicy::Lenient : NormalizePolicy::Strict;
        io::LoadedState loaded = io::load_state_file(opt.file_path, policy, opt.max_dim);
        in.emplace(LoadedInput{std::move(loaded.state), std::move(loaded.warnings), {}});
        in->echo.file = opt.file_path;
    }
    const bool density = std::holds_alternative<DensityMatrix>(in->state);
    const LocalDims& dims = density ? std::get<DensityMatrix>(in->state).dims()
                                    : std::get<PureState>(in->state).dims();
    in->echo.kind = density ? "mixed" : "pure";
    in->echo.dims = dims.dims();
    in->echo.n = dims.site_count();
    in->echo.total_dim = dims.total_dim();
    return std::move(*in);
}

int run_analyze(const AnalyzeOptions& opt) {
    const auto t_start = std::chrono::steady_clock::now();

    LoadedInput in = load_input(opt);

    report::Report rep;
    rep.input = in.echo;
    rep.purity_tol = opt.tol;
    rep.workers = resolve_workers(opt.workers);
    rep.warnings = std::move(in.warnings);
    const double t_load = ms_since(t_start);

    const bool density_input = std::holds_alternative<DensityMatrix>(in.state);
    if (opt.want_rate && (density_input || opt.want_np))
        throw ValidationError("--rate needs a pure-state input (and excludes --np)");
    // default mode (no --rate/--np) includes the full gamma table
    const bool include_profile = opt.want_profile || (!opt.want_rate && !opt.want_np);

    const auto t_analysis = std::chrono::steady_clock::now();
    if (density_input || opt.want_np) {
        const DensityMatrix rho = density_input
                                      ? std::get<DensityMatrix>(std::move(in.state))
                                      : density_from_pure(std::get<PureState>(in.state));
        MixedAnalysis mixed = np_mixed(rho, opt.tol, opt.workers);
        rep.verdict = to_string(mixed.verdict);
        rep.mixed = std::move(mixed);
        if (include_profile) rep.profile = purity_profile(rho, opt.tol, opt.workers);
    } else {
        const PureState& psi = std::get<PureState>(in.state);
        const SeparabilityResult sep = is_separable_pure(psi, opt.tol, opt.workers);
        rep.verdict = sep.separable ? "separable" : "entanglement-present";
        rep.witness_sites = sep.impure_sites;
        rep.rate = total_rate(psi, opt.tol, opt.workers);
        if (include_profile) rep.profile = purity_profile(psi, opt.tol, opt.workers);
    }

    if (!opt.no_timing) {
        rep.timing_ms["load"] = t_load;
        rep.timing_ms["analysis"] = ms_since(t_analysis);
        rep.timing_ms["total"] = ms_since(t_start);
    }

    const bool json_out =
        opt.format.empty() ? (isatty(fileno(stdout)) == 0) : opt.format == "json";
    if (json_out)
        std::cout << report::to_json(rep).dump(2) << "\n";
    else
        std::cout << report::render_text(rep);

    return opt.exit_by_verdict ? verdict_exit_code(rep) : 0;
}

struct OracleOptions {
    std::string state_expr;
    std::string file_path;
    std::string cut_spec;
    std::string emit_density;
    std::string emit_pure;
    double tol = kPurityTol;
    double rank_tol = oracle::kRankTol;
    std::size_t max_dim = kDefaultDimCap;
};

// Hidden helper for generating and cross-checking fixtures.
int run_oracle(const OracleOptions& opt) {
    AnalyzeOptions load_opt;
    load_opt.state_expr = opt.state_expr;
    load_opt.file_path = opt.file_path;
    load_opt.max_dim = opt.max_dim;
    LoadedInput in = load_input(load_opt);

    nlohmann::json out;
    out["kind"] = in.echo.kind;
    out["dims"] = in.echo.dims;

    if (!opt.emit_pure.empty()) {
        if (std::holds_alternative<DensityMatrix>(in.state))
            throw ValidationError("--emit-pure needs a pure-state input");
        std::ofstream f(opt.emit_pure);
        f << io::state_to_json(std::get<PureState>(in.state)).dump(2) << "\n";
        out["emitted"] = opt.emit_pure;
    }
    if (!opt.emit_density.empty()) {
        const DensityMatrix rho =
            std::holds_alternative<DensityMatrix>(in.state)
                ? std::get<DensityMatrix>(in.state)
                : density_from_pure(std::get<PureState>(in.state));
        std::ofstream f(opt.emit_density);
        f << io::state_to_json(rho).dump(2) << "\n";
        out["emitted"] = opt.emit_density;
    }

    if (!opt.cut_spec.empty()) {
        std::vector<int> cut_sites;
        std::stringstream ss(opt.cut_spec);
        std::string item;
        while (std::getline(ss, item, ',')) cut_sites.push_back(std::stoi(item));
        const SiteSubset cut = SiteSubset::from_indices(cut_sites, in.echo.n);

        if (std::holds_alternative<PureState>(in.state)) {
            const PureState& psi = std::get<PureState>(in.state);
            const oracle::CutSpectrum spectrum = oracle::schmidt_rank(psi, cut, opt.rank_tol);
            out["cut"] = cut.members();
            out["singular_values"] = spectrum.singular_values;
            out["schmidt_rank"] = spectrum.schmidt_rank;
            out["reduction_purity"] = reduced_purity(psi, cut);
            out["factor_check"] =
                oracle::factor_check(density_from_pure(psi), cut, opt.tol);
        } else {
            const DensityMatrix& rho = std::get<DensityMatrix>(in.state);
            out["cut"] = cut.members();
            out["reduction_purity"] = reduced_purity(rho, cut);
            out["factor_check"] = oracle::factor_check(rho, cut, opt.tol);
        }
    }

    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"purity-number separability analysis for multi-qudit states"};
    app.set_version_flag("--version", std::string(purity_lab::kVersion));
    app.require_subcommand(1);

    AnalyzeOptions opt;
    CLI::App* analyze = app.add_subcommand("analyze", "analyze a state and emit a report");
    analyze->add_option("--state", opt.state_expr, "state expression (see grammar in README)");
    analyze->add_option("--file", opt.file_path, "JSON state file (pure or density)");
    analyze->add_flag("--rate", opt.want_rate, "entanglement rate (pure states)");
    analyze->add_flag("--np", opt.want_np, "mixed-state n_p analysis");
    analyze->add_flag("--profile", opt.want_profile, "full gamma table");
    analyze->add_option("--tol", opt.tol, "purity tolerance")->capture_default_str();
    analyze->add_option("--max-dim", opt.max_dim, "total-dimension cap")
        ->capture_default_str();
    analyze->add_option("--workers", opt.workers, "worker threads (0 = hardware)")
        ->capture_default_str();
    analyze->add_option("--format", opt.format, "json|text (default: text to a terminal)")
        ->check(CLI::IsMember({"json", "text"}));
    analyze->add_flag("--normalize", opt.normalize,
                      "renormalize off-norm file input instead of rejecting it");
    analyze->add_flag("--no-timing", opt.no_timing, "omit timing from the report");
    analyze->add_flag("--exit-by-verdict", opt.exit_by_verdict,
                      "exit 0/3/4 by verdict for scripting");

    OracleOptions oracle_opt;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "fixture generation and cut checks");
    oracle_cmd->group(""); // hidden
    oracle_cmd->add_option("--state", oracle_opt.state_expr, "state expression");
    oracle_cmd->add_option("--file", oracle_opt.file_path, "JSON state file");
    oracle_cmd->add_option("--cut", oracle_opt.cut_spec, "comma-separated site list");
    oracle_cmd->add_option("--emit-density", oracle_opt.emit_density,
                           "write the input as a density-matrix JSON file");
    oracle_cmd->add_option("--emit-pure", oracle_opt.emit_pure,
                           "write the input as a pure-state JSON file");
    oracle_cmd->add_option("--tol", oracle_opt.tol, "purity tolerance");
    oracle_cmd->add_option("--rank-tol", oracle_opt.rank_tol, "schmidt rank tolerance");
    oracle_cmd->add_option("--max-dim", oracle_opt.max_dim, "total-dimension cap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            if (opt.state_expr.empty() == opt.file_path.empty()) {
                std::cerr << "error: exactly one of --state or --file is required\n";
                return 1;
            }
            return run_analyze(opt);
        }
        if (oracle_cmd->parsed()) {
            if (oracle_opt.state_expr.empty() == oracle_opt.file_path.empty()) {
                std::cerr << "error: exactly one of --state or --file is required\n";
                return 1;
            }
            return run_oracle(oracle_opt);
        }
    } catch (const DimensionCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
