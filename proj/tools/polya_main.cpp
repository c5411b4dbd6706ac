#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "polya/analytic.hpp"
#include "polya/canonical.hpp"
#include "polya/config_io.hpp"
#include "polya/model.hpp"
#include "polya/simulate.hpp"
#include "polya/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct GlobalFlags {
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::string output;  // empty = stdout
    std::string format = "csv";
    std::optional<std::uint64_t> ensemble_size;
};

void emit(const GlobalFlags& g, const std::string& content) {
    if (g.output.empty())
        std::cout << content;
    else
        polya::io::write_file(g.output, content);
}

polya::model::ScenarioConfig load_config(const std::string& path, const GlobalFlags& g) {
    polya::model::ScenarioConfig config = polya::io::parse_scenario(polya::io::read_file(path));
    if (g.seed) config.master_seed = *g.seed;
    if (g.ensemble_size) config.ensemble_size = *g.ensemble_size;
    polya::model::validate_scenario(config);
    return config;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        if (piece.empty()) continue;
        out.push_back(std::stod(piece));
    }
    return out;
}

// "0.1" or "0.1:0.05" -> vector of length 1 or 2
Eigen::VectorXd parse_u_point(const std::string& text, int dimension) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ':')) parts.push_back(std::stod(piece));
    if (static_cast<int>(parts.size()) != dimension)
        throw polya::ValidationError("mgf point '" + text + "' must have " +
                                     std::to_string(dimension) + " component(s)");
    Eigen::VectorXd u(dimension);
    for (int j = 0; j < dimension; ++j) u[j] = parts[j];
    return u;
}

int cmd_simulate(const std::string& config_path, const GlobalFlags& g) {
    const polya::model::ScenarioConfig config = load_config(config_path, g);
    const polya::sim::EnsembleStats stats = polya::sim::run_ensemble(config, g.workers);
    emit(g, g.format == "json" ? polya::io::stats_to_json(stats)
                               : polya::io::stats_to_csv(stats));
    return kExitOk;
}

int cmd_analyze(const std::string& config_path, const std::string& times_text,
                const std::vector<std::string>& u_points, const GlobalFlags& g) {
    const polya::model::ScenarioConfig config = load_config(config_path, g);
    const polya::model::Scheme scheme = polya::model::classify(config.matrix);
    std::vector<double> times = parse_number_list(times_text);
    if (times.empty()) times = config.checkpoints;

    std::ostringstream oss;
    oss << "time,quantity,arg1,arg2,value\n";
    for (double t : times) {
        const polya::analytic::MomentSet ms =
            polya::analytic::scheme_moments(scheme, config.matrix, config.init, t);
        for (Eigen::Index j = 0; j < ms.means.size(); ++j)
            oss << polya::io::format_double(t) << ",mean," << (j + 1) << ",,"
                << polya::io::format_double(ms.means[j]) << "\n";
        if (ms.variances)
            for (Eigen::Index j = 0; j < ms.means.size(); ++j)
                oss << polya::io::format_double(t) << ",variance," << (j + 1) << ",,"
                    << polya::io::format_double((*ms.variances)[j]) << "\n";
        if (ms.covariances)
            for (Eigen::Index a = 0; a < ms.means.size(); ++a)
                for (Eigen::Index b = a + 1; b < ms.means.size(); ++b)
                    oss << polya::io::format_double(t) << ",covariance," << (a + 1) << ','
                        << (b + 1) << ',' << polya::io::format_double((*ms.covariances)(a, b))
                        << "\n";
        for (const std::string& up : u_points) {
            const Eigen::VectorXd u = parse_u_point(up, config.matrix.dimension());
            const double value = polya::analytic::scheme_mgf(scheme, config.init, t, u);
            oss << polya::io::format_double(t) << ",mgf," << polya::io::format_double(u[0])
                << ',' << (u.size() > 1 ? polya::io::format_double(u[1]) : std::string())
                << ',' << polya::io::format_double(value) << "\n";
        }
    }
    emit(g, oss.str());
    return kExitOk;
}

int cmd_verify(const std::string& target, const std::vector<std::string>& u_points,
               bool limit_check, const GlobalFlags& g) {
    polya::verify::VerificationReport report;
    if (target == "canonical") {
        polya::verify::CanonicalOptions opts;
        if (g.seed) opts.master_seed = *g.seed;
        if (g.ensemble_size) opts.ensemble_size = *g.ensemble_size;
        opts.workers = g.workers;
        report = polya::verify::run_canonical_suite(opts);
    } else {
        polya::verify::ScenarioVerification task;
        task.scenario = load_config(target, g);
        task.label = "scenario";
        task.limit_check = limit_check;
        for (const std::string& up : u_points)
            task.mgf_grid.push_back(
                {task.scenario.checkpoints.size() - 1,
                 parse_u_point(up, task.scenario.matrix.dimension())});
        report = polya::verify::run_full_suite({task}, g.workers);
    }
    emit(g, g.format == "json" ? polya::verify::serialize_report_json(report)
                               : polya::verify::serialize_report_text(report));
    return report.overall_pass() ? kExitOk : kExitVerifyFailed;
}

int cmd_kolmogorov(double i, double delta, int ell_max, double t, const GlobalFlags& g) {
    emit(g, polya::io::kolmogorov_csv(i, delta, ell_max, t));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuum polya-like random walk: simulation and closed-form analytics"};
    app.require_subcommand(1);

    GlobalFlags g;
    std::uint64_t seed_value = 0;
    std::uint64_t ensemble_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the master seed");
    app.add_option("--workers", g.workers, "worker threads for ensembles")->default_val(1u);
    app.add_option("--output", g.output, "output file (default stdout)");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_val("csv");
    auto* ens_opt =
        app.add_option("--ensemble-size", ensemble_value, "override the ensemble size");

    auto* sim_cmd = app.add_subcommand("simulate", "run an ensemble and emit statistics");
    std::string sim_config;
    sim_cmd->add_option("config", sim_config, "scenario config file")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "evaluate closed-form moments and MGFs");
    std::string analyze_config, analyze_times;
    std::vector<std::string> analyze_u;
    analyze_cmd->add_option("config", analyze_config, "scenario config file")->required();
    analyze_cmd->add_option("--times", analyze_times,
                            "comma-separated times (default: the config checkpoints)");
    analyze_cmd->add_option("--u", analyze_u,
                            "MGF argument, e.g. 0.1 or 0.1:0.05 (repeatable)");

    auto* verify_cmd =
        app.add_subcommand("verify", "cross-verify simulation against closed forms");
    std::string verify_target;
    std::vector<std::string> verify_u;
    bool verify_limit = false;
    verify_cmd->add_option("target", verify_target, "'canonical' or a scenario config file")
        ->required();
    verify_cmd->add_option("--u", verify_u, "MGF grid point at the last checkpoint (repeatable)");
    verify_cmd->add_flag("--limit", verify_limit, "also check the scheme's limit law");

    auto* kol_cmd =
        app.add_subcommand("kolmogorov", "closed-form event-count probabilities as CSV");
    double kol_i = 1.0, kol_delta = 1.0, kol_t = 1.0;
    int kol_ell = 50;
    kol_cmd->add_option("--i", kol_i, "initial total size")->required();
    kol_cmd->add_option("--delta", kol_delta, "total added per event")->required();
    kol_cmd->add_option("--ell-max", kol_ell, "largest event count")->required();
    kol_cmd->add_option("--t", kol_t, "elapsed time")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (*seed_opt) g.seed = seed_value;
    if (*ens_opt) g.ensemble_size = ensemble_value;

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim_config, g);
        if (analyze_cmd->parsed()) return cmd_analyze(analyze_config, analyze_times, analyze_u, g);
        if (verify_cmd->parsed()) return cmd_verify(verify_target, verify_u, verify_limit, g);
        if (kol_cmd->parsed()) return cmd_kolmogorov(kol_i, kol_delta, kol_ell, kol_t, g);
    } catch (const polya::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const polya::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const polya::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
