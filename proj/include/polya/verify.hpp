#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polya/analytic.hpp"
#include "polya/model.hpp"
#include "polya/simulate.hpp"

namespace polya::verify {

enum class CheckKind { Moment, MgfGrid, PdeResidual, Oracle, Limit, EventWindow };

const char* check_kind_name(CheckKind kind);

/// One verdict. For statistical checks tol_or_z holds the achieved z-score
/// (after any documented transient allowance); for numeric checks it holds
/// the tolerance the observation was held to.
struct CheckResult {
    std::string name;
    CheckKind kind;
    double observed;
    double expected;
    double tol_or_z;
    bool pass;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::string config_digest;
    std::uint64_t master_seed = 0;

    bool overall_pass() const;
    void append(std::vector<CheckResult> more);
};

std::string serialize_report_text(const VerificationReport& report);
std::string serialize_report_json(const VerificationReport& report);

/// Two-sided normal z threshold after a Bonferroni correction over m tests,
/// anchored at base_z for m = 1.
double bonferroni_z(double base_z, std::size_t m);

/// z-scores of empirical means/variances/covariances against closed forms.
/// Variance standard errors use the empirical fourth central moment;
/// covariance standard errors use a conservative Cauchy-Schwarz bound on the
/// mixed fourth moment. Requires at least 100 samples.
std::vector<CheckResult> compare_moments(const sim::EnsembleStats& stats,
                                         const analytic::MomentSet& moments,
                                         std::size_t checkpoint_index, double z_threshold,
                                         const std::string& name_prefix);

/// Empirical MGF averages against closed-form values, z-scored per grid
/// point with a Bonferroni-adjusted threshold. `expected` is aligned with
/// stats.mgf_grid. Grid points must satisfy |<u, mean>| <= 2.
std::vector<CheckResult> compare_mgf_grid(const sim::EnsembleStats& stats,
                                          const std::vector<double>& expected,
                                          double z_threshold, const std::string& name_prefix);

/// Scaled empirical moments at one checkpoint against the scheme's limit
/// law. The tolerance is z_threshold standard errors plus the exact
/// finite-t transient gap of the scheme's closed forms. For Binomial limits,
/// lattice_violations (collected per path during the run) must be zero.
std::vector<CheckResult> check_limit(const model::Scheme& scheme,
                                     const model::InitialState& init,
                                     const sim::EnsembleStats& stats,
                                     std::size_t checkpoint_index, double z_threshold,
                                     std::uint64_t lattice_violations,
                                     const std::string& name_prefix);

/// Window renewal-count probabilities against their leading-order laws.
/// Deviations pass within max(z_threshold standard errors, (dt * sum X)^2).
std::vector<CheckResult> check_event_probabilities(const sim::WalkState& state,
                                                   const model::NavigationMatrix& matrix,
                                                   double delta_t, std::uint64_t trials,
                                                   std::uint64_t seed, double z_threshold,
                                                   const std::string& name_prefix);

/// One simulation-versus-analytics task of a verification suite.
struct ScenarioVerification {
    model::ScenarioConfig scenario;
    std::string label;
    bool compare_means = true;
    bool compare_variances = true;     // effective only when closed forms exist
    bool compare_covariances = true;
    std::vector<sim::MgfGridPoint> mgf_grid;
    bool limit_check = false;          // applied at the last checkpoint
    bool path_checks = true;           // scheme-specific exact invariants
    double z_threshold = 4.0;
    double mean_bias_factor = 1.0;     // test hook; scales the analytic means
};

/// Runs every task (classify, simulate, compare) and aggregates one report.
VerificationReport run_full_suite(const std::vector<ScenarioVerification>& tasks,
                                  unsigned workers);

}  // namespace polya::verify
