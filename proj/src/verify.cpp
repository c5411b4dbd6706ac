#include "polya/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polya/config_io.hpp"
#include "polya/numerics.hpp"

namespace polya::verify {

using analytic::MomentSet;
using model::InitialState;
using model::NavigationMatrix;
using model::Scheme;
using sim::EnsembleStats;

const char* check_kind_name(CheckKind kind) {
    switch (kind) {
        case CheckKind::Moment: return "moment";
        case CheckKind::MgfGrid: return "mgf-grid";
        case CheckKind::PdeResidual: return "pde-residual";
        case CheckKind::Oracle: return "oracle";
        case CheckKind::Limit: return "limit";
        case CheckKind::EventWindow: return "event-window";
    }
    return "unknown";
}

bool VerificationReport::overall_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void VerificationReport::append(std::vector<CheckResult> more) {
    for (auto& c : more) checks.push_back(std::move(c));
}

std::string serialize_report_text(const VerificationReport& report) {
    std::ostringstream oss;
    oss << "verification-report v1\n";
    oss << "digest " << report.config_digest << "\n";
    oss << "seed " << report.master_seed << "\n";
    for (const auto& c : report.checks) {
        oss << "check " << c.name << " kind=" << check_kind_name(c.kind)
            << " observed=" << io::format_double(c.observed)
            << " expected=" << io::format_double(c.expected)
            << " tol_or_z=" << io::format_double(c.tol_or_z)
            << " pass=" << (c.pass ? "true" : "false") << "\n";
    }
    oss << "overall " << (report.overall_pass() ? "pass" : "fail") << "\n";
    return oss.str();
}

std::string serialize_report_json(const VerificationReport& report) {
    nlohmann::ordered_json j;
    j["format"] = "verification-report";
    j["version"] = 1;
    j["digest"] = report.config_digest;
    j["seed"] = report.master_seed;
    j["overall_pass"] = report.overall_pass();
    auto& arr = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["kind"] = check_kind_name(c.kind);
        e["observed"] = c.observed;
        e["expected"] = c.expected;
        e["tol_or_z"] = c.tol_or_z;
        e["pass"] = c.pass;
        arr.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

double bonferroni_z(double base_z, std::size_t m) {
    if (m <= 1) return base_z;
    const double alpha = std::erfc(base_z / std::sqrt(2.0));  // two-sided tail at base_z
    const double target = alpha / static_cast<double>(m);
    double lo = base_z, hi = base_z + 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::erfc(mid / std::sqrt(2.0)) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

namespace {

double safe_ratio(double num, double den) {
    if (den > 0.0) return num / den;
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// Standard error of the sample variance from the empirical fourth central
// moment: Var(s^2) ~ (m4 - s^4 (n-3)/(n-1)) / n.
double variance_se(const sim::MomentAccumulator& acc, Eigen::Index j) {
    const double n = static_cast<double>(acc.count());
    const double s2 = acc.variance(j);
    const double m4 = acc.fourth_central(j);
    const double v = (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    return std::sqrt(std::max(v, 0.0));
}

// Conservative (Cauchy-Schwarz) standard error of the sample covariance:
// Var(s_jk) <= (sqrt(m4_j m4_k) - s_jk^2) / n.
double covariance_se(const sim::MomentAccumulator& acc, Eigen::Index j, Eigen::Index k) {
    const double n = static_cast<double>(acc.count());
    const double sjk = acc.covariance(j, k);
    const double bound = std::sqrt(acc.fourth_central(j) * acc.fourth_central(k));
    return std::sqrt(std::max(bound - sjk * sjk, 0.0) / n);
}

}  // namespace

std::vector<CheckResult> compare_moments(const EnsembleStats& stats, const MomentSet& moments,
                                         std::size_t checkpoint_index, double z_threshold,
                                         const std::string& prefix) {
    const sim::MomentAccumulator& acc = stats.per_checkpoint.at(checkpoint_index);
    if (acc.count() < 100)
        throw InsufficientSamples("compare_moments needs at least 100 samples, have " +
                                  std::to_string(acc.count()));
    const double n = static_cast<double>(acc.count());
    const Eigen::Index c = moments.means.size();
    std::vector<CheckResult> out;

    for (Eigen::Index j = 0; j < c; ++j) {
        const double se = std::sqrt(acc.variance(j) / n);
        const double z = safe_ratio(std::abs(acc.mean()[j] - moments.means[j]), se);
        out.push_back({prefix + ".mean." + std::to_string(j + 1), CheckKind::Moment,
                       acc.mean()[j], moments.means[j], z, z <= z_threshold});
    }
    if (moments.variances) {
        for (Eigen::Index j = 0; j < c; ++j) {
            const double expected = (*moments.variances)[j];
            const double se = variance_se(acc, j);
            const double z = safe_ratio(std::abs(acc.variance(j) - expected), se);
            out.push_back({prefix + ".variance." + std::to_string(j + 1), CheckKind::Moment,
                           acc.variance(j), expected, z, z <= z_threshold});
        }
    }
    if (moments.covariances) {
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index k = j + 1; k < c; ++k) {
                const double expected = (*moments.covariances)(j, k);
                const double se = covariance_se(acc, j, k);
                const double z = safe_ratio(std::abs(acc.covariance(j, k) - expected), se);
                out.push_back({prefix + ".covariance." + std::to_string(j + 1) +
                                   std::to_string(k + 1),
                               CheckKind::Moment, acc.covariance(j, k), expected, z,
                               z <= z_threshold});
            }
    }
    return out;
}

std::vector<CheckResult> compare_mgf_grid(const EnsembleStats& stats,
                                          const std::vector<double>& expected,
                                          double z_threshold, const std::string& prefix) {
    if (expected.size() != stats.mgf_grid.size())
        throw DomainError("compare_mgf_grid: expected values do not match the grid");
    const double z_adj = bonferroni_z(z_threshold, expected.size());
    std::vector<CheckResult> out;
    for (std::size_t g = 0; g < expected.size(); ++g) {
        const sim::MgfGridPoint& p = stats.mgf_grid[g];
        const sim::MomentAccumulator& acc = stats.per_checkpoint.at(p.checkpoint_index);
        // Conservative empirical-MGF stability region.
        const double size = p.u.cwiseAbs().dot(acc.mean().cwiseAbs());
        if (size > 2.0)
            throw DomainError("compare_mgf_grid: grid point outside the stability region");
        const sim::ScalarAccumulator& sa = stats.mgf_values[g];
        const double se = std::sqrt(sa.variance() / static_cast<double>(sa.n));
        const double z = safe_ratio(std::abs(sa.mean - expected[g]), se);
        out.push_back({prefix + ".mgf." + std::to_string(g + 1), CheckKind::MgfGrid, sa.mean,
                       expected[g], z, z <= z_adj});
    }
    return out;
}

std::vector<CheckResult> check_limit(const Scheme& scheme, const InitialState& init,
                                     const EnsembleStats& stats, std::size_t checkpoint_index,
                                     double z_threshold, std::uint64_t lattice_violations,
                                     const std::string& prefix) {
    const std::vector<analytic::LimitSpec> specs = analytic::limit_spec(scheme, init);
    const double t = stats.checkpoints.at(checkpoint_index);
    const analytic::LimitGap gap = analytic::limit_transient_gap(scheme, init, t);
    const sim::MomentAccumulator& acc = stats.per_checkpoint.at(checkpoint_index);
    const double n = static_cast<double>(acc.count());

    std::vector<CheckResult> out;
    bool any_binomial = false;
    for (std::size_t j = 0; j < specs.size(); ++j) {
        const analytic::LimitSpec& spec = specs[j];
        const double s = analytic::scaling_factor(spec.scaling, t);
        const auto jj = static_cast<Eigen::Index>(j);

        // The sampling deviation is z-scored after removing the exact
        // finite-t transient of the closed forms.
        const double scaled_mean = s * acc.mean()[jj];
        const double law_mean = analytic::limit_law_mean(spec.law);
        const double se_mean = s * std::sqrt(acc.variance(jj) / n);
        const double dev_mean =
            std::max(0.0, std::abs(scaled_mean - law_mean) - gap.mean_gap[jj]);
        const double z_mean = safe_ratio(dev_mean, se_mean);
        out.push_back({prefix + ".limit.mean." + std::to_string(j + 1), CheckKind::Limit,
                       scaled_mean, law_mean, z_mean, z_mean <= z_threshold});

        const double scaled_var = s * s * acc.variance(jj);
        const double law_var = analytic::limit_law_variance(spec.law);
        const double se_var = s * s * variance_se(acc, jj);
        const double dev_var =
            std::max(0.0, std::abs(scaled_var - law_var) - gap.variance_gap[jj]);
        const double z_var = safe_ratio(dev_var, se_var);
        out.push_back({prefix + ".limit.variance." + std::to_string(j + 1), CheckKind::Limit,
                       scaled_var, law_var, z_var, z_var <= z_threshold});

        any_binomial = any_binomial || std::holds_alternative<analytic::BinomialLaw>(spec.law);
    }
    if (any_binomial) {
        out.push_back({prefix + ".limit.lattice", CheckKind::Limit,
                       static_cast<double>(lattice_violations), 0.0, 0.0,
                       lattice_violations == 0});
    }
    return out;
}

std::vector<CheckResult> check_event_probabilities(const sim::WalkState& state,
                                                   const NavigationMatrix& matrix,
                                                   double delta_t, std::uint64_t trials,
                                                   std::uint64_t seed, double z_threshold,
                                                   const std::string& prefix) {
    RandomStream rng(seed);
    const sim::EventWindowCounts counts =
        sim::event_window_counts(state, matrix, delta_t, trials, rng);
    const double total = state.coords.sum();
    const double allowance = (delta_t * total) * (delta_t * total);
    const double tn = static_cast<double>(trials);

    std::vector<CheckResult> out;
    auto se_of = [tn](double p) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / tn); };

    const double p0 = std::exp(-delta_t * total);
    {
        const double tol = std::max(z_threshold * se_of(p0), allowance);
        const bool pass = std::abs(counts.p_zero - p0) <= tol;
        out.push_back({prefix + ".p_zero", CheckKind::EventWindow, counts.p_zero, p0, tol, pass});
    }
    for (Eigen::Index j = 0; j < state.coords.size(); ++j) {
        const double p1 = delta_t * state.coords[j] * p0;
        const double tol = std::max(z_threshold * se_of(p1), allowance);
        const bool pass = std::abs(counts.p_one[j] - p1) <= tol;
        out.push_back({prefix + ".p_one." + std::to_string(j + 1), CheckKind::EventWindow,
                       counts.p_one[j], p1, tol, pass});
    }
    {
        // Only a leading-order bound exists: P(>=2) = O((dt Sigma)^2).
        const double se = std::max(se_of(counts.p_multi), 1.0 / tn);
        const double tol = allowance + z_threshold * se;
        out.push_back({prefix + ".p_multi", CheckKind::EventWindow, counts.p_multi, 0.0, tol,
                       counts.p_multi <= tol});
    }
    return out;
}

// --- full suites ------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

bool exact_multiple_in_range(double value, double unit, double max_multiple) {
    const double k = value / unit;
    const double r = std::round(k);
    return r >= 0.0 && r <= max_multiple && r * unit == value;
}

// Scheme-specific exact path invariants, counted per trajectory.
sim::PathCheck make_path_check(const Scheme& scheme, const InitialState& init) {
    struct Visitor {
        const InitialState& init;
        sim::PathCheck operator()(const model::GeneralScheme&) const { return nullptr; }
        sim::PathCheck operator()(const model::DiagonalConstantScheme&) const { return nullptr; }
        sim::PathCheck operator()(const model::DiagonalExponentialScheme&) const {
            return nullptr;
        }
        sim::PathCheck operator()(const model::EhrenfestScheme& s) const {
            const double lam = init.coords.sum();
            const double gamma = s.gamma;
            const double n_steps = lam / gamma;
            return [lam, gamma, n_steps](const sim::Trajectory& t) -> std::uint64_t {
                std::uint64_t bad = 0;
                for (const auto& x : t.checkpoint_values) {
                    if (x.sum() != lam) ++bad;  // conservation, exact
                    if (!exact_multiple_in_range(x[0], gamma, n_steps)) ++bad;
                }
                return bad;
            };
        }
        sim::PathCheck operator()(const model::HillScheme&) const {
            const double lam = init.coords[1] - init.coords[0];
            return [lam](const sim::Trajectory& t) -> std::uint64_t {
                std::uint64_t bad = 0;
                for (const auto& x : t.checkpoint_values)
                    if (x[1] - x[0] != lam) ++bad;  // conservation, exact
                return bad;
            };
        }
        sim::PathCheck operator()(const model::BalancedTriangularScheme& s) const {
            const double s0 = init.coords.sum();
            const double delta = s.delta;
            return [s0, delta](const sim::Trajectory& t) -> std::uint64_t {
                std::uint64_t bad = 0;
                for (const auto& x : t.checkpoint_values) {
                    // Total grows by exactly delta per event.
                    const double k = (x.sum() - s0) / delta;
                    if (!(std::round(k) >= 0.0) || std::round(k) * delta + s0 != x.sum()) ++bad;
                }
                return bad;
            };
        }
    };
    return std::visit(Visitor{init}, scheme);
}

}  // namespace

VerificationReport run_full_suite(const std::vector<ScenarioVerification>& tasks,
                                  unsigned workers) {
    VerificationReport report;
    std::string digest_src;
    for (const auto& task : tasks)
        digest_src += task.label + "\n" + io::serialize_scenario(task.scenario);
    report.config_digest = hex16(fnv1a(digest_src));
    report.master_seed = tasks.empty() ? 0 : tasks.front().scenario.master_seed;

    for (const auto& task : tasks) {
        const std::string& label = task.label;
        const Scheme scheme = model::classify(task.scenario.matrix);
        const model::TenabilityReport ten =
            model::check_tenability(task.scenario.matrix, task.scenario.init);
        if (ten.status == model::TenabilityReport::Status::Violated) {
            report.checks.push_back({label + ".tenability", CheckKind::Oracle,
                                     static_cast<double>(ten.violations.size()), 0.0, 0.0,
                                     false});
            continue;
        }

        sim::EnsembleOptions opts;
        opts.workers = workers;
        opts.mgf_grid = task.mgf_grid;
        if (task.path_checks) opts.path_check = make_path_check(scheme, task.scenario.init);

        const EnsembleStats stats = sim::run_ensemble(task.scenario, opts);

        for (std::size_t cp = 0; cp < stats.checkpoints.size(); ++cp) {
            MomentSet ms = analytic::scheme_moments(scheme, task.scenario.matrix,
                                                    task.scenario.init, stats.checkpoints[cp]);
            ms.means *= task.mean_bias_factor;
            if (!task.compare_variances) ms.variances.reset();
            if (!task.compare_covariances) ms.covariances.reset();
            if (task.compare_means || ms.variances || ms.covariances) {
                MomentSet selected = ms;
                std::vector<CheckResult> entries = compare_moments(
                    stats, selected, cp, task.z_threshold,
                    label + ".t" + std::to_string(cp + 1));
                if (!task.compare_means) {
                    std::vector<CheckResult> kept;
                    for (auto& e : entries)
                        if (e.name.find(".mean.") == std::string::npos)
                            kept.push_back(std::move(e));
                    entries = std::move(kept);
                }
                report.append(std::move(entries));
            }
        }

        if (!task.mgf_grid.empty()) {
            std::vector<double> expected;
            expected.reserve(task.mgf_grid.size());
            for (const auto& p : task.mgf_grid)
                expected.push_back(analytic::scheme_mgf(scheme, task.scenario.init,
                                                        stats.checkpoints[p.checkpoint_index],
                                                        p.u));
            report.append(compare_mgf_grid(stats, expected, task.z_threshold, label));
        }

        if (opts.path_check) {
            report.checks.push_back({label + ".path_invariants", CheckKind::Moment,
                                     static_cast<double>(stats.path_check_violations), 0.0, 0.0,
                                     stats.path_check_violations == 0});
        }

        if (task.limit_check) {
            report.append(check_limit(scheme, task.scenario.init, stats,
                                      stats.checkpoints.size() - 1, task.z_threshold,
                                      stats.path_check_violations, label));
        }
    }
    return report;
}

}  // namespace polya::verify
