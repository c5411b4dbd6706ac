#include "polya/canonical.hpp"

#include <cmath>
#include <cstdio>

#include "polya/numerics.hpp"

namespace polya::verify {

using model::EntrySpec;
using model::InitialState;
using model::NavigationMatrix;

namespace {

double uniform_in(RandomStream& rng, double a, double b) {
    return a + (b - a) * rng.uniform_open01();
}

std::vector<num::RowMgfEvaluator> psis_of(const NavigationMatrix& matrix) {
    std::vector<num::RowMgfEvaluator> psis;
    for (int i = 0; i < matrix.dimension(); ++i)
        psis.push_back([matrix, i](const Eigen::VectorXd& u) {
            return model::row_mgf(matrix, i, u);
        });
    return psis;
}

struct PdeCase {
    std::string name;
    NavigationMatrix matrix;
    num::MgfEvaluator phi;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> points;
};

Eigen::VectorXd vec1(double u) {
    Eigen::VectorXd v(1);
    v << u;
    return v;
}

Eigen::VectorXd vec2(double u, double v) {
    Eigen::VectorXd w(2);
    w << u, v;
    return w;
}

std::vector<PdeCase> pde_cases() {
    std::vector<PdeCase> cases;
    {
        PdeCase c{"pde.diagonal_constant",
                  model::canonical_matrix(model::DiagonalConstantScheme{vec1(0.8)}),
                  [](double t, const Eigen::VectorXd& u) {
                      return analytic::mgf_diag_constant(0.8, 1.3, t, u[0]);
                  },
                  {0.2, 0.5, 0.8, 1.1},
                  {vec1(-0.3), vec1(-0.1), vec1(0.1), vec1(0.2), vec1(0.3)}};
        cases.push_back(std::move(c));
    }
    {
        PdeCase c{"pde.diagonal_exponential",
                  model::canonical_matrix(model::DiagonalExponentialScheme{vec1(1.0)}),
                  [](double t, const Eigen::VectorXd& u) {
                      return analytic::mgf_diag_exponential(1.2, t, u[0]);
                  },
                  {0.2, 0.5, 0.8, 1.0, 1.3},
                  {vec1(-0.4), vec1(-0.2), vec1(-0.1), vec1(0.1)}};
        cases.push_back(std::move(c));
    }
    {
        // Joint MGF through the conservation law X + Y = 8.
        PdeCase c{"pde.ehrenfest", model::canonical_matrix(model::EhrenfestScheme{1.0}),
                  [](double t, const Eigen::VectorXd& u) {
                      return std::exp(8.0 * u[1]) *
                             analytic::mgf_ehrenfest(1.0, 3.0, 5.0, t, u[0] - u[1]);
                  },
                  {0.3, 0.6, 1.0, 1.5},
                  {vec2(0.1, 0.05), vec2(-0.1, 0.1), vec2(0.2, -0.1), vec2(0.05, 0.15),
                   vec2(-0.2, -0.05)}};
        cases.push_back(std::move(c));
    }
    {
        // Joint MGF through the conservation law Y - X = 2.
        PdeCase c{"pde.hill", model::canonical_matrix(model::HillScheme{1.0}),
                  [](double t, const Eigen::VectorXd& u) {
                      return std::exp(2.0 * u[1]) *
                             analytic::mgf_hill(1.0, 1.0, 3.0, t, u[0] + u[1]);
                  },
                  {0.3, 0.7, 1.1, 1.5},
                  {vec2(0.1, 0.05), vec2(-0.1, 0.1), vec2(0.05, -0.15), vec2(0.02, 0.1),
                   vec2(-0.2, -0.1)}};
        cases.push_back(std::move(c));
    }
    {
        PdeCase c{"pde.balanced_triangular",
                  model::canonical_matrix(model::BalancedTriangularScheme{1.0, 2.0}),
                  [](double t, const Eigen::VectorXd& u) {
                      return analytic::mgf_triangular(1.0, 2.0, 1.0, 1.0, t, u[0], u[1]);
                  },
                  {0.25, 0.5, 0.75, 1.0},
                  {vec2(0.1, 0.03), vec2(-0.1, 0.05), vec2(0.2, -0.05), vec2(-0.15, -0.1),
                   vec2(0.05, 0.02)}};
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace

std::vector<CheckResult> canonical_pde_checks() {
    std::vector<CheckResult> out;
    for (const PdeCase& c : pde_cases()) {
        const std::vector<num::RowMgfEvaluator> psis = psis_of(c.matrix);
        double worst = 0.0;
        for (double t : c.times)
            for (const Eigen::VectorXd& u : c.points) {
                const num::PdeResidual r = num::pde_residual(c.phi, psis, t, u, 1e-5);
                worst = std::max(worst, r.relative());
            }
        out.push_back({c.name, CheckKind::PdeResidual, worst, 0.0, 1e-6, worst <= 1e-6});
    }
    return out;
}

namespace {

// Partial sum of the closed-form event-count law up to an adaptive cutoff;
// stops once a geometric bound on the remaining tail drops below 1e-12.
double kolmogorov_mass(double i, double delta, double t) {
    const double r = i / delta;
    const double w = -std::expm1(-delta * t);
    double term = std::exp(-i * t);
    double mass = term;
    for (int l = 1; l < 2000000; ++l) {
        term *= (r + static_cast<double>(l - 1)) * w / static_cast<double>(l);
        mass += term;
        const double ratio = (r + static_cast<double>(l)) * w / static_cast<double>(l + 1);
        if (ratio < 1.0) {
            const double tail_bound = term * ratio / (1.0 - ratio);
            if (tail_bound < 1e-12) break;
        }
    }
    return mass;
}

}  // namespace

std::vector<CheckResult> canonical_kolmogorov_checks() {
    std::vector<CheckResult> out;
    const int ell_max = 50;
    for (double i : {1.0, 2.0, 3.5}) {
        for (double delta : {1.0, 2.0}) {
            double worst_diff = 0.0;
            double worst_mass = 0.0;
            for (double t : {0.5, 1.0, 2.0, 5.0}) {
                const num::OdeSolution sol = num::ode_solve_kolmogorov(i, delta, ell_max, t);
                const Eigen::VectorXd& p = sol.endpoint();
                for (int l = 0; l <= ell_max; ++l)
                    worst_diff =
                        std::max(worst_diff, std::abs(p[l] - analytic::kolmogorov_prob(i, delta, l, t)));
                worst_mass = std::max(worst_mass, std::abs(1.0 - kolmogorov_mass(i, delta, t)));
            }
            char name[64];
            std::snprintf(name, sizeof name, "kolmogorov.i%g.d%g", i, delta);
            out.push_back({std::string(name) + ".agreement", CheckKind::Oracle, worst_diff, 0.0,
                           1e-8, worst_diff <= 1e-8});
            out.push_back({std::string(name) + ".mass", CheckKind::Oracle, worst_mass, 0.0, 1e-8,
                           worst_mass <= 1e-8});
        }
    }
    return out;
}

namespace {

struct MeanCase {
    NavigationMatrix matrix;
    Eigen::VectorXd init;
    Eigen::VectorXd closed_form;  // scheme closed-form means at time t
    double t;
};

double relative_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j)
        worst = std::max(worst, std::abs(a[j] - b[j]) / std::max(1.0, std::abs(b[j])));
    return worst;
}

}  // namespace

std::vector<CheckResult> canonical_mean_agreement_checks(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const int draws = 20;

    struct SchemeGen {
        std::string name;
        std::function<MeanCase(RandomStream&)> gen;
    };
    std::vector<SchemeGen> gens;

    gens.push_back({"means.diagonal_constant", [](RandomStream& rng) {
        const double a1 = uniform_in(rng, 0.3, 2.5), a2 = uniform_in(rng, 0.3, 2.5);
        const double x1 = uniform_in(rng, 0.5, 4.0), x2 = uniform_in(rng, 0.5, 4.0);
        const double t = uniform_in(rng, 0.2, 2.0);
        MeanCase c{model::canonical_matrix(model::DiagonalConstantScheme{vec2(a1, a2)}),
                   vec2(x1, x2), vec2(x1 * std::exp(a1 * t), x2 * std::exp(a2 * t)), t};
        return c;
    }});
    gens.push_back({"means.diagonal_exponential", [](RandomStream& rng) {
        const double r1 = uniform_in(rng, 0.5, 2.5), r2 = uniform_in(rng, 0.5, 2.5);
        const double x1 = uniform_in(rng, 0.5, 4.0), x2 = uniform_in(rng, 0.5, 4.0);
        const double t = uniform_in(rng, 0.2, 2.0);
        MeanCase c{model::canonical_matrix(model::DiagonalExponentialScheme{vec2(r1, r2)}),
                   vec2(x1, x2), vec2(x1 * std::exp(t / r1), x2 * std::exp(t / r2)), t};
        return c;
    }});
    gens.push_back({"means.ehrenfest", [](RandomStream& rng) {
        const double g = uniform_in(rng, 0.3, 2.0);
        const double k1 = std::floor(uniform_in(rng, 1.0, 6.0));
        const double k2 = std::floor(uniform_in(rng, 1.0, 6.0));
        const double x0 = g * k1, y0 = g * k2, lam = x0 + y0;
        const double t = uniform_in(rng, 0.2, 2.0);
        const double mx = lam / 2.0 + (x0 - lam / 2.0) * std::exp(-2.0 * g * t);
        MeanCase c{model::canonical_matrix(model::EhrenfestScheme{g}), vec2(x0, y0),
                   vec2(mx, lam - mx), t};
        return c;
    }});
    gens.push_back({"means.hill", [](RandomStream& rng) {
        const double g = uniform_in(rng, 0.3, 2.0);
        const double x0 = uniform_in(rng, 0.5, 3.0);
        const double lam = uniform_in(rng, 0.5, 3.0);
        const double y0 = x0 + lam;
        const double t = uniform_in(rng, 0.2, 2.0);
        MeanCase c{model::canonical_matrix(model::HillScheme{g}), vec2(x0, y0),
                   vec2(lam * g * t + x0, lam * g * t + y0), t};
        return c;
    }});
    gens.push_back({"means.balanced_triangular", [](RandomStream& rng) {
        const double a = uniform_in(rng, 0.3, 2.0);
        const double d = a + uniform_in(rng, 0.2, std::min(3.0 - a, 2.0));
        const double x0 = uniform_in(rng, 0.5, 3.0), y0 = uniform_in(rng, 0.5, 3.0);
        const double t = uniform_in(rng, 0.2, 2.0);
        MeanCase c{model::canonical_matrix(model::BalancedTriangularScheme{a, d}), vec2(x0, y0),
                   vec2(x0 * std::exp(a * t),
                        (x0 + y0) * std::exp(d * t) - x0 * std::exp(a * t)),
                   t};
        return c;
    }});

    for (const SchemeGen& g : gens) {
        RandomStream rng(splitmix64(seed ^ 0xA11CEull));
        double worst = 0.0;
        for (int k = 0; k < draws; ++k) {
            const MeanCase c = g.gen(rng);
            const Eigen::MatrixXd ea = model::row_mean_matrix(c.matrix);
            const InitialState init{c.init};
            const Eigen::VectorXd via_exp = analytic::mean_vector(ea, init, c.t);
            const Eigen::VectorXd via_ode = num::ode_solve_mean(ea, c.init, c.t).endpoint();
            worst = std::max(worst, relative_gap(via_exp, c.closed_form));
            worst = std::max(worst, relative_gap(via_ode, c.closed_form));
            worst = std::max(worst, relative_gap(via_ode, via_exp));
        }
        out.push_back({g.name, CheckKind::Oracle, worst, 0.0, 1e-8, worst <= 1e-8});
    }
    return out;
}

std::vector<CheckResult> canonical_second_moment_checks(std::uint64_t seed) {
    RandomStream rng(splitmix64(seed ^ 0x2F00Dull));
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double a = uniform_in(rng, 0.3, 2.0);
        const double d = a + uniform_in(rng, 0.2, std::min(3.0 - a, 2.0));
        const double x0 = uniform_in(rng, 0.5, 3.0), y0 = uniform_in(rng, 0.5, 3.0);
        const double t = uniform_in(rng, 0.2, 2.0);

        const Eigen::VectorXd ode =
            num::ode_second_moments_triangular(a, d, x0, y0, t).endpoint();
        const analytic::MomentSet ms = analytic::moments_triangular(a, d, x0, y0, t);
        const Eigen::MatrixXd& sm = *ms.second_moments;
        const double targets[3] = {sm(0, 0), sm(0, 1), sm(1, 1)};
        for (int q = 0; q < 3; ++q)
            worst = std::max(worst,
                             std::abs(ode[q] - targets[q]) / std::max(1.0, std::abs(targets[q])));
    }
    return {{"second_moments.triangular", CheckKind::Oracle, worst, 0.0, 1e-7, worst <= 1e-7}};
}

namespace {

double hyp2f1_series(double mu, double z) {
    double total = 0.0, term = 1.0;
    for (int n = 0; n < 2000; ++n) {
        total += term;
        term *= (mu + n) * z / (2.0 + n);
        if (std::abs(term) < 1e-18) break;
    }
    return total;
}

}  // namespace

std::vector<CheckResult> canonical_kernel_checks(std::uint64_t seed) {
    std::vector<CheckResult> out;
    {
        // 1000-point grid over (-1/e, 1e6]: half packed toward the branch
        // point logarithmically, half log-spaced on the positive axis.
        const double inv_e = std::exp(-1.0);
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            const double offset =
                1e-13 * std::pow(inv_e / 1e-13, static_cast<double>(k) / 499.0);
            const double z = -inv_e + offset;
            const double w = num::lambert_w0(z);
            worst = std::max(worst, std::abs(w * std::exp(w) - z) / std::max(1.0, std::abs(z)));
        }
        for (int k = 0; k < 500; ++k) {
            const double z = 1e-12 * std::pow(1e18, static_cast<double>(k) / 499.0);
            const double w = num::lambert_w0(z);
            worst = std::max(worst, std::abs(w * std::exp(w) - z) / std::max(1.0, std::abs(z)));
        }
        out.push_back({"kernels.lambert_identity", CheckKind::Oracle, worst, 0.0, 1e-12,
                       worst <= 1e-12});
    }
    {
        RandomStream rng(splitmix64(seed ^ 0x5E31ull));
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            Eigen::MatrixXd m(4, 4);
            for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = uniform_in(rng, -1.0, 1.0);
            const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
            if (norm > 2.0) m *= 2.0 / norm;
            const double s = uniform_in(rng, 0.1, 1.5);
            const double t = uniform_in(rng, 0.1, 1.5);
            const Eigen::MatrixXd whole = num::matrix_exp(m, s + t);
            const Eigen::MatrixXd split = num::matrix_exp(m, s) * num::matrix_exp(m, t);
            const double scale = std::max(1.0, whole.cwiseAbs().maxCoeff());
            worst = std::max(worst, (whole - split).cwiseAbs().maxCoeff() / scale);
        }
        out.push_back({"kernels.matexp_semigroup", CheckKind::Oracle, worst, 0.0, 1e-10,
                       worst <= 1e-10});
    }
    {
        double worst = 0.0;
        for (int mi = 1; mi <= 9; ++mi)
            for (int zi = -9; zi <= 9; ++zi) {
                const double mu = 0.1 * mi;
                const double z = 0.1 * zi;
                if (z == 0.0) continue;
                const double closed = num::hyp2f1_special(mu, z);
                const double series = hyp2f1_series(mu, z);
                worst = std::max(worst, std::abs(closed - series) / std::abs(series));
            }
        out.push_back({"kernels.hyp2f1", CheckKind::Oracle, worst, 0.0, 1e-10, worst <= 1e-10});
    }
    {
        bool exact = true;
        double worst = 0.0;
        for (int x = 1; x <= 5; ++x)
            for (int l = 0; l <= 8; ++l) {
                double expect = 1.0;
                for (int k = 0; k < l; ++k) expect *= static_cast<double>(x + k);
                const double got = num::rising_factorial(static_cast<double>(x), l);
                if (got != expect) exact = false;
                worst = std::max(worst, std::abs(got - expect));
            }
        if (num::rising_factorial(2.5, 3) != 39.375) exact = false;
        out.push_back(
            {"kernels.rising_factorial", CheckKind::Oracle, worst, 0.0, 0.0, exact});
    }
    return out;
}

namespace {

model::ScenarioConfig make_config(NavigationMatrix matrix, Eigen::VectorXd init, double horizon,
                                  std::vector<double> checkpoints, std::uint64_t n,
                                  std::uint64_t seed) {
    return model::ScenarioConfig{std::move(matrix), InitialState{std::move(init)}, horizon,
                                 std::move(checkpoints), n, seed};
}

std::uint64_t task_seed(const CanonicalOptions& o, std::uint64_t ordinal) {
    return splitmix64(o.master_seed + 0x9000 + ordinal);
}

}  // namespace

std::vector<CheckResult> canonical_mc_moment_checks(const CanonicalOptions& o) {
    std::vector<ScenarioVerification> tasks;
    {
        ScenarioVerification t;
        t.scenario = make_config(
            model::canonical_matrix(model::DiagonalConstantScheme{vec1(1.0)}), vec1(1.0), 1.0,
            {0.5, 1.0}, o.ensemble_size, task_seed(o, 1));
        t.label = "mc.diagonal_constant";
        tasks.push_back(std::move(t));
    }
    {
        ScenarioVerification t;
        t.scenario = make_config(model::canonical_matrix(model::EhrenfestScheme{1.0}),
                                 vec2(3.0, 5.0), 10.0, {1.0, 10.0}, o.ensemble_size,
                                 task_seed(o, 2));
        t.label = "mc.ehrenfest";
        t.mgf_grid = {{1, vec2(0.1, 0.0)}};
        tasks.push_back(std::move(t));
    }
    {
        ScenarioVerification t;
        t.scenario = make_config(model::canonical_matrix(model::HillScheme{1.0}), vec2(1.0, 3.0),
                                 2.0, {2.0}, o.ensemble_size, task_seed(o, 3));
        t.label = "mc.hill";
        tasks.push_back(std::move(t));
    }
    {
        ScenarioVerification t;
        t.scenario = make_config(
            model::canonical_matrix(model::BalancedTriangularScheme{1.0, 2.0}), vec2(1.0, 1.0),
            1.0, {0.5, 1.0}, o.ensemble_size, task_seed(o, 4));
        t.label = "mc.balanced_triangular";
        t.mgf_grid = {{0, vec2(0.1, 0.05)}};
        tasks.push_back(std::move(t));
    }
    return run_full_suite(tasks, o.workers).checks;
}

std::vector<CheckResult> canonical_mc_limit_checks(const CanonicalOptions& o) {
    std::vector<ScenarioVerification> tasks;
    auto limit_task = [&](NavigationMatrix matrix, Eigen::VectorXd init, double t_large,
                          std::uint64_t ordinal, const std::string& label) {
        ScenarioVerification t;
        t.scenario = make_config(std::move(matrix), std::move(init), t_large, {t_large},
                                 o.ensemble_size, task_seed(o, ordinal));
        t.label = label;
        t.compare_means = false;
        t.compare_variances = false;
        t.compare_covariances = false;
        t.limit_check = true;
        return t;
    };
    tasks.push_back(limit_task(model::canonical_matrix(model::EhrenfestScheme{1.0}),
                               vec2(3.0, 5.0), 10.0, 5, "limits.ehrenfest"));
    tasks.push_back(limit_task(model::canonical_matrix(model::DiagonalConstantScheme{vec1(1.0)}),
                               vec1(2.0), 8.0, 6, "limits.diagonal_constant"));
    tasks.push_back(limit_task(model::canonical_matrix(model::HillScheme{1.0}), vec2(1.0, 3.0),
                               50.0, 7, "limits.hill"));
    tasks.push_back(limit_task(
        model::canonical_matrix(model::DiagonalExponentialScheme{vec1(1.0)}), vec1(1.0), 8.0, 8,
        "limits.diagonal_exponential"));
    return run_full_suite(tasks, o.workers).checks;
}

std::vector<CheckResult> canonical_window_checks(const CanonicalOptions& o) {
    const sim::WalkState state{0.0, vec2(3.0, 5.0)};
    return check_event_probabilities(state, model::canonical_matrix(model::EhrenfestScheme{1.0}),
                                     0.01, 1000000, splitmix64(o.master_seed ^ 0x77ull), 4.0,
                                     "window");
}

VerificationReport run_canonical_suite(const CanonicalOptions& o) {
    VerificationReport report;
    report.master_seed = o.master_seed;
    char digest_src[128];
    std::snprintf(digest_src, sizeof digest_src, "canonical:n=%llu:seed=%llu:mc=%d",
                  static_cast<unsigned long long>(o.ensemble_size),
                  static_cast<unsigned long long>(o.master_seed), o.monte_carlo ? 1 : 0);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char* p = digest_src; *p; ++p) {
        hash ^= static_cast<unsigned char>(*p);
        hash *= 0x100000001b3ull;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    report.config_digest = hex;

    report.append(canonical_pde_checks());
    report.append(canonical_kolmogorov_checks());
    report.append(canonical_mean_agreement_checks(o.master_seed));
    report.append(canonical_second_moment_checks(o.master_seed));
    report.append(canonical_kernel_checks(o.master_seed));
    if (o.monte_carlo) {
        report.append(canonical_mc_moment_checks(o));
        report.append(canonical_mc_limit_checks(o));
        report.append(canonical_window_checks(o));
    }
    return report;
}

}  // namespace polya::verify
