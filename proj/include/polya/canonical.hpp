#pragma once

#include "polya/verify.hpp"

namespace polya::verify {

/// Knobs of the canonical verification battery.
struct CanonicalOptions {
    std::uint64_t ensemble_size = 100000;
    std::uint64_t master_seed = 12345;
    unsigned workers = 1;
    bool monte_carlo = true;  // include the ensemble and window batteries
};

/// The canonical battery: closed forms against the governing equation,
/// against independent ODE oracles, against kernel identities, and against
/// Monte Carlo ensembles. Deterministic for fixed options, independent of
/// the worker count.
VerificationReport run_canonical_suite(const CanonicalOptions& options);

// Sections of the canonical battery, re-exported so harnesses can run and
// time them independently. Check names are prefixed "pde.", "kolmogorov.",
// "means.", "second_moments.", "kernels.", "mc.", "limits." and "window.".
std::vector<CheckResult> canonical_pde_checks();
std::vector<CheckResult> canonical_kolmogorov_checks();
std::vector<CheckResult> canonical_mean_agreement_checks(std::uint64_t seed);
std::vector<CheckResult> canonical_second_moment_checks(std::uint64_t seed);
std::vector<CheckResult> canonical_kernel_checks(std::uint64_t seed);
std::vector<CheckResult> canonical_mc_moment_checks(const CanonicalOptions& options);
std::vector<CheckResult> canonical_mc_limit_checks(const CanonicalOptions& options);
std::vector<CheckResult> canonical_window_checks(const CanonicalOptions& options);

}  // namespace polya::verify
