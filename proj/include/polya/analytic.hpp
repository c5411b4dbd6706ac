#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "polya/errors.hpp"
#include "polya/model.hpp"

namespace polya::analytic {

/// Exact moments of the walk at one time. second_moments/covariances are
/// only populated when the scheme has closed forms for them.
struct MomentSet {
    Eigen::VectorXd means;
    std::optional<Eigen::VectorXd> variances;
    std::optional<Eigen::MatrixXd> second_moments;  // E[X_j X_k]
    std::optional<Eigen::MatrixXd> covariances;     // Cov(X_j, X_k); diagonal = variances

    bool has_second_order() const { return variances.has_value(); }
};

// --- limit laws ---------------------------------------------------------------

struct ScalingExpDecay {
    double rate;  // multiply the coordinate by e^{-rate * t}
};
struct ScalingInverseTime {};  // multiply by 1/t
struct ScalingIdentity {};     // compare the coordinate itself

using LimitScaling = std::variant<ScalingExpDecay, ScalingInverseTime, ScalingIdentity>;

struct GammaLaw {
    double shape;
    double scale;
};
struct BinomialLaw {
    // Describes X/gamma; the walk itself lives on the lattice gamma * {0..n}.
    std::uint64_t n;
    double p;
    double gamma;
};
struct LambertStarLaw {
    // MGF (T(s)/s)^weight for s < 1/e; weight = X(0). At weight 1 this is the
    // Lambert law W* with moments E[W^k] = (k+1)^{k-1} (mean 1, variance 2).
    double weight = 1.0;
};

using LimitLaw = std::variant<GammaLaw, BinomialLaw, LambertStarLaw>;

struct LimitSpec {
    LimitScaling scaling;
    LimitLaw law;
};

double limit_law_mean(const LimitLaw& law);
double limit_law_variance(const LimitLaw& law);

/// Factor that maps a raw coordinate at time t to its scaled counterpart.
double scaling_factor(const LimitScaling& scaling, double t);

/// Per-coordinate limit law of a named scheme. Throws NoLimitSpec for
/// GeneralScheme and BalancedTriangularScheme.
std::vector<LimitSpec> limit_spec(const model::Scheme& scheme, const model::InitialState& init);

// --- closed-form means (any scheme) -------------------------------------------

/// e^{E[A]^T t} X(0); mean_matrix is the entrywise expectation E[A].
Eigen::VectorXd mean_vector(const Eigen::MatrixXd& mean_matrix, const model::InitialState& init,
                            double t);

// --- closed-form MGFs ----------------------------------------------------------

/// Diagonal scheme with constant displacement alpha > 0, one coordinate.
double mgf_diag_constant(double alpha, double x0, double t, double u);

/// Diagonal scheme with Exp(1) displacements, one coordinate:
/// exp(x0 * T(u e^{t-u})).
double mgf_diag_exponential(double x0, double t, double u);

/// Marginal MGF of X for the antisymmetric exchange scheme.
double mgf_ehrenfest(double gamma, double x0, double y0, double t, double u);

/// Marginal MGF of X for the 45-degree hill scheme (requires y0 > x0).
double mgf_hill(double gamma, double x0, double y0, double t, double u);

/// Joint MGF E[e^{uX+vY}] of the balanced triangular scheme.
double mgf_triangular(double alpha, double delta, double x0, double y0, double t, double u,
                      double v);

/// MGF of the total size X+Y of a balanced scheme (jump size delta per event).
double mgf_total_balanced(double delta, double x0, double y0, double t, double v);

/// P(exactly ell events within t | starting total i), jump size delta.
double kolmogorov_prob(double i, double delta, int ell, double t);

struct CharacteristicPoint {
    double x_c;
    double y_c;
};

/// Invariants of the characteristic flow of the balanced triangular scheme.
CharacteristicPoint characteristic_curves(double alpha, double delta, double t, double u,
                                          double v);

// --- closed-form moments --------------------------------------------------------

MomentSet moments_hill(double gamma, double x0, double y0, double t);
MomentSet moments_triangular(double alpha, double delta, double x0, double y0, double t);

/// Exact moments of the remaining named schemes, derived from their MGFs.
MomentSet moments_diag_constant(const Eigen::VectorXd& alphas, const Eigen::VectorXd& x0,
                                double t);
MomentSet moments_diag_exponential(const Eigen::VectorXd& x0, double t);
MomentSet moments_ehrenfest(double gamma, double x0, double y0, double t);

/// Closed-form MomentSet for a classified scheme, or means-only (via the
/// matrix exponential) when no scheme-specific forms exist.
MomentSet scheme_moments(const model::Scheme& scheme, const model::NavigationMatrix& matrix,
                         const model::InitialState& init, double t);

/// Joint closed-form MGF E[e^{<u, X(t)>}] of a named scheme. For the two
/// conserved 2-d schemes the joint value follows from the marginal MGF and
/// the conservation law; diagonal schemes factor over coordinates.
double scheme_mgf(const model::Scheme& scheme, const model::InitialState& init, double t,
                  const Eigen::VectorXd& u);

/// |scaled exact moment at finite t  -  limit law moment|, per coordinate.
/// Used as the transient allowance when testing convergence to the limit law.
struct LimitGap {
    Eigen::VectorXd mean_gap;
    Eigen::VectorXd variance_gap;
};
LimitGap limit_transient_gap(const model::Scheme& scheme, const model::InitialState& init,
                             double t);

}  // namespace polya::analytic
