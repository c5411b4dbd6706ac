#include "polya/analytic.hpp"

#include <cmath>
#include <string>

#include "polya/numerics.hpp"

namespace polya::analytic {

using model::InitialState;
using model::NavigationMatrix;
using model::Scheme;

double limit_law_mean(const LimitLaw& law) {
    struct Visitor {
        double operator()(const GammaLaw& g) const { return g.shape * g.scale; }
        double operator()(const BinomialLaw& b) const {
            return b.gamma * static_cast<double>(b.n) * b.p;
        }
        double operator()(const LambertStarLaw& l) const { return l.weight; }
    };
    return std::visit(Visitor{}, law);
}

double limit_law_variance(const LimitLaw& law) {
    struct Visitor {
        double operator()(const GammaLaw& g) const { return g.shape * g.scale * g.scale; }
        double operator()(const BinomialLaw& b) const {
            return b.gamma * b.gamma * static_cast<double>(b.n) * b.p * (1.0 - b.p);
        }
        // E[(W*)^k] = (k+1)^{k-1}: mean 1, second moment 3.
        double operator()(const LambertStarLaw& l) const { return 2.0 * l.weight; }
    };
    return std::visit(Visitor{}, law);
}

double scaling_factor(const LimitScaling& scaling, double t) {
    struct Visitor {
        double t;
        double operator()(const ScalingExpDecay& s) const { return std::exp(-s.rate * t); }
        double operator()(const ScalingInverseTime&) const {
            if (!(t > 0.0)) throw DomainError("inverse-time scaling requires t > 0");
            return 1.0 / t;
        }
        double operator()(const ScalingIdentity&) const { return 1.0; }
    };
    return std::visit(Visitor{t}, scaling);
}

std::vector<LimitSpec> limit_spec(const Scheme& scheme, const InitialState& init) {
    model::validate_initial_state(init);
    struct Visitor {
        const InitialState& init;
        std::vector<LimitSpec> operator()(const model::GeneralScheme&) const {
            throw NoLimitSpec("no limit law is available for a general scheme");
        }
        std::vector<LimitSpec> operator()(const model::BalancedTriangularScheme&) const {
            throw NoLimitSpec("no limit law is provided for the balanced triangular scheme");
        }
        std::vector<LimitSpec> operator()(const model::DiagonalConstantScheme& s) const {
            std::vector<LimitSpec> out;
            for (Eigen::Index j = 0; j < s.alphas.size(); ++j) {
                const double a = s.alphas[j];
                out.push_back({ScalingExpDecay{a}, GammaLaw{init.coords[j] / a, a}});
            }
            return out;
        }
        std::vector<LimitSpec> operator()(const model::DiagonalExponentialScheme& s) const {
            for (Eigen::Index j = 0; j < s.rates.size(); ++j)
                if (s.rates[j] != 1.0)
                    throw NoLimitSpec("the Lambert limit law requires unit-rate entries");
            std::vector<LimitSpec> out;
            for (Eigen::Index j = 0; j < s.rates.size(); ++j)
                out.push_back({ScalingExpDecay{1.0}, LambertStarLaw{init.coords[j]}});
            return out;
        }
        std::vector<LimitSpec> operator()(const model::EhrenfestScheme& s) const {
            const double lam = init.coords.sum();
            const auto n = static_cast<std::uint64_t>(std::llround(lam / s.gamma));
            LimitSpec spec{ScalingIdentity{}, BinomialLaw{n, 0.5, s.gamma}};
            return {spec, spec};
        }
        std::vector<LimitSpec> operator()(const model::HillScheme& s) const {
            const double lam = init.coords[1] - init.coords[0];
            if (!(lam > 0.0)) throw NoLimitSpec("hill limit law requires Y(0) > X(0)");
            LimitSpec spec{ScalingInverseTime{}, GammaLaw{lam / s.gamma, s.gamma * s.gamma}};
            return {spec, spec};
        }
    };
    return std::visit(Visitor{init}, scheme);
}

Eigen::VectorXd mean_vector(const Eigen::MatrixXd& mean_matrix, const InitialState& init,
                            double t) {
    if (t < 0.0) throw DomainError("mean_vector: t must be nonnegative");
    return num::matrix_exp(mean_matrix.transpose(), t) * init.coords;
}

double mgf_diag_constant(double alpha, double x0, double t, double u) {
    if (!(alpha > 0.0)) throw DomainError("mgf_diag_constant: alpha must be positive");
    // 1 - e^{alpha t}(1 - e^{-alpha u}), with the difference through expm1.
    const double base = 1.0 + std::exp(alpha * t) * std::expm1(-alpha * u);
    if (!(base > 0.0))
        throw DomainError("mgf_diag_constant: outside the domain (nonpositive base)");
    return std::pow(base, -x0 / alpha);
}

double mgf_diag_exponential(double x0, double t, double u) {
    const double z = u * std::exp(t - u);
    return std::exp(x0 * num::tree_function(z));
}

double mgf_ehrenfest(double gamma, double x0, double y0, double t, double u) {
    if (!(gamma > 0.0)) throw DomainError("mgf_ehrenfest: gamma must be positive");
    if (u == 0.0) return 1.0;  // exact normalization
    const double lam = x0 + y0;
    const double e2t = std::exp(-2.0 * gamma * t);
    const double eu = std::exp(gamma * u);
    const double num = 1.0 + e2t * eu + eu - e2t;
    const double den = 1.0 - e2t * eu + eu + e2t;
    if (!(num > 0.0) || !(den > 0.0))
        throw DomainError("mgf_ehrenfest: outside the domain (nonpositive base)");
    return std::pow(num / den, x0 / gamma) * std::pow(den / 2.0, lam / gamma);
}

double mgf_hill(double gamma, double x0, double y0, double t, double u) {
    if (!(gamma > 0.0)) throw DomainError("mgf_hill: gamma must be positive");
    if (!(y0 > x0)) throw DomainError("mgf_hill: requires Y(0) > X(0)");
    const double growth = gamma * t * std::expm1(gamma * u);  // gamma t (e^{gamma u} - 1)
    const double q = 1.0 - growth;
    const double p = std::exp(gamma * u) - growth;
    if (!(q > 0.0) || !(p > 0.0))
        throw DomainError("mgf_hill: at or beyond the singularity 1 = gamma t (e^{gamma u}-1)");
    return std::pow(p, x0 / gamma) * std::pow(q, -y0 / gamma);
}

double mgf_triangular(double alpha, double delta, double x0, double y0, double t, double u,
                      double v) {
    if (!(alpha > 0.0 && alpha < delta))
        throw DomainError("mgf_triangular: requires 0 < alpha < delta");
    if (u == 0.0 && v == 0.0) return 1.0;  // exact normalization
    const double b = std::expm1(-delta * v) + std::exp(-delta * t);
    if (!(b > 0.0)) throw DomainError("mgf_triangular: outside the domain (inner base <= 0)");
    const double a = std::exp(-alpha * u) - std::exp(-alpha * v) + std::pow(b, alpha / delta);
    if (!(a > 0.0)) throw DomainError("mgf_triangular: outside the domain (outer base <= 0)");
    return std::exp(-x0 * t) * std::pow(a, -x0 / alpha) * std::exp(-y0 * t) *
           std::pow(b, -y0 / delta);
}

double mgf_total_balanced(double delta, double x0, double y0, double t, double v) {
    if (!(delta > 0.0)) throw DomainError("mgf_total_balanced: delta must be positive");
    // 1 - e^{delta t} + e^{delta (t-v)} = 1 + e^{delta t}(e^{-delta v} - 1)
    const double base = 1.0 + std::exp(delta * t) * std::expm1(-delta * v);
    if (!(base > 0.0)) throw DomainError("mgf_total_balanced: outside the domain");
    return std::pow(base, -(x0 + y0) / delta);
}

double kolmogorov_prob(double i, double delta, int ell, double t) {
    if (!(i > 0.0)) throw DomainError("kolmogorov_prob: i must be positive");
    if (!(delta > 0.0)) throw DomainError("kolmogorov_prob: delta must be positive");
    if (ell < 0) throw DomainError("kolmogorov_prob: ell must be nonnegative");
    // ((i/delta) rising ell) / ell! * e^{-it} (1-e^{-delta t})^ell, accumulated
    // as a product of bounded ratios so large ell cannot overflow.
    const double r = i / delta;
    const double w = -std::expm1(-delta * t);  // 1 - e^{-delta t}
    double p = std::exp(-i * t);
    for (int k = 0; k < ell; ++k) p *= (r + static_cast<double>(k)) * w / static_cast<double>(k + 1);
    return p;
}

CharacteristicPoint characteristic_curves(double alpha, double delta, double t, double u,
                                          double v) {
    const double x_c = std::exp(alpha * t) * (std::exp(-alpha * u) - std::exp(-alpha * v));
    const double y_c = std::exp(delta * t) * std::expm1(-delta * v);
    return {x_c, y_c};
}

namespace {

Eigen::MatrixXd second_moments_from(const Eigen::VectorXd& means, const Eigen::MatrixXd& cov) {
    return cov + means * means.transpose();
}

}  // namespace

MomentSet moments_hill(double gamma, double x0, double y0, double t) {
    if (!(y0 > x0)) throw DomainError("moments_hill: requires Y(0) > X(0)");
    const double lam = y0 - x0;
    MomentSet ms;
    ms.means = Eigen::VectorXd(2);
    ms.means << lam * gamma * t + x0, lam * gamma * t + y0;
    const double var =
        lam * gamma * gamma * gamma * t * t + (2.0 * x0 + lam) * gamma * gamma * t;
    Eigen::VectorXd vars(2);
    vars << var, var;
    // Y - X is constant, so X and Y move together: Cov(X,Y) = V[X].
    Eigen::MatrixXd cov(2, 2);
    cov << var, var, var, var;
    ms.variances = vars;
    ms.covariances = cov;
    ms.second_moments = second_moments_from(ms.means, cov);
    return ms;
}

MomentSet moments_triangular(double alpha, double delta, double x0, double y0, double t) {
    if (!(alpha > 0.0 && alpha < delta))
        throw DomainError("moments_triangular: requires 0 < alpha < delta");
    const double s0 = x0 + y0;
    const double ea = std::exp(alpha * t);
    const double ed = std::exp(delta * t);
    const double e2a = ea * ea;
    const double e2d = ed * ed;
    const double ead = ea * ed;

    const double ex = x0 * ea;
    const double ey = s0 * ed - x0 * ea;
    const double ex2 = x0 * (alpha + x0) * e2a - alpha * x0 * ea;
    const double exy = x0 * (alpha + s0) * ead - x0 * (alpha + x0) * e2a;
    const double ey2 = s0 * (delta + s0) * e2d - 2.0 * x0 * (alpha + s0) * ead -
                       delta * s0 * ed + x0 * (alpha + x0) * e2a + alpha * x0 * ea;
    const double vx = alpha * x0 * (e2a - ea);
    const double cov_xy = alpha * x0 * (ead - e2a);
    const double vy = delta * s0 * e2d - 2.0 * alpha * x0 * ead - delta * s0 * ed +
                      alpha * x0 * e2a + alpha * x0 * ea;

    MomentSet ms;
    ms.means = Eigen::VectorXd(2);
    ms.means << ex, ey;
    Eigen::VectorXd vars(2);
    vars << vx, vy;
    Eigen::MatrixXd cov(2, 2);
    cov << vx, cov_xy, cov_xy, vy;
    Eigen::MatrixXd sm(2, 2);
    sm << ex2, exy, exy, ey2;
    ms.variances = vars;
    ms.covariances = cov;
    ms.second_moments = sm;
    return ms;
}

MomentSet moments_diag_constant(const Eigen::VectorXd& alphas, const Eigen::VectorXd& x0,
                                double t) {
    const Eigen::Index c = alphas.size();
    MomentSet ms;
    ms.means = Eigen::VectorXd(c);
    Eigen::VectorXd vars(c);
    for (Eigen::Index j = 0; j < c; ++j) {
        const double ea = std::exp(alphas[j] * t);
        ms.means[j] = x0[j] * ea;
        vars[j] = alphas[j] * x0[j] * (ea * ea - ea);
    }
    Eigen::MatrixXd cov = vars.asDiagonal();  // coordinates are independent
    ms.variances = vars;
    ms.covariances = cov;
    ms.second_moments = second_moments_from(ms.means, cov);
    return ms;
}

MomentSet moments_diag_exponential(const Eigen::VectorXd& x0, double t) {
    const Eigen::Index c = x0.size();
    const double et = std::exp(t);
    MomentSet ms;
    ms.means = Eigen::VectorXd(c);
    Eigen::VectorXd vars(c);
    for (Eigen::Index j = 0; j < c; ++j) {
        ms.means[j] = x0[j] * et;
        vars[j] = 2.0 * x0[j] * (et * et - et);
    }
    Eigen::MatrixXd cov = vars.asDiagonal();
    ms.variances = vars;
    ms.covariances = cov;
    ms.second_moments = second_moments_from(ms.means, cov);
    return ms;
}

MomentSet moments_ehrenfest(double gamma, double x0, double y0, double t) {
    const double lam = x0 + y0;
    const double e2 = std::exp(-2.0 * gamma * t);
    const double mx = lam / 2.0 + (x0 - lam / 2.0) * e2;
    const double var = gamma * lam * (1.0 - e2 * e2) / 4.0;
    MomentSet ms;
    ms.means = Eigen::VectorXd(2);
    ms.means << mx, lam - mx;
    Eigen::VectorXd vars(2);
    vars << var, var;
    // X + Y is constant, so the coordinates are perfectly anticorrelated.
    Eigen::MatrixXd cov(2, 2);
    cov << var, -var, -var, var;
    ms.variances = vars;
    ms.covariances = cov;
    ms.second_moments = second_moments_from(ms.means, cov);
    return ms;
}

MomentSet scheme_moments(const Scheme& scheme, const NavigationMatrix& matrix,
                         const InitialState& init, double t) {
    struct Visitor {
        const NavigationMatrix& matrix;
        const InitialState& init;
        double t;
        MomentSet operator()(const model::GeneralScheme&) const {
            MomentSet ms;
            ms.means = mean_vector(model::row_mean_matrix(matrix), init, t);
            return ms;
        }
        MomentSet operator()(const model::DiagonalConstantScheme& s) const {
            return moments_diag_constant(s.alphas, init.coords, t);
        }
        MomentSet operator()(const model::DiagonalExponentialScheme& s) const {
            for (Eigen::Index j = 0; j < s.rates.size(); ++j)
                if (s.rates[j] != 1.0) {
                    // Only unit-rate entries have closed second moments here;
                    // fall back to the matrix-exponential means.
                    MomentSet ms;
                    ms.means = mean_vector(model::row_mean_matrix(matrix), init, t);
                    return ms;
                }
            return moments_diag_exponential(init.coords, t);
        }
        MomentSet operator()(const model::EhrenfestScheme& s) const {
            return moments_ehrenfest(s.gamma, init.coords[0], init.coords[1], t);
        }
        MomentSet operator()(const model::HillScheme& s) const {
            return moments_hill(s.gamma, init.coords[0], init.coords[1], t);
        }
        MomentSet operator()(const model::BalancedTriangularScheme& s) const {
            return moments_triangular(s.alpha, s.delta, init.coords[0], init.coords[1], t);
        }
    };
    return std::visit(Visitor{matrix, init, t}, scheme);
}

double scheme_mgf(const Scheme& scheme, const InitialState& init, double t,
                  const Eigen::VectorXd& u) {
    struct Visitor {
        const InitialState& init;
        double t;
        const Eigen::VectorXd& u;
        double operator()(const model::GeneralScheme&) const {
            throw DomainError("no closed-form MGF is available for a general scheme");
        }
        double operator()(const model::DiagonalConstantScheme& s) const {
            double prod = 1.0;  // coordinates evolve independently
            for (Eigen::Index j = 0; j < s.alphas.size(); ++j)
                prod *= mgf_diag_constant(s.alphas[j], init.coords[j], t, u[j]);
            return prod;
        }
        double operator()(const model::DiagonalExponentialScheme& s) const {
            for (Eigen::Index j = 0; j < s.rates.size(); ++j)
                if (s.rates[j] != 1.0)
                    throw DomainError("closed-form MGF requires unit-rate entries");
            double prod = 1.0;
            for (Eigen::Index j = 0; j < s.rates.size(); ++j)
                prod *= mgf_diag_exponential(init.coords[j], t, u[j]);
            return prod;
        }
        double operator()(const model::EhrenfestScheme& s) const {
            // X + Y = lambda, so E[e^{uX+vY}] = e^{v lambda} E[e^{(u-v)X}].
            const double lam = init.coords.sum();
            return std::exp(u[1] * lam) *
                   mgf_ehrenfest(s.gamma, init.coords[0], init.coords[1], t, u[0] - u[1]);
        }
        double operator()(const model::HillScheme& s) const {
            // Y - X = lambda, so E[e^{uX+vY}] = e^{v lambda} E[e^{(u+v)X}].
            const double lam = init.coords[1] - init.coords[0];
            return std::exp(u[1] * lam) *
                   mgf_hill(s.gamma, init.coords[0], init.coords[1], t, u[0] + u[1]);
        }
        double operator()(const model::BalancedTriangularScheme& s) const {
            return mgf_triangular(s.alpha, s.delta, init.coords[0], init.coords[1], t, u[0],
                                  u[1]);
        }
    };
    if (u.size() != init.coords.size()) throw DomainError("scheme_mgf: dimension mismatch");
    return std::visit(Visitor{init, t, u}, scheme);
}

LimitGap limit_transient_gap(const Scheme& scheme, const InitialState& init, double t) {
    struct Visitor {
        const InitialState& init;
        double t;
        LimitGap operator()(const model::GeneralScheme&) const {
            throw NoLimitSpec("no limit law is available for a general scheme");
        }
        LimitGap operator()(const model::BalancedTriangularScheme&) const {
            throw NoLimitSpec("no limit law is provided for the balanced triangular scheme");
        }
        LimitGap operator()(const model::DiagonalConstantScheme& s) const {
            const Eigen::Index c = s.alphas.size();
            LimitGap g{Eigen::VectorXd::Zero(c), Eigen::VectorXd::Zero(c)};
            for (Eigen::Index j = 0; j < c; ++j) {
                // e^{-2at} V[X(t)] = a x0 (1 - e^{-at}); limit variance a x0.
                g.variance_gap[j] =
                    s.alphas[j] * init.coords[j] * std::exp(-s.alphas[j] * t);
            }
            return g;  // scaled means are exact at every t
        }
        LimitGap operator()(const model::DiagonalExponentialScheme& s) const {
            const Eigen::Index c = s.rates.size();
            LimitGap g{Eigen::VectorXd::Zero(c), Eigen::VectorXd::Zero(c)};
            for (Eigen::Index j = 0; j < c; ++j)
                g.variance_gap[j] = 2.0 * init.coords[j] * std::exp(-t);
            return g;
        }
        LimitGap operator()(const model::EhrenfestScheme& s) const {
            const double lam = init.coords.sum();
            LimitGap g{Eigen::VectorXd(2), Eigen::VectorXd(2)};
            const double mg = std::abs(init.coords[0] - lam / 2.0) * std::exp(-2.0 * s.gamma * t);
            const double vg = s.gamma * lam / 4.0 * std::exp(-4.0 * s.gamma * t);
            g.mean_gap << mg, mg;
            g.variance_gap << vg, vg;
            return g;
        }
        LimitGap operator()(const model::HillScheme& s) const {
            const double lam = init.coords[1] - init.coords[0];
            LimitGap g{Eigen::VectorXd(2), Eigen::VectorXd(2)};
            if (!(t > 0.0)) throw DomainError("hill transient gap requires t > 0");
            g.mean_gap << init.coords[0] / t, init.coords[1] / t;
            const double vg = (2.0 * init.coords[0] + lam) * s.gamma * s.gamma / t;
            g.variance_gap << vg, vg;
            return g;
        }
    };
    return std::visit(Visitor{init, t}, scheme);
}

}  // namespace polya::analytic
