#include "polya/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polya::model {

namespace {

bool is_zero_constant(const EntrySpec& e) { return e.is_constant() && e.value() == 0.0; }

bool nearly_integer(double v) {
    return std::abs(v - std::round(v)) <= 1e-12 * std::max(1.0, std::abs(v));
}

}  // namespace

void validate_initial_state(const InitialState& init) {
    if (init.coords.size() < 1) throw ValidationError("initial state must have dimension >= 1");
    for (Eigen::Index j = 0; j < init.coords.size(); ++j)
        if (init.coords[j] < 0.0)
            throw ValidationError("initial coordinate " + std::to_string(j + 1) +
                                  " must be nonnegative");
    if (!(init.coords.sum() > 0.0))
        throw ValidationError("initial coordinate sum must be positive");
}

const char* scheme_name(const Scheme& s) {
    struct Visitor {
        const char* operator()(const GeneralScheme&) const { return "general"; }
        const char* operator()(const DiagonalConstantScheme&) const { return "diagonal-constant"; }
        const char* operator()(const DiagonalExponentialScheme&) const {
            return "diagonal-exponential";
        }
        const char* operator()(const EhrenfestScheme&) const { return "ehrenfest"; }
        const char* operator()(const HillScheme&) const { return "hill"; }
        const char* operator()(const BalancedTriangularScheme&) const {
            return "balanced-triangular";
        }
    };
    return std::visit(Visitor{}, s);
}

Scheme classify(const NavigationMatrix& m) {
    const int c = m.dimension();
    bool all_constant = true;
    for (const auto& e : m.entries()) all_constant = all_constant && e.is_constant();

    if (c == 2 && all_constant) {
        const double a = m.entry(0, 0).value();
        const double b = m.entry(0, 1).value();
        const double g = m.entry(1, 0).value();
        const double d = m.entry(1, 1).value();
        if (b > 0.0 && a == -b && g == b && d == -b) return EhrenfestScheme{b};
        if (g > 0.0 && a == -g && b == -g && d == g) return HillScheme{g};
        if (g == 0.0 && a > 0.0 && d > 0.0 && a < d && b == d - a)
            return BalancedTriangularScheme{a, d};
    }

    bool off_diag_zero = true;
    for (int i = 0; i < c && off_diag_zero; ++i)
        for (int j = 0; j < c && off_diag_zero; ++j)
            if (i != j) off_diag_zero = is_zero_constant(m.entry(i, j));
    if (off_diag_zero) {
        bool diag_positive_const = true;
        bool diag_exponential = true;
        for (int i = 0; i < c; ++i) {
            const EntrySpec& e = m.entry(i, i);
            diag_positive_const = diag_positive_const && e.is_constant() && e.value() > 0.0;
            diag_exponential = diag_exponential && !e.is_constant();
        }
        if (diag_positive_const) {
            Eigen::VectorXd alphas(c);
            for (int i = 0; i < c; ++i) alphas[i] = m.entry(i, i).value();
            return DiagonalConstantScheme{std::move(alphas)};
        }
        if (diag_exponential) {
            Eigen::VectorXd rates(c);
            for (int i = 0; i < c; ++i) rates[i] = m.entry(i, i).rate();
            return DiagonalExponentialScheme{std::move(rates)};
        }
    }
    return GeneralScheme{};
}

NavigationMatrix canonical_matrix(const Scheme& scheme) {
    struct Visitor {
        NavigationMatrix operator()(const GeneralScheme&) const {
            throw ValidationError("general scheme has no canonical matrix");
        }
        NavigationMatrix operator()(const DiagonalConstantScheme& s) const {
            const int c = static_cast<int>(s.alphas.size());
            std::vector<EntrySpec> es;
            es.reserve(c * c);
            for (int i = 0; i < c; ++i)
                for (int j = 0; j < c; ++j)
                    es.push_back(EntrySpec::constant(i == j ? s.alphas[i] : 0.0));
            return NavigationMatrix(c, std::move(es));
        }
        NavigationMatrix operator()(const DiagonalExponentialScheme& s) const {
            const int c = static_cast<int>(s.rates.size());
            std::vector<EntrySpec> es;
            es.reserve(c * c);
            for (int i = 0; i < c; ++i)
                for (int j = 0; j < c; ++j)
                    es.push_back(i == j ? EntrySpec::exponential(s.rates[i])
                                        : EntrySpec::constant(0.0));
            return NavigationMatrix(c, std::move(es));
        }
        NavigationMatrix operator()(const EhrenfestScheme& s) const {
            return NavigationMatrix(
                2, {EntrySpec::constant(-s.gamma), EntrySpec::constant(s.gamma),
                    EntrySpec::constant(s.gamma), EntrySpec::constant(-s.gamma)});
        }
        NavigationMatrix operator()(const HillScheme& s) const {
            return NavigationMatrix(
                2, {EntrySpec::constant(-s.gamma), EntrySpec::constant(-s.gamma),
                    EntrySpec::constant(s.gamma), EntrySpec::constant(s.gamma)});
        }
        NavigationMatrix operator()(const BalancedTriangularScheme& s) const {
            return NavigationMatrix(
                2, {EntrySpec::constant(s.alpha), EntrySpec::constant(s.delta - s.alpha),
                    EntrySpec::constant(0.0), EntrySpec::constant(s.delta)});
        }
    };
    return std::visit(Visitor{}, scheme);
}

TenabilityReport check_tenability(const NavigationMatrix& matrix, const InitialState& init) {
    TenabilityReport report;
    if (init.coords.size() != matrix.dimension()) {
        report.status = TenabilityReport::Status::Violated;
        report.violations.push_back("initial state dimension does not match the matrix");
        return report;
    }
    for (Eigen::Index j = 0; j < init.coords.size(); ++j)
        if (init.coords[j] < 0.0)
            report.violations.push_back("initial coordinate " + std::to_string(j + 1) +
                                        " is negative");
    if (!(init.coords.sum() > 0.0))
        report.violations.push_back("initial coordinate sum must be positive");
    if (!report.violations.empty()) {
        report.status = TenabilityReport::Status::Violated;
        return report;
    }

    const Scheme scheme = classify(matrix);
    struct Visitor {
        TenabilityReport& r;
        const InitialState& init;
        void operator()(const GeneralScheme&) const {
            r.status = TenabilityReport::Status::Unknown;
            r.violations.push_back(
                "no general tenability criterion is known; runtime guards apply");
        }
        void operator()(const DiagonalConstantScheme&) const {}
        void operator()(const DiagonalExponentialScheme&) const {}
        void operator()(const EhrenfestScheme& s) const {
            const double kx = init.coords[0] / s.gamma;
            const double ky = init.coords[1] / s.gamma;
            if (!nearly_integer(kx))
                r.violations.push_back("X(0)/gamma must be a nonnegative integer");
            if (!nearly_integer(ky))
                r.violations.push_back("Y(0)/gamma must be a nonnegative integer");
            if (kx + ky <= 0.0) r.violations.push_back("X(0) and Y(0) must not both be zero");
            if (!r.violations.empty()) r.status = TenabilityReport::Status::Violated;
        }
        void operator()(const HillScheme&) const {
            if (!(init.coords[1] > init.coords[0])) {
                r.violations.push_back("Y(0) > X(0) required");
                r.status = TenabilityReport::Status::Violated;
            }
        }
        void operator()(const BalancedTriangularScheme&) const {}
    };
    std::visit(Visitor{report, init}, scheme);
    return report;
}

void validate_scenario(const ScenarioConfig& config) {
    std::vector<std::string> problems;
    try {
        validate_initial_state(config.init);
    } catch (const ValidationError& e) {
        problems.push_back(e.what());
    }
    if (config.init.coords.size() != config.matrix.dimension())
        problems.push_back("init length does not match the matrix dimension");
    if (config.horizon < 0.0) problems.push_back("horizon must be nonnegative");
    if (config.checkpoints.empty()) problems.push_back("at least one checkpoint is required");
    for (std::size_t k = 0; k + 1 < config.checkpoints.size(); ++k)
        if (!(config.checkpoints[k] < config.checkpoints[k + 1])) {
            problems.push_back("checkpoints must be strictly increasing");
            break;
        }
    if (!config.checkpoints.empty()) {
        if (config.checkpoints.front() < 0.0) problems.push_back("checkpoints must be >= 0");
        if (config.checkpoints.back() > config.horizon)
            problems.push_back("last checkpoint exceeds the horizon");
    }
    if (config.ensemble_size == 0) problems.push_back("ensemble_size must be positive");
    if (!problems.empty()) {
        std::ostringstream oss;
        oss << "invalid scenario:";
        for (const auto& p : problems) oss << " [" << p << "]";
        throw ValidationError(oss.str());
    }
}

Eigen::MatrixXd row_mean_matrix(const NavigationMatrix& matrix) {
    const int c = matrix.dimension();
    Eigen::MatrixXd out(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) out(i, j) = matrix.entry(i, j).mean();
    return out;
}

double row_mgf(const NavigationMatrix& matrix, int i, const Eigen::VectorXd& u) {
    const int c = matrix.dimension();
    if (i < 0 || i >= c) throw DomainError("row_mgf: row index out of range");
    if (u.size() != c) throw DomainError("row_mgf: argument dimension mismatch");
    double prod = 1.0;
    for (int j = 0; j < c; ++j) prod *= matrix.entry(i, j).mgf(u[j]);
    return prod;
}

}  // namespace polya::model
