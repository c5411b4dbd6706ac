#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "polya/errors.hpp"
#include "polya/rng.hpp"

namespace polya::model {

/// One entry of the navigation matrix: a fixed real displacement or an
/// exponentially distributed one, freshly sampled at every renewal.
class EntrySpec {
  public:
    enum class Kind { Constant, Exponential };

    static EntrySpec constant(double value) { return EntrySpec(Kind::Constant, value); }

    static EntrySpec exponential(double rate) {
        if (!(rate > 0.0)) throw DomainError("exponential entry rate must be positive");
        return EntrySpec(Kind::Exponential, rate);
    }

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    double value() const { return param_; }  // constant value
    double rate() const { return param_; }   // exponential rate

    double mean() const { return is_constant() ? param_ : 1.0 / param_; }

    /// MGF is everywhere defined for constants, and only for u < rate for
    /// exponential entries.
    bool mgf_defined(double u) const { return is_constant() || u < param_; }

    double mgf(double u) const {
        if (is_constant()) return std::exp(u * param_);
        if (!(u < param_))
            throw DomainError("entry MGF undefined: u >= rate of exponential entry");
        return param_ / (param_ - u);
    }

    double sample(RandomStream& rng) const {
        return is_constant() ? param_ : rng.exponential(param_);
    }

    friend bool operator==(const EntrySpec& a, const EntrySpec& b) {
        return a.kind_ == b.kind_ && a.param_ == b.param_;
    }

  private:
    EntrySpec(Kind kind, double param) : kind_(kind), param_(param) {}
    Kind kind_;
    double param_;
};

/// Square grid of entry specifications; row i is applied when coordinate i
/// fires.
class NavigationMatrix {
  public:
    /// Placeholder 1x1 zero matrix so configs are default-constructible;
    /// scenario validation rejects it.
    NavigationMatrix() : dimension_(1), entries_{EntrySpec::constant(0.0)} {}

    NavigationMatrix(int dimension, std::vector<EntrySpec> entries)
        : dimension_(dimension), entries_(std::move(entries)) {
        if (dimension_ < 1) throw ValidationError("navigation matrix dimension must be >= 1");
        if (static_cast<int>(entries_.size()) != dimension_ * dimension_)
            throw ValidationError("navigation matrix entry count does not match dimension");
    }

    /// All-constant matrix from a dense grid.
    static NavigationMatrix from_constants(const Eigen::MatrixXd& m) {
        if (m.rows() != m.cols()) throw ValidationError("navigation matrix must be square");
        std::vector<EntrySpec> es;
        es.reserve(static_cast<std::size_t>(m.size()));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                es.push_back(EntrySpec::constant(m(i, j)));
        return NavigationMatrix(static_cast<int>(m.rows()), std::move(es));
    }

    int dimension() const { return dimension_; }
    const EntrySpec& entry(int i, int j) const { return entries_[i * dimension_ + j]; }
    const std::vector<EntrySpec>& entries() const { return entries_; }

    friend bool operator==(const NavigationMatrix& a, const NavigationMatrix& b) {
        return a.dimension_ == b.dimension_ && a.entries_ == b.entries_;
    }

  private:
    int dimension_;
    std::vector<EntrySpec> entries_;  // row-major
};

struct InitialState {
    Eigen::VectorXd coords;
};

/// Throws ValidationError unless all coordinates are >= 0 with positive sum.
void validate_initial_state(const InitialState& init);

// --- scheme classification -------------------------------------------------

struct GeneralScheme {};
struct DiagonalConstantScheme {
    Eigen::VectorXd alphas;
};
struct DiagonalExponentialScheme {
    Eigen::VectorXd rates;
};
struct EhrenfestScheme {
    double gamma;
};
struct HillScheme {
    double gamma;
};
struct BalancedTriangularScheme {
    double alpha;
    double delta;  // 0 < alpha < delta
};

using Scheme = std::variant<GeneralScheme, DiagonalConstantScheme, DiagonalExponentialScheme,
                            EhrenfestScheme, HillScheme, BalancedTriangularScheme>;

const char* scheme_name(const Scheme& s);

/// Most specific named pattern matching the matrix; entries are compared
/// exactly as stored (configs are authored, not measured).
Scheme classify(const NavigationMatrix& matrix);

/// Canonical navigation matrix of a named scheme. Undefined (throws) for
/// GeneralScheme.
NavigationMatrix canonical_matrix(const Scheme& scheme);

// --- tenability --------------------------------------------------------------

struct TenabilityReport {
    enum class Status { Ok, Violated, Unknown };
    Status status = Status::Ok;
    std::vector<std::string> violations;  // human-readable conditions that failed
    bool ok() const { return status == Status::Ok; }
};

TenabilityReport check_tenability(const NavigationMatrix& matrix, const InitialState& init);

// --- scenario ----------------------------------------------------------------

struct ScenarioConfig {
    NavigationMatrix matrix;
    InitialState init;
    double horizon = 0.0;
    std::vector<double> checkpoints;  // strictly increasing, within [0, horizon]
    std::uint64_t ensemble_size = 10000;
    std::uint64_t master_seed = 0;
};

/// Throws ValidationError listing every violated invariant.
void validate_scenario(const ScenarioConfig& config);

// --- row statistics ----------------------------------------------------------

/// Entrywise expectation E[A].
Eigen::MatrixXd row_mean_matrix(const NavigationMatrix& matrix);

/// psi_i(u) = prod_j MGF of entry (i,j) at u_j. Entries within a row are
/// independent, so the joint row MGF factors.
double row_mgf(const NavigationMatrix& matrix, int i, const Eigen::VectorXd& u);

}  // namespace polya::model
