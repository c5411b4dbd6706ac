#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "polya/model.hpp"
#include "polya/rng.hpp"

namespace polya::sim {

struct WalkState {
    double time = 0.0;
    Eigen::VectorXd coords;
};

struct EventRecord {
    double event_time;
    int fired_coordinate;
    Eigen::VectorXd applied_increments;  // realized sample of the fired row
};

struct StepResult {
    WalkState state;
    EventRecord event;
};

/// One renewal: waiting time ~ Exp(rate = sum of coordinates), fired
/// coordinate chosen proportionally, the fired row sampled and applied.
StepResult step(const WalkState& state, const model::NavigationMatrix& matrix,
                RandomStream& rng);

struct Trajectory {
    std::vector<Eigen::VectorXd> checkpoint_values;  // aligned with config.checkpoints
    std::uint64_t event_count = 0;
};

/// Full path to the horizon, recording the state in force at each checkpoint
/// (paths are right-continuous; a jump at the checkpoint instant is included).
/// Deterministic given (config.master_seed, trajectory_index).
Trajectory simulate_path(const model::ScenarioConfig& config, std::uint64_t trajectory_index);

// --- streaming moment statistics ------------------------------------------------

/// Mergeable accumulator of mean, co-moment matrix, and third/fourth central
/// sums per coordinate (one-pass update; pairwise merge).
class MomentAccumulator {
  public:
    MomentAccumulator() = default;
    explicit MomentAccumulator(Eigen::Index dim);

    void add(const Eigen::VectorXd& x);
    void merge(const MomentAccumulator& other);

    std::uint64_t count() const { return n_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    double variance(Eigen::Index j) const;             // sample variance, n-1
    double covariance(Eigen::Index j, Eigen::Index k) const;
    double fourth_central(Eigen::Index j) const;       // central moment m4 = M4/n

    const Eigen::MatrixXd& comoment() const { return comoment_; }
    const Eigen::VectorXd& m3_sum() const { return m3_; }
    const Eigen::VectorXd& m4_sum() const { return m4_; }

  private:
    std::uint64_t n_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd comoment_;  // sum of (x-mean)(x-mean)^T
    Eigen::VectorXd m3_;        // sum of (x_j-mean_j)^3
    Eigen::VectorXd m4_;        // sum of (x_j-mean_j)^4
};

/// Scalar Welford accumulator for empirical MGF values at one grid point.
struct ScalarAccumulator {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const ScalarAccumulator& other);
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

/// One u-vector to track as an empirical MGF, at one checkpoint.
struct MgfGridPoint {
    std::size_t checkpoint_index;
    Eigen::VectorXd u;
};

struct EnsembleStats {
    std::vector<double> checkpoints;
    std::vector<MomentAccumulator> per_checkpoint;
    std::vector<MgfGridPoint> mgf_grid;                // optional, may be empty
    std::vector<ScalarAccumulator> mgf_values;         // aligned with mgf_grid
    std::uint64_t path_check_violations = 0;

    void merge(const EnsembleStats& other);
};

/// Pure per-trajectory validator; returns the number of violations found.
using PathCheck = std::function<std::uint64_t(const Trajectory&)>;

struct EnsembleOptions {
    unsigned workers = 1;
    std::vector<MgfGridPoint> mgf_grid;
    PathCheck path_check;  // optional
};

/// Runs config.ensemble_size independent trajectories and merges their
/// statistics. The result is bitwise identical for any worker count: work is
/// split into fixed blocks of trajectories, each block is accumulated in
/// trajectory order, and blocks are merged in index order.
EnsembleStats run_ensemble(const model::ScenarioConfig& config, const EnsembleOptions& options);

inline EnsembleStats run_ensemble(const model::ScenarioConfig& config, unsigned workers = 1) {
    EnsembleOptions opt;
    opt.workers = workers;
    return run_ensemble(config, opt);
}

// --- renewal-window probabilities -------------------------------------------------

struct EventWindowCounts {
    std::uint64_t trials = 0;
    double p_zero = 0.0;
    Eigen::VectorXd p_one;  // exactly one event, of each type
    double p_multi = 0.0;
};

/// Monte Carlo estimate of the renewal-count probabilities over the window
/// (t, t + delta_t], starting fresh from `state` on every trial.
EventWindowCounts event_window_counts(const WalkState& state,
                                      const model::NavigationMatrix& matrix, double delta_t,
                                      std::uint64_t trials, RandomStream& rng);

}  // namespace polya::sim
