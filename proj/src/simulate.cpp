#include "polya/simulate.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "polya/errors.hpp"

namespace polya::sim {

using model::NavigationMatrix;
using model::ScenarioConfig;

namespace {

constexpr double kCoordGuard = -1e-12;  // tolerated rounding below zero
constexpr std::uint64_t kBlockSize = 256;

// Row layout tuned for the event loop: constant displacements are applied
// without drawing, exponential ones consume the stream in column order.
struct CompiledRow {
    std::vector<std::pair<int, double>> constant_terms;     // (coordinate, value)
    std::vector<std::pair<int, double>> exponential_terms;  // (coordinate, rate)
};

struct CompiledMatrix {
    int dimension;
    std::vector<CompiledRow> rows;
};

CompiledMatrix compile(const NavigationMatrix& matrix) {
    CompiledMatrix cm;
    cm.dimension = matrix.dimension();
    cm.rows.resize(cm.dimension);
    for (int i = 0; i < cm.dimension; ++i) {
        for (int j = 0; j < cm.dimension; ++j) {
            const model::EntrySpec& e = matrix.entry(i, j);
            if (e.is_constant()) {
                if (e.value() != 0.0) cm.rows[i].constant_terms.emplace_back(j, e.value());
            } else {
                cm.rows[i].exponential_terms.emplace_back(j, e.rate());
            }
        }
    }
    return cm;
}

// Firing weight of a coordinate; values inside the rounding guard count as 0.
inline double firing_weight(double x) { return x > 0.0 ? x : 0.0; }

inline double total_weight(const Eigen::VectorXd& coords) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < coords.size(); ++j) total += firing_weight(coords[j]);
    return total;
}

inline int pick_coordinate(const Eigen::VectorXd& coords, double total, RandomStream& rng) {
    const double target = rng.uniform_open01() * total;
    double acc = 0.0;
    const Eigen::Index c = coords.size();
    for (Eigen::Index j = 0; j < c; ++j) {
        acc += firing_weight(coords[j]);
        if (target <= acc) return static_cast<int>(j);
    }
    return static_cast<int>(c - 1);  // target landed on the rounding tail
}

// One renewal applied in place. Draw order (waiting time, type, then the
// fired row's random entries in column order) is part of the
// reproducibility contract.
inline int advance(double& time, Eigen::VectorXd& coords, const CompiledMatrix& cm,
                   RandomStream& rng) {
    const double total = total_weight(coords);
    if (!(total > 0.0)) throw RateUnderflow("coordinate sum is nonpositive; no clock rate");
    const double dt = rng.exponential(total);
    const int fired = pick_coordinate(coords, total, rng);
    time += dt;
    const CompiledRow& row = cm.rows[fired];
    for (const auto& [j, v] : row.constant_terms) {
        coords[j] += v;
        if (coords[j] < kCoordGuard)
            throw TenabilityBreach("coordinate became negative", j, time);
    }
    for (const auto& [j, rate] : row.exponential_terms) {
        coords[j] += rng.exponential(rate);
        if (coords[j] < kCoordGuard)
            throw TenabilityBreach("coordinate became negative", j, time);
    }
    return fired;
}

void run_path(const ScenarioConfig& config, const CompiledMatrix& cm, std::uint64_t index,
              Trajectory& out, Eigen::VectorXd& coords) {
    RandomStream rng(trajectory_seed(config.master_seed, index));
    coords = config.init.coords;
    double time = 0.0;
    std::uint64_t events = 0;
    std::size_t next_checkpoint = 0;
    const std::size_t n_checkpoints = config.checkpoints.size();
    out.checkpoint_values.resize(n_checkpoints);

    try {
        while (true) {
            const double total = total_weight(coords);
            if (!(total > 0.0))
                throw RateUnderflow("coordinate sum is nonpositive; no clock rate");
            const double dt = rng.exponential(total);
            if (!(dt > 0.0)) throw RateUnderflow("waiting time must be strictly positive");
            const double t_next = time + dt;
            if (!(t_next > time))
                throw RateUnderflow("event time failed to increase");  // never at fp scale used
            if (t_next > config.horizon) {
                // No further event before the horizon; the current state is in
                // force at every remaining checkpoint.
                for (; next_checkpoint < n_checkpoints; ++next_checkpoint)
                    out.checkpoint_values[next_checkpoint] = coords;
                break;
            }
            // Checkpoints strictly before the event keep the pre-event state;
            // a checkpoint at the event instant reports the post-event state
            // (paths are right-continuous).
            while (next_checkpoint < n_checkpoints &&
                   config.checkpoints[next_checkpoint] < t_next) {
                out.checkpoint_values[next_checkpoint] = coords;
                ++next_checkpoint;
            }
            const int fired = pick_coordinate(coords, total, rng);
            time = t_next;
            const CompiledRow& row = cm.rows[fired];
            for (const auto& [j, v] : row.constant_terms) {
                coords[j] += v;
                if (coords[j] < kCoordGuard)
                    throw TenabilityBreach("coordinate became negative", j, time);
            }
            for (const auto& [j, rate] : row.exponential_terms) {
                coords[j] += rng.exponential(rate);
                if (coords[j] < kCoordGuard)
                    throw TenabilityBreach("coordinate became negative", j, time);
            }
            ++events;
        }
    } catch (const SimulationError&) {
        throw;
    } catch (const std::exception& e) {
        throw SimulationError(std::string(e.what()) + " [trajectory " + std::to_string(index) +
                                  ", after " + std::to_string(events) + " events]",
                              index, events);
    }
    out.event_count = events;
}

}  // namespace

StepResult step(const WalkState& state, const NavigationMatrix& matrix, RandomStream& rng) {
    const Eigen::Index c = state.coords.size();
    if (c != matrix.dimension()) throw DomainError("step: state dimension mismatch");
    const double total = total_weight(state.coords);
    if (!(total > 0.0)) throw RateUnderflow("coordinate sum is nonpositive; no clock rate");

    const double dt = rng.exponential(total);
    const int fired = pick_coordinate(state.coords, total, rng);

    Eigen::VectorXd increments(c);
    for (Eigen::Index j = 0; j < c; ++j) increments[j] = matrix.entry(fired, j).sample(rng);

    StepResult result{WalkState{state.time + dt, state.coords + increments},
                      EventRecord{state.time + dt, fired, std::move(increments)}};
    for (Eigen::Index j = 0; j < c; ++j)
        if (result.state.coords[j] < kCoordGuard)
            throw TenabilityBreach("coordinate became negative", static_cast<int>(j),
                                   result.state.time);
    return result;
}

Trajectory simulate_path(const ScenarioConfig& config, std::uint64_t trajectory_index) {
    model::validate_scenario(config);
    const CompiledMatrix cm = compile(config.matrix);
    Trajectory t;
    Eigen::VectorXd scratch;
    run_path(config, cm, trajectory_index, t, scratch);
    return t;
}

// --- accumulators ---------------------------------------------------------------

MomentAccumulator::MomentAccumulator(Eigen::Index dim)
    : mean_(Eigen::VectorXd::Zero(dim)),
      comoment_(Eigen::MatrixXd::Zero(dim, dim)),
      m3_(Eigen::VectorXd::Zero(dim)),
      m4_(Eigen::VectorXd::Zero(dim)) {}

void MomentAccumulator::add(const Eigen::VectorXd& x) {
    if (mean_.size() == 0) *this = MomentAccumulator(x.size());
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double nd = static_cast<double>(n_);

    const Eigen::VectorXd delta = x - mean_;
    // Third/fourth central sums first: they reference the old comoment diagonal.
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double d = delta[j];
        const double dn = d / nd;
        const double term1 = d * dn * n1;
        const double m2 = comoment_(j, j);
        m4_[j] += term1 * dn * dn * (nd * nd - 3.0 * nd + 3.0) + 6.0 * dn * dn * m2 -
                  4.0 * dn * m3_[j];
        m3_[j] += term1 * dn * (nd - 2.0) - 3.0 * dn * m2;
    }
    mean_ += delta / nd;
    comoment_ += (delta * delta.transpose()) * (n1 / nd);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double nd = na + nb;
    const Eigen::VectorXd delta = other.mean_ - mean_;

    for (Eigen::Index j = 0; j < mean_.size(); ++j) {
        const double d = delta[j];
        const double m2a = comoment_(j, j), m2b = other.comoment_(j, j);
        const double m3a = m3_[j], m3b = other.m3_[j];
        m4_[j] += other.m4_[j] +
                  d * d * d * d * na * nb * (na * na - na * nb + nb * nb) / (nd * nd * nd) +
                  6.0 * d * d * (na * na * m2b + nb * nb * m2a) / (nd * nd) +
                  4.0 * d * (na * m3b - nb * m3a) / nd;
        m3_[j] += m3b + d * d * d * na * nb * (na - nb) / (nd * nd) +
                  3.0 * d * (na * m2b - nb * m2a) / nd;
    }
    comoment_ += other.comoment_ + (delta * delta.transpose()) * (na * nb / nd);
    mean_ += delta * (nb / nd);
    n_ += other.n_;
}

double MomentAccumulator::variance(Eigen::Index j) const {
    return n_ > 1 ? comoment_(j, j) / static_cast<double>(n_ - 1) : 0.0;
}

double MomentAccumulator::covariance(Eigen::Index j, Eigen::Index k) const {
    return n_ > 1 ? comoment_(j, k) / static_cast<double>(n_ - 1) : 0.0;
}

double MomentAccumulator::fourth_central(Eigen::Index j) const {
    return n_ > 0 ? m4_[j] / static_cast<double>(n_) : 0.0;
}

void ScalarAccumulator::add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

void ScalarAccumulator::merge(const ScalarAccumulator& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double delta = other.mean - mean;
    m2 += other.m2 + delta * delta * na * nb / (na + nb);
    mean += delta * (nb / (na + nb));
    n += other.n;
}

void EnsembleStats::merge(const EnsembleStats& other) {
    for (std::size_t k = 0; k < per_checkpoint.size(); ++k)
        per_checkpoint[k].merge(other.per_checkpoint[k]);
    for (std::size_t g = 0; g < mgf_values.size(); ++g) mgf_values[g].merge(other.mgf_values[g]);
    path_check_violations += other.path_check_violations;
}

// --- ensemble -------------------------------------------------------------------

namespace {

EnsembleStats empty_stats(const ScenarioConfig& config, const EnsembleOptions& options) {
    EnsembleStats s;
    s.checkpoints = config.checkpoints;
    s.per_checkpoint.assign(config.checkpoints.size(),
                            MomentAccumulator(config.init.coords.size()));
    s.mgf_grid = options.mgf_grid;
    s.mgf_values.assign(options.mgf_grid.size(), ScalarAccumulator{});
    return s;
}

void accumulate_trajectory(EnsembleStats& stats, const Trajectory& t,
                           const EnsembleOptions& options) {
    for (std::size_t k = 0; k < t.checkpoint_values.size(); ++k)
        stats.per_checkpoint[k].add(t.checkpoint_values[k]);
    for (std::size_t g = 0; g < stats.mgf_grid.size(); ++g) {
        const MgfGridPoint& p = stats.mgf_grid[g];
        stats.mgf_values[g].add(std::exp(p.u.dot(t.checkpoint_values[p.checkpoint_index])));
    }
    if (options.path_check) stats.path_check_violations += options.path_check(t);
}

}  // namespace

EnsembleStats run_ensemble(const ScenarioConfig& config, const EnsembleOptions& options) {
    model::validate_scenario(config);
    const model::TenabilityReport ten = model::check_tenability(config.matrix, config.init);
    if (ten.status == model::TenabilityReport::Status::Violated) {
        std::string msg = "scenario is not tenable:";
        for (const auto& v : ten.violations) msg += " [" + v + "]";
        throw ValidationError(msg);
    }
    for (const auto& p : options.mgf_grid)
        if (p.checkpoint_index >= config.checkpoints.size() ||
            p.u.size() != config.init.coords.size())
            throw ValidationError("mgf grid point does not match the scenario");

    const CompiledMatrix cm = compile(config.matrix);
    const std::uint64_t n = config.ensemble_size;
    const std::uint64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;

    // Blocks have fixed trajectory ranges and are merged in index order, so
    // the result does not depend on how many workers processed them.
    std::vector<EnsembleStats> block_stats(n_blocks);
    std::atomic<std::uint64_t> next_block{0};
    std::mutex error_mutex;
    std::vector<std::string> errors;

    auto worker = [&]() {
        Trajectory scratch_traj;
        Eigen::VectorXd scratch_coords;
        while (true) {
            const std::uint64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            EnsembleStats stats = empty_stats(config, options);
            const std::uint64_t begin = b * kBlockSize;
            const std::uint64_t end = std::min(n, begin + kBlockSize);
            for (std::uint64_t k = begin; k < end; ++k) {
                try {
                    run_path(config, cm, k, scratch_traj, scratch_coords);
                    accumulate_trajectory(stats, scratch_traj, options);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (errors.size() < 16) errors.emplace_back(e.what());
                }
            }
            block_stats[b] = std::move(stats);
        }
    };

    const unsigned workers = std::max(1u, options.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!errors.empty()) {
        std::string msg = "ensemble failed (" + std::to_string(errors.size()) +
                          " trajectory error(s) reported):";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }

    EnsembleStats total = empty_stats(config, options);
    for (std::uint64_t b = 0; b < n_blocks; ++b) total.merge(block_stats[b]);
    return total;
}

EventWindowCounts event_window_counts(const WalkState& state, const NavigationMatrix& matrix,
                                      double delta_t, std::uint64_t trials, RandomStream& rng) {
    if (delta_t < 0.0) throw DomainError("event_window_counts: delta_t must be nonnegative");
    const CompiledMatrix cm = compile(matrix);
    const Eigen::Index c = state.coords.size();

    std::uint64_t zero = 0, multi = 0;
    std::vector<std::uint64_t> one(c, 0);
    Eigen::VectorXd coords(c);

    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        coords = state.coords;
        double elapsed = 0.0;
        int count = 0;
        int first_type = -1;
        while (true) {
            const double total = total_weight(coords);
            if (!(total > 0.0)) break;
            elapsed += rng.exponential(total);
            if (elapsed > delta_t) break;
            const int fired = pick_coordinate(coords, total, rng);
            if (count == 0) first_type = fired;
            ++count;
            if (count >= 2) break;  // classification is fixed beyond two events
            const CompiledRow& row = cm.rows[fired];
            for (const auto& [j, v] : row.constant_terms) coords[j] += v;
            for (const auto& [j, rate] : row.exponential_terms)
                coords[j] += rng.exponential(rate);
        }
        if (count == 0)
            ++zero;
        else if (count == 1)
            ++one[first_type];
        else
            ++multi;
    }

    EventWindowCounts out;
    out.trials = trials;
    out.p_one = Eigen::VectorXd::Zero(c);
    if (trials > 0) {
        const double tn = static_cast<double>(trials);
        out.p_zero = static_cast<double>(zero) / tn;
        out.p_multi = static_cast<double>(multi) / tn;
        for (Eigen::Index j = 0; j < c; ++j)
            out.p_one[j] = static_cast<double>(one[j]) / tn;
    } else {
        out.p_zero = 1.0;
    }
    return out;
}

}  // namespace polya::sim
