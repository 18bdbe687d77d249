#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gmqv/process.hpp"
#include "gmqv/random.hpp"

namespace gmqv {

/// Simulation times from the interval start to a horizon. Every event time up
/// to the horizon appears twice: a ghost entry (tau, left_limit) carrying
/// X_{tau-}, immediately followed by the regular entry (tau, value).
class SimGrid {
public:
    /// 2^k-style uniform grid: `cells` equal cells on [lower, horizon], plus
    /// event times and mean breakpoints <= horizon. Uniform nodes within
    /// 1e-9 cells of an inserted time are merged into it.
    static SimGrid uniform(const ProcessSpec& spec, double horizon, std::size_t cells);
    /// The interval start, the given times, and event times and mean
    /// breakpoints up to max(times).
    static SimGrid through(const ProcessSpec& spec, std::span<const double> times);

    const std::vector<SidedTime>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    double horizon() const { return entries_.back().t; }

    /// Index of the regular entry at exactly t.
    std::optional<std::size_t> find(double t) const;
    std::vector<double> regular_times() const;

private:
    static SimGrid assemble(const ProcessSpec& spec, std::vector<double> regular, double snap);
    std::vector<SidedTime> entries_;
};

struct TransitionParams {
    double slope = 0.0;
    /// Conditional variance, clamped at 0.
    double noise_var = 0.0;
    /// Conditional variance before clamping.
    double raw_noise_var = 0.0;
};

inline constexpr double kDegenerateVariance = 1e-12;

/// X_t | X_s ~ N(slope X_s, noise_var) for s before t in the same block.
/// Throws std::domain_error across blocks or when variance(s) <= eps.
TransitionParams transition_params(const ProcessSpec& spec, SidedTime s, SidedTime t,
                                   double eps = kDegenerateVariance);

struct PathSample {
    std::shared_ptr<const SimGrid> grid;
    /// Centred process on every grid entry.
    std::vector<double> centred_values;
    /// centred + mean; on ghost entries the mean's left limit is used.
    std::vector<double> values;
};

/// Precomputed Markov transitions along one grid. Draws exactly one standard
/// normal per grid entry, so stream consumption is fixed by the grid size.
class PathSampler {
public:
    PathSampler(const ProcessSpec& spec, SimGrid grid, double eps = kDegenerateVariance);

    const SimGrid& grid() const { return *grid_; }
    std::shared_ptr<const SimGrid> shared_grid() const { return grid_; }
    std::span<const double> mean_values() const { return mean_; }

    void sample_centred(NormalStream& rng, std::span<double> out) const;
    PathSample sample(std::uint64_t seed, std::uint64_t stream) const;

private:
    struct Step {
        bool restart = true;
        double slope = 0.0;
        double sd = 0.0;
    };
    std::shared_ptr<const SimGrid> grid_;
    std::vector<Step> steps_;
    std::vector<double> mean_;
};

PathSample sample_path(const ProcessSpec& spec, const SimGrid& grid, std::uint64_t seed,
                       std::uint64_t stream = 0);

/// Path k uses stream (seed, k). Paths may be generated concurrently; the
/// result is in index order and independent of scheduling.
std::vector<PathSample> sample_paths(const ProcessSpec& spec, const SimGrid& grid,
                                     std::uint64_t seed, std::size_t n);

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gmqv
