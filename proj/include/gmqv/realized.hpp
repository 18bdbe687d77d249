#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmqv/process.hpp"
#include "gmqv/quadvar.hpp"
#include "gmqv/simulate.hpp"

namespace gmqv {

enum class Series { values, centred };

/// sum_j (X_{t_{j+1}} - X_{t_j})^2 over regular grid entries of the path.
/// Throws std::invalid_argument when a partition time is not on the grid.
double realized_qv(const PathSample& path, std::span<const double> partition,
                   Series series = Series::values);

/// E[sum_j (X_{t_{j+1}} - X_{t_j})^2] for the centred process, from the kernel.
double expected_realized_qv(const ProcessSpec& spec, std::span<const double> partition);

/// One refinement level of a realized-QV Monte Carlo study.
struct ConvergenceRow {
    int level = 0;
    double mesh = 0.0;
    double mc_mean = 0.0;
    double mc_var = 0.0;
    double mc_se = 0.0;
    double expected_realized = 0.0;
    double law_mean = 0.0;
    double law_var = 0.0;
    std::size_t n_paths = 0;
    /// Standard error of mc_var; not part of the CSV schema.
    double mc_var_se = 0.0;
};

struct StudyOptions {
    /// Realized QV of X + mean instead of the centred process.
    bool with_mean = false;
    LawOptions law;
};

/// For each level k: simulate n_paths paths on 2^k uniform cells of
/// [lower, t] plus event times, and compare realized QV to the law of [X]_t.
/// Path i of every level uses stream (seed, i).
std::vector<ConvergenceRow> convergence_study(const ProcessSpec& spec, double t, int level_lo,
                                              int level_hi, std::size_t n_paths,
                                              std::uint64_t seed, const StudyOptions& options = {});

}  // namespace gmqv
