#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gmqv/process.hpp"

namespace gmqv {

/// A time at which [X] may pick up a squared jump. gauss_var is the second
/// moment of the centred jump, mean_jump the jump of the mean there.
struct JumpSpec {
    double time = 0.0;
    double gauss_var = 0.0;
    double mean_jump = 0.0;
};

/// The law of [X]_t:
///   deterministic_part + sum_j (Z_j + mean_jump_j)^2,  Z ~ N(0, jump_cov).
struct QuadVarLaw {
    double t = 0.0;
    double deterministic_part = 0.0;
    std::vector<JumpSpec> jumps;
    Eigen::MatrixXd jump_cov;
};

/// Thrown when a Stieltjes integral of the law fails to reach tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EventTimes {
    /// Event times strictly below t; their count is m(t).
    std::vector<double> times;
    bool t_is_event = false;
};

EventTimes event_times(const ProcessSpec& spec, double t);

/// E[(X_tau - X_{tau-})^2]; zero at times where the factors are continuous.
double jump_second_moment(const ProcessSpec& spec, double tau);

/// Cov(dX_{tau_i}, dX_{tau_j}) from the four side-resolved kernel terms.
double jump_covariance(const ProcessSpec& spec, double tau_i, double tau_j);

struct LawOptions {
    /// Add the mean's jumps (nonzero-mean process).
    bool include_mean = false;
    /// Include the jump at t itself when t is an event time.
    bool closed_at_t = true;
    double tol = 1e-8;
    int max_levels = 22;
};

QuadVarLaw build_law(const ProcessSpec& spec, double t, const LawOptions& options = {});

double law_mean(const QuadVarLaw& law);
double law_variance(const QuadVarLaw& law);

/// n independent draws from the law. Z is drawn through the eigen-decomposition
/// of jump_cov from the seeded normal stream (seed, 0).
std::vector<double> sample_law(const QuadVarLaw& law, std::uint64_t seed, std::size_t n);

}  // namespace gmqv
