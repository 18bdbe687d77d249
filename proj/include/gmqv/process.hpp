#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmqv/expr.hpp"

namespace gmqv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Structural problem in a process description (segments that do not abut,
/// uncovered sub-intervals, times outside the index set, ...).
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Side { left_limit, value };

/// A time together with the side it is observed from: `value` is X_t,
/// `left_limit` is X_{t-}. Orders (t, left_limit) strictly before (t, value).
struct SidedTime {
    double t = 0.0;
    Side side = Side::value;

    friend bool operator==(const SidedTime&, const SidedTime&) = default;
};

inline SidedTime at(double t) { return {t, Side::value}; }
inline SidedTime left_of(double t) { return {t, Side::left_limit}; }

bool sided_less(const SidedTime& a, const SidedTime& b);

/// One continuous piece on [lower, upper]. The value at `upper` stands for the
/// left limit there.
struct Segment {
    double lower = 0.0;
    double upper = 0.0;
    Expr expr = Expr::number(0.0);
};

/// Ordered abutting segments covering [lower(), upper()).
class PiecewiseFn {
public:
    PiecewiseFn() = default;
    explicit PiecewiseFn(std::vector<Segment> segments);

    /// Single segment on [lower, upper).
    static PiecewiseFn constant_expr(double lower, double upper, Expr expr);

    const std::vector<Segment>& segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }
    double lower() const { return segments_.front().lower; }
    double upper() const { return segments_.back().upper; }

    /// Segment that owns the sided time: lower <= t < upper for the value
    /// side, lower < t <= upper for the left-limit side.
    std::size_t segment_index(SidedTime t) const;
    double eval(SidedTime t) const;
    double eval_left(double t) const { return eval(left_of(t)); }
    double eval_right(double t) const { return eval(at(t)); }

    /// Segment boundaries strictly inside (lower(), upper()).
    std::vector<double> breakpoints() const;

private:
    std::vector<Segment> segments_;
};

/// Independence block [lower, upper) carrying covariance factors f and g, so
/// that K(s, t) = f(min(s, t)) g(max(s, t)) for s, t in the block.
struct Block {
    double lower = 0.0;
    double upper = 0.0;
    PiecewiseFn f;
    PiecewiseFn g;

    /// Union of f and g breakpoints, sorted, deduplicated.
    std::vector<double> factor_breakpoints() const;
};

/// A block/segment resolution of a sided time.
struct Resolved {
    std::size_t block = 0;
    double f = 0.0;
    double g = 0.0;
};

/// Full description of a Gauss-Markov semimartingale on [lower, upper).
/// Immutable after construction.
class ProcessSpec {
public:
    ProcessSpec(double lower, double upper, std::vector<Block> blocks, PiecewiseFn mean);

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const PiecewiseFn& mean_fn() const { return mean_; }

    /// Throws SpecError unless `t` lies in [lower, upper); a left limit is
    /// also accepted at a finite `upper` but never at `lower`.
    void check_time(SidedTime t) const;
    std::size_t block_index(SidedTime t) const;
    Resolved resolve(SidedTime t) const;
    double mean(SidedTime t) const;

    /// Interior block boundaries.
    std::vector<double> block_boundaries() const;
    /// Factor breakpoints inside each block.
    std::vector<double> factor_discontinuities() const;
    /// Sorted union of block boundaries and factor discontinuities.
    std::vector<double> event_times() const;
    /// Interior breakpoints of the mean.
    std::vector<double> mean_breakpoints() const;

private:
    double lower_;
    double upper_;
    std::vector<Block> blocks_;
    PiecewiseFn mean_;
};

double eval_kernel(const ProcessSpec& spec, SidedTime s, SidedTime t);
double variance(const ProcessSpec& spec, SidedTime t);

using KernelOracle = std::function<double(double, double)>;

struct ValidationCheck {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    std::vector<double> block_boundaries;
    std::vector<double> factor_discontinuities;

    bool ok() const;
    const ValidationCheck* find(const std::string& name) const;
};

struct ValidateOptions {
    std::size_t grid_points_per_segment = 257;
    /// Relative tolerance for kernel identities.
    double kernel_tol = 1e-9;
    /// Sampling span used in place of +inf for unbounded final blocks.
    double unbounded_span = 10.0;
    /// Maximum number of points per block fed into the triple check.
    std::size_t triple_points = 24;
    /// When set, the factor-built kernel is compared against it and the
    /// declared block boundaries are checked for independence.
    std::optional<KernelOracle> oracle;
};

/// Sampled structural validation; failures are report entries, never throws
/// for a structurally well-formed spec.
ValidationReport validate(const ProcessSpec& spec, const ValidateOptions& options = {});

/// |K(r,s)K(s,t) - K(s,s)K(r,t)| <= tol (1 + |K(s,s)K(r,t)|) for each triple.
struct Triple {
    double r, s, t;
};
std::vector<bool> check_markov_oracle(const KernelOracle& k, std::span<const Triple> triples,
                                      double tol = 1e-9);

struct TabulatedFactors {
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> g;
};

/// Covariance factors read off a kernel using a single anchor point of the
/// block. Throws std::domain_error when a required division is by zero.
TabulatedFactors extract_factors(const KernelOracle& k, double block_lower, double block_upper,
                                 double anchor, std::span<const double> grid);

struct QuadraticForm {
    double gram_value = 0.0;
    double telescoped_value = 0.0;
    /// sum |K(x_u, x_j) y_u y_j|, the natural scale for comparing the two.
    double magnitude = 0.0;
};

/// The Gram sum of the factor kernel against `weights` computed directly and
/// through the ratio-increment telescoping that exhibits its sign.
QuadraticForm psd_quadratic_form(const PiecewiseFn& f, const PiecewiseFn& g,
                                 std::span<const double> points, std::span<const double> weights);

}  // namespace gmqv
