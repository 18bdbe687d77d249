#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gmqv {

using PointFn = std::function<double(double)>;

/// Riemann-Stieltjes integral of `integrand` against the nondecreasing
/// `integrator` over [lo, hi). Both callables are evaluated at `hi` directly;
/// callers pass segment expressions so that value is the left limit.
struct RSRequest {
    PointFn integrand;
    PointFn integrator;
    double lo = 0.0;
    double hi = 0.0;
    double tol = 1e-8;
    int max_levels = 22;
};

enum class TagPoint { left, midpoint };

/// sum_j integrand(tag_j) [integrator(t_{j+1}) - integrator(t_j)], with tag_j
/// the left end (default) or the midpoint of each cell.
double rs_sum(const RSRequest& req, std::span<const double> partition,
              TagPoint tag = TagPoint::left);

struct RSResult {
    double value = 0.0;
    /// |I_k - I_{k-1}| / (1 + |I_k|) at the last level.
    double achieved_tol = 0.0;
    int levels_used = 0;
    bool converged = true;
};

inline constexpr int kFirstLevel = 4;

/// Dyadic refinement (2^k uniform cells, k = 4, 5, ...) of the midpoint sum
/// until |I_k - I_{k-1}| <= tol (1 + |I_k|). A non-converged result carries
/// the finest estimate with converged = false.
RSResult rs_integral(const RSRequest& req);

/// The same integral for integrand g^2 and integrator f/g, evaluated without
/// forming f/g: each cell contributes g(a) f(b) - f(a) g(b), which is the
/// Stieltjes increment tagged at the geometric mean g(a) g(b) of g^2. Stays
/// finite when g vanishes at `hi` (a pinned bridge end).
RSResult factor_integral(const PointFn& f, const PointFn& g, double lo, double hi,
                         double tol = 1e-8, int max_levels = 22);

/// Uniform partition of [lo, hi] into 2^level cells; the last node is hi.
std::vector<double> dyadic_partition(double lo, double hi, int level);

}  // namespace gmqv
