#include "gmqv/stieltjes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gmqv {

namespace {

void check_range(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
        throw std::invalid_argument("Stieltjes integral needs finite lo <= hi");
    }
}

template <typename LevelSum>
RSResult refine(LevelSum&& level_sum, double tol, int max_levels) {
    if (!(tol > 0.0)) throw std::invalid_argument("Stieltjes integral needs tol > 0");
    RSResult out;
    double prev = level_sum(kFirstLevel);
    out.value = prev;
    out.levels_used = kFirstLevel;
    out.converged = false;
    out.achieved_tol = std::numeric_limits<double>::infinity();
    for (int k = kFirstLevel + 1; k <= max_levels; ++k) {
        const double cur = level_sum(k);
        out.value = cur;
        out.levels_used = k;
        out.achieved_tol = std::abs(cur - prev) / (1.0 + std::abs(cur));
        if (out.achieved_tol <= tol) {
            out.converged = true;
            return out;
        }
        prev = cur;
    }
    return out;
}

}  // namespace

std::vector<double> dyadic_partition(double lo, double hi, int level) {
    const std::size_t cells = std::size_t{1} << level;
    std::vector<double> nodes(cells + 1);
    const double h = (hi - lo) / static_cast<double>(cells);
    for (std::size_t j = 0; j < cells; ++j) nodes[j] = lo + h * static_cast<double>(j);
    nodes[cells] = hi;
    return nodes;
}

namespace {

// Zero-width cells, which dyadic nodes produce on ranges a few ulps wide,
// contribute nothing.
double tagged_sum(const RSRequest& req, std::span<const double> partition, TagPoint tag) {
    double sum = 0.0;
    double prev_f = req.integrator(partition[0]);
    for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
        const double a = partition[j];
        const double b = partition[j + 1];
        if (a == b) continue;
        const double next_f = req.integrator(b);
        const double x = tag == TagPoint::left ? a : 0.5 * (a + b);
        sum += req.integrand(x) * (next_f - prev_f);
        prev_f = next_f;
    }
    return sum;
}

}  // namespace

double rs_sum(const RSRequest& req, std::span<const double> partition, TagPoint tag) {
    if (partition.size() < 2 || partition.front() != req.lo || partition.back() != req.hi) {
        throw std::invalid_argument("rs_sum: partition must run from lo to hi");
    }
    for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
        if (!(partition[j] < partition[j + 1])) {
            throw std::invalid_argument("rs_sum: partition must be strictly increasing");
        }
    }
    return tagged_sum(req, partition, tag);
}

RSResult rs_integral(const RSRequest& req) {
    check_range(req.lo, req.hi);
    if (req.lo == req.hi) return {};
    return refine(
        [&](int level) {
            const std::vector<double> nodes = dyadic_partition(req.lo, req.hi, level);
            return tagged_sum(req, nodes, TagPoint::midpoint);
        },
        req.tol, req.max_levels);
}

RSResult factor_integral(const PointFn& f, const PointFn& g, double lo, double hi, double tol,
                         int max_levels) {
    check_range(lo, hi);
    if (lo == hi) return {};
    return refine(
        [&](int level) {
            const std::vector<double> nodes = dyadic_partition(lo, hi, level);
            double sum = 0.0;
            double fa = f(nodes[0]);
            double ga = g(nodes[0]);
            for (std::size_t j = 1; j < nodes.size(); ++j) {
                const double fb = f(nodes[j]);
                const double gb = g(nodes[j]);
                sum += ga * fb - fa * gb;
                fa = fb;
                ga = gb;
            }
            return sum;
        },
        tol, max_levels);
}

}  // namespace gmqv
