#include "gmqv/realized.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace gmqv {

namespace {

void check_partition(std::span<const double> partition) {
    if (partition.size() < 2) throw std::invalid_argument("partition needs at least two times");
    for (std::size_t j = 1; j < partition.size(); ++j) {
        if (!(partition[j - 1] < partition[j])) {
            throw std::invalid_argument("partition must be strictly increasing");
        }
    }
}

}  // namespace

double realized_qv(const PathSample& path, std::span<const double> partition, Series series) {
    check_partition(partition);
    const std::vector<double>& xs = series == Series::values ? path.values : path.centred_values;
    double sum = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < partition.size(); ++j) {
        const auto idx = path.grid->find(partition[j]);
        if (!idx) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g", partition[j]);
            throw std::invalid_argument(std::string("realized_qv: time ") + buf + " not on the grid");
        }
        const double x = xs[*idx];
        if (j > 0) sum += (x - prev) * (x - prev);
        prev = x;
    }
    return sum;
}

double expected_realized_qv(const ProcessSpec& spec, std::span<const double> partition) {
    check_partition(partition);
    double sum = 0.0;
    double var_prev = variance(spec, at(partition[0]));
    for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
        const double var_next = variance(spec, at(partition[j + 1]));
        sum += var_next + var_prev - 2.0 * eval_kernel(spec, at(partition[j]), at(partition[j + 1]));
        var_prev = var_next;
    }
    return sum;
}

std::vector<ConvergenceRow> convergence_study(const ProcessSpec& spec, double t, int level_lo,
                                              int level_hi, std::size_t n_paths,
                                              std::uint64_t seed, const StudyOptions& options) {
    if (level_lo > level_hi || level_lo < 0) throw std::invalid_argument("convergence_study: empty level range");
    if (level_hi > 30) throw std::invalid_argument("convergence_study: level too large");
    if (n_paths < 100) throw std::invalid_argument("convergence_study: n_paths must be >= 100");

    LawOptions law_options = options.law;
    law_options.include_mean = options.with_mean;
    const QuadVarLaw law = build_law(spec, t, law_options);
    const double mean_of_law = law_mean(law);
    const double var_of_law = law_variance(law);

    std::vector<ConvergenceRow> rows;
    for (int k = level_lo; k <= level_hi; ++k) {
        const std::size_t cells = std::size_t{1} << k;
        const PathSampler sampler(spec, SimGrid::uniform(spec, t, cells));
        const auto& entries = sampler.grid().entries();
        std::vector<std::size_t> regular;
        std::vector<double> partition;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].side == Side::value) {
                regular.push_back(i);
                partition.push_back(entries[i].t);
            }
        }
        const std::span<const double> mean = sampler.mean_values();

        std::vector<double> qv(n_paths);
        parallel_for(n_paths, [&](std::size_t p) {
            NormalStream rng(seed, p);
            std::vector<double> x(entries.size());
            sampler.sample_centred(rng, x);
            double sum = 0.0;
            for (std::size_t j = 1; j < regular.size(); ++j) {
                double d = x[regular[j]] - x[regular[j - 1]];
                if (options.with_mean) d += mean[regular[j]] - mean[regular[j - 1]];
                sum += d * d;
            }
            qv[p] = sum;
        });

        ConvergenceRow row;
        row.level = k;
        row.mesh = (t - spec.lower()) / static_cast<double>(cells);
        row.n_paths = n_paths;
        const double n = static_cast<double>(n_paths);
        double m = 0.0;
        for (double v : qv) m += v;
        m /= n;
        double m2 = 0.0;
        double m4 = 0.0;
        for (double v : qv) {
            const double d2 = (v - m) * (v - m);
            m2 += d2;
            m4 += d2 * d2;
        }
        row.mc_mean = m;
        row.mc_var = m2 / (n - 1.0);
        row.mc_se = std::sqrt(row.mc_var / n);
        m2 /= n;
        m4 /= n;
        row.mc_var_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);

        row.expected_realized = expected_realized_qv(spec, partition);
        if (options.with_mean) {
            for (std::size_t j = 1; j < regular.size(); ++j) {
                const double dm = mean[regular[j]] - mean[regular[j - 1]];
                row.expected_realized += dm * dm;
            }
        }
        row.law_mean = mean_of_law;
        row.law_var = var_of_law;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gmqv
