#include "gmqv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace gmqv {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// SimGrid

SimGrid SimGrid::uniform(const ProcessSpec& spec, double horizon, std::size_t cells) {
    if (cells == 0) throw std::invalid_argument("SimGrid: cells must be >= 1");
    spec.check_time(at(horizon));
    std::vector<double> regular(cells + 1);
    const double lo = spec.lower();
    const double h = (horizon - lo) / static_cast<double>(cells);
    for (std::size_t j = 0; j < cells; ++j) regular[j] = lo + h * static_cast<double>(j);
    regular[cells] = horizon;
    return assemble(spec, std::move(regular), 1e-9 * h);
}

SimGrid SimGrid::through(const ProcessSpec& spec, std::span<const double> times) {
    std::vector<double> regular{spec.lower()};
    for (double t : times) {
        spec.check_time(at(t));
        regular.push_back(t);
    }
    return assemble(spec, std::move(regular), 0.0);
}

SimGrid SimGrid::assemble(const ProcessSpec& spec, std::vector<double> regular, double snap) {
    std::sort(regular.begin(), regular.end());
    const double horizon = regular.back();

    std::vector<double> events;
    for (double e : spec.event_times()) {
        if (e <= horizon) events.push_back(e);
    }
    std::vector<double> inserted = events;
    for (double m : spec.mean_breakpoints()) {
        if (m <= horizon) inserted.push_back(m);
    }
    std::sort(inserted.begin(), inserted.end());
    inserted.erase(std::unique(inserted.begin(), inserted.end()), inserted.end());

    if (snap > 0.0) {
        for (double& r : regular) {
            auto it = std::lower_bound(inserted.begin(), inserted.end(), r - snap);
            if (it != inserted.end() && std::abs(*it - r) <= snap && r != spec.lower() &&
                r != horizon) {
                r = *it;
            }
        }
    }
    regular.insert(regular.end(), inserted.begin(), inserted.end());
    std::sort(regular.begin(), regular.end());
    regular.erase(std::unique(regular.begin(), regular.end()), regular.end());

    SimGrid grid;
    for (double r : regular) {
        if (std::binary_search(events.begin(), events.end(), r)) grid.entries_.push_back(left_of(r));
        grid.entries_.push_back(at(r));
    }
    return grid;
}

std::optional<std::size_t> SimGrid::find(double t) const {
    const SidedTime key = at(t);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key, sided_less);
    if (it == entries_.end() || !(*it == key)) return std::nullopt;
    return static_cast<std::size_t>(std::distance(entries_.begin(), it));
}

std::vector<double> SimGrid::regular_times() const {
    std::vector<double> out;
    for (const SidedTime& e : entries_) {
        if (e.side == Side::value) out.push_back(e.t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transitions

TransitionParams transition_params(const ProcessSpec& spec, SidedTime s, SidedTime t, double eps) {
    if (!sided_less(s, t)) throw std::invalid_argument("transition_params: s must precede t");
    const Resolved rs = spec.resolve(s);
    const Resolved rt = spec.resolve(t);
    if (rs.block != rt.block) {
        throw std::domain_error("transition_params: " + num(s.t) + " and " + num(t.t) +
                                " lie in different blocks; use a restart");
    }
    const double var_s = rs.f * rs.g;
    if (var_s <= eps) {
        throw std::domain_error("transition_params: variance " + num(var_s) + " at " + num(s.t) +
                                " is degenerate; use a restart");
    }
    TransitionParams p;
    p.slope = rt.g / rs.g;
    // g(t)^2 [(f/g)(t) - (f/g)(s)] written without dividing by g(t)
    p.raw_noise_var = p.slope * (rt.f * rs.g - rs.f * rt.g);
    p.noise_var = std::max(0.0, p.raw_noise_var);
    return p;
}

// ---------------------------------------------------------------------------
// Sampling

PathSampler::PathSampler(const ProcessSpec& spec, SimGrid grid, double eps)
    : grid_(std::make_shared<const SimGrid>(std::move(grid))) {
    const auto& entries = grid_->entries();
    steps_.resize(entries.size());
    mean_.resize(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const SidedTime cur = entries[i];
        mean_[i] = spec.mean(cur);
        Step& step = steps_[i];
        const double var_cur = variance(spec, cur);
        step.restart = true;
        step.sd = std::sqrt(std::max(0.0, var_cur));
        if (i == 0) continue;
        const SidedTime prev = entries[i - 1];
        if (spec.block_index(prev) != spec.block_index(cur)) continue;
        const double var_prev = variance(spec, prev);
        if (var_prev <= eps) {
            const double k = eval_kernel(spec, prev, cur);
            if (std::abs(k) > eps) {
                throw std::domain_error("inconsistent spec: variance vanishes at " + num(prev.t) +
                                        " but K(" + num(prev.t) + "," + num(cur.t) + ")=" + num(k));
            }
            continue;
        }
        const TransitionParams p = transition_params(spec, prev, cur, eps);
        if (p.raw_noise_var < -1e-12 * (1.0 + std::abs(var_cur))) {
            throw std::domain_error("negative conditional variance " + num(p.raw_noise_var) +
                                    " on (" + num(prev.t) + "," + num(cur.t) +
                                    "]; f/g is not nondecreasing");
        }
        step.restart = false;
        step.slope = p.slope;
        step.sd = std::sqrt(p.noise_var);
    }
}

void PathSampler::sample_centred(NormalStream& rng, std::span<double> out) const {
    if (out.size() != steps_.size()) throw std::invalid_argument("sample_centred: size mismatch");
    double x = 0.0;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        const Step& s = steps_[i];
        const double z = rng.normal();
        x = s.restart ? s.sd * z : s.slope * x + s.sd * z;
        out[i] = x;
    }
}

PathSample PathSampler::sample(std::uint64_t seed, std::uint64_t stream) const {
    PathSample p;
    p.grid = grid_;
    p.centred_values.resize(steps_.size());
    NormalStream rng(seed, stream);
    sample_centred(rng, p.centred_values);
    p.values.resize(steps_.size());
    for (std::size_t i = 0; i < steps_.size(); ++i) p.values[i] = p.centred_values[i] + mean_[i];
    return p;
}

PathSample sample_path(const ProcessSpec& spec, const SimGrid& grid, std::uint64_t seed,
                       std::uint64_t stream) {
    return PathSampler(spec, grid).sample(seed, stream);
}

std::vector<PathSample> sample_paths(const ProcessSpec& spec, const SimGrid& grid,
                                     std::uint64_t seed, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample_paths: n must be >= 1");
    const PathSampler sampler(spec, grid);
    std::vector<PathSample> out(n);
    parallel_for(n, [&](std::size_t k) { out[k] = sampler.sample(seed, k); });
    return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace gmqv
