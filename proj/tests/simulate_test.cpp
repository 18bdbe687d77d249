#include "gmqv/simulate.hpp"
#include "gmqv/specfile.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

namespace gmqv {
namespace {

const char* kBridge = R"gm(
interval 0 1
block 0 1
  f [0,1) "x"
  g [0,1) "1-x"
)gm";

ProcessSpec bundled(const char* name) {
    return load_spec(std::filesystem::path(GMQV_SPEC_DIR) / name);
}

TEST(Transition, Brownian) {
    const TransitionParams p = transition_params(bundled("brownian.gmspec"), at(0.5), at(0.7));
    EXPECT_EQ(p.slope, 1.0);
    EXPECT_NEAR(p.noise_var, 0.2, 1e-15);
}

TEST(Transition, OrnsteinUhlenbeck) {
    const ProcessSpec ou = parse_spec(R"gm(
interval 0 inf
block 0 inf
  f [0,inf) "exp(x)"
  g [0,inf) "exp(-x)"
)gm");
    for (const auto& [s, t] : {std::pair{0.0, 0.3}, std::pair{1.2, 1.25}, std::pair{2.0, 5.0}}) {
        const TransitionParams p = transition_params(ou, at(s), at(t));
        EXPECT_NEAR(p.slope, std::exp(-(t - s)), 1e-14);
        EXPECT_NEAR(p.noise_var, 1.0 - std::exp(-2 * (t - s)), 1e-14);
        // conditional variance from the stationary kernel e^{-|t-s|}
        const double k = std::exp(-(t - s));
        EXPECT_NEAR(p.noise_var, 1.0 - k * k, 1e-14);
    }
}

TEST(Transition, Bridge) {
    const ProcessSpec bridge = parse_spec(kBridge);
    const TransitionParams p = transition_params(bridge, at(0.25), at(0.75));
    EXPECT_NEAR(p.slope, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(p.noise_var, 1.0 / 6.0, 1e-15);
    const double kst = eval_kernel(bridge, at(0.25), at(0.75));
    EXPECT_NEAR(p.noise_var, variance(bridge, at(0.75)) - kst * kst / variance(bridge, at(0.25)),
                1e-15);
    const TransitionParams end = transition_params(bridge, at(0.5), left_of(1.0));
    EXPECT_EQ(end.slope, 0.0);
    EXPECT_EQ(end.noise_var, 0.0);
}

TEST(Transition, Errors) {
    const ProcessSpec stitched = bundled("stitched.gmspec");
    EXPECT_THROW(transition_params(stitched, at(0.5), at(1.5)), std::domain_error);
    EXPECT_THROW(transition_params(stitched, at(1.0), at(1.5)), std::domain_error);
    EXPECT_THROW(transition_params(stitched, at(1.5), at(1.2)), std::invalid_argument);
}

TEST(Grid, GhostEntriesPrecedeEvents) {
    const ProcessSpec stitched = bundled("stitched.gmspec");
    const SimGrid grid = SimGrid::uniform(stitched, 3.0, 6);
    const auto& e = grid.entries();
    EXPECT_EQ(e.front(), at(0.0));
    EXPECT_EQ(grid.horizon(), 3.0);
    std::size_t ghosts = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i > 0) {
            EXPECT_TRUE(sided_less(e[i - 1], e[i]));
        }
        if (e[i].side == Side::left_limit) {
            ++ghosts;
            ASSERT_LT(i + 1, e.size());
            EXPECT_EQ(e[i + 1], at(e[i].t));
        }
    }
    EXPECT_EQ(ghosts, 2u);
    ASSERT_TRUE(grid.find(1.0).has_value());
    EXPECT_EQ(e[*grid.find(1.0)], at(1.0));
    EXPECT_FALSE(grid.find(0.7).has_value());
    EXPECT_EQ(grid.regular_times().size(), 7u);

    const std::vector<double> times{0.3, 0.6, 1.5, 2.5};
    const SimGrid through = SimGrid::through(stitched, times);
    for (double t : times) EXPECT_TRUE(through.find(t).has_value()) << t;
    EXPECT_TRUE(through.find(2.0).has_value());
    EXPECT_EQ(through.horizon(), 2.5);
}

TEST(Grid, MeanBreakpointsAreRegular) {
    const SimGrid grid = SimGrid::uniform(bundled("discmean.gmspec"), 0.6, 5);
    EXPECT_TRUE(grid.find(0.25).has_value());
    std::size_t ghosts = 0;
    for (const SidedTime& s : grid.entries()) ghosts += s.side == Side::left_limit;
    EXPECT_EQ(ghosts, 1u);
}

TEST(Sampling, Deterministic) {
    const ProcessSpec spec = bundled("discmean.gmspec");
    const SimGrid grid = SimGrid::uniform(spec, 0.9, 64);
    const std::vector<PathSample> many = sample_paths(spec, grid, 42, 2);
    ASSERT_EQ(many.size(), 2u);
    for (std::uint64_t k = 0; k < 2; ++k) {
        const PathSample one = sample_path(spec, grid, 42, k);
        EXPECT_EQ(many[k].centred_values, one.centred_values);
        EXPECT_EQ(many[k].values, one.values);
    }
    EXPECT_NE(many[0].centred_values, many[1].centred_values);
    EXPECT_EQ(sample_path(spec, grid, 42, 0).values, sample_path(spec, grid, 42, 0).values);
    EXPECT_NE(sample_path(spec, grid, 43, 0).values, many[0].values);
}

TEST(Sampling, ValuesAddMean) {
    const ProcessSpec spec = bundled("discmean.gmspec");
    const PathSample p = sample_path(spec, SimGrid::uniform(spec, 0.9, 16), 5);
    const auto& e = p.grid->entries();
    ASSERT_EQ(p.values.size(), e.size());
    ASSERT_EQ(p.centred_values.size(), e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_EQ(p.values[i], p.centred_values[i] + spec.mean(e[i]));
    }
}

TEST(Sampling, StreamConsumption) {
    const ProcessSpec spec = bundled("stitched.gmspec");
    const PathSampler sampler(spec, SimGrid::uniform(spec, 3.0, 32));
    NormalStream rng(1, 0);
    std::vector<double> x(sampler.grid().size());
    sampler.sample_centred(rng, x);
    NormalStream reference(1, 0);
    for (std::size_t i = 0; i < x.size(); ++i) reference.normal();
    EXPECT_EQ(rng.uniforms_consumed(), reference.uniforms_consumed());
}

TEST(Sampling, BridgePinnedAtStitch) {
    const ProcessSpec spec = bundled("stitched.gmspec");
    const SimGrid grid = SimGrid::uniform(spec, 1.5, 64);
    const std::vector<PathSample> paths = sample_paths(spec, grid, 8, 200);
    const auto& e = grid.entries();
    std::size_t ghost = 0;
    while (e[ghost] != left_of(1.0)) ++ghost;
    for (const PathSample& p : paths) {
        EXPECT_EQ(p.centred_values[ghost], 0.0);
        EXPECT_EQ(p.centred_values[ghost + 1], 0.0);
    }
}

struct Stat {
    double mean, se;
};

// Sample mean of products and its standard error.
Stat product_moment(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m += a[i] * b[i];
    m /= n;
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) v += (a[i] * b[i] - m) * (a[i] * b[i] - m);
    v /= n - 1.0;
    return {m, std::sqrt(v / n)};
}

TEST(Sampling, JumpVarianceAtTwo) {
    const ProcessSpec spec = bundled("stitched.gmspec");
    const SimGrid grid = SimGrid::uniform(spec, 2.5, 10);
    const auto& e = grid.entries();
    std::size_t ghost = 0;
    while (e[ghost] != left_of(2.0)) ++ghost;
    const std::vector<PathSample> paths = sample_paths(spec, grid, 3, 10000);
    std::vector<double> jump;
    for (const PathSample& p : paths) jump.push_back(p.centred_values[ghost + 1] - p.centred_values[ghost]);
    const Stat s = product_moment(jump, jump);
    EXPECT_NEAR(s.mean, 2.0, 4 * s.se);
}

TEST(Sampling, EmpiricalCovariance) {
    const ProcessSpec spec = bundled("stitched.gmspec");
    const std::vector<double> times{0.3, 0.6, 1.5, 2.5};
    const SimGrid grid = SimGrid::through(spec, times);
    const std::vector<PathSample> paths = sample_paths(spec, grid, 11, 20000);
    std::vector<std::vector<double>> cols(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const std::size_t idx = *grid.find(times[j]);
        for (const PathSample& p : paths) cols[j].push_back(p.centred_values[idx]);
        double m = 0.0;
        for (double v : cols[j]) m += v;
        m /= static_cast<double>(cols[j].size());
        const Stat sq = product_moment(cols[j], cols[j]);
        EXPECT_NEAR(m, 0.0, 4 * std::sqrt(sq.mean / static_cast<double>(cols[j].size())));
    }
    const Stat c03_06 = product_moment(cols[0], cols[1]);
    EXPECT_NEAR(c03_06.mean, 0.12, 4 * c03_06.se);
    const Stat v15 = product_moment(cols[2], cols[2]);
    EXPECT_NEAR(v15.mean, 0.5, 4 * v15.se);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t j = i; j < times.size(); ++j) {
            const Stat c = product_moment(cols[i], cols[j]);
            EXPECT_NEAR(c.mean, eval_kernel(spec, at(times[i]), at(times[j])), 4 * c.se)
                << times[i] << "," << times[j];
        }
    }
}

TEST(Sampling, NoiseVarianceNonnegative) {
    for (const char* name : {"brownian.gmspec", "ou.gmspec", "stitched.gmspec", "discmean.gmspec"}) {
        const ProcessSpec spec = bundled(name);
        const double horizon = std::isfinite(spec.upper()) ? 0.999 * spec.upper() : 3.5;
        const SimGrid grid = SimGrid::uniform(spec, horizon, 1024);
        const auto& e = grid.entries();
        std::size_t checked = 0;
        for (std::size_t i = 1; i < e.size(); ++i) {
            if (spec.block_index(e[i - 1]) != spec.block_index(e[i])) continue;
            if (variance(spec, e[i - 1]) <= kDegenerateVariance) continue;
            const TransitionParams p = transition_params(spec, e[i - 1], e[i]);
            EXPECT_GE(p.raw_noise_var, -1e-12) << name << " at " << e[i].t;
            ++checked;
        }
        EXPECT_GT(checked, 1000u) << name;
    }
}

TEST(Sampling, InconsistentDegenerateStart) {
    const ProcessSpec spec = parse_spec(R"gm(
interval 0 1
block 0 1
  f [0,1) "1e-7+x"
  g [0,1) "1e-6+x"
)gm");
    EXPECT_THROW(PathSampler(spec, SimGrid::uniform(spec, 0.5, 4)), std::domain_error);
}

}  // namespace
}  // namespace gmqv
