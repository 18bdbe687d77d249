#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "gmqv/process.hpp"
#include "gmqv/realized.hpp"

namespace gmqv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct VerifyOutcome {
    ConvergenceRow row;
    bool mean_ok = false;
    /// The variance comparison only runs when the law has jumps.
    bool variance_checked = false;
    bool variance_ok = true;

    bool ok() const { return mean_ok && variance_ok; }
};

/// One-level convergence study: |mc_mean - law_mean| <= 4 mc_se and, when the
/// law has jumps, |mc_var - law_var| <= 4 se(mc_var).
VerifyOutcome verify_law(const ProcessSpec& spec, double t, int level, std::size_t n_paths,
                         std::uint64_t seed, bool with_mean);

/// Entry point of the gmqv tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmqv
