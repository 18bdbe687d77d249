#pragma once

#include <ostream>
#include <span>
#include <string>

#include "gmqv/process.hpp"
#include "gmqv/quadvar.hpp"
#include "gmqv/realized.hpp"
#include "gmqv/simulate.hpp"

namespace gmqv {

/// 12 significant digits, the precision of every report and CSV.
std::string format_number(double v);

void write_validation_report(std::ostream& os, const ValidationReport& report);

/// Deterministic part, jump table, covariance matrix, mean and variance.
void write_law_report(std::ostream& os, const QuadVarLaw& law);

inline constexpr const char* kPathsHeader = "path,time,side,centred_value,value";
inline constexpr const char* kConvergenceHeader =
    "level,mesh,mc_mean,mc_var,mc_se,expected_realized,law_mean,law_var,n_paths";

/// One row per grid entry per path; side is L for ghost left-limit entries, V
/// otherwise.
void write_paths_csv(std::ostream& os, std::span<const PathSample> paths);
void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows);

}  // namespace gmqv
