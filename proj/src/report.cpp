#include "gmqv/report.hpp"

#include <cstdio>

namespace gmqv {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

void write_validation_report(std::ostream& os, const ValidationReport& report) {
    for (const ValidationCheck& c : report.checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed) os << ": " << c.detail;
        os << '\n';
    }
    os << "block_boundaries:";
    for (double b : report.block_boundaries) os << ' ' << format_number(b);
    os << "\nfactor_discontinuities:";
    for (double d : report.factor_discontinuities) os << ' ' << format_number(d);
    os << '\n' << (report.ok() ? "valid" : "invalid") << '\n';
}

void write_law_report(std::ostream& os, const QuadVarLaw& law) {
    os << "t," << format_number(law.t) << '\n';
    os << "deterministic_part," << format_number(law.deterministic_part) << '\n';
    os << "jumps," << law.jumps.size() << '\n';
    os << "time,gauss_var,mean_jump\n";
    for (const JumpSpec& j : law.jumps) {
        os << format_number(j.time) << ',' << format_number(j.gauss_var) << ','
           << format_number(j.mean_jump) << '\n';
    }
    os << "jump_cov\n";
    for (Eigen::Index i = 0; i < law.jump_cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < law.jump_cov.cols(); ++j) {
            if (j > 0) os << ',';
            os << format_number(law.jump_cov(i, j));
        }
        os << '\n';
    }
    os << "law_mean," << format_number(law_mean(law)) << '\n';
    os << "law_variance," << format_number(law_variance(law)) << '\n';
}

void write_paths_csv(std::ostream& os, std::span<const PathSample> paths) {
    os << kPathsHeader << '\n';
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const PathSample& p = paths[k];
        const auto& entries = p.grid->entries();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            os << k << ',' << format_number(entries[i].t) << ','
               << (entries[i].side == Side::left_limit ? 'L' : 'V') << ','
               << format_number(p.centred_values[i]) << ',' << format_number(p.values[i]) << '\n';
        }
    }
}

void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows) {
    os << kConvergenceHeader << '\n';
    for (const ConvergenceRow& r : rows) {
        os << r.level << ',' << format_number(r.mesh) << ',' << format_number(r.mc_mean) << ','
           << format_number(r.mc_var) << ',' << format_number(r.mc_se) << ','
           << format_number(r.expected_realized) << ',' << format_number(r.law_mean) << ','
           << format_number(r.law_var) << ',' << r.n_paths << '\n';
    }
}

}  // namespace gmqv
