#include "gmqv/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <regex>

#include "gmqv/quadvar.hpp"
#include "gmqv/report.hpp"
#include "gmqv/simulate.hpp"
#include "gmqv/specfile.hpp"

namespace gmqv {

VerifyOutcome verify_law(const ProcessSpec& spec, double t, int level, std::size_t n_paths,
                         std::uint64_t seed, bool with_mean) {
    StudyOptions options;
    options.with_mean = with_mean;
    const auto rows = convergence_study(spec, t, level, level, n_paths, seed, options);
    VerifyOutcome v;
    v.row = rows.front();
    v.mean_ok = std::abs(v.row.mc_mean - v.row.law_mean) <= 4.0 * v.row.mc_se;
    LawOptions law_options;
    law_options.include_mean = with_mean;
    v.variance_checked = !build_law(spec, t, law_options).jumps.empty();
    if (v.variance_checked) {
        v.variance_ok = std::abs(v.row.mc_var - v.row.law_var) <= 4.0 * v.row.mc_var_se;
    }
    return v;
}

namespace {

// "1024" or "2^10"
std::size_t parse_cells(const std::string& text) {
    static const std::regex power_re(R"(^\s*2\s*\^\s*(\d+)\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, power_re)) {
        const int k = std::stoi(m[1].str());
        if (k > 30) throw CLI::ValidationError("--cells", "2^k with k <= 30 expected");
        return std::size_t{1} << k;
    }
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size() || v == 0) {
        throw CLI::ValidationError("--cells", "expected a positive count or 2^k, got '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

std::pair<int, int> parse_levels(const std::string& text) {
    static const std::regex range_re(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, range_re)) {
        throw CLI::ValidationError("--levels", "expected K0..K1, got '" + text + "'");
    }
    const int lo = std::stoi(m[1].str());
    const int hi = m[2].matched ? std::stoi(m[2].str()) : lo;
    if (lo > hi || hi > 30) throw CLI::ValidationError("--levels", "need K0 <= K1 <= 30");
    return {lo, hi};
}

class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open output file " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& stream() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quadratic variation of Gauss-Markov semimartingales", "gmqv"};
    app.require_subcommand(1);

    std::string spec_path;
    double t = 0.0;
    double s = 0.0;
    bool left_s = false;
    bool left_t = false;
    bool with_mean = false;
    double tol = 1e-8;
    std::string cells_text = "2^10";
    std::string levels_text = "6..10";
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    std::string out_path;
    int level = 10;

    auto* validate_cmd = app.add_subcommand("validate", "Check the structure of a process spec");
    validate_cmd->add_option("spec", spec_path, "Process spec file")->required()->check(CLI::ExistingFile);

    auto* kernel_cmd = app.add_subcommand("kernel", "Evaluate the covariance kernel K(s, t)");
    kernel_cmd->add_option("spec", spec_path, "Process spec file")->required()->check(CLI::ExistingFile);
    kernel_cmd->add_option("--s", s, "First time")->required();
    kernel_cmd->add_option("--t", t, "Second time")->required();
    kernel_cmd->add_flag("--left-s", left_s, "Use the left limit at s");
    kernel_cmd->add_flag("--left-t", left_t, "Use the left limit at t");

    auto* quadvar_cmd = app.add_subcommand("quadvar", "Print the law of [X]_t");
    quadvar_cmd->add_option("spec", spec_path, "Process spec file")->required()->check(CLI::ExistingFile);
    quadvar_cmd->add_option("--t", t, "Evaluation time")->required();
    quadvar_cmd->add_flag("--with-mean", with_mean, "Include the jumps of the mean");
    quadvar_cmd->add_option("--tol", tol, "Stieltjes refinement tolerance")->check(CLI::PositiveNumber);

    auto* simulate_cmd = app.add_subcommand("simulate", "Write simulated paths as CSV");
    simulate_cmd->add_option("spec", spec_path, "Process spec file")->required()->check(CLI::ExistingFile);
    simulate_cmd->add_option("--t", t, "Horizon")->required();
    simulate_cmd->add_option("--cells", cells_text, "Uniform cells, as a count or 2^k");
    simulate_cmd->add_option("--paths", paths, "Number of paths")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", seed, "Random seed");
    simulate_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

    auto* realized_cmd = app.add_subcommand("realized", "Write a realized-QV convergence study as CSV");
    realized_cmd->add_option("spec", spec_path, "Process spec file")->required()->check(CLI::ExistingFile);
    realized_cmd->add_option("--t", t, "Evaluation time")->required();
    realized_cmd->add_option("--levels", levels_text, "Dyadic levels K0..K1");
    realized_cmd->add_option("--paths", paths, "Paths per level")->check(CLI::Range(100ULL, 100000000ULL));
    realized_cmd->add_option("--seed", seed, "Random seed");
    realized_cmd->add_flag("--with-mean", with_mean, "Use X + mean instead of the centred process");
    realized_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

    auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo check of the law of [X]_t");
    verify_cmd->add_option("spec", spec_path, "Process spec file")->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--t", t, "Evaluation time")->required();
    verify_cmd->add_option("--paths", paths, "Number of paths")->check(CLI::Range(100ULL, 100000000ULL));
    verify_cmd->add_option("--seed", seed, "Random seed");
    verify_cmd->add_option("--level", level, "Dyadic level of the partition")->check(CLI::Range(0, 30));
    verify_cmd->add_flag("--with-mean", with_mean, "Use X + mean instead of the centred process");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (!std::isfinite(t) || !std::isfinite(s)) {
        err << "error: times must be finite\n";
        return kExitUsage;
    }

    try {
        if (validate_cmd->parsed()) {
            const ProcessSpec spec = parse_spec_file(spec_path);
            const ValidationReport report = validate(spec);
            write_validation_report(out, report);
            return report.ok() ? kExitOk : kExitFailure;
        }

        const ProcessSpec spec = load_spec(spec_path);

        if (kernel_cmd->parsed()) {
            const SidedTime a{s, left_s ? Side::left_limit : Side::value};
            const SidedTime b{t, left_t ? Side::left_limit : Side::value};
            out << format_number(eval_kernel(spec, a, b)) << '\n';
            return kExitOk;
        }
        if (quadvar_cmd->parsed()) {
            LawOptions options;
            options.include_mean = with_mean;
            options.tol = tol;
            write_law_report(out, build_law(spec, t, options));
            return kExitOk;
        }
        if (simulate_cmd->parsed()) {
            const std::size_t cells = parse_cells(cells_text);
            const auto samples = sample_paths(spec, SimGrid::uniform(spec, t, cells), seed, paths);
            OutputTarget target(out_path, out);
            write_paths_csv(target.stream(), samples);
            return kExitOk;
        }
        if (realized_cmd->parsed()) {
            const auto [k0, k1] = parse_levels(levels_text);
            StudyOptions options;
            options.with_mean = with_mean;
            const auto rows = convergence_study(spec, t, k0, k1, paths, seed, options);
            OutputTarget target(out_path, out);
            write_convergence_csv(target.stream(), rows);
            return kExitOk;
        }
        if (verify_cmd->parsed()) {
            const VerifyOutcome v = verify_law(spec, t, level, paths, seed, with_mean);
            const ConvergenceRow& r = v.row;
            write_convergence_csv(out, std::span<const ConvergenceRow>(&r, 1));
            out << (v.mean_ok ? "PASS" : "FAIL") << " mean: |" << format_number(r.mc_mean) << " - "
                << format_number(r.law_mean) << "| <= 4*" << format_number(r.mc_se) << '\n';
            if (v.variance_checked) {
                out << (v.variance_ok ? "PASS" : "FAIL") << " variance: |" << format_number(r.mc_var)
                    << " - " << format_number(r.law_var) << "| <= 4*" << format_number(r.mc_var_se)
                    << '\n';
            } else {
                out << "SKIP variance: law has no jumps\n";
            }
            return v.ok() ? kExitOk : kExitFailure;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SpecSyntaxError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SpecValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const SpecError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace gmqv
