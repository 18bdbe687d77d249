#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gmqv/process.hpp"

namespace gmqv {

/// Syntax error in a process-spec file; `line` is 1-based.
class SpecSyntaxError : public std::runtime_error {
public:
    SpecSyntaxError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A well-formed file describing an invalid process: a coverage gap or a
/// failed validation check (named by `check`).
class SpecValidationError : public std::runtime_error {
public:
    SpecValidationError(std::string check, const std::string& msg)
        : std::runtime_error(check + ": " + msg), check_(std::move(check)) {}
    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

/// Parses the line-oriented format:
///
///   interval <lo> <hi|inf>
///   block <lo> <hi|inf>
///     f [<lo>,<hi>) "<expr>"
///     g [<lo>,<hi>) "<expr>"
///   mean [<lo>,<hi>) "<expr>"
///
/// `#` starts a comment. f/g lines belong to the most recent block; mean lines
/// are top-level and default to "0" when absent. Structure is checked, the
/// sampled validation is not.
ProcessSpec parse_spec(std::string_view text);
ProcessSpec parse_spec_file(const std::filesystem::path& path);

/// parse_spec_file followed by validate(); any failed check throws
/// SpecValidationError naming it.
ProcessSpec load_spec(const std::filesystem::path& path, const ValidateOptions& options = {});

}  // namespace gmqv
