#include "gmqv/specfile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <vector>

namespace gmqv {

namespace {

struct RawSegment {
    double lower;
    double upper;
    Expr expr;
    int line;
};

struct RawBlock {
    double lower;
    double upper;
    int line;
    std::vector<RawSegment> f;
    std::vector<RawSegment> g;
};

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

double parse_bound(const std::string& token, bool allow_inf, int line) {
    if (token == "inf" || token == "+inf") {
        if (!allow_inf) throw SpecSyntaxError(line, "'inf' is only allowed as an upper bound");
        return kInfinity;
    }
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw SpecSyntaxError(line, "expected a decimal number, got '" + token + "'");
    }
    return v;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

PiecewiseFn assemble(std::vector<RawSegment> raw, const std::string& owner) {
    std::sort(raw.begin(), raw.end(),
              [](const RawSegment& a, const RawSegment& b) { return a.lower < b.lower; });
    std::vector<Segment> segs;
    for (auto& r : raw) segs.push_back(Segment{r.lower, r.upper, r.expr});
    try {
        return PiecewiseFn(std::move(segs));
    } catch (const SpecError& e) {
        throw SpecValidationError("coverage", owner + ": " + e.what());
    }
}

}  // namespace

ProcessSpec parse_spec(std::string_view text) {
    static const std::regex segment_re(
        R"re(^\s*(f|g|mean)\s*\[\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*"([^"]*)"\s*$)re");

    std::optional<std::pair<double, double>> interval;
    std::vector<RawBlock> blocks;
    std::vector<RawSegment> mean;

    std::istringstream in{std::string(text)};
    std::string raw_line;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const std::string line = strip_comment(raw_line);
        std::istringstream words(line);
        std::string keyword;
        if (!(words >> keyword)) continue;

        if (keyword == "interval" || keyword == "block") {
            std::string lo, hi, extra;
            if (!(words >> lo >> hi) || (words >> extra)) {
                throw SpecSyntaxError(line_no, "expected '" + keyword + " <lo> <hi|inf>'");
            }
            const double a = parse_bound(lo, false, line_no);
            const double b = parse_bound(hi, true, line_no);
            if (!(a < b)) throw SpecSyntaxError(line_no, keyword + " bounds must satisfy lo < hi");
            if (keyword == "interval") {
                if (interval) throw SpecSyntaxError(line_no, "duplicate 'interval' line");
                interval = {a, b};
            } else {
                blocks.push_back(RawBlock{a, b, line_no, {}, {}});
            }
            continue;
        }

        if (keyword == "f" || keyword == "g" || keyword == "mean") {
            std::smatch m;
            if (!std::regex_match(line, m, segment_re)) {
                throw SpecSyntaxError(line_no, "expected '" + keyword + " [<lo>,<hi>) \"<expr>\"'");
            }
            const double a = parse_bound(m[2].str(), false, line_no);
            const double b = parse_bound(m[3].str(), true, line_no);
            if (!(a < b)) throw SpecSyntaxError(line_no, "segment bounds must satisfy lo < hi");
            Expr expr = Expr::number(0.0);
            try {
                expr = parse_expr(m[4].str());
            } catch (const ParseError& e) {
                throw SpecSyntaxError(line_no, std::string("bad expression: ") + e.what());
            }
            RawSegment seg{a, b, expr, line_no};
            if (keyword == "mean") {
                mean.push_back(std::move(seg));
            } else {
                if (blocks.empty()) {
                    throw SpecSyntaxError(line_no, "'" + keyword + "' line outside any block");
                }
                auto& target = keyword == "f" ? blocks.back().f : blocks.back().g;
                target.push_back(std::move(seg));
            }
            continue;
        }
        throw SpecSyntaxError(line_no, "unknown keyword '" + keyword + "'");
    }

    if (!interval) throw SpecSyntaxError(line_no, "missing 'interval' line");
    if (blocks.empty()) throw SpecSyntaxError(line_no, "no 'block' sections");

    std::sort(blocks.begin(), blocks.end(),
              [](const RawBlock& a, const RawBlock& b) { return a.lower < b.lower; });
    std::vector<Block> built;
    for (RawBlock& rb : blocks) {
        const std::string owner = "block [" + num(rb.lower) + "," + num(rb.upper) + ")";
        for (auto* raw : {&rb.f, &rb.g}) {
            const char* which = raw == &rb.f ? "f" : "g";
            if (raw->empty()) {
                throw SpecValidationError("coverage", owner + ": " + which + " leaves [" +
                                                          num(rb.lower) + "," + num(rb.upper) +
                                                          ") uncovered");
            }
        }
        Block b;
        b.lower = rb.lower;
        b.upper = rb.upper;
        b.f = assemble(std::move(rb.f), owner + ": f");
        b.g = assemble(std::move(rb.g), owner + ": g");
        built.push_back(std::move(b));
    }
    PiecewiseFn mean_fn;
    if (!mean.empty()) mean_fn = assemble(std::move(mean), "mean");
    try {
        return ProcessSpec(interval->first, interval->second, std::move(built), std::move(mean_fn));
    } catch (const SpecError& e) {
        throw SpecValidationError("coverage", e.what());
    }
}

ProcessSpec parse_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read spec file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

ProcessSpec load_spec(const std::filesystem::path& path, const ValidateOptions& options) {
    ProcessSpec spec = parse_spec_file(path);
    const ValidationReport report = validate(spec, options);
    for (const ValidationCheck& c : report.checks) {
        if (!c.passed) throw SpecValidationError(c.name, c.detail);
    }
    return spec;
}

}  // namespace gmqv
