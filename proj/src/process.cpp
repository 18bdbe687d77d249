#include "gmqv/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gmqv {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string describe(SidedTime t) {
    return t.side == Side::left_limit ? num(t.t) + "-" : num(t.t);
}

// Index of the interval [lowers[i], uppers[i]) owning a sided time, or npos.
template <typename Range, typename Lower, typename Upper>
std::size_t owner_index(const Range& items, SidedTime t, Lower lower_of, Upper upper_of) {
    constexpr auto npos = static_cast<std::size_t>(-1);
    if (items.empty()) return npos;
    if (t.side == Side::value) {
        auto it = std::upper_bound(items.begin(), items.end(), t.t,
                                   [&](double v, const auto& item) { return v < lower_of(item); });
        if (it == items.begin()) return npos;
        const std::size_t i = static_cast<std::size_t>(std::distance(items.begin(), it)) - 1;
        return t.t < upper_of(items[i]) ? i : npos;
    }
    auto it = std::lower_bound(items.begin(), items.end(), t.t,
                               [&](const auto& item, double v) { return lower_of(item) < v; });
    if (it == items.begin()) return npos;
    const std::size_t i = static_cast<std::size_t>(std::distance(items.begin(), it)) - 1;
    return t.t <= upper_of(items[i]) ? i : npos;
}

}  // namespace

bool sided_less(const SidedTime& a, const SidedTime& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.side == Side::left_limit && b.side == Side::value;
}

// ---------------------------------------------------------------------------
// PiecewiseFn

PiecewiseFn::PiecewiseFn(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw SpecError("piecewise function needs at least one segment");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const Segment& s = segments_[i];
        if (!std::isfinite(s.lower)) throw SpecError("segment lower bound must be finite");
        if (!(s.lower < s.upper)) {
            throw SpecError("empty segment [" + num(s.lower) + "," + num(s.upper) + ")");
        }
        if (std::isinf(s.upper) && i + 1 != segments_.size()) {
            throw SpecError("only the final segment may extend to inf");
        }
        if (i > 0 && segments_[i - 1].upper != s.lower) {
            const double a = segments_[i - 1].upper;
            const double b = s.lower;
            if (a < b) {
                throw SpecError("segments leave [" + num(a) + "," + num(b) + ") uncovered");
            }
            throw SpecError("segments overlap on [" + num(b) + "," + num(a) + ")");
        }
    }
}

PiecewiseFn PiecewiseFn::constant_expr(double lower, double upper, Expr expr) {
    return PiecewiseFn({Segment{lower, upper, std::move(expr)}});
}

std::size_t PiecewiseFn::segment_index(SidedTime t) const {
    const std::size_t i = owner_index(
        segments_, t, [](const Segment& s) { return s.lower; },
        [](const Segment& s) { return s.upper; });
    if (i == static_cast<std::size_t>(-1)) {
        throw SpecError("time " + describe(t) + " outside piecewise domain [" + num(lower()) + "," +
                        num(upper()) + ")");
    }
    return i;
}

double PiecewiseFn::eval(SidedTime t) const { return gmqv::eval(segments_[segment_index(t)].expr, t.t); }

std::vector<double> PiecewiseFn::breakpoints() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < segments_.size(); ++i) out.push_back(segments_[i].lower);
    return out;
}

std::vector<double> Block::factor_breakpoints() const {
    std::vector<double> out = f.breakpoints();
    const std::vector<double> gb = g.breakpoints();
    out.insert(out.end(), gb.begin(), gb.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// ProcessSpec

ProcessSpec::ProcessSpec(double lower, double upper, std::vector<Block> blocks, PiecewiseFn mean)
    : lower_(lower), upper_(upper), blocks_(std::move(blocks)), mean_(std::move(mean)) {
    if (!std::isfinite(lower_)) throw SpecError("interval lower bound must be finite");
    if (!(lower_ < upper_)) throw SpecError("interval must be non-empty");
    if (blocks_.empty()) throw SpecError("at least one block is required");
    if (blocks_.front().lower != lower_) {
        throw SpecError("blocks leave [" + num(lower_) + "," + num(blocks_.front().lower) +
                        ") uncovered");
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const Block& b = blocks_[i];
        const std::string name = "block [" + num(b.lower) + "," + num(b.upper) + ")";
        if (!(b.lower < b.upper)) throw SpecError(name + " is empty");
        if (i > 0 && blocks_[i - 1].upper != b.lower) {
            throw SpecError("blocks do not abut at " + num(b.lower));
        }
        for (const auto* fn : {&b.f, &b.g}) {
            const char* which = fn == &b.f ? "f" : "g";
            if (fn->empty()) throw SpecError(name + ": no " + std::string(which) + " segments");
            if (fn->lower() > b.lower) {
                throw SpecError(name + ": " + which + " leaves [" + num(b.lower) + "," +
                                num(fn->lower()) + ") uncovered");
            }
            if (fn->upper() < b.upper) {
                throw SpecError(name + ": " + which + " leaves [" + num(fn->upper()) + "," +
                                num(b.upper) + ") uncovered");
            }
            if (fn->lower() < b.lower || fn->upper() > b.upper) {
                throw SpecError(name + ": " + which + " extends outside the block");
            }
        }
    }
    if (blocks_.back().upper != upper_) {
        throw SpecError("blocks leave [" + num(blocks_.back().upper) + "," + num(upper_) +
                        ") uncovered");
    }
    if (mean_.empty()) mean_ = PiecewiseFn::constant_expr(lower_, upper_, Expr::number(0.0));
    if (mean_.lower() != lower_ || mean_.upper() != upper_) {
        throw SpecError("mean must cover [" + num(lower_) + "," + num(upper_) + ") exactly");
    }
}

void ProcessSpec::check_time(SidedTime t) const {
    const bool past_end = t.side == Side::value ? t.t >= upper_ : t.t > upper_;
    if (!std::isfinite(t.t) || t.t < lower_ || past_end) {
        throw SpecError("time " + describe(t) + " outside [" + num(lower_) + "," + num(upper_) + ")");
    }
    if (t.t == lower_ && t.side == Side::left_limit) {
        throw SpecError("no left limit at the interval start " + num(lower_));
    }
}

std::size_t ProcessSpec::block_index(SidedTime t) const {
    check_time(t);
    return owner_index(
        blocks_, t, [](const Block& b) { return b.lower; }, [](const Block& b) { return b.upper; });
}

Resolved ProcessSpec::resolve(SidedTime t) const {
    const std::size_t b = block_index(t);
    return {b, blocks_[b].f.eval(t), blocks_[b].g.eval(t)};
}

double ProcessSpec::mean(SidedTime t) const {
    check_time(t);
    return mean_.eval(t);
}

std::vector<double> ProcessSpec::block_boundaries() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < blocks_.size(); ++i) out.push_back(blocks_[i].lower);
    return out;
}

std::vector<double> ProcessSpec::factor_discontinuities() const {
    std::vector<double> out;
    for (const Block& b : blocks_) {
        const std::vector<double> bp = b.factor_breakpoints();
        out.insert(out.end(), bp.begin(), bp.end());
    }
    return out;
}

std::vector<double> ProcessSpec::event_times() const {
    std::vector<double> out = block_boundaries();
    const std::vector<double> d = factor_discontinuities();
    out.insert(out.end(), d.begin(), d.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> ProcessSpec::mean_breakpoints() const { return mean_.breakpoints(); }

double eval_kernel(const ProcessSpec& spec, SidedTime s, SidedTime t) {
    if (sided_less(t, s)) std::swap(s, t);
    const std::size_t bs = spec.block_index(s);
    const std::size_t bt = spec.block_index(t);
    if (bs != bt) return 0.0;
    const Block& b = spec.blocks()[bs];
    return b.f.eval(s) * b.g.eval(t);
}

double variance(const ProcessSpec& spec, SidedTime t) { return eval_kernel(spec, t, t); }

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

struct Sample {
    SidedTime at;
    double f = 0.0;
    double g = 0.0;
    bool block_start = false;  // value at the block's lower end
    bool block_end = false;    // left limit at the block's (finite) upper end
};

class CheckSet {
public:
    void add(const std::string& name) {
        checks_.push_back({name, true, {}});
    }
    void fail(const std::string& name, const std::string& detail) {
        for (auto& c : checks_) {
            if (c.name == name && c.passed) {
                c.passed = false;
                c.detail = detail;
            }
        }
    }
    std::vector<ValidationCheck> take() { return std::move(checks_); }

private:
    std::vector<ValidationCheck> checks_;
};

std::vector<std::size_t> spread(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx;
    if (n == 0) return idx;
    if (n <= k) {
        for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
        return idx;
    }
    for (std::size_t j = 0; j < k; ++j) idx.push_back(j * (n - 1) / (k - 1));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

}  // namespace

ValidationReport validate(const ProcessSpec& spec, const ValidateOptions& options) {
    if (options.grid_points_per_segment < 2) {
        throw std::invalid_argument("validate: grid_points_per_segment must be >= 2");
    }
    ValidationReport report;
    report.block_boundaries = spec.block_boundaries();
    report.factor_discontinuities = spec.factor_discontinuities();

    CheckSet checks;
    checks.add("evaluable");
    checks.add("g-positive");
    checks.add("variance-nonnegative");
    checks.add("interior-variance-positive");
    checks.add("ratio-nondecreasing");
    checks.add("markov-triple");
    if (options.oracle) {
        checks.add("oracle-agreement");
        checks.add("oracle-independence");
    }

    const double tol = options.kernel_tol;
    const std::size_t n = options.grid_points_per_segment;
    std::vector<std::vector<Sample>> per_block;

    for (const Block& b : spec.blocks()) {
        const bool unbounded = std::isinf(b.upper);
        std::vector<double> cuts{b.lower};
        for (double bp : b.factor_breakpoints()) cuts.push_back(bp);
        cuts.push_back(unbounded ? cuts.back() + options.unbounded_span : b.upper);

        std::vector<Sample> samples;
        try {
            for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
                const double lo = cuts[p];
                const double hi = cuts[p + 1];
                for (std::size_t j = 0; j < n; ++j) {
                    const bool last = j + 1 == n;
                    const double x = last ? hi : lo + (hi - lo) * static_cast<double>(j) /
                                                          static_cast<double>(n - 1);
                    Sample s;
                    s.at = last ? left_of(x) : at(x);
                    s.f = b.f.eval(s.at);
                    s.g = b.g.eval(s.at);
                    s.block_start = p == 0 && j == 0;
                    s.block_end = last && p + 2 == cuts.size() && !unbounded;
                    samples.push_back(s);
                }
            }
        } catch (const DomainError& e) {
            checks.fail("evaluable", e.what());
            per_block.emplace_back();
            continue;
        }

        const std::string where = " in block [" + num(b.lower) + "," + num(b.upper) + ")";
        double prev_ratio = -kInfinity;
        SidedTime prev_at{};
        for (const Sample& s : samples) {
            const bool g_ok = s.block_end ? s.g >= 0.0 : s.g > 0.0;
            if (!g_ok) checks.fail("g-positive", "g=" + num(s.g) + " at " + describe(s.at) + where);
            const double var = s.f * s.g;
            if (var < -1e-12) {
                checks.fail("variance-nonnegative", "f*g=" + num(var) + " at " + describe(s.at) + where);
            }
            if (!s.block_start && !s.block_end && !(var > 0.0)) {
                checks.fail("interior-variance-positive",
                            "variance vanishes at " + describe(s.at) + where +
                                "; declare an independence boundary there");
            }
            if (s.g > 0.0) {
                const double ratio = s.f / s.g;
                if (ratio < prev_ratio - 1e-12 * std::max(1.0, std::abs(prev_ratio))) {
                    checks.fail("ratio-nondecreasing", "f/g drops from " + num(prev_ratio) + " at " +
                                                           describe(prev_at) + " to " + num(ratio) +
                                                           " at " + describe(s.at) + where);
                }
                prev_ratio = ratio;
                prev_at = s.at;
            } else if (s.g == 0.0 && s.f > 0.0) {
                prev_ratio = kInfinity;
                prev_at = s.at;
            }
        }

        const std::vector<std::size_t> pick = spread(samples.size(), options.triple_points);
        for (std::size_t i = 0; i < pick.size(); ++i) {
            for (std::size_t j = i; j < pick.size(); ++j) {
                for (std::size_t k = j; k < pick.size(); ++k) {
                    const SidedTime r = samples[pick[i]].at;
                    const SidedTime s = samples[pick[j]].at;
                    const SidedTime t = samples[pick[k]].at;
                    const double lhs = eval_kernel(spec, r, s) * eval_kernel(spec, s, t);
                    const double rhs = eval_kernel(spec, s, s) * eval_kernel(spec, r, t);
                    if (std::abs(lhs - rhs) > tol * (1.0 + std::abs(rhs))) {
                        checks.fail("markov-triple", "K(r,s)K(s,t)=" + num(lhs) + " vs K(s,s)K(r,t)=" +
                                                         num(rhs) + " at (" + describe(r) + "," +
                                                         describe(s) + "," + describe(t) + ")");
                    }
                }
            }
        }
        per_block.push_back(std::move(samples));
    }

    if (options.oracle) {
        const KernelOracle& oracle = *options.oracle;
        std::vector<std::vector<double>> value_points(per_block.size());
        for (std::size_t bi = 0; bi < per_block.size(); ++bi) {
            std::vector<double> pts;
            for (const Sample& s : per_block[bi]) {
                if (s.at.side == Side::value) pts.push_back(s.at.t);
            }
            for (std::size_t i : spread(pts.size(), options.triple_points)) {
                value_points[bi].push_back(pts[i]);
            }
        }
        for (std::size_t bi = 0; bi < value_points.size(); ++bi) {
            const auto& pts = value_points[bi];
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (std::size_t j = i; j < pts.size(); ++j) {
                    const double want = oracle(pts[i], pts[j]);
                    const double got = eval_kernel(spec, at(pts[i]), at(pts[j]));
                    if (std::abs(got - want) > tol * (1.0 + std::abs(want))) {
                        checks.fail("oracle-agreement", "factor kernel " + num(got) + " vs oracle " +
                                                            num(want) + " at (" + num(pts[i]) + "," +
                                                            num(pts[j]) + ")");
                    }
                }
            }
            if (bi + 1 < value_points.size()) {
                for (double s : pts) {
                    for (double t : value_points[bi + 1]) {
                        const double cross = oracle(s, t);
                        const double scale = std::sqrt(std::abs(oracle(s, s) * oracle(t, t)));
                        if (std::abs(cross) > tol * (1.0 + scale)) {
                            checks.fail("oracle-independence",
                                        "oracle K(" + num(s) + "," + num(t) + ")=" + num(cross) +
                                            " across declared boundary " +
                                            num(spec.blocks()[bi + 1].lower));
                        }
                    }
                }
            }
        }
    }

    report.checks = checks.take();
    return report;
}

std::vector<bool> check_markov_oracle(const KernelOracle& k, std::span<const Triple> triples,
                                      double tol) {
    std::vector<bool> out;
    out.reserve(triples.size());
    for (const Triple& tr : triples) {
        const double lhs = k(tr.r, tr.s) * k(tr.s, tr.t);
        const double rhs = k(tr.s, tr.s) * k(tr.r, tr.t);
        out.push_back(std::abs(lhs - rhs) <= tol * (1.0 + std::abs(rhs)));
    }
    return out;
}

TabulatedFactors extract_factors(const KernelOracle& k, double block_lower, double block_upper,
                                 double anchor, std::span<const double> grid) {
    if (!(block_lower < anchor && anchor < block_upper)) {
        throw std::invalid_argument("extract_factors: anchor must lie strictly inside the block");
    }
    const double k_aa = k(anchor, anchor);
    if (!(k_aa > 0.0)) {
        throw std::domain_error("extract_factors: K(anchor, anchor) = " + num(k_aa) +
                                " is not positive");
    }
    TabulatedFactors out;
    for (double x : grid) {
        if (x < block_lower || x >= block_upper) {
            throw std::invalid_argument("extract_factors: grid point " + num(x) + " outside block");
        }
        const double k_xx = k(x, x);
        double f = 0.0;
        double g = 0.0;
        if (x <= anchor) {
            const double k_xa = k(x, anchor);
            if (k_xa == 0.0) {
                throw std::domain_error("extract_factors: K(" + num(x) + ", anchor) = 0; point is "
                                        "across an independence boundary from the anchor");
            }
            f = k_xa;
            g = k_xx / k_xa;
        } else {
            const double k_ax = k(anchor, x);
            if (k_ax == 0.0) {
                throw std::domain_error("extract_factors: K(anchor, " + num(x) + ") = 0; point is "
                                        "across an independence boundary from the anchor");
            }
            f = k_xx * k_aa / k_ax;
            g = k_ax / k_aa;
        }
        out.x.push_back(x);
        out.f.push_back(f);
        out.g.push_back(g);
    }
    return out;
}

QuadraticForm psd_quadratic_form(const PiecewiseFn& f, const PiecewiseFn& g,
                                 std::span<const double> points, std::span<const double> weights) {
    if (points.empty() || points.size() != weights.size()) {
        throw std::invalid_argument("psd_quadratic_form: need matching non-empty points and weights");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i - 1] < points[i])) {
            throw std::invalid_argument("psd_quadratic_form: points must be strictly increasing");
        }
    }
    const std::size_t k = points.size();
    std::vector<double> fv(k), gv(k);
    for (std::size_t i = 0; i < k; ++i) {
        fv[i] = f.eval(at(points[i]));
        gv[i] = g.eval(at(points[i]));
        if (gv[i] == 0.0) {
            throw std::domain_error("psd_quadratic_form: g vanishes at " + num(points[i]));
        }
    }

    QuadraticForm out;
    for (std::size_t u = 0; u < k; ++u) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t lo = std::min(u, j);
            const std::size_t hi = std::max(u, j);
            const double term = fv[lo] * gv[hi] * weights[u] * weights[j];
            out.gram_value += term;
            out.magnitude += std::abs(term);
        }
    }

    // suffix[u] = sum_{j >= u} g(x_j) y_j
    std::vector<double> suffix(k + 1, 0.0);
    for (std::size_t u = k; u-- > 0;) suffix[u] = suffix[u + 1] + gv[u] * weights[u];
    auto ratio = [&](std::size_t i) { return fv[i] / gv[i]; };
    out.telescoped_value = ratio(0) * suffix[0] * suffix[0];
    for (std::size_t u = 0; u + 1 < k; ++u) {
        out.telescoped_value += (ratio(u + 1) - ratio(u)) * suffix[u + 1] * suffix[u + 1];
    }
    return out;
}

}  // namespace gmqv
