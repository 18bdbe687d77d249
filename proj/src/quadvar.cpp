#include "gmqv/quadvar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "gmqv/random.hpp"
#include "gmqv/stieltjes.hpp"

namespace gmqv {

namespace {

// Kernel differences at continuity points cancel exactly except for roundoff.
double snap_zero(double v, double scale) { return std::abs(v) <= 1e-14 * (1.0 + scale) ? 0.0 : v; }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

EventTimes event_times(const ProcessSpec& spec, double t) {
    spec.check_time(at(t));
    EventTimes out;
    for (double e : spec.event_times()) {
        if (e < t) {
            out.times.push_back(e);
        } else if (e == t) {
            out.t_is_event = true;
        }
    }
    return out;
}

double jump_second_moment(const ProcessSpec& spec, double tau) {
    const double var_at = variance(spec, at(tau));
    const double var_left = variance(spec, left_of(tau));
    const double cross = eval_kernel(spec, left_of(tau), at(tau));
    const double v = var_at + var_left - 2.0 * cross;
    return snap_zero(v, std::abs(var_at) + std::abs(var_left));
}

double jump_covariance(const ProcessSpec& spec, double tau_i, double tau_j) {
    if (tau_i == tau_j) return jump_second_moment(spec, tau_i);
    if (tau_j < tau_i) std::swap(tau_i, tau_j);
    const double a = eval_kernel(spec, at(tau_i), at(tau_j));
    const double b = eval_kernel(spec, at(tau_i), left_of(tau_j));
    const double c = eval_kernel(spec, left_of(tau_i), at(tau_j));
    const double d = eval_kernel(spec, left_of(tau_i), left_of(tau_j));
    return snap_zero((a - b) - (c - d), std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d));
}

QuadVarLaw build_law(const ProcessSpec& spec, double t, const LawOptions& options) {
    const EventTimes ev = event_times(spec, t);

    QuadVarLaw law;
    law.t = t;

    // Continuous part: one integral per piece between consecutive event times,
    // so each integrand/integrator pair is a single continuous segment.
    std::vector<double> cuts{spec.lower()};
    cuts.insert(cuts.end(), ev.times.begin(), ev.times.end());
    cuts.push_back(t);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (!(lo < hi)) continue;
        const Block& block = spec.blocks()[spec.block_index(at(lo))];
        const Expr f = block.f.segments()[block.f.segment_index(at(lo))].expr;
        const Expr g = block.g.segments()[block.g.segment_index(at(lo))].expr;

        RSResult r;
        if (eval(g, lo) != 0.0 && eval(g, hi) != 0.0) {
            RSRequest req;
            req.integrand = [g](double x) {
                const double v = eval(g, x);
                return v * v;
            };
            req.integrator = [f, g](double x) { return eval(f, x) / eval(g, x); };
            req.lo = lo;
            req.hi = hi;
            req.tol = options.tol;
            req.max_levels = options.max_levels;
            r = rs_integral(req);
        } else {
            r = factor_integral([f](double x) { return eval(f, x); },
                                [g](double x) { return eval(g, x); }, lo, hi, options.tol,
                                options.max_levels);
        }
        if (!r.converged) {
            throw ConvergenceError("Stieltjes integral on [" + num(lo) + "," + num(hi) +
                                   ") did not converge: achieved " + num(r.achieved_tol) + " after " +
                                   std::to_string(r.levels_used) + " levels");
        }
        law.deterministic_part += r.value;
    }

    std::map<double, JumpSpec> jumps;
    auto include = [&](double tau) { return tau < t || (tau == t && options.closed_at_t); };
    std::vector<double> candidates = ev.times;
    if (ev.t_is_event) candidates.push_back(t);
    for (double tau : candidates) {
        if (!include(tau)) continue;
        jumps[tau] = JumpSpec{tau, jump_second_moment(spec, tau), 0.0};
    }
    if (options.include_mean) {
        for (double tau : spec.mean_breakpoints()) {
            if (tau > t || !include(tau)) continue;
            const double dm = spec.mean(at(tau)) - spec.mean(left_of(tau));
            auto [it, inserted] = jumps.try_emplace(tau, JumpSpec{tau, 0.0, 0.0});
            it->second.mean_jump = dm;
        }
    }
    for (const auto& [tau, j] : jumps) {
        if (j.gauss_var != 0.0 || j.mean_jump != 0.0) law.jumps.push_back(j);
    }

    const auto n = static_cast<Eigen::Index>(law.jumps.size());
    law.jump_cov = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        law.jump_cov(i, i) = law.jumps[i].gauss_var;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double c = jump_covariance(spec, law.jumps[i].time, law.jumps[j].time);
            law.jump_cov(i, j) = c;
            law.jump_cov(j, i) = c;
        }
    }
    return law;
}

double law_mean(const QuadVarLaw& law) {
    double m = law.deterministic_part;
    for (const JumpSpec& j : law.jumps) m += j.gauss_var + j.mean_jump * j.mean_jump;
    return m;
}

double law_variance(const QuadVarLaw& law) {
    if (law.jumps.empty()) return 0.0;
    Eigen::VectorXd delta(static_cast<Eigen::Index>(law.jumps.size()));
    for (std::size_t i = 0; i < law.jumps.size(); ++i) {
        delta(static_cast<Eigen::Index>(i)) = law.jumps[i].mean_jump;
    }
    return 2.0 * law.jump_cov.squaredNorm() + 4.0 * delta.dot(law.jump_cov * delta);
}

std::vector<double> sample_law(const QuadVarLaw& law, std::uint64_t seed, std::size_t n) {
    if (n == 0) throw std::invalid_argument("sample_law: n must be >= 1");
    const auto m = static_cast<Eigen::Index>(law.jumps.size());
    std::vector<double> out(n, law.deterministic_part);
    if (m == 0) return out;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(law.jump_cov);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if (lambda.minCoeff() < -1e-10 * scale) {
        throw std::domain_error("sample_law: jump covariance is not positive semidefinite (eigenvalue " +
                                num(lambda.minCoeff()) + ")");
    }
    const Eigen::MatrixXd root = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();

    Eigen::VectorXd delta(m);
    for (Eigen::Index i = 0; i < m; ++i) delta(i) = law.jumps[static_cast<std::size_t>(i)].mean_jump;

    NormalStream rng(seed, 0);
    Eigen::VectorXd xi(m);
    for (std::size_t k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < m; ++i) xi(i) = rng.normal();
        const Eigen::VectorXd z = root * xi + delta;
        out[k] += z.squaredNorm();
    }
    return out;
}

}  // namespace gmqv
