#pragma once

// Two-axis parameter sweeps. Workers pull grid indices from an atomic counter
// and write into a row buffer keyed by index, so output order and bytes do not
// depend on the number of jobs.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "chmlab/electrostatics.hpp"
#include "chmlab/json_io.hpp"
#include "chmlab/model_params.hpp"
#include "chmlab/stability_spectrum.hpp"

namespace chmlab {

enum class SweepCheck { prop41, window, cor_a2 };

inline SweepCheck parse_sweep_check(const std::string& s) {
    if (s == "prop41") return SweepCheck::prop41;
    if (s == "window") return SweepCheck::window;
    if (s == "corA2") return SweepCheck::cor_a2;
    throw UsageError("sweep: unknown check '" + s + "' (expected prop41, window or corA2)");
}

struct SweepAxis {
    double lo = 0.0, hi = 0.0;
    int n = 0;

    double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

/// Parses "lo:hi:n".
inline SweepAxis parse_axis(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw UsageError("sweep: axis must look like lo:hi:n, got '" + spec + "'");
    try {
        std::size_t used = 0;
        SweepAxis a;
        a.lo = std::stod(spec.substr(0, c1));
        a.hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
        const std::string ns = spec.substr(c2 + 1);
        a.n = std::stoi(ns, &used);
        if (used != ns.size()) throw std::invalid_argument("count");
        if (a.n < 0) throw UsageError("sweep: negative axis count");
        return a;
    } catch (const std::logic_error&) {
        throw UsageError("sweep: cannot parse axis '" + spec + "'");
    }
}

/// Default axes: prop41 and window over (a^2, Q^2); corA2 over (Q, position t in the mass window).
inline std::pair<SweepAxis, SweepAxis> default_axes(SweepCheck c) {
    switch (c) {
        case SweepCheck::prop41: return {{0.01, 1.0, 100}, {0.0, 0.25, 100}};
        case SweepCheck::window: return {{0.01, 1.0, 100}, {0.0, 0.25, 100}};
        case SweepCheck::cor_a2: return {{0.02, 0.48, 24}, {0.05, 0.95, 19}};
    }
    return {};
}

struct SweepResult {
    std::string header;
    std::vector<std::string> rows;
    int failures = 0;
    double worst = 0.0;  // prop41: max |residual|; corA2: min margin; window: disagreement count

    std::string csv() const {
        std::string out = header;
        for (const auto& r : rows) out += r;
        return out;
    }
};

namespace detail {

struct SweepRow {
    std::string text;
    bool pass = true;
    double metric = 0.0;
};

inline SweepRow sweep_point(SweepCheck c, double x, double y, double lambda) {
    SweepRow row;
    switch (c) {
        case SweepCheck::prop41: {
            if (!(x > 0.0) || y < 0.0) throw DomainError("sweep prop41: need a^2 > 0 and Q^2 >= 0");
            const double res = prop41_identity_check(std::sqrt(x), std::sqrt(y));
            row.pass = std::abs(res) <= 1e-12;
            row.metric = std::abs(res);
            row.text = csv_row({x, y, res, row.pass ? 1.0 : 0.0});
            break;
        }
        case SweepCheck::window: {
            if (!(x > 0.0) || y < 0.0) throw DomainError("sweep window: need a^2 > 0 and Q^2 >= 0");
            const double a = std::sqrt(x), q = std::sqrt(y);
            const double l1 = lambda1_analytic(a, q, lambda);
            const bool inside = inside_stability_window(a, q, lambda);
            row.pass = inside == (l1 > 0.0) || std::abs(l1) < 1e-12;
            row.metric = row.pass ? 0.0 : 1.0;
            row.text = csv_row({x, y, l1, inside ? 1.0 : 0.0, l1 > 0.0 ? 1.0 : 0.0, row.pass ? 1.0 : 0.0});
            break;
        }
        case SweepCheck::cor_a2: {
            const auto w = admissible_window(x, lambda);
            const ModelParams p{w.m_min + (w.m_max - w.m_min) * y, x, lambda};
            const auto s = area_charge_summary(p);
            if (s.components.size() != 2) throw NumericError("sweep corA2: expected two horizons", 0.0);
            const double margin =
                12.0 * std::numbers::pi - std::max(s.components[0].cor_a2_lhs, s.components[1].cor_a2_lhs);
            row.pass = s.cor_a2_holds && s.thm_a1_holds;
            row.metric = margin;
            row.text = csv_row({x, y, p.m, s.components[0].radius, s.components[1].radius, s.components[0].cor_a2_lhs,
                                s.components[1].cor_a2_lhs, margin, row.pass ? 1.0 : 0.0});
            break;
        }
    }
    return row;
}

inline std::string sweep_header(SweepCheck c) {
    switch (c) {
        case SweepCheck::prop41: return "a2,q2,residual,pass\n";
        case SweepCheck::window: return "a2,q2,lambda1,inside_window,lambda1_positive,pass\n";
        case SweepCheck::cor_a2: return "q,t,m,r_plus,r_c,corA2_lhs_plus,corA2_lhs_c,margin,pass\n";
    }
    return {};
}

}  // namespace detail

/// Evaluates the check at every (x_i, y_j), rows ordered with x outer and y inner.
inline SweepResult run_sweep(SweepCheck c, const SweepAxis& x, const SweepAxis& y, int jobs = 1,
                             double lambda = 1.0) {
    if (x.n < 1 || y.n < 1) throw UsageError("sweep: empty grid");
    if (jobs < 1) throw UsageError("sweep: jobs must be >= 1");
    const std::size_t total = static_cast<std::size_t>(x.n) * static_cast<std::size_t>(y.n);
    std::vector<detail::SweepRow> rows(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                rows[k] = detail::sweep_point(c, x.at(static_cast<int>(k / y.n)), y.at(static_cast<int>(k % y.n)),
                                              lambda);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), total));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    SweepResult out;
    out.header = detail::sweep_header(c);
    out.worst = c == SweepCheck::cor_a2 ? 1e300 : 0.0;
    for (auto& r : rows) {
        out.rows.push_back(std::move(r.text));
        if (!r.pass) ++out.failures;
        out.worst = c == SweepCheck::prop41   ? std::max(out.worst, r.metric)
                    : c == SweepCheck::cor_a2 ? std::min(out.worst, r.metric)
                                              : out.worst + r.metric;
    }
    return out;
}

}  // namespace chmlab
