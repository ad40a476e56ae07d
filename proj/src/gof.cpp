#include "mmgof/gof.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "mmgof/design.hpp"
#include "mmgof/error.hpp"
#include "mmgof/markov.hpp"
#include "mmgof/parallel.hpp"

namespace mmgof {

std::string_view to_string(StatKind kind) noexcept {
    switch (kind) {
        case StatKind::ChiSquare: return "chi2";
        case StatKind::D1: return "d1";
        case StatKind::D2: return "d2";
        case StatKind::DInf: return "dinf";
    }
    return "?";
}

StatKind parse_stat_kind(std::string_view name) {
    for (auto kind : kAllStats)
        if (to_string(kind) == name) return kind;
    fail(ErrorKind::Configuration, "unknown statistic '" + std::string(name) + "' (chi2, d1, d2, dinf)");
}

double statistic(StatKind kind, std::span<const std::uint32_t> table, std::span<const double> p_hat) {
    if (table.size() != p_hat.size()) fail(ErrorKind::Shape, "table and p_hat sizes differ");
    double acc = 0.0;
    for (std::size_t d = 0; d < table.size(); ++d) {
        const double p = p_hat[d];
        if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::Domain, "p_hat must lie strictly inside (0, 1)");
        const double diff = static_cast<double>(table[d]) - p;
        switch (kind) {
            case StatKind::ChiSquare: acc += diff * diff / p; break;
            case StatKind::D1: acc += std::fabs(diff); break;
            case StatKind::D2: acc += diff * diff; break;
            case StatKind::DInf: acc = std::max(acc, std::fabs(diff)); break;
        }
    }
    return kind == StatKind::D2 ? std::sqrt(acc) : acc;
}

double conditional_p_value(double t0, std::span<const double> fiber_stats, bool add_one) {
    if (fiber_stats.empty()) fail(ErrorKind::Domain, "need at least one fiber statistic");
    const double threshold = t0 - kTieTolerance * std::max(1.0, std::fabs(t0));
    const auto count = std::count_if(fiber_stats.begin(), fiber_stats.end(), [&](double t) { return t >= threshold; });
    const auto m = static_cast<double>(fiber_stats.size());
    return add_one ? (1.0 + static_cast<double>(count)) / (m + 1.0) : static_cast<double>(count) / m;
}

namespace {

double pc_from_sorted(std::span<const double> sorted, std::size_t m, double zero_floor) {
    const auto n = sorted.size();
    double t = 0.0;
    for (std::size_t j = m - 1; j < n; ++j) {
        const double p = sorted[j] <= 0.0 ? zero_floor : sorted[j];
        if (p <= 0.0) return 0.0;
        t -= 2.0 * std::log(p);
    }
    return chi_square_sf(std::max(t, 0.0), static_cast<unsigned>(2 * (n - m + 1)));
}

std::vector<double> sorted_p_values(std::span<const double> p_values) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::Domain, "p-values must lie in [0, 1]");
    std::vector<double> sorted(p_values.begin(), p_values.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

}  // namespace

double partial_conjunction(std::span<const double> p_values, std::size_t m, double zero_floor) {
    if (m < 1 || m > p_values.size())
        fail(ErrorKind::Domain, "m must lie in [1, " + std::to_string(p_values.size()) + "], got " + std::to_string(m));
    return pc_from_sorted(sorted_p_values(p_values), m, zero_floor);
}

std::vector<double> pc_curve(std::span<const double> p_values, double zero_floor) {
    const auto sorted = sorted_p_values(p_values);
    std::vector<double> curve(sorted.size());
    for (std::size_t m = 1; m <= sorted.size(); ++m) curve[m - 1] = pc_from_sorted(sorted, m, zero_floor);
    return curve;
}

std::size_t m_from_fraction(double u, std::size_t n) {
    if (!(u > 0.0 && u <= 1.0)) fail(ErrorKind::Configuration, "fraction u must lie in (0, 1]");
    // Guard against u * N landing a hair above an integer.
    const double scaled = u * static_cast<double>(n);
    auto m = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
    return std::clamp<std::size_t>(m, 1, n);
}

void TestConfig::validate() const {
    if (realizations < 1) fail(ErrorKind::Configuration, "N must be at least 1");
    if (m_index < 1 || m_index > realizations)
        fail(ErrorKind::Configuration, "m index must lie in [1, N]");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Configuration, "alpha must lie in (0, 1)");
    if (stats.empty()) fail(ErrorKind::Configuration, "at least one statistic is required");
    walk.validate();
}

const StatReport& TestReport::stat(StatKind kind) const {
    for (const auto& s : stats)
        if (s.kind == kind) return s;
    fail(ErrorKind::Configuration, "statistic " + std::string(to_string(kind)) + " not in report");
}

TestReport exact_test_on_posterior(const AdjacencyMatrix& y, const Hyperparams& hyper,
                                   const PosteriorSummary& posterior, const TestConfig& cfg,
                                   std::uint64_t master_seed) {
    cfg.validate();
    const auto n = cfg.realizations;
    if (posterior.realizations.size() != n)
        fail(ErrorKind::Configuration, "posterior holds " + std::to_string(posterior.realizations.size()) +
                                           " realizations, config asks for " + std::to_string(n));
    const auto observed = y.dyad_table();
    const auto nstats = cfg.stats.size();

    std::vector<double> t0(nstats);
    for (std::size_t s = 0; s < nstats; ++s) t0[s] = statistic(cfg.stats[s], observed, posterior.p_hat);

    // p[s][k]
    std::vector<std::vector<double>> p(nstats, std::vector<double>(n, 1.0));
    std::vector<std::size_t> basis_sizes(n, 0);
    parallel_for(n, cfg.threads, [&](std::size_t k) {
        try {
            auto rng = derive_stream(master_seed, k + 1);
            const auto design = build_design(posterior.realizations[k], hyper.blocks);
            const auto basis = structural_basis(design);
            basis_sizes[k] = basis.moves.size();
            std::vector<std::vector<double>> fiber_stats(nstats);
            for (auto& v : fiber_stats) v.reserve(cfg.walk.samples);
            walk_fiber(observed, basis, cfg.walk, rng, [&](const Table& table) {
                for (std::size_t s = 0; s < nstats; ++s)
                    fiber_stats[s].push_back(statistic(cfg.stats[s], table, posterior.p_hat));
            });
            for (std::size_t s = 0; s < nstats; ++s) p[s][k] = conditional_p_value(t0[s], fiber_stats[s], cfg.add_one);
        } catch (const Error& e) {
            throw Error(e.kind(), "realization " + std::to_string(k + 1) + ": " + e.what());
        }
    });

    TestReport report;
    report.master_seed = master_seed;
    report.nodes = y.nodes();
    report.edges = y.edge_count();
    report.hyper = hyper;
    report.config = cfg;
    report.realization_sweeps = posterior.realization_sweeps;
    report.basis_sizes = std::move(basis_sizes);
    const double zero_floor = 1.0 / static_cast<double>(cfg.walk.samples + 1);
    for (std::size_t s = 0; s < nstats; ++s) {
        StatReport sr;
        sr.kind = cfg.stats[s];
        sr.stat_observed.assign(n, t0[s]);
        sr.p_values = std::move(p[s]);
        sr.pc_curve = pc_curve(sr.p_values, zero_floor);
        sr.pc_at_m = sr.pc_curve[cfg.m_index - 1];
        sr.reject = sr.pc_at_m <= cfg.alpha;
        report.stats.push_back(std::move(sr));
    }
    return report;
}

TestReport exact_test(const AdjacencyMatrix& y, const Hyperparams& hyper, const TestConfig& cfg,
                      std::uint64_t master_seed) {
    cfg.validate();
    auto fit_rng = derive_stream(master_seed, 0);
    const auto posterior = fit(y, hyper, cfg.schedule, cfg.realizations, fit_rng);
    return exact_test_on_posterior(y, hyper, posterior, cfg, master_seed);
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace

std::string report_json(const TestReport& report) {
    using nlohmann::json;
    const auto& cfg = report.config;
    json stats = json::array();
    for (const auto& s : report.stats) {
        stats.push_back({{"name", to_string(s.kind)},
                         {"observed", s.stat_observed},
                         {"p_values", s.p_values},
                         {"pc_curve", s.pc_curve},
                         {"pc_at_m", s.pc_at_m},
                         {"reject", s.reject}});
    }
    const json doc = {
        {"format", "mmgof-test-report"},
        {"version", kReportVersion},
        {"master_seed", report.master_seed},
        {"network", {{"nodes", report.nodes}, {"edges", report.edges}}},
        {"hyper",
         {{"blocks", report.hyper.blocks}, {"lambda", report.hyper.lambda}, {"a", report.hyper.a}, {"b", report.hyper.b}}},
        {"config",
         {{"realizations", cfg.realizations},
          {"fiber_samples", cfg.walk.samples},
          {"fiber_burn_in", cfg.walk.burn_in},
          {"thin", cfg.walk.thin},
          {"bounded01", cfg.walk.bounded01},
          {"m_index", cfg.m_index},
          {"alpha", cfg.alpha},
          {"sweeps", cfg.schedule.sweeps},
          {"gibbs_burn_in", cfg.schedule.burn_in},
          {"p_value_estimator", cfg.add_one ? "(1+count)/(M+1)" : "count/M"}}},
        {"realization_sweeps", report.realization_sweeps},
        {"basis_sizes", report.basis_sizes},
        {"statistics", stats},
    };
    return doc.dump(2) + "\n";
}

std::string report_csv(const TestReport& report) {
    std::string out = "m,u";
    for (const auto& s : report.stats) out += ",pc_" + std::string(to_string(s.kind));
    out += '\n';
    const auto n = report.config.realizations;
    for (std::size_t m = 1; m <= n; ++m) {
        out += std::to_string(m) + ',' + format_double(static_cast<double>(m) / static_cast<double>(n));
        for (const auto& s : report.stats) out += ',' + format_double(s.pc_curve[m - 1]);
        out += '\n';
    }
    return out;
}

}  // namespace mmgof
