#pragma once

// The exact goodness-of-fit test.
//
// For each of N posterior membership draws the observed network is walked
// around its fiber under that draw's design matrix, giving an exact
// conditional p-value for a discrepancy statistic against the posterior mean
// tie probabilities. The N p-values are combined by the partial conjunction
// statistic
//
//   T_m = -2 * sum_{j=m..N} log p_(j),   pc(m) = P(chi2_{2(N-m+1)} >= T_m),
//
// which tests "at least m of the N draws fit". Note the chi-square reference
// law assumes independent p-values, while all N tests share one observed
// network; the combination is applied as stated regardless.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmgof/fiber.hpp"
#include "mmgof/mmsbm.hpp"

namespace mmgof {

enum class StatKind { ChiSquare, D1, D2, DInf };

inline constexpr StatKind kAllStats[] = {StatKind::ChiSquare, StatKind::D1, StatKind::D2, StatKind::DInf};

[[nodiscard]] std::string_view to_string(StatKind kind) noexcept;
// Accepts "chi2", "d1", "d2", "dinf".
[[nodiscard]] StatKind parse_stat_kind(std::string_view name);

// Discrepancy between a table and p_hat over the off-diagonal dyads.
[[nodiscard]] double statistic(StatKind kind, std::span<const std::uint32_t> table, std::span<const double> p_hat);

// Relative slack under which two statistic values count as tied; equal
// tables summed in a different order must not break a tie.
inline constexpr double kTieTolerance = 1e-9;

// Fraction of fiber statistics >= t0 (ties included). With add_one the
// estimator is (1 + count) / (M + 1) instead of count / M.
[[nodiscard]] double conditional_p_value(double t0, std::span<const double> fiber_stats, bool add_one = false);

// pc(m) for 1 <= m <= N. Zero p-values are replaced by zero_floor before
// the logarithm (pass 0 to leave them, which yields pc = 0).
[[nodiscard]] double partial_conjunction(std::span<const double> p_values, std::size_t m, double zero_floor = 0.0);

[[nodiscard]] std::vector<double> pc_curve(std::span<const double> p_values, double zero_floor = 0.0);

// m = ceil(u * N) for a fraction u in (0, 1].
[[nodiscard]] std::size_t m_from_fraction(double u, std::size_t n);

struct TestConfig {
    std::size_t realizations = 100;  // N
    WalkConfig walk;                 // walk.samples is M
    std::vector<StatKind> stats{StatKind::ChiSquare};
    std::size_t m_index = 1;
    double alpha = 0.05;
    GibbsSchedule schedule;
    bool add_one = false;
    unsigned threads = 1;  // does not affect results

    void validate() const;
};

struct StatReport {
    StatKind kind = StatKind::ChiSquare;
    std::vector<double> stat_observed;  // t0 per realization
    std::vector<double> p_values;
    std::vector<double> pc_curve;  // pc(m), m = 1..N
    double pc_at_m = 1.0;
    bool reject = false;
};

struct TestReport {
    std::uint64_t master_seed = 0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    Hyperparams hyper;
    TestConfig config;
    std::vector<std::size_t> realization_sweeps;
    std::vector<std::size_t> basis_sizes;  // moves per realization
    std::vector<StatReport> stats;

    [[nodiscard]] const StatReport& stat(StatKind kind) const;
};

// RNG streams: derive_stream(master_seed, 0) drives the Gibbs fit and
// derive_stream(master_seed, k) the fiber walk of realization k = 1..N.
[[nodiscard]] TestReport exact_test(const AdjacencyMatrix& y, const Hyperparams& hyper, const TestConfig& cfg,
                                    std::uint64_t master_seed);

// The fiber-test half of exact_test for an already fitted posterior.
[[nodiscard]] TestReport exact_test_on_posterior(const AdjacencyMatrix& y, const Hyperparams& hyper,
                                                 const PosteriorSummary& posterior, const TestConfig& cfg,
                                                 std::uint64_t master_seed);

inline constexpr int kReportVersion = 1;

[[nodiscard]] std::string report_json(const TestReport& report);
// Columns: m, u = m / N, then pc_<stat> for every statistic in the report.
[[nodiscard]] std::string report_csv(const TestReport& report);

}  // namespace mmgof
