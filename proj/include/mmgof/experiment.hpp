#pragma once

// Monte Carlo size and power studies.
//
// Each replicate r draws a network from the true model on a seed derived
// from the master seed, fits the (possibly misspecified) model under test and
// runs the exact test with every requested statistic. Per-replicate pc
// curves are journaled to replicates.csv so an interrupted study resumes
// where it stopped; the summary reports the rejection frequency per
// (statistic, m) at the configured alpha.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mmgof/gof.hpp"

namespace mmgof {

struct ExperimentSpec {
    std::string name = "custom";
    std::size_t nodes = 20;
    Hyperparams truth;   // generating model
    Hyperparams fitted;  // model under test
    std::size_t replicates = 100;
    TestConfig test;
    std::vector<std::size_t> m_values{1, 10, 50};  // columns of the summary table
    std::uint64_t master_seed = 1;
    unsigned threads = 1;  // replicate-level workers

    void validate() const;
};

// Named designs: size-k3-d10, size-k3-d20, size-k5-d20 (null models),
// power-k2, power-k3, power-k7, power-k8 (true K = 5, D = 20, fitted K as
// named) and beta-d5-o1, beta-d5-o5, beta-d10-o3, beta-d10-o10 (true K = 5,
// D = 20, b diag 10 / off 1; fitted b as named). All use a = 1, lambda = 1,
// N = M = 100 and the four statistics.
[[nodiscard]] ExperimentSpec experiment_preset(std::string_view name);
[[nodiscard]] std::vector<std::string> experiment_preset_names();

// Child seed of replicate r, and the stream its network is simulated on.
inline constexpr std::uint64_t kSimulationStream = std::uint64_t{1} << 62;
[[nodiscard]] std::uint64_t replicate_seed(const ExperimentSpec& spec, std::size_t replicate);

struct ReplicateOutcome {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    std::size_t edges = 0;
    std::vector<StatKind> stats;
    std::vector<std::vector<double>> pc_curves;  // per statistic, m = 1..N
};

[[nodiscard]] ReplicateOutcome run_replicate(const ExperimentSpec& spec, std::size_t replicate);

struct RejectionTable {
    std::vector<StatKind> stats;
    std::size_t replicates = 0;
    std::vector<std::vector<std::size_t>> rejections;  // [stat][m - 1]

    [[nodiscard]] double frequency(std::size_t stat, std::size_t m) const;
};

[[nodiscard]] RejectionTable tabulate(const ExperimentSpec& spec, const std::vector<ReplicateOutcome>& outcomes);

// Columns: design,stat,m,rejections,replicates,frequency; one row per
// statistic and m in spec.m_values.
[[nodiscard]] std::string rejection_csv(const ExperimentSpec& spec, const RejectionTable& table);
// Columns: replicate,seed,edges,stat,m,pc; sorted by replicate.
[[nodiscard]] std::string replicates_csv(const std::vector<ReplicateOutcome>& outcomes);
[[nodiscard]] std::vector<ReplicateOutcome> parse_replicates_csv(std::string_view text);
[[nodiscard]] std::string experiment_spec_json(const ExperimentSpec& spec);

struct ExperimentResult {
    std::vector<ReplicateOutcome> outcomes;  // sorted by replicate
    RejectionTable table;
    std::size_t resumed = 0;  // replicates taken from an earlier journal
};

// Runs the study, writing spec.json, replicates.csv, rejection.csv and
// rejection_curve.svg into out_dir. Complete replicates already in
// out_dir/replicates.csv are reused when their seeds match.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

// In-memory variant without any files.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace mmgof
