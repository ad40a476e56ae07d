#include "mmgof/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mmgof/error.hpp"
#include "mmgof/parallel.hpp"
#include "mmgof/plot.hpp"

namespace mmgof {

void ExperimentSpec::validate() const {
    if (nodes < 2) fail(ErrorKind::Configuration, "experiment needs at least 2 nodes");
    if (replicates < 1) fail(ErrorKind::Configuration, "replicates must be at least 1");
    truth.validate();
    fitted.validate();
    test.validate();
    for (auto m : m_values)
        if (m < 1 || m > test.realizations)
            fail(ErrorKind::Configuration, "summary m value " + std::to_string(m) + " outside [1, N]");
}

namespace {

ExperimentSpec base_spec(std::string name, std::size_t true_k, std::size_t fitted_k, double fitted_b_diag,
                         double fitted_b_off, std::size_t nodes) {
    ExperimentSpec spec;
    spec.name = std::move(name);
    spec.nodes = nodes;
    spec.truth = Hyperparams::with_beta_prior(true_k, 1.0, 1.0, 10.0, 1.0);
    spec.fitted = Hyperparams::with_beta_prior(fitted_k, 1.0, 1.0, fitted_b_diag, fitted_b_off);
    spec.replicates = 100;
    spec.test.realizations = 100;
    spec.test.walk.samples = 100;
    spec.test.stats.assign(std::begin(kAllStats), std::end(kAllStats));
    spec.test.m_index = 1;
    return spec;
}

}  // namespace

ExperimentSpec experiment_preset(std::string_view name) {
    if (name == "size-k3-d10") return base_spec("size-k3-d10", 3, 3, 10, 1, 10);
    if (name == "size-k3-d20") return base_spec("size-k3-d20", 3, 3, 10, 1, 20);
    if (name == "size-k5-d20") return base_spec("size-k5-d20", 5, 5, 10, 1, 20);
    for (std::size_t k : {2, 3, 7, 8})
        if (name == "power-k" + std::to_string(k)) return base_spec(std::string(name), 5, k, 10, 1, 20);
    const std::pair<double, double> betas[] = {{5, 1}, {5, 5}, {10, 3}, {10, 10}};
    for (auto [diag, off] : betas) {
        const auto label = "beta-d" + std::to_string(static_cast<int>(diag)) + "-o" + std::to_string(static_cast<int>(off));
        if (name == label) return base_spec(label, 5, 5, diag, off, 20);
    }
    fail(ErrorKind::Configuration, "unknown experiment design '" + std::string(name) + "'");
}

std::vector<std::string> experiment_preset_names() {
    return {"size-k3-d10", "size-k3-d20", "size-k5-d20", "power-k2",   "power-k3",   "power-k7",
            "power-k8",    "beta-d5-o1",  "beta-d5-o5",  "beta-d10-o3", "beta-d10-o10"};
}

std::uint64_t replicate_seed(const ExperimentSpec& spec, std::size_t replicate) {
    return derive_seed(spec.master_seed, replicate);
}

ReplicateOutcome run_replicate(const ExperimentSpec& spec, std::size_t replicate) {
    const auto seed = replicate_seed(spec, replicate);
    auto sim_rng = derive_stream(seed, kSimulationStream);
    const auto sim = simulate_network(spec.truth, spec.nodes, sim_rng);
    const auto report = exact_test(sim.network, spec.fitted, spec.test, seed);
    ReplicateOutcome out;
    out.replicate = replicate;
    out.seed = seed;
    out.edges = sim.network.edge_count();
    for (const auto& s : report.stats) {
        out.stats.push_back(s.kind);
        out.pc_curves.push_back(s.pc_curve);
    }
    return out;
}

double RejectionTable::frequency(std::size_t stat, std::size_t m) const {
    return replicates ? static_cast<double>(rejections.at(stat).at(m - 1)) / static_cast<double>(replicates) : 0.0;
}

RejectionTable tabulate(const ExperimentSpec& spec, const std::vector<ReplicateOutcome>& outcomes) {
    RejectionTable table;
    table.stats = spec.test.stats;
    table.replicates = outcomes.size();
    const auto n = spec.test.realizations;
    table.rejections.assign(table.stats.size(), std::vector<std::size_t>(n, 0));
    for (const auto& o : outcomes) {
        for (std::size_t s = 0; s < table.stats.size(); ++s) {
            const auto it = std::find(o.stats.begin(), o.stats.end(), table.stats[s]);
            if (it == o.stats.end()) fail(ErrorKind::Configuration, "replicate lacks a requested statistic");
            const auto& curve = o.pc_curves[static_cast<std::size_t>(it - o.stats.begin())];
            for (std::size_t m = 1; m <= n; ++m)
                if (curve.at(m - 1) <= spec.test.alpha) ++table.rejections[s][m - 1];
        }
    }
    return table;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string replicate_rows(const ReplicateOutcome& o) {
    std::string out;
    for (std::size_t s = 0; s < o.stats.size(); ++s) {
        for (std::size_t m = 1; m <= o.pc_curves[s].size(); ++m) {
            out += std::to_string(o.replicate) + ',' + std::to_string(o.seed) + ',' + std::to_string(o.edges) + ',' +
                   std::string(to_string(o.stats[s])) + ',' + std::to_string(m) + ',' +
                   format_double(o.pc_curves[s][m - 1]) + '\n';
        }
    }
    return out;
}

constexpr std::string_view kReplicatesHeader = "replicate,seed,edges,stat,m,pc\n";

nlohmann::json hyper_json(const Hyperparams& h) {
    return {{"blocks", h.blocks}, {"lambda", h.lambda}, {"a", h.a}, {"b", h.b}};
}

bool complete(const ReplicateOutcome& o, const ExperimentSpec& spec) {
    if (o.seed != replicate_seed(spec, o.replicate) || o.replicate >= spec.replicates) return false;
    for (auto kind : spec.test.stats) {
        const auto it = std::find(o.stats.begin(), o.stats.end(), kind);
        if (it == o.stats.end()) return false;
        if (o.pc_curves[static_cast<std::size_t>(it - o.stats.begin())].size() != spec.test.realizations) return false;
    }
    return true;
}

}  // namespace

std::string rejection_csv(const ExperimentSpec& spec, const RejectionTable& table) {
    std::string out = "design,stat,m,rejections,replicates,frequency\n";
    for (std::size_t s = 0; s < table.stats.size(); ++s) {
        for (auto m : spec.m_values) {
            out += spec.name + ',' + std::string(to_string(table.stats[s])) + ',' + std::to_string(m) + ',' +
                   std::to_string(table.rejections[s][m - 1]) + ',' + std::to_string(table.replicates) + ',' +
                   format_double(table.frequency(s, m)) + '\n';
        }
    }
    return out;
}

std::string replicates_csv(const std::vector<ReplicateOutcome>& outcomes) {
    auto sorted = outcomes;
    std::sort(sorted.begin(), sorted.end(),
              [](const ReplicateOutcome& a, const ReplicateOutcome& b) { return a.replicate < b.replicate; });
    std::string out(kReplicatesHeader);
    for (const auto& o : sorted) out += replicate_rows(o);
    return out;
}

std::vector<ReplicateOutcome> parse_replicates_csv(std::string_view text) {
    // Lines that do not parse (a torn final write, say) are skipped; callers
    // decide which replicates are complete.
    std::map<std::size_t, ReplicateOutcome> by_replicate;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 6) continue;
        std::size_t replicate = 0, edges = 0, m = 0;
        std::uint64_t seed = 0;
        double pc = 0.0;
        if (!parse_number(fields[0], replicate) || !parse_number(fields[1], seed) || !parse_number(fields[2], edges) ||
            !parse_number(fields[4], m) || !parse_number(fields[5], pc) || m == 0)
            continue;
        StatKind kind;
        try {
            kind = parse_stat_kind(fields[3]);
        } catch (const Error&) {
            continue;
        }
        auto& o = by_replicate[replicate];
        o.replicate = replicate;
        o.seed = seed;
        o.edges = edges;
        auto it = std::find(o.stats.begin(), o.stats.end(), kind);
        if (it == o.stats.end()) {
            o.stats.push_back(kind);
            o.pc_curves.emplace_back();
            it = o.stats.end() - 1;
        }
        auto& curve = o.pc_curves[static_cast<std::size_t>(it - o.stats.begin())];
        if (m != curve.size() + 1) continue;  // only contiguous m = 1, 2, ...
        curve.push_back(pc);
    }
    std::vector<ReplicateOutcome> out;
    for (auto& [r, o] : by_replicate) out.push_back(std::move(o));
    return out;
}

std::string experiment_spec_json(const ExperimentSpec& spec) {
    const auto& t = spec.test;
    std::vector<std::string> stats;
    for (auto k : t.stats) stats.emplace_back(to_string(k));
    const nlohmann::json doc = {
        {"format", "mmgof-experiment"},
        {"version", 1},
        {"design", spec.name},
        {"nodes", spec.nodes},
        {"truth", hyper_json(spec.truth)},
        {"fitted", hyper_json(spec.fitted)},
        {"replicates", spec.replicates},
        {"master_seed", spec.master_seed},
        {"m_values", spec.m_values},
        {"test",
         {{"realizations", t.realizations},
          {"fiber_samples", t.walk.samples},
          {"fiber_burn_in", t.walk.burn_in},
          {"thin", t.walk.thin},
          {"bounded01", t.walk.bounded01},
          {"alpha", t.alpha},
          {"sweeps", t.schedule.sweeps},
          {"gibbs_burn_in", t.schedule.burn_in},
          {"stats", stats},
          {"p_value_estimator", t.add_one ? "(1+count)/(M+1)" : "count/M"}}},
    };
    return doc.dump(2) + "\n";
}

namespace {

ExperimentResult run(const ExperimentSpec& spec, const std::filesystem::path* out_dir) {
    spec.validate();
    std::vector<ReplicateOutcome> done;
    std::ofstream journal;
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        const auto spec_path = *out_dir / "spec.json";
        const auto spec_text = experiment_spec_json(spec);
        const auto journal_path = *out_dir / "replicates.csv";
        if (std::filesystem::exists(spec_path) && std::filesystem::exists(journal_path)) {
            if (read_text_file(spec_path) != spec_text)
                fail(ErrorKind::Configuration,
                     out_dir->string() + " holds results of a different experiment; use a fresh --out-dir");
            for (auto& o : parse_replicates_csv(read_text_file(journal_path)))
                if (complete(o, spec)) done.push_back(std::move(o));
        }
        write_text_file(spec_path, spec_text);
        write_text_file(journal_path, replicates_csv(done));
        journal.open(journal_path, std::ios::app | std::ios::binary);
        if (!journal) fail(ErrorKind::Io, "cannot append to " + journal_path.string());
    }

    std::vector<bool> have(spec.replicates, false);
    for (const auto& o : done) have[o.replicate] = true;
    std::vector<std::size_t> pending;
    for (std::size_t r = 0; r < spec.replicates; ++r)
        if (!have[r]) pending.push_back(r);

    ExperimentResult result;
    result.resumed = done.size();
    std::vector<ReplicateOutcome> fresh(pending.size());
    std::mutex writer;
    parallel_for(pending.size(), spec.threads, [&](std::size_t i) {
        fresh[i] = run_replicate(spec, pending[i]);
        if (journal.is_open()) {
            std::lock_guard lock(writer);
            journal << replicate_rows(fresh[i]);
            journal.flush();
        }
    });

    result.outcomes = std::move(done);
    for (auto& o : fresh) result.outcomes.push_back(std::move(o));
    std::sort(result.outcomes.begin(), result.outcomes.end(),
              [](const ReplicateOutcome& a, const ReplicateOutcome& b) { return a.replicate < b.replicate; });
    result.table = tabulate(spec, result.outcomes);

    if (out_dir) {
        journal.close();
        write_text_file(*out_dir / "replicates.csv", replicates_csv(result.outcomes));
        write_text_file(*out_dir / "rejection.csv", rejection_csv(spec, result.table));
        std::vector<Series> series;
        for (std::size_t s = 0; s < result.table.stats.size(); ++s) {
            Series line{std::string(to_string(result.table.stats[s])), {}, {}};
            for (std::size_t m = 1; m <= spec.test.realizations; ++m) {
                line.x.push_back(static_cast<double>(m));
                line.y.push_back(result.table.frequency(s, m));
            }
            series.push_back(std::move(line));
        }
        write_text_file(*out_dir / "rejection_curve.svg",
                        svg_chart(series, {"Rejection frequency, " + spec.name, "partial conjunction index m",
                                           "rejection frequency"},
                                  spec.test.alpha));
    }
    return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
    return run(spec, &out_dir);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) { return run(spec, nullptr); }

}  // namespace mmgof
