// mmgof: command-line front end for the MMSBM exact goodness-of-fit test.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "mmgof/error.hpp"
#include "mmgof/experiment.hpp"
#include "mmgof/gof.hpp"
#include "mmgof/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmgof;

namespace {

struct Options {
    std::uint64_t seed = 1;
    std::string network;
    std::size_t nodes = 0;
    std::size_t k = 2;
    std::size_t true_k = 0;
    double lambda = 1.0;
    double prior_a = 1.0;
    double beta_diag = 1.0;
    double beta_off = 1.0;
    std::size_t n_realizations = 100;
    std::size_t m_fiber = 100;
    std::size_t burn_in = 1000;
    std::size_t thin = 10;
    bool bounded01 = false;
    std::size_t sweeps = 1100;
    std::size_t gibbs_burn_in = 100;
    std::vector<std::string> stat{"chi2"};
    std::size_t m_index = 1;
    double u = 0.0;
    double alpha = 0.05;
    bool add_one = false;
    unsigned threads = 1;
    std::string out_dir = ".";
    std::string config;
    std::size_t replicates = 1;
    std::string design = "size-k3-d20";
    std::vector<std::size_t> m_values{1, 10, 50};
    std::vector<std::size_t> k_values{2, 3, 4, 5, 6};
};

// Every option is registered with a JSON setter so a --config file can fill
// in whatever the command line left unset.
class Registry {
public:
    explicit Registry(CLI::App* app) : app_(app) {}

    template <typename T>
    CLI::Option* option(const std::string& name, T& var, const std::string& help) {
        auto* opt = app_->add_option("--" + name, var, help)->capture_default_str();
        setters_[name] = {opt, [&var](const json& j) { var = j.get<T>(); }};
        return opt;
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
        auto* opt = app_->add_flag("--" + name, var, help);
        setters_[name] = {opt, [&var](const json& j) { var = j.get<bool>(); }};
        return opt;
    }

    [[nodiscard]] bool given(const std::string& name) const {
        const auto it = setters_.find(name);
        return it != setters_.end() && (it->second.opt->count() > 0 || from_config_.contains(name));
    }

    void apply_config(const std::string& path) {
        if (path.empty()) return;
        json doc;
        try {
            doc = json::parse(read_text_file(path));
        } catch (const json::exception& e) {
            fail(ErrorKind::Configuration, "config " + path + ": " + e.what());
        }
        if (!doc.is_object()) fail(ErrorKind::Configuration, "config " + path + " must hold a JSON object");
        for (const auto& [key, value] : doc.items()) {
            const auto it = setters_.find(key);
            if (it == setters_.end() || key == "config")
                fail(ErrorKind::Configuration, "config " + path + ": unknown key '" + key + "'");
            if (it->second.opt->count() > 0) continue;  // the command line wins
            try {
                it->second.set(value);
            } catch (const json::exception& e) {
                fail(ErrorKind::Configuration, "config " + path + ": key '" + key + "': " + e.what());
            }
            from_config_.insert(key);
        }
    }

private:
    struct Setter {
        CLI::Option* opt;
        std::function<void(const json&)> set;
    };
    CLI::App* app_;
    std::map<std::string, Setter> setters_;
    std::set<std::string> from_config_;
};

void add_seed(Registry& r, Options& o) { r.option("seed", o.seed, "master seed"); }

void add_prior(Registry& r, Options& o) {
    r.option("k", o.k, "number of blocks K");
    r.option("lambda", o.lambda, "Dirichlet concentration");
    r.option("prior-a", o.prior_a, "Beta shape a for every block pair");
    r.option("beta-diag", o.beta_diag, "Beta shape b on the diagonal block pairs");
    r.option("beta-off", o.beta_off, "Beta shape b off the diagonal");
}

void add_fit(Registry& r, Options& o) {
    r.option("n-realizations", o.n_realizations, "posterior realizations N");
    r.option("sweeps", o.sweeps, "total Gibbs sweeps");
    r.option("gibbs-burn-in", o.gibbs_burn_in, "Gibbs sweeps discarded");
}

void add_test(Registry& r, Options& o) {
    r.option("m-fiber", o.m_fiber, "fiber samples M per realization");
    r.option("burn-in", o.burn_in, "fiber walk burn-in steps");
    r.option("thin", o.thin, "fiber walk steps between samples");
    r.flag("bounded01", o.bounded01, "restrict fiber cells to {0,1}");
    r.option("stat", o.stat, "statistics: chi2, d1, d2, dinf or all")->delimiter(',');
    r.option("m-index", o.m_index, "partial conjunction index m");
    r.option("u", o.u, "fraction u in (0,1]; sets m = ceil(u N)");
    r.option("alpha", o.alpha, "significance level");
    r.flag("add-one", o.add_one, "use the (1 + count) / (M + 1) p-value estimator");
    r.option("threads", o.threads, "worker threads");
}

void add_common(Registry& r, Options& o) {
    r.option("out-dir", o.out_dir, "output directory");
    r.option("config", o.config, "JSON config file; command-line flags take precedence");
}

Hyperparams prior(const Options& o, std::size_t k) {
    return Hyperparams::with_beta_prior(k, o.lambda, o.prior_a, o.beta_diag, o.beta_off);
}

std::vector<StatKind> parse_stats(const std::vector<std::string>& names) {
    std::vector<StatKind> out;
    for (const auto& n : names) {
        if (n == "all") return {std::begin(kAllStats), std::end(kAllStats)};
        const auto kind = parse_stat_kind(n);
        if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
    }
    return out;
}

TestConfig test_config(const Options& o, const Registry& r) {
    TestConfig cfg;
    cfg.realizations = o.n_realizations;
    cfg.walk = {o.m_fiber, o.burn_in, o.thin, o.bounded01};
    cfg.stats = parse_stats(o.stat);
    cfg.m_index = r.given("u") ? m_from_fraction(o.u, o.n_realizations) : o.m_index;
    cfg.alpha = o.alpha;
    cfg.schedule = {o.sweeps, o.gibbs_burn_in};
    cfg.add_one = o.add_one;
    cfg.threads = o.threads;
    return cfg;
}

AdjacencyMatrix load_input(const Options& o) {
    if (o.network.empty()) fail(ErrorKind::Configuration, "--network is required");
    return load_network(o.network, o.nodes);
}

std::string pad(std::size_t r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", r);
    return buf;
}

json realization_json(const MembershipRealization& real) {
    json send = json::array(), recv = json::array();
    for (auto k : real.send) send.push_back(k + 1);
    for (auto l : real.recv) recv.push_back(l + 1);
    return {{"send", send}, {"recv", recv}};
}

void write_report(const TestReport& report, const fs::path& dir, const std::string& stem) {
    write_text_file(dir / (stem + ".json"), report_json(report));
    write_text_file(dir / (stem + ".csv"), report_csv(report));
    std::vector<Series> series;
    for (const auto& s : report.stats) {
        Series line{std::string(to_string(s.kind)), {}, {}};
        for (std::size_t m = 1; m <= s.pc_curve.size(); ++m) {
            line.x.push_back(static_cast<double>(m));
            line.y.push_back(s.pc_curve[m - 1]);
        }
        series.push_back(std::move(line));
    }
    write_text_file(dir / (stem + "_pc_curve.svg"),
                    svg_chart(series, {"Partial conjunction p-values", "partial conjunction index m", "pc(m)"},
                              report.config.alpha));
}

void print_decisions(const TestReport& report, const std::string& prefix) {
    for (const auto& s : report.stats) {
        std::cout << prefix << to_string(s.kind) << ": pc(" << report.config.m_index << ") = " << s.pc_at_m << " -> "
                  << (s.reject ? "reject" : "do not reject") << " at alpha " << report.config.alpha << '\n';
    }
}

int cmd_simulate(const Options& o) {
    if (o.nodes < 2) fail(ErrorKind::Configuration, "--nodes (at least 2) is required");
    const auto hyper = prior(o, o.k);
    const fs::path dir = o.out_dir;
    fs::create_directories(dir);
    for (std::size_t r = 0; r < o.replicates; ++r) {
        const auto seed = derive_seed(o.seed, r);
        auto rng = derive_stream(seed, kSimulationStream);
        const auto sim = simulate_network(hyper, o.nodes, rng);
        const auto stem = pad(r + 1);
        write_text_file(dir / ("network_" + stem + ".edges"), emit_edge_list(sim.network));
        const json truth = {{"format", "mmgof-truth"},
                            {"version", 1},
                            {"seed", seed},
                            {"nodes", o.nodes},
                            {"blocks", hyper.blocks},
                            {"theta", sim.theta},
                            {"block_matrix", sim.block_matrix},
                            {"realization", realization_json(sim.truth)}};
        write_text_file(dir / ("truth_" + stem + ".json"), truth.dump(2) + "\n");
    }
    std::cout << "wrote " << o.replicates << " network(s) to " << dir.string() << '\n';
    return 0;
}

int cmd_fit(const Options& o) {
    const auto y = load_input(o);
    const auto hyper = prior(o, o.k);
    auto rng = derive_stream(o.seed, 0);
    const auto post = fit(y, hyper, {o.sweeps, o.gibbs_burn_in}, o.n_realizations, rng);
    json p_hat = json::array();
    for (std::size_t i = 0; i < y.nodes(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < y.nodes(); ++j) row.push_back(i == j ? json(nullptr) : json(post.p_hat_at(i, j)));
        p_hat.push_back(row);
    }
    json reals = json::array();
    for (const auto& real : post.realizations) reals.push_back(realization_json(real));
    const json doc = {{"format", "mmgof-posterior"},
                      {"version", 1},
                      {"master_seed", o.seed},
                      {"nodes", y.nodes()},
                      {"blocks", hyper.blocks},
                      {"draws_used", post.draws_used},
                      {"realization_sweeps", post.realization_sweeps},
                      {"p_hat", p_hat},
                      {"realizations", reals}};
    const fs::path dir = o.out_dir;
    fs::create_directories(dir);
    write_text_file(dir / "posterior.json", doc.dump(2) + "\n");
    std::cout << "wrote " << (dir / "posterior.json").string() << '\n';
    return 0;
}

int cmd_test(const Options& o, const Registry& r) {
    const auto y = load_input(o);
    const auto report = exact_test(y, prior(o, o.k), test_config(o, r), o.seed);
    const fs::path dir = o.out_dir;
    fs::create_directories(dir);
    write_report(report, dir, "report");
    print_decisions(report, "");
    return 0;
}

int cmd_experiment(const Options& o, const Registry& r) {
    ExperimentSpec spec;
    if (o.design == "custom") {
        if (!r.given("true-k") || !r.given("nodes"))
            fail(ErrorKind::Configuration, "a custom design needs --true-k and --nodes");
        spec.name = "custom";
        spec.nodes = o.nodes;
        spec.truth = prior(o, o.true_k);
        spec.fitted = prior(o, o.k);
        spec.test = test_config(o, r);
    } else {
        spec = experiment_preset(o.design);
        if (r.given("nodes")) spec.nodes = o.nodes;
        if (r.given("true-k")) spec.truth = Hyperparams::with_beta_prior(o.true_k, spec.truth.lambda, 1.0, 10.0, 1.0);
        auto fitted_k = r.given("k") ? o.k : spec.fitted.blocks;
        auto lambda = r.given("lambda") ? o.lambda : spec.fitted.lambda;
        auto a = r.given("prior-a") ? o.prior_a : spec.fitted.a_at(0, 0);
        auto b_diag = r.given("beta-diag") ? o.beta_diag : spec.fitted.b_at(0, 0);
        auto b_off = r.given("beta-off") ? o.beta_off : (fitted_k > 1 ? spec.fitted.b_at(0, 1) : spec.fitted.b_at(0, 0));
        spec.fitted = Hyperparams::with_beta_prior(fitted_k, lambda, a, b_diag, b_off);
        auto& t = spec.test;
        if (r.given("n-realizations")) t.realizations = o.n_realizations;
        if (r.given("m-fiber")) t.walk.samples = o.m_fiber;
        if (r.given("burn-in")) t.walk.burn_in = o.burn_in;
        if (r.given("thin")) t.walk.thin = o.thin;
        if (r.given("bounded01")) t.walk.bounded01 = o.bounded01;
        if (r.given("sweeps")) t.schedule.sweeps = o.sweeps;
        if (r.given("gibbs-burn-in")) t.schedule.burn_in = o.gibbs_burn_in;
        if (r.given("stat")) t.stats = parse_stats(o.stat);
        if (r.given("alpha")) t.alpha = o.alpha;
        if (r.given("add-one")) t.add_one = o.add_one;
    }
    spec.test.m_index = 1;
    spec.replicates = r.given("replicates") ? o.replicates : spec.replicates;
    spec.master_seed = o.seed;
    spec.threads = o.threads;
    spec.m_values.clear();
    if (r.given("m-values")) {
        spec.m_values = o.m_values;
    } else {
        for (auto m : o.m_values)
            if (m <= spec.test.realizations) spec.m_values.push_back(m);
    }
    const auto result = run_experiment(spec, o.out_dir);
    if (result.resumed) std::cerr << "resumed " << result.resumed << " replicate(s) from " << o.out_dir << '\n';
    std::cout << rejection_csv(spec, result.table);
    return 0;
}

int cmd_sampson(const Options& o, const Registry& r) {
    const auto y = load_sampson();
    auto cfg = test_config(o, r);
    const fs::path dir = o.out_dir;
    fs::create_directories(dir);
    std::vector<Series> series;
    std::string summary = "k,m,stat,pc,reject\n";
    for (auto k : o.k_values) {
        const auto report = exact_test(y, prior(o, k), cfg, o.seed);
        write_report(report, dir, "sampson_k" + std::to_string(k));
        print_decisions(report, "K=" + std::to_string(k) + " ");
        for (const auto& s : report.stats) {
            summary += std::to_string(k) + ',' + std::to_string(cfg.m_index) + ',' + std::string(to_string(s.kind)) +
                       ',' + json(s.pc_at_m).dump() + ',' + (s.reject ? "1" : "0") + '\n';
            Series line{"K=" + std::to_string(k) + " " + std::string(to_string(s.kind)), {}, {}};
            for (std::size_t m = 1; m <= s.pc_curve.size(); ++m) {
                line.x.push_back(static_cast<double>(m));
                line.y.push_back(s.pc_curve[m - 1]);
            }
            series.push_back(std::move(line));
        }
    }
    write_text_file(dir / "sampson_summary.csv", summary);
    write_text_file(dir / "sampson_pc_curves.svg",
                    svg_chart(series, {"Sampson monks, pc curves by K", "partial conjunction index m", "pc(m)"},
                              cfg.alpha));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact goodness-of-fit test for the mixed membership stochastic block model"};
    app.require_subcommand(1);

    Options sim_o, fit_o, test_o, exp_o, samp_o;
    samp_o.beta_diag = 2.0;
    samp_o.m_index = 50;
    samp_o.k = 3;

    auto* sim = app.add_subcommand("simulate", "simulate networks from an MMSBM");
    Registry sim_r(sim);
    add_seed(sim_r, sim_o);
    add_prior(sim_r, sim_o);
    sim_r.option("nodes", sim_o.nodes, "node count D");
    sim_r.option("replicates", sim_o.replicates, "networks to simulate");
    add_common(sim_r, sim_o);

    auto* fit_cmd = app.add_subcommand("fit", "fit an MMSBM by collapsed Gibbs sampling");
    Registry fit_r(fit_cmd);
    add_seed(fit_r, fit_o);
    fit_r.option("network", fit_o.network, "edge list (1-based) or dense .csv");
    fit_r.option("nodes", fit_o.nodes, "node count for edge lists (default: largest id)");
    add_prior(fit_r, fit_o);
    add_fit(fit_r, fit_o);
    add_common(fit_r, fit_o);

    auto* test = app.add_subcommand("test", "run the exact goodness-of-fit test on a network");
    Registry test_r(test);
    add_seed(test_r, test_o);
    test_r.option("network", test_o.network, "edge list (1-based) or dense .csv");
    test_r.option("nodes", test_o.nodes, "node count for edge lists (default: largest id)");
    add_prior(test_r, test_o);
    add_fit(test_r, test_o);
    add_test(test_r, test_o);
    add_common(test_r, test_o);

    auto* exp = app.add_subcommand("experiment", "size and power study over simulated networks");
    Registry exp_r(exp);
    add_seed(exp_r, exp_o);
    std::string designs = "named design or 'custom':";
    for (const auto& n : experiment_preset_names()) designs += " " + n;
    exp_r.option("design", exp_o.design, designs);
    exp_r.option("replicates", exp_o.replicates, "simulated networks (default: design's)");
    exp_r.option("nodes", exp_o.nodes, "node count D");
    exp_r.option("true-k", exp_o.true_k, "blocks of the generating model");
    add_prior(exp_r, exp_o);
    add_fit(exp_r, exp_o);
    add_test(exp_r, exp_o);
    exp_r.option("m-values", exp_o.m_values, "m values tabulated in rejection.csv")->delimiter(',');
    add_common(exp_r, exp_o);

    auto* samp = app.add_subcommand("sampson", "test the bundled Sampson monastery network for several K");
    Registry samp_r(samp);
    add_seed(samp_r, samp_o);
    add_prior(samp_r, samp_o);
    samp_r.option("k-values", samp_o.k_values, "block counts to test")->delimiter(',');
    add_fit(samp_r, samp_o);
    add_test(samp_r, samp_o);
    add_common(samp_r, samp_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            sim_r.apply_config(sim_o.config);
            return cmd_simulate(sim_o);
        }
        if (fit_cmd->parsed()) {
            fit_r.apply_config(fit_o.config);
            return cmd_fit(fit_o);
        }
        if (test->parsed()) {
            test_r.apply_config(test_o.config);
            return cmd_test(test_o, test_r);
        }
        if (exp->parsed()) {
            exp_r.apply_config(exp_o.config);
            return cmd_experiment(exp_o, exp_r);
        }
        if (samp->parsed()) {
            samp_r.apply_config(samp_o.config);
            return cmd_sampson(samp_o, samp_r);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
