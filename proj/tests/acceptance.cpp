// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
// usage: acceptance <mmgof-cli> <scratch-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mmgof/experiment.hpp"
#include "mmgof/gof.hpp"

namespace fs = std::filesystem;
using namespace mmgof;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1fs", seconds);
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << detail << " [" << timing << "]"
              << std::endl;
    if (!pass) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Instance {
    DesignMatrix design;
    Table u;
};

Instance random_instance(RngStream& rng) {
    const auto d = 2 + rng.uniform_index(3);
    const auto k = 1 + rng.uniform_index(3);
    DesignMatrix design{d, k, std::vector<std::uint32_t>(dyad_count(d))};
    for (auto& c : design.dyad_class) c = static_cast<std::uint32_t>(rng.uniform_index(k * k));
    Table u(design.dyads());
    for (auto& v : u) v = rng.uniform_index(2);
    return {std::move(design), std::move(u)};
}

// 1. Connectivity, uniformity and p-value agreement against enumerated fibers.
void fiber_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = derive_stream(1001, 0);
    std::vector<Instance> instances;
    for (int i = 0; i < 50; ++i) instances.push_back(random_instance(rng));

    std::size_t connected = 0;
    for (const auto& inst : instances) connected += verify_connectivity(structural_basis(inst.design), inst.u);

    // Uniformity is judged where 5e4 draws can resolve a uniform law: fibers
    // of at most 200 tables, where the sampling noise alone is ~0.025 in TV.
    constexpr std::size_t kTvFiberLimit = 200;
    const WalkConfig tv_cfg{50000, 1000, 10, false};
    std::size_t tv_checked = 0, tv_ok = 0;
    double tv_max = 0.0;
    std::vector<std::size_t> pv_cases;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const auto fiber = enumerate_fiber(inst.design, inst.u);
        if (fiber.size() >= 2 && fiber.size() <= 5000 && pv_cases.size() < 20) pv_cases.push_back(i);
        if (fiber.size() > kTvFiberLimit) continue;
        std::map<Table, double> counts;
        for (const auto& t : fiber) counts[t] = 0.0;
        auto walk_rng = derive_stream(1002, i);
        bool escaped = false;
        walk_fiber(inst.u, structural_basis(inst.design), tv_cfg, walk_rng, [&](const Table& t) {
            auto it = counts.find(t);
            if (it == counts.end()) escaped = true;
            else it->second += 1.0;
        });
        double tv = 0.0;
        const double uniform = 1.0 / static_cast<double>(fiber.size());
        for (const auto& [t, c] : counts) tv += 0.5 * std::fabs(c / tv_cfg.samples - uniform);
        tv_max = std::max(tv_max, tv);
        ++tv_checked;
        tv_ok += !escaped && tv <= 0.05;
    }

    std::size_t pv_ok = 0, pv_total = 0;
    double pv_max = 0.0;
    for (auto i : pv_cases) {
        const auto& inst = instances[i];
        const auto fiber = enumerate_fiber(inst.design, inst.u);
        auto p_rng = derive_stream(1003, i);
        std::vector<double> p_hat(inst.u.size());
        for (auto& p : p_hat) p = 0.02 + 0.96 * p_rng.uniform01();
        const auto basis = structural_basis(inst.design);
        for (auto kind : kAllStats) {
            const double t_obs = statistic(kind, inst.u, p_hat);
            std::vector<double> all, sampled;
            for (const auto& v : fiber) all.push_back(statistic(kind, v, p_hat));
            auto walk_rng = derive_stream(1004, i);
            walk_fiber(inst.u, basis, {20000, 1000, 10, false}, walk_rng,
                       [&](const Table& t) { sampled.push_back(statistic(kind, t, p_hat)); });
            const double err = std::fabs(conditional_p_value(t_obs, sampled) - conditional_p_value(t_obs, all));
            pv_max = std::max(pv_max, err);
            ++pv_total;
            pv_ok += err <= 0.02;
        }
    }

    const double secs = since(t0);
    const bool pass = connected == instances.size() && tv_checked > 0 && tv_ok == tv_checked &&
                      pv_cases.size() == 20 && pv_ok == pv_total && secs < 120.0;
    report(1, pass,
           "fiber walk: connected " + std::to_string(connected) + "/50; TV<=0.05 on " + std::to_string(tv_ok) + "/" +
               std::to_string(tv_checked) + " fibers of <=" + std::to_string(kTvFiberLimit) + " tables (max " +
               fmt(tv_max) + "); p-values within 0.02 on " + std::to_string(pv_ok) + "/" + std::to_string(pv_total) +
               " (" + std::to_string(pv_cases.size()) + " cases x 4 stats, max " + fmt(pv_max) + ")",
           secs);
}

// 2. Structural basis versus the saturation engine on small realizations.
void toric_cross_validation() {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = derive_stream(2001, 0);
    std::size_t same = 0, total = 0;
    for (int rep = 0; rep < 30; ++rep) {
        const auto k = 1 + rng.uniform_index(3);
        const auto hyper = Hyperparams::with_beta_prior(k, 1.0, 1.0, 1.0, 1.0);
        // D = 3 is the largest network with at most nine dyads.
        const auto sim = simulate_network(hyper, 3, rng);
        const auto design = build_design(sim.truth, k);
        std::vector<Binomial> structural;
        const auto basis = structural_basis(design);
        for (const auto& m : basis.moves) structural.push_back(Binomial::from_move(m, design.dyads()));
        ++total;
        same += same_ideal(structural, toric_generators(design.dense()));
    }
    const double secs = since(t0);
    report(2, same == total && secs < 300.0,
           "toric ideal: structural basis equals saturation ideal on " + std::to_string(same) + "/" +
               std::to_string(total) + " realizations (D=3, K<=3)",
           secs);
}

// 3. Partial conjunction calibration and the N = 1 identity.
void pc_calibration() {
    const auto t0 = std::chrono::steady_clock::now();
    auto rng = derive_stream(3001, 0);
    const int trials = 10000;
    int rejections = 0;
    std::vector<double> p(100);
    for (int t = 0; t < trials; ++t) {
        for (auto& v : p) v = rng.uniform01();
        rejections += partial_conjunction(p, 1) <= 0.05;
    }
    const double freq = rejections / static_cast<double>(trials);
    double identity_err = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double p1 = i / 1000.0;
        const double single[] = {p1};
        identity_err = std::max(identity_err, std::fabs(partial_conjunction(single, 1) - p1));
    }
    report(3, std::fabs(freq - 0.05) <= 0.01 && identity_err <= 1e-10,
           "partial conjunction: rejection frequency " + fmt(freq, 4) + " (target 0.05 +- 0.01); N=1 max |pc - p1| " +
               fmt(identity_err * 1e10, 3) + "e-10",
           since(t0));
}

// 4. Chi-square CDF and log-gamma against closed forms.
void numeric_kernel() {
    const auto t0 = std::chrono::steady_clock::now();
    double cdf_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = 50.0 * i / 99.0;
        cdf_err = std::max(cdf_err, std::fabs(chi_square_cdf(x, 2) + std::expm1(-x / 2.0)));
    }
    // log((n - 1)!) accumulated in long double; the error is relative to
    // max(1, |log((n - 1)!)|) since the value is zero at n = 1, 2.
    double lg_err = 0.0;
    long double log_fact = 0.0L;
    for (int n = 1; n <= 171; ++n) {
        if (n > 1) log_fact += std::log(static_cast<long double>(n - 1));
        const double expect = static_cast<double>(log_fact);
        lg_err = std::max(lg_err, std::fabs(ln_gamma(n) - expect) / std::max(1.0, std::fabs(expect)));
    }
    report(4, cdf_err <= 1e-10 && lg_err <= 1e-10,
           "numeric kernel: max |chi2_cdf(x,2) - (1 - e^-x/2)| = " + fmt(cdf_err * 1e10, 4) +
               "e-10; max ln_gamma relative error = " + fmt(lg_err * 1e10, 4) + "e-10",
           since(t0));
}

std::size_t stat_index(const RejectionTable& t, StatKind kind) {
    return static_cast<std::size_t>(std::find(t.stats.begin(), t.stats.end(), kind) - t.stats.begin());
}

ExperimentResult study(const std::string& design, std::size_t replicates, std::uint64_t seed) {
    auto spec = experiment_preset(design);
    spec.replicates = replicates;
    spec.master_seed = seed;
    spec.threads = worker_count();
    return run_experiment(spec);
}

// 5. Size study on the K = 3, D = 20 null design.
void table1_reproduction() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = study("size-k3-d20", 50, 5001);
    const auto& t = result.table;
    const auto chi = stat_index(t, StatKind::ChiSquare), d2 = stat_index(t, StatKind::D2),
               dinf = stat_index(t, StatKind::DInf);
    const double dinf50 = t.frequency(dinf, 50), chi50 = t.frequency(chi, 50), d250 = t.frequency(d2, 50);
    const double chi10 = t.frequency(chi, 10), dinf1 = t.frequency(dinf, 1);
    const bool a = dinf50 > chi50 && chi50 >= d250;
    const bool b = std::fabs(chi10 - 0.12) <= 0.12;
    const bool c = dinf1 >= 0.90;
    report(5, a && b && c,
           std::string("size-k3-d20, 50 replicates: (a) ") + (a ? "holds" : "fails") + ": dinf " + fmt(dinf50, 2) +
               " > chi2 " + fmt(chi50, 2) + " >= d2 " + fmt(d250, 2) + " at m=50; (b) " + (b ? "holds" : "fails") +
               ": chi2 at m=10 = " + fmt(chi10, 2) + " (0.12 +- 0.12); (c) " + (c ? "holds" : "fails") +
               ": dinf at m=1 = " + fmt(dinf1, 2) + " (>= 0.90)",
           since(t0));
}

// 6. Power of chi2 at m = 1 against overfitting K = 8.
void power_direction() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto power = study("power-k8", 50, 6001);
    const auto size = study("size-k5-d20", 50, 6002);
    const double p = power.table.frequency(stat_index(power.table, StatKind::ChiSquare), 1);
    const double s = size.table.frequency(stat_index(size.table, StatKind::ChiSquare), 1);
    report(6, p > s,
           "chi2 at m=1: power (true K=5, fitted K=8) " + fmt(p, 2) + " vs size (K=5) " + fmt(s, 2) +
               " over 50 replicates",
           since(t0));
}

// 7. Sampson's monks with the demo priors.
void sampson_demo() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto y = load_sampson();
    TestConfig cfg;
    cfg.stats = {StatKind::ChiSquare};
    cfg.m_index = 50;
    cfg.threads = worker_count();
    std::size_t reject3 = 0, reject4 = 0;
    double max3 = 0.0, min3 = 1.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto r3 = exact_test(y, Hyperparams::with_beta_prior(3, 1.0, 1.0, 2.0, 1.0), cfg, seed);
        const auto r4 = exact_test(y, Hyperparams::with_beta_prior(4, 1.0, 1.0, 2.0, 1.0), cfg, seed);
        reject3 += r3.stats[0].reject;
        reject4 += r4.stats[0].reject;
        max3 = std::max(max3, r3.stats[0].pc_at_m);
        min3 = std::min(min3, r3.stats[0].pc_at_m);
    }
    report(7, reject3 > 5 && reject4 <= 5,
           "Sampson chi2 at m=50 over 10 seeds: K=3 rejected " + std::to_string(reject3) + "/10 (pc in [" +
               fmt(min3) + ", " + fmt(max3) + "]), K=4 rejected " + std::to_string(reject4) + "/10",
           since(t0));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool run(const std::string& cmd) {
    const std::string full = cmd + " > /dev/null 2>&1";
    return std::system(full.c_str()) == 0;
}

// Compares every .json and .csv file of two output directories byte for byte.
bool same_outputs(const fs::path& a, const fs::path& b, std::size_t& files) {
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto ext = entry.path().extension();
        if (ext != ".json" && ext != ".csv" && ext != ".edges") continue;
        const auto other = b / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) return false;
        ++count;
    }
    files += count;
    return count > 0;
}

// 8. Repeated commands reproduce their reports byte for byte.
void determinism(const std::string& cli, const fs::path& scratch) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
    const std::string exe = q(cli);
    std::size_t files = 0;
    bool ok = run(exe + " simulate --seed 8 --nodes 12 --k 3 --beta-diag 10 --replicates 2 --out-dir " +
                  q(scratch / "sim_a")) &&
              run(exe + " simulate --seed 8 --nodes 12 --k 3 --beta-diag 10 --replicates 2 --out-dir " +
                  q(scratch / "sim_b"));
    ok = ok && same_outputs(scratch / "sim_a", scratch / "sim_b", files);
    const auto net = scratch / "sim_a" / "network_001.edges";
    ok = ok && run(exe + " fit --seed 8 --nodes 12 --k 3 --network " + q(net) + " --out-dir " + q(scratch / "fit_a")) &&
         run(exe + " fit --seed 8 --nodes 12 --k 3 --network " + q(net) + " --out-dir " + q(scratch / "fit_b"));
    ok = ok && same_outputs(scratch / "fit_a", scratch / "fit_b", files);
    const std::string test = exe + " test --seed 8 --nodes 12 --k 3 --stat all --m-index 10 --network " + q(net);
    ok = ok && run(test + " --threads 1 --out-dir " + q(scratch / "test_1")) &&
         run(test + " --threads 4 --out-dir " + q(scratch / "test_4"));
    ok = ok && same_outputs(scratch / "test_1", scratch / "test_4", files);
    const std::string exp = exe + " experiment --design size-k3-d10 --replicates 6 --seed 8 --n-realizations 20 "
                                  "--m-fiber 50 --sweeps 220 --gibbs-burn-in 20";
    ok = ok && run(exp + " --threads 1 --out-dir " + q(scratch / "exp_1")) &&
         run(exp + " --threads 4 --out-dir " + q(scratch / "exp_4"));
    ok = ok && same_outputs(scratch / "exp_1", scratch / "exp_4", files);
    report(8, ok,
           "determinism: simulate, fit, test (threads 1 vs 4) and experiment (threads 1 vs 4) reproduce " +
               std::to_string(files) + " JSON/CSV/edge files byte for byte",
           since(t0));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <mmgof-cli> <scratch-dir>\n";
        return 2;
    }
    try {
        fiber_exactness();
        toric_cross_validation();
        pc_calibration();
        numeric_kernel();
        table1_reproduction();
        power_direction();
        sampson_demo();
        determinism(argv[1], argv[2]);
    } catch (const std::exception& e) {
        std::cout << "FAIL  acceptance aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
