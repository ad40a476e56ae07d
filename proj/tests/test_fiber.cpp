#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "mmgof/error.hpp"
#include "mmgof/fiber.hpp"

using namespace mmgof;

namespace {

DesignMatrix design_from_classes(std::size_t nodes, std::size_t blocks, std::vector<std::uint32_t> classes) {
    DesignMatrix d;
    d.nodes = nodes;
    d.blocks = blocks;
    d.dyad_class = std::move(classes);
    return d;
}

}  // namespace

TEST_CASE("walk config validation") {
    WalkConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.thin = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.thin = 1;
    cfg.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("an empty basis never moves") {
    const auto design = design_from_classes(2, 2, {0, 1});
    const auto basis = structural_basis(design);
    REQUIRE(basis.moves.empty());
    auto rng = derive_stream(71, 0);
    const Table u{1, 1};
    for (int i = 0; i < 10; ++i) CHECK(mh_step(u, basis, rng) == u);
    const auto samples = sample_fiber(u, basis, {5, 10, 2, false}, rng);
    CHECK(samples == std::vector<Table>(5, u));
}

TEST_CASE("boundary proposals are rejected") {
    const auto design = design_from_classes(2, 1, {0, 0});
    const auto basis = structural_basis(design);
    REQUIRE(basis.moves.size() == 1);
    // The single move is e_2 - e_1; from (1, 0) only its positive sign is
    // feasible.
    auto rng = derive_stream(72, 0);
    int moved = 0, stayed = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto next = mh_step(Table{1, 0}, basis, rng);
        if (next == Table{0, 1}) ++moved;
        else if (next == Table{1, 0}) ++stayed;
    }
    CHECK(moved + stayed == 1000);
    CHECK(moved > 400);
    CHECK(stayed > 400);
}

TEST_CASE("bounded mode keeps cells binary") {
    const auto design = design_from_classes(3, 1, std::vector<std::uint32_t>(6, 0));
    const auto basis = structural_basis(design);
    auto rng = derive_stream(73, 0);
    Table u{1, 1, 0, 0, 1, 0};
    for (int i = 0; i < 5000; ++i) {
        mh_step_in_place(u, basis, rng, true);
        for (auto x : u) REQUIRE(x <= 1);
    }
}

TEST_CASE("two-point fiber is visited uniformly") {
    const auto design = design_from_classes(2, 1, {0, 0});
    const auto basis = structural_basis(design);
    auto rng = derive_stream(74, 0);
    const auto samples = sample_fiber(Table{1, 0}, basis, {10000, 1000, 10, false}, rng);
    REQUIRE(samples.size() == 10000);
    double first = 0;
    for (const auto& t : samples) first += t == Table{1, 0};
    CHECK(std::fabs(first / 1e4 - 0.5) <= 0.02);
}

TEST_CASE("the walk never leaves the fiber and is deterministic") {
    auto rng = derive_stream(75, 0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::uint32_t> classes(12);
        for (auto& c : classes) c = static_cast<std::uint32_t>(rng.uniform_index(9));
        const auto design = design_from_classes(4, 3, classes);
        Table u(12);
        for (auto& v : u) v = rng.uniform_index(2);
        const auto basis = structural_basis(design);
        const auto target = sufficient_statistic(design, u);
        auto a = derive_stream(76, rep), b = derive_stream(76, rep);
        const WalkConfig cfg{50, 20, 3, false};
        const auto sa = sample_fiber(u, basis, cfg, a);
        const auto sb = sample_fiber(u, basis, cfg, b);
        CHECK(sa == sb);
        for (const auto& t : sa) CHECK(sufficient_statistic(design, t) == target);
    }
}

TEST_CASE("MH samples are uniform on an enumerated D=4, K=2 fiber") {
    // Pick the first random instance whose fiber is small enough for 5e4
    // samples to resolve a uniform law to well under 0.05 in TV.
    auto rng = derive_stream(77, 0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::uint32_t> classes(12);
        for (auto& c : classes) c = static_cast<std::uint32_t>(rng.uniform_index(4));
        const auto design = design_from_classes(4, 2, classes);
        Table u(12);
        for (auto& v : u) v = rng.uniform_index(2);
        const auto fiber = enumerate_fiber(design, u);
        if (fiber.size() < 20 || fiber.size() > 200) continue;

        const auto basis = structural_basis(design);
        std::map<Table, double> counts;
        for (const auto& t : fiber) counts[t] = 0.0;
        auto walk_rng = derive_stream(78, 0);
        const WalkConfig cfg{50000, 1000, 20, false};
        walk_fiber(u, basis, cfg, walk_rng, [&](const Table& t) {
            auto it = counts.find(t);
            REQUIRE(it != counts.end());
            it->second += 1.0;
        });
        double tv = 0.0;
        const double uniform = 1.0 / static_cast<double>(fiber.size());
        for (const auto& [t, c] : counts) tv += 0.5 * std::fabs(c / cfg.samples - uniform);
        CHECK(tv <= 0.05);
        return;
    }
    FAIL("no suitable instance found");
}
