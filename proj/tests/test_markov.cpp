#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "mmgof/error.hpp"
#include "mmgof/markov.hpp"

using namespace mmgof;
using boost::multiprecision::cpp_int;

namespace {

DesignMatrix design_from_classes(std::size_t nodes, std::size_t blocks, std::vector<std::uint32_t> classes) {
    DesignMatrix d;
    d.nodes = nodes;
    d.blocks = blocks;
    d.dyad_class = std::move(classes);
    REQUIRE(d.dyad_class.size() == dyad_count(nodes));
    return d;
}

DesignMatrix random_design(std::size_t d, std::size_t k, RngStream& rng) {
    std::vector<std::uint32_t> classes(dyad_count(d));
    for (auto& c : classes) c = static_cast<std::uint32_t>(rng.uniform_index(k * k));
    return design_from_classes(d, k, std::move(classes));
}

Table random_binary(std::size_t r, RngStream& rng) {
    Table t(r);
    for (auto& v : t) v = rng.uniform_index(2);
    return t;
}

// Fiber size by a different route than enumerate_fiber: enumerate the K x K
// class-total tables with the right margins (zero on empty classes), then
// count the ways to spread each class total over its dyads,
// C(n + c - 1, c - 1).
double fiber_size_oracle(const DesignMatrix& design, const Table& u) {
    const auto kk = design.blocks;
    std::vector<std::size_t> size(kk * kk, 0);
    for (auto c : design.dyad_class) ++size[c];
    const auto stat = sufficient_statistic(design, u);
    std::vector<std::int64_t> rows = stat.sender, cols = stat.receiver;
    auto choose = [](std::int64_t n, std::int64_t k) {
        double v = 1.0;
        for (std::int64_t i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
        return v;
    };
    std::function<double(std::size_t)> rec = [&](std::size_t cell) -> double {
        if (cell == kk * kk) {
            for (auto c : cols)
                if (c != 0) return 0.0;
            return 1.0;
        }
        const auto k = cell / kk, l = cell % kk;
        if (l == kk - 1) {
            // Last cell in the row takes the remainder.
            const auto n = rows[k];
            if (n > cols[l] || (size[cell] == 0 && n > 0)) return 0.0;
            rows[k] -= n;
            cols[l] -= n;
            const double ways = size[cell] ? choose(n + static_cast<std::int64_t>(size[cell]) - 1, n) : 1.0;
            const double rest = rec(cell + 1);
            rows[k] += n;
            cols[l] += n;
            return ways * rest;
        }
        double total = 0.0;
        const auto cap = size[cell] ? std::min(rows[k], cols[l]) : 0;
        for (std::int64_t n = 0; n <= cap; ++n) {
            rows[k] -= n;
            cols[l] -= n;
            total += (size[cell] ? choose(n + static_cast<std::int64_t>(size[cell]) - 1, n) : 1.0) * rec(cell + 1);
            rows[k] += n;
            cols[l] += n;
        }
        return total;
    };
    return rec(0);
}

// Rank of the bipartite class graph's incidence structure: used vertices
// minus connected components.
std::size_t design_rank(const DesignMatrix& design) {
    const auto kk = design.blocks;
    std::vector<std::size_t> parent(2 * kk);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<bool> used(2 * kk, false);
    for (auto c : design.dyad_class) {
        const auto a = c / kk, b = kk + c % kk;
        used[a] = used[b] = true;
        parent[find(a)] = find(b);
    }
    std::size_t vertices = 0, components = 0;
    for (std::size_t v = 0; v < 2 * kk; ++v) {
        if (!used[v]) continue;
        ++vertices;
        if (find(v) == v) ++components;
    }
    return vertices - components;
}

// The monomial map: variable j goes to prod_rows t_row^{A[row][j]}.
cpp_int evaluate(const std::vector<std::int32_t>& exponents, const DenseMatrix& a, const std::vector<int>& t) {
    cpp_int value = 1;
    for (std::size_t j = 0; j < exponents.size(); ++j) {
        cpp_int column = 1;
        for (std::size_t row = 0; row < a.size(); ++row)
            for (std::int64_t e = 0; e < a[row][j]; ++e) column *= t[row];
        for (std::int32_t e = 0; e < exponents[j]; ++e) value *= column;
    }
    return value;
}

bool vanishes(const Binomial& b, const DenseMatrix& a, const std::vector<int>& t) {
    return evaluate(b.plus, a, t) == evaluate(b.minus, a, t);
}

std::vector<Binomial> to_binomials(const MarkovBasis& basis) {
    std::vector<Binomial> out;
    for (const auto& m : basis.moves) out.push_back(Binomial::from_move(m, basis.design.dyads()));
    return out;
}

bool in_kernel(const DesignMatrix& design, std::span<const std::int64_t> v) {
    for (auto x : multiply(design.dense(), v))
        if (x != 0) return false;
    return true;
}

// A realization of K = 3 on D = 3 whose six dyads occupy the six
// off-diagonal classes: the class graph is a single 6-cycle.
DesignMatrix hexagon_design() {
    // dyads (1,2),(1,3),(2,1),(2,3),(3,1),(3,2); classes k*3+l.
    // Cycle s0-r1-s2-r0-s1-r2-s0.
    return design_from_classes(3, 3, {0 * 3 + 1, 2 * 3 + 1, 2 * 3 + 0, 1 * 3 + 0, 1 * 3 + 2, 0 * 3 + 2});
}

}  // namespace

TEST_CASE("first two-node example has an empty basis and a singleton fiber") {
    // Classes (1,1) and (1,2), one dyad each.
    const auto design = design_from_classes(2, 2, {0, 1});
    const auto basis = structural_basis(design);
    CHECK(basis.moves.empty());
    CHECK(kernel_lattice_basis(design.dense()).empty());
    CHECK(toric_generators(design.dense()).empty());
    const Table u{1, 1};
    CHECK(enumerate_fiber(design, u) == std::vector<Table>{u});
    CHECK(verify_connectivity(basis, u));
}

TEST_CASE("one block on three nodes gives five star moves") {
    const auto design = design_from_classes(3, 1, std::vector<std::uint32_t>(6, 0));
    const auto basis = structural_basis(design);
    REQUIRE(basis.moves.size() == 5);
    CHECK(basis.intra_moves == 5);
    for (std::size_t m = 0; m < 5; ++m) {
        const auto v = basis.moves[m].dense(6);
        std::vector<std::int64_t> expected(6, 0);
        expected[0] = -1;
        expected[m + 1] = 1;
        CHECK(v == expected);
    }
}

TEST_CASE("two blocks with all four classes occupied") {
    // D = 3, classes (1,1),(1,2),(2,1),(2,2),(1,1),(2,2).
    const auto design = design_from_classes(3, 2, {0, 1, 2, 3, 0, 3});
    const auto basis = structural_basis(design);
    CHECK(basis.moves.size() - basis.intra_moves >= 1);
    CHECK(basis.moves.size() - basis.intra_moves == 1);
    for (const auto& m : basis.moves) CHECK(in_kernel(design, m.dense(6)));
    const Table u{1, 0, 0, 1, 1, 0};
    CHECK(verify_connectivity(basis, u));
    CHECK(chordless_class_cycles(design).size() == 1);
}

TEST_CASE("empty classes can force a degree-three move") {
    const auto design = hexagon_design();
    CHECK(chordless_class_cycles(design).size() == 1);
    const auto basis = structural_basis(design);
    REQUIRE(basis.moves.size() == 1);
    CHECK(basis.moves[0].entries.size() == 6);
    CHECK(in_kernel(design, basis.moves[0].dense(6)));

    // Alternating cells of the cycle: the fiber is this table and its
    // complement, joined only by the cubic move.
    Table u(6, 0);
    for (const auto& [d, c] : basis.moves[0].entries)
        if (c > 0) u[d] = 1;
    const auto fiber = enumerate_fiber(design, u);
    CHECK(fiber.size() == 2);
    CHECK(verify_connectivity(basis, u));
    const MarkovBasis no_inter{design, {}, 0};
    CHECK_FALSE(verify_connectivity(no_inter, u));
}

TEST_CASE("enumerate_fiber small cases") {
    const auto one_class = design_from_classes(2, 1, {0, 0});
    const Table u{1, 0};
    const auto fiber = enumerate_fiber(one_class, u);
    const std::set<Table> got(fiber.begin(), fiber.end());
    CHECK(got == std::set<Table>{{1, 0}, {0, 1}});
    CHECK(verify_connectivity(structural_basis(one_class), u));
}

TEST_CASE("enumerate_fiber respects its capacity guard") {
    const auto design = design_from_classes(5, 1, std::vector<std::uint32_t>(20, 0));
    Table u(20, 0);
    u[0] = 6;
    // C(25, 6) = 177100 tables.
    CHECK(enumerate_fiber(design, u, 200000).size() == 177100);
    CHECK_THROWS_AS((void)enumerate_fiber(design, u, 1000), Error);
}

TEST_CASE("fiber sizes agree with the class-total oracle") {
    auto rng = derive_stream(61, 0);
    for (int rep = 0; rep < 60; ++rep) {
        const auto d = 2 + rng.uniform_index(3);
        const auto k = 1 + rng.uniform_index(3);
        const auto design = random_design(d, k, rng);
        const auto u = random_binary(design.dyads(), rng);
        const auto fiber = enumerate_fiber(design, u);
        CHECK(static_cast<double>(fiber.size()) == fiber_size_oracle(design, u));
        const auto target = sufficient_statistic(design, u);
        const std::set<Table> distinct(fiber.begin(), fiber.end());
        CHECK(distinct.size() == fiber.size());
        for (const auto& v : fiber) CHECK(sufficient_statistic(design, v) == target);
    }
}

TEST_CASE("structural bases connect random fibers") {
    auto rng = derive_stream(62, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = 2 + rng.uniform_index(3);
        const auto k = 1 + rng.uniform_index(3);
        const auto design = random_design(d, k, rng);
        const auto u = random_binary(design.dyads(), rng);
        const auto basis = structural_basis(design);
        CHECK(verify_connectivity(basis, u));
        for (const auto& m : basis.moves) {
            CHECK(in_kernel(design, m.dense(design.dyads())));
            // Applying a move that stays nonnegative keeps the margins.
            auto v = u;
            bool ok = true;
            for (const auto& [dy, c] : m.entries) {
                const auto x = static_cast<std::int64_t>(v[dy]) + c;
                if (x < 0) ok = false;
                v[dy] = static_cast<std::uint32_t>(std::max<std::int64_t>(x, 0));
            }
            if (ok) CHECK(sufficient_statistic(design, v) == sufficient_statistic(design, u));
        }
    }
}

TEST_CASE("kernel lattice basis examples") {
    const auto one_class = design_from_classes(2, 1, {0, 0});
    const auto kernel = kernel_lattice_basis(one_class.dense());
    REQUIRE(kernel.size() == 1);
    CHECK((kernel[0] == std::vector<std::int64_t>{1, -1} || kernel[0] == std::vector<std::int64_t>{-1, 1}));

    DenseMatrix wide(2, std::vector<std::int64_t>(65, 1));
    CHECK_THROWS_AS((void)kernel_lattice_basis(wide), Error);
}

TEST_CASE("kernel lattice bases are annihilated and have full rank") {
    auto rng = derive_stream(63, 0);
    for (int rep = 0; rep < 40; ++rep) {
        const auto d = 2 + rng.uniform_index(4);
        const auto k = 1 + rng.uniform_index(4);
        const auto design = random_design(d, k, rng);
        const auto kernel = kernel_lattice_basis(design.dense());
        CHECK(kernel.size() == design.dyads() - design_rank(design));
        for (const auto& v : kernel) CHECK(in_kernel(design, v));
    }
}

TEST_CASE("toric generators of small designs") {
    const auto one_class = design_from_classes(2, 1, {0, 0});
    const auto gens = toric_generators(one_class.dense());
    REQUIRE(gens.size() == 1);
    const auto diff = gens[0].difference();
    CHECK((diff == std::vector<std::int64_t>{1, -1} || diff == std::vector<std::int64_t>{-1, 1}));

    // Four columns in four distinct classes over K = 2: the 2x2 independence
    // model, whose ideal is generated by p1 p4 - p2 p3.
    const DenseMatrix minor = {{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}};
    const auto g = toric_generators(minor);
    REQUIRE(g.size() == 1);
    const std::set<std::vector<std::int32_t>> sides{g[0].plus, g[0].minus};
    CHECK(sides == std::set<std::vector<std::int32_t>>{{1, 0, 0, 1}, {0, 1, 1, 0}});
    // Hand substitution: p1 -> s1 r1, p2 -> s1 r2, p3 -> s2 r1, p4 -> s2 r2.
    CHECK(vanishes(g[0], minor, {2, 3, 2, 3}));
    CHECK(vanishes(g[0], minor, {2, 3, 5, 7}));
}

TEST_CASE("toric generators vanish under the monomial map") {
    auto rng = derive_stream(64, 0);
    for (int rep = 0; rep < 25; ++rep) {
        const auto k = 1 + rng.uniform_index(3);
        const auto design = random_design(3, k, rng);
        const auto a = design.dense();
        std::vector<int> two_three(a.size()), primes(a.size());
        const int p[] = {2, 3, 5, 7, 11, 13};
        for (std::size_t row = 0; row < a.size(); ++row) {
            two_three[row] = row < k ? 2 : 3;
            primes[row] = p[row];
        }
        for (const auto& b : toric_generators(a)) {
            CHECK(vanishes(b, a, two_three));
            CHECK(vanishes(b, a, primes));
        }
    }
}

TEST_CASE("toric generators are guarded") {
    DenseMatrix big(2, std::vector<std::int64_t>(13, 1));
    CHECK_THROWS_AS((void)toric_generators(big), Error);
}

TEST_CASE("structural basis and saturation generate the same ideal") {
    auto rng = derive_stream(65, 0);
    for (int rep = 0; rep < 30; ++rep) {
        const auto k = 1 + rng.uniform_index(3);
        const auto design = random_design(3, k, rng);
        const auto structural = to_binomials(structural_basis(design));
        const auto toric = toric_generators(design.dense());
        CHECK(same_ideal(structural, toric));
    }
    const auto hexagon = hexagon_design();
    CHECK(same_ideal(to_binomials(structural_basis(hexagon)), toric_generators(hexagon.dense())));
    // Dropping the cubic leaves a strictly smaller ideal.
    CHECK_FALSE(same_ideal({}, toric_generators(hexagon.dense())));
}

TEST_CASE("groebner normal forms") {
    // Ideal of x0 - x1 and x1 - x2 in three variables: every monomial of a
    // given degree reduces to the same normal form.
    const std::vector<Binomial> gens{{{1, 0, 0}, {0, 1, 0}}, {{0, 1, 0}, {0, 0, 1}}};
    GroebnerBasis gb(gens, GrevlexOrder(3));
    CHECK(gb.normal_form({2, 0, 1}) == gb.normal_form({0, 3, 0}));
    CHECK(gb.normal_form({1, 0, 0}) != gb.normal_form({0, 2, 0}));
    CHECK(gb.reduces_to_zero(Binomial{{1, 0, 0}, {0, 0, 1}}));
}

TEST_CASE("grevlex order") {
    const GrevlexOrder order(3);
    const std::vector<std::int32_t> a{1, 1, 0}, b{1, 0, 1}, c{0, 0, 3}, d{2, 0, 0};
    CHECK(order.greater(a, b));  // equal degree, b has more of the last variable
    CHECK(order.greater(c, d));  // higher degree wins
    CHECK(order.greater(d, a));
    CHECK_FALSE(order.greater(a, a));
}

TEST_CASE("debug emission formats") {
    const auto design = design_from_classes(2, 1, {0, 0});
    CHECK(emit_basis(structural_basis(design)) == "-1*p1_2 +1*p2_1\n");
    const std::vector<Binomial> b{{{1, 0}, {0, 1}}};
    CHECK(emit_binomials(b) == "1 0 | 0 1\n");
}
