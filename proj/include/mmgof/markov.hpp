#pragma once

// Markov bases for MMSBM design matrices.
//
// Production path: structural_basis(), a closed-form basis built from the
// class structure of A. Columns of dyads in the same class are identical,
// so the toric ideal splits into linear binomials x_c - x_d inside each
// class plus the ideal of the distinct columns. The distinct columns form
// the edge set of a bipartite graph (sender blocks vs receiver blocks,
// one edge per nonempty class), whose toric ideal is generated by the
// binomials of its chordless even cycles. With every class occupied those
// are exactly the 2x2 swaps; empty classes can force longer cycles.
//
// Oracle path: kernel_lattice_basis() (Hermite reduction) feeding
// toric_generators() (saturation by Buchberger's algorithm on binomials),
// plus enumerate_fiber() for brute-force checks. All arithmetic is exact.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmgof/design.hpp"

namespace mmgof {

struct Move {
    // (dyad, coefficient), sorted by dyad, coefficients nonzero.
    std::vector<std::pair<std::uint32_t, std::int32_t>> entries;

    [[nodiscard]] std::vector<std::int64_t> dense(std::size_t dyads) const;

    friend bool operator==(const Move&, const Move&) = default;
};

struct MarkovBasis {
    DesignMatrix design;
    std::vector<Move> moves;
    std::size_t intra_moves = 0;  // the first intra_moves entries are within-class stars
};

[[nodiscard]] MarkovBasis structural_basis(const DesignMatrix& design);

// Cycles of the class graph that yield inter-class moves. Each cycle lists
// alternating sender and receiver blocks, starting with its smallest sender.
[[nodiscard]] std::vector<std::vector<std::size_t>> chordless_class_cycles(const DesignMatrix& design);

inline constexpr std::size_t kDefaultFiberCap = 1'000'000;

// Every v >= 0 with the same sufficient statistic as u, in lexicographic
// order. Throws Capacity once more than `cap` tables are found.
[[nodiscard]] std::vector<Table> enumerate_fiber(const DesignMatrix& design, const Table& u,
                                                 std::size_t cap = kDefaultFiberCap);

[[nodiscard]] bool verify_connectivity(const MarkovBasis& basis, const Table& u, std::size_t cap = kDefaultFiberCap);

struct TableHash {
    std::size_t operator()(const Table& t) const noexcept;
};

// ---------------------------------------------------------------------------
// Lattice and toric-ideal oracle.

// Lattice basis of ker_Z(A); guard: at most 64 columns.
[[nodiscard]] std::vector<std::vector<std::int64_t>> kernel_lattice_basis(const DenseMatrix& a);

// x^plus - x^minus over one variable per column of A.
struct Binomial {
    std::vector<std::int32_t> plus;
    std::vector<std::int32_t> minus;

    [[nodiscard]] static Binomial from_vector(std::span<const std::int64_t> v);
    [[nodiscard]] static Binomial from_move(const Move& m, std::size_t dyads);
    [[nodiscard]] std::vector<std::int64_t> difference() const;

    friend bool operator==(const Binomial&, const Binomial&) = default;
};

// Graded reverse lexicographic order. `precedence` lists variables from the
// largest to the smallest; the default is x_0 > x_1 > ... > x_{n-1}.
class GrevlexOrder {
public:
    explicit GrevlexOrder(std::size_t variables);
    explicit GrevlexOrder(std::vector<std::size_t> precedence);

    [[nodiscard]] bool greater(std::span<const std::int32_t> a, std::span<const std::int32_t> b) const;
    [[nodiscard]] std::size_t variables() const noexcept { return precedence_.size(); }

private:
    std::vector<std::size_t> precedence_;
};

struct GroebnerLimits {
    std::size_t max_elements = 20000;
    std::size_t max_pairs = 5'000'000;
};

class GroebnerBasis {
public:
    // Reduced Groebner basis of the ideal generated by `generators`.
    GroebnerBasis(std::vector<Binomial> generators, GrevlexOrder order, GroebnerLimits limits = {});

    // Elements oriented so that `plus` is the leading monomial.
    [[nodiscard]] const std::vector<Binomial>& elements() const noexcept { return elements_; }
    [[nodiscard]] const GrevlexOrder& order() const noexcept { return order_; }

    [[nodiscard]] std::vector<std::int32_t> normal_form(std::vector<std::int32_t> monomial) const;
    [[nodiscard]] bool reduces_to_zero(const Binomial& f) const;

private:
    GrevlexOrder order_;
    std::vector<Binomial> elements_;
};

// Generators of the toric ideal I_A (guard: at most 12 columns). Requires
// the all-ones vector in the row span of A, which makes I_A homogeneous.
[[nodiscard]] std::vector<Binomial> toric_generators(const DenseMatrix& a);

// True iff the two binomial sets generate the same ideal, tested by mutual
// reduction to zero modulo each other's Groebner basis.
[[nodiscard]] bool same_ideal(const std::vector<Binomial>& f, const std::vector<Binomial>& g);

// Debug emission: "+1*p1_2 -1*p2_1" per move, "plus|minus" exponent vectors
// per binomial; one item per line.
[[nodiscard]] std::string emit_basis(const MarkovBasis& basis);
[[nodiscard]] std::string emit_binomials(const std::vector<Binomial>& binomials);

}  // namespace mmgof
