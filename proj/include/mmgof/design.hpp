#pragma once

// The per-realization design matrix.
//
// A has 2K rows (sender indicators s_1..s_K, receiver indicators r_1..r_K)
// and one column per off-diagonal dyad. The column of a dyad in class (k, l)
// is e_k (+) e_l, so A is stored by class assignment; dense() materialises
// it for the algebraic oracles.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmgof/mmsbm.hpp"

namespace mmgof {

// A nonnegative integer table over the dyads (the observed network cast to
// counts, or any element of its fiber).
using Table = std::vector<std::uint32_t>;

using DenseMatrix = std::vector<std::vector<std::int64_t>>;

struct DesignMatrix {
    std::size_t nodes = 0;
    std::size_t blocks = 0;
    std::vector<std::uint32_t> dyad_class;  // k * blocks + l per dyad

    [[nodiscard]] std::size_t dyads() const noexcept { return dyad_class.size(); }
    [[nodiscard]] std::size_t rows() const noexcept { return 2 * blocks; }
    [[nodiscard]] std::size_t sender(std::size_t dyad) const { return dyad_class[dyad] / blocks; }
    [[nodiscard]] std::size_t receiver(std::size_t dyad) const { return dyad_class[dyad] % blocks; }

    // Dyads of each class in increasing index order, blocks * blocks lists.
    [[nodiscard]] std::vector<std::vector<std::uint32_t>> class_members() const;

    [[nodiscard]] DenseMatrix dense() const;
};

struct SuffStat {
    std::vector<std::int64_t> sender;
    std::vector<std::int64_t> receiver;

    friend bool operator==(const SuffStat&, const SuffStat&) = default;
};

[[nodiscard]] DesignMatrix build_design(const MembershipRealization& real, std::size_t blocks);

[[nodiscard]] SuffStat sufficient_statistic(const DesignMatrix& design, std::span<const std::uint32_t> table);

[[nodiscard]] std::vector<std::int64_t> multiply(const DenseMatrix& a, std::span<const std::int64_t> v);

// Dense A as CSV with a header naming the columns by 1-based dyad ("p12").
[[nodiscard]] std::string emit_design_csv(const DesignMatrix& design);

}  // namespace mmgof
