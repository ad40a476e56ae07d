#include "mmgof/design.hpp"

#include "mmgof/error.hpp"

namespace mmgof {

std::vector<std::vector<std::uint32_t>> DesignMatrix::class_members() const {
    std::vector<std::vector<std::uint32_t>> members(blocks * blocks);
    for (std::size_t d = 0; d < dyads(); ++d) members[dyad_class[d]].push_back(static_cast<std::uint32_t>(d));
    return members;
}

DenseMatrix DesignMatrix::dense() const {
    DenseMatrix a(rows(), std::vector<std::int64_t>(dyads(), 0));
    for (std::size_t d = 0; d < dyads(); ++d) {
        a[sender(d)][d] = 1;
        a[blocks + receiver(d)][d] = 1;
    }
    return a;
}

DesignMatrix build_design(const MembershipRealization& real, std::size_t blocks) {
    if (blocks == 0) fail(ErrorKind::Domain, "block count must be positive");
    const auto r = dyad_count(real.nodes);
    if (real.send.size() != r || real.recv.size() != r) fail(ErrorKind::Shape, "realization length mismatch");
    DesignMatrix design;
    design.nodes = real.nodes;
    design.blocks = blocks;
    design.dyad_class.resize(r);
    for (std::size_t d = 0; d < r; ++d) {
        if (real.send[d] >= blocks || real.recv[d] >= blocks)
            fail(ErrorKind::Domain, "block out of range at dyad " + std::to_string(d));
        design.dyad_class[d] = static_cast<std::uint32_t>(real.send[d] * blocks + real.recv[d]);
    }
    return design;
}

SuffStat sufficient_statistic(const DesignMatrix& design, std::span<const std::uint32_t> table) {
    if (table.size() != design.dyads())
        fail(ErrorKind::Shape, "table has " + std::to_string(table.size()) + " cells, design has " +
                                   std::to_string(design.dyads()) + " dyads");
    SuffStat s{std::vector<std::int64_t>(design.blocks, 0), std::vector<std::int64_t>(design.blocks, 0)};
    for (std::size_t d = 0; d < table.size(); ++d) {
        s.sender[design.sender(d)] += table[d];
        s.receiver[design.receiver(d)] += table[d];
    }
    return s;
}

std::vector<std::int64_t> multiply(const DenseMatrix& a, std::span<const std::int64_t> v) {
    std::vector<std::int64_t> out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != v.size()) fail(ErrorKind::Shape, "matrix-vector size mismatch");
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
    }
    return out;
}

std::string emit_design_csv(const DesignMatrix& design) {
    std::string out = "row";
    for (std::size_t d = 0; d < design.dyads(); ++d) {
        const auto dy = dyad_at(design.nodes, d);
        out += ",p" + std::to_string(dy.from + 1) + "_" + std::to_string(dy.to + 1);
    }
    out += '\n';
    const auto a = design.dense();
    for (std::size_t i = 0; i < a.size(); ++i) {
        out += (i < design.blocks ? "s" : "r") + std::to_string(i % design.blocks + 1);
        for (auto v : a[i]) out += ',' + std::to_string(v);
        out += '\n';
    }
    return out;
}

}  // namespace mmgof
