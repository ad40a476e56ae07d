#include "mmgof/fiber.hpp"

#include "mmgof/error.hpp"

namespace mmgof {

void WalkConfig::validate() const {
    if (samples < 1) fail(ErrorKind::Configuration, "fiber sample size M must be at least 1");
    if (thin < 1) fail(ErrorKind::Configuration, "thin must be at least 1");
}

bool mh_step_in_place(Table& state, const MarkovBasis& basis, RngStream& rng, bool bounded01) {
    if (basis.moves.empty()) return false;
    const auto pick = rng.uniform_index(2 * basis.moves.size());
    const auto& move = basis.moves[pick / 2];
    const std::int64_t sign = (pick % 2 == 0) ? 1 : -1;
    for (const auto& [d, c] : move.entries) {
        const auto value = static_cast<std::int64_t>(state[d]) + sign * c;
        if (value < 0 || (bounded01 && value > 1)) return false;
    }
    for (const auto& [d, c] : move.entries) state[d] = static_cast<std::uint32_t>(state[d] + sign * c);
    return true;
}

Table mh_step(Table state, const MarkovBasis& basis, RngStream& rng, bool bounded01) {
    mh_step_in_place(state, basis, rng, bounded01);
    return state;
}

void walk_fiber(const Table& start, const MarkovBasis& basis, const WalkConfig& cfg, RngStream& rng,
                const std::function<void(const Table&)>& visit) {
    cfg.validate();
    if (start.size() != basis.design.dyads()) fail(ErrorKind::Shape, "table does not match the design");
    Table state = start;
    if (basis.moves.empty()) {
        for (std::size_t m = 0; m < cfg.samples; ++m) visit(state);
        return;
    }
    for (std::size_t t = 0; t < cfg.burn_in; ++t) mh_step_in_place(state, basis, rng, cfg.bounded01);
    for (std::size_t m = 0; m < cfg.samples; ++m) {
        for (std::size_t t = 0; t < cfg.thin; ++t) mh_step_in_place(state, basis, rng, cfg.bounded01);
        visit(state);
    }
}

std::vector<Table> sample_fiber(const Table& start, const MarkovBasis& basis, const WalkConfig& cfg,
                                RngStream& rng) {
    std::vector<Table> out;
    out.reserve(cfg.samples);
    walk_fiber(start, basis, cfg, rng, [&](const Table& t) { out.push_back(t); });
    return out;
}

}  // namespace mmgof
