#pragma once

// Metropolis-Hastings walk on a fiber.
//
// Each step draws a move uniformly from +-basis and applies it unless a cell
// would go negative (or above one in bounded01 mode). The proposal is
// symmetric and boundary proposals are rejected in place, so the chain is
// reversible with the uniform law on the connected fiber as its stationary
// distribution.

#include <cstddef>
#include <functional>
#include <vector>

#include "mmgof/markov.hpp"
#include "mmgof/numeric.hpp"

namespace mmgof {

struct WalkConfig {
    std::size_t samples = 100;  // M
    std::size_t burn_in = 1000;
    std::size_t thin = 10;
    bool bounded01 = false;

    void validate() const;
};

// Applies one proposal in place; returns true when the move was accepted.
bool mh_step_in_place(Table& state, const MarkovBasis& basis, RngStream& rng, bool bounded01 = false);

[[nodiscard]] Table mh_step(Table state, const MarkovBasis& basis, RngStream& rng, bool bounded01 = false);

// Runs burn_in steps, then calls `visit` on the state after every thin-th
// step until cfg.samples states have been visited.
void walk_fiber(const Table& start, const MarkovBasis& basis, const WalkConfig& cfg, RngStream& rng,
                const std::function<void(const Table&)>& visit);

[[nodiscard]] std::vector<Table> sample_fiber(const Table& start, const MarkovBasis& basis, const WalkConfig& cfg,
                                              RngStream& rng);

}  // namespace mmgof
