#pragma once

// Mixed membership stochastic block model: forward simulation and collapsed
// Gibbs inference.
//
// Every directed dyad (i, j) carries a sender block drawn from node i's
// membership vector and a receiver block drawn from node j's. Given the two
// blocks (k, l) the edge is Bernoulli(B[k][l]). Inference integrates out the
// membership vectors (Dirichlet) and the block matrix (Beta) and resamples
// the (sender, receiver) pair of each dyad jointly.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mmgof/netio.hpp"
#include "mmgof/numeric.hpp"

namespace mmgof {

struct Hyperparams {
    std::size_t blocks = 1;
    double lambda = 1.0;   // symmetric Dirichlet concentration
    std::vector<double> a;  // blocks x blocks, row-major Beta shapes
    std::vector<double> b;

    // a everywhere equal to `a_all`; b equal to `b_diag` on the diagonal and
    // `b_off` elsewhere.
    static Hyperparams with_beta_prior(std::size_t blocks, double lambda, double a_all, double b_diag, double b_off);

    [[nodiscard]] double a_at(std::size_t k, std::size_t l) const { return a[k * blocks + l]; }
    [[nodiscard]] double b_at(std::size_t k, std::size_t l) const { return b[k * blocks + l]; }

    void validate() const;
};

// One posterior draw of the block indicators, indexed by dyad (see netio).
struct MembershipRealization {
    std::size_t nodes = 0;
    std::size_t blocks = 0;
    std::vector<std::uint16_t> send;  // 0-based sender block per dyad
    std::vector<std::uint16_t> recv;  // 0-based receiver block per dyad

    friend bool operator==(const MembershipRealization&, const MembershipRealization&) = default;
};

class GibbsState {
public:
    GibbsState(const AdjacencyMatrix& y, Hyperparams hyper, MembershipRealization start);

    // Indicators drawn uniformly over blocks.
    static GibbsState random_start(const AdjacencyMatrix& y, Hyperparams hyper, RngStream& rng);

    [[nodiscard]] const MembershipRealization& realization() const noexcept { return real_; }
    [[nodiscard]] const Hyperparams& hyper() const noexcept { return hyper_; }
    [[nodiscard]] const AdjacencyMatrix& network() const noexcept { return y_; }

    // Indicators governed by node i's membership vector that equal block k.
    [[nodiscard]] std::uint32_t theta_count(std::size_t node, std::size_t block) const {
        return theta_[node * hyper_.blocks + block];
    }
    [[nodiscard]] std::uint32_t edge_count(std::size_t k, std::size_t l) const { return edges_[k * hyper_.blocks + l]; }
    [[nodiscard]] std::uint32_t pair_count(std::size_t k, std::size_t l) const { return pairs_[k * hyper_.blocks + l]; }
    [[nodiscard]] std::uint32_t nonedge_count(std::size_t k, std::size_t l) const {
        return pair_count(k, l) - edge_count(k, l);
    }

    // Beta posterior predictive edge probability of block pair (k, l).
    [[nodiscard]] double predictive(std::size_t k, std::size_t l) const;

    // One systematic scan over all dyads in index order.
    void sweep(RngStream& rng);

    // Recomputes every count from the realization and compares.
    [[nodiscard]] bool counts_consistent() const;

private:
    void add(std::size_t dyad, int sign);

    AdjacencyMatrix y_;
    Hyperparams hyper_;
    MembershipRealization real_;
    std::vector<std::uint8_t> table_;  // y over dyads
    std::vector<std::uint32_t> theta_;
    std::vector<std::uint32_t> edges_;
    std::vector<std::uint32_t> pairs_;
    std::vector<double> weights_;
};

[[nodiscard]] GibbsState gibbs_sweep(GibbsState state, RngStream& rng);

struct SimulatedNetwork {
    AdjacencyMatrix network;
    std::vector<std::vector<double>> theta;  // per node membership vector
    std::vector<double> block_matrix;        // blocks x blocks, row-major
    MembershipRealization truth;
};

[[nodiscard]] SimulatedNetwork simulate_network(const Hyperparams& hyper, std::size_t nodes, RngStream& rng);

struct GibbsSchedule {
    std::size_t sweeps = 1100;
    std::size_t burn_in = 100;
};

struct PosteriorSummary {
    std::size_t nodes = 0;
    std::vector<double> p_hat;  // posterior mean tie probability per dyad
    std::vector<MembershipRealization> realizations;
    std::vector<std::size_t> realization_sweeps;  // 1-based sweep of each kept draw
    std::size_t draws_used = 0;

    [[nodiscard]] double p_hat_at(std::size_t from, std::size_t to) const {
        return p_hat[dyad_index(nodes, from, to)];
    }
};

// Runs the chain for `schedule.sweeps` sweeps. The T = sweeps - burn_in
// retained sweeps all contribute to p_hat; `realizations` of them, evenly
// spaced with stride floor(T / realizations) and ending on a stride multiple,
// are kept as membership draws.
[[nodiscard]] PosteriorSummary fit(const AdjacencyMatrix& y, const Hyperparams& hyper, GibbsSchedule schedule,
                                   std::size_t realizations, RngStream& rng);

}  // namespace mmgof
