#include "mmgof/mmsbm.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mmgof/error.hpp"

namespace mmgof {

Hyperparams Hyperparams::with_beta_prior(std::size_t blocks, double lambda, double a_all, double b_diag,
                                         double b_off) {
    Hyperparams h;
    h.blocks = blocks;
    h.lambda = lambda;
    h.a.assign(blocks * blocks, a_all);
    h.b.assign(blocks * blocks, b_off);
    for (std::size_t k = 0; k < blocks; ++k) h.b[k * blocks + k] = b_diag;
    h.validate();
    return h;
}

void Hyperparams::validate() const {
    if (blocks < 1) fail(ErrorKind::Domain, "block count must be at least 1");
    if (blocks > std::numeric_limits<std::uint16_t>::max()) fail(ErrorKind::Domain, "too many blocks");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::Domain, "lambda must be positive");
    if (a.size() != blocks * blocks || b.size() != blocks * blocks)
        fail(ErrorKind::Shape, "Beta shape matrices must be blocks x blocks");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] > 0.0) || !(b[i] > 0.0) || !std::isfinite(a[i]) || !std::isfinite(b[i]))
            fail(ErrorKind::Domain, "Beta shapes must be positive and finite");
}

GibbsState::GibbsState(const AdjacencyMatrix& y, Hyperparams hyper, MembershipRealization start)
    : y_(y), hyper_(std::move(hyper)), real_(std::move(start)) {
    hyper_.validate();
    const auto r = y_.dyads();
    if (real_.nodes != y_.nodes() || real_.send.size() != r || real_.recv.size() != r)
        fail(ErrorKind::Shape, "realization does not match the network");
    if (real_.blocks != hyper_.blocks) fail(ErrorKind::Shape, "realization block count mismatch");
    for (std::size_t d = 0; d < r; ++d)
        if (real_.send[d] >= hyper_.blocks || real_.recv[d] >= hyper_.blocks)
            fail(ErrorKind::Domain, "block index out of range at dyad " + std::to_string(d));
    const auto t = y_.dyad_table();
    table_.assign(t.begin(), t.end());
    const auto kk = hyper_.blocks * hyper_.blocks;
    theta_.assign(y_.nodes() * hyper_.blocks, 0);
    edges_.assign(kk, 0);
    pairs_.assign(kk, 0);
    weights_.assign(kk, 0.0);
    for (std::size_t d = 0; d < r; ++d) add(d, +1);
}

GibbsState GibbsState::random_start(const AdjacencyMatrix& y, Hyperparams hyper, RngStream& rng) {
    hyper.validate();
    MembershipRealization start;
    start.nodes = y.nodes();
    start.blocks = hyper.blocks;
    start.send.resize(y.dyads());
    start.recv.resize(y.dyads());
    for (std::size_t d = 0; d < y.dyads(); ++d) {
        start.send[d] = static_cast<std::uint16_t>(rng.uniform_index(hyper.blocks));
        start.recv[d] = static_cast<std::uint16_t>(rng.uniform_index(hyper.blocks));
    }
    return GibbsState(y, std::move(hyper), std::move(start));
}

void GibbsState::add(std::size_t dyad, int sign) {
    const auto [from, to] = dyad_at(y_.nodes(), dyad);
    const auto k = real_.send[dyad];
    const auto l = real_.recv[dyad];
    const auto kk = hyper_.blocks;
    theta_[from * kk + k] += sign;
    theta_[to * kk + l] += sign;
    pairs_[k * kk + l] += sign;
    if (table_[dyad]) edges_[k * kk + l] += sign;
}

double GibbsState::predictive(std::size_t k, std::size_t l) const {
    const double a = hyper_.a_at(k, l);
    const double b = hyper_.b_at(k, l);
    return (a + edge_count(k, l)) / (a + b + pair_count(k, l));
}

void GibbsState::sweep(RngStream& rng) {
    const auto kk = hyper_.blocks;
    if (kk == 1) return;
    const auto nodes = y_.nodes();
    const double lambda = hyper_.lambda;
    std::size_t dyad = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = 0; j < nodes; ++j) {
            if (i == j) continue;
            add(dyad, -1);
            const bool edge = table_[dyad] != 0;
            const auto* theta_i = &theta_[i * kk];
            const auto* theta_j = &theta_[j * kk];
            for (std::size_t k = 0; k < kk; ++k) {
                const double wk = theta_i[k] + lambda;
                for (std::size_t l = 0; l < kk; ++l) {
                    const auto c = k * kk + l;
                    const double a = hyper_.a[c];
                    const double b = hyper_.b[c];
                    const double e = edges_[c];
                    const double n = pairs_[c];
                    const double f = edge ? (a + e) / (a + b + n) : (b + n - e) / (a + b + n);
                    weights_[c] = wk * (theta_j[l] + lambda) * f;
                }
            }
            const auto pick = sample_categorical(weights_, rng);
            real_.send[dyad] = static_cast<std::uint16_t>(pick / kk);
            real_.recv[dyad] = static_cast<std::uint16_t>(pick % kk);
            add(dyad, +1);
            ++dyad;
        }
    }
}

bool GibbsState::counts_consistent() const {
    GibbsState fresh(y_, hyper_, real_);
    return fresh.theta_ == theta_ && fresh.edges_ == edges_ && fresh.pairs_ == pairs_;
}

GibbsState gibbs_sweep(GibbsState state, RngStream& rng) {
    state.sweep(rng);
    return state;
}

SimulatedNetwork simulate_network(const Hyperparams& hyper, std::size_t nodes, RngStream& rng) {
    hyper.validate();
    if (nodes < 2) fail(ErrorKind::Domain, "simulation needs at least 2 nodes");
    const auto kk = hyper.blocks;
    SimulatedNetwork sim{AdjacencyMatrix(nodes), {}, {}, {}};
    const std::vector<double> concentration(kk, hyper.lambda);
    sim.theta.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) sim.theta.push_back(sample_dirichlet(concentration, rng));
    sim.block_matrix.resize(kk * kk);
    for (std::size_t c = 0; c < kk * kk; ++c) sim.block_matrix[c] = sample_beta(hyper.a[c], hyper.b[c], rng);
    sim.truth.nodes = nodes;
    sim.truth.blocks = kk;
    sim.truth.send.resize(dyad_count(nodes));
    sim.truth.recv.resize(dyad_count(nodes));
    std::size_t dyad = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = 0; j < nodes; ++j) {
            if (i == j) continue;
            const auto k = sample_categorical(sim.theta[i], rng);
            const auto l = sample_categorical(sim.theta[j], rng);
            sim.truth.send[dyad] = static_cast<std::uint16_t>(k);
            sim.truth.recv[dyad] = static_cast<std::uint16_t>(l);
            if (sample_bernoulli(sim.block_matrix[k * kk + l], rng)) sim.network.set_edge(i, j);
            ++dyad;
        }
    }
    return sim;
}

PosteriorSummary fit(const AdjacencyMatrix& y, const Hyperparams& hyper, GibbsSchedule schedule,
                     std::size_t realizations, RngStream& rng) {
    if (schedule.burn_in > schedule.sweeps || schedule.sweeps - schedule.burn_in < realizations)
        fail(ErrorKind::Configuration, "sweeps - burn_in (" +
                                           std::to_string(schedule.sweeps - std::min(schedule.sweeps, schedule.burn_in)) +
                                           ") must be at least the number of realizations (" +
                                           std::to_string(realizations) + ")");
    if (realizations == 0) fail(ErrorKind::Configuration, "at least one realization is required");
    auto state = GibbsState::random_start(y, hyper, rng);
    const auto retained = schedule.sweeps - schedule.burn_in;
    const auto stride = retained / realizations;
    const auto r = y.dyads();

    PosteriorSummary summary;
    summary.nodes = y.nodes();
    summary.p_hat.assign(r, 0.0);
    summary.realizations.reserve(realizations);
    for (std::size_t t = 1; t <= schedule.sweeps; ++t) {
        state.sweep(rng);
        if (t <= schedule.burn_in) continue;
        const auto& real = state.realization();
        for (std::size_t d = 0; d < r; ++d) summary.p_hat[d] += state.predictive(real.send[d], real.recv[d]);
        const auto offset = t - schedule.burn_in;
        if (offset % stride == 0 && summary.realizations.size() < realizations) {
            summary.realizations.push_back(real);
            summary.realization_sweeps.push_back(t);
        }
    }
    for (auto& p : summary.p_hat) p /= static_cast<double>(retained);
    summary.draws_used = retained;
    return summary;
}

}  // namespace mmgof
