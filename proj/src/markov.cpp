#include "mmgof/markov.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "mmgof/error.hpp"

namespace mmgof {

std::vector<std::int64_t> Move::dense(std::size_t dyads) const {
    std::vector<std::int64_t> v(dyads, 0);
    for (const auto& [d, c] : entries) v.at(d) = c;
    return v;
}

namespace {

Move make_move(std::vector<std::pair<std::uint32_t, std::int32_t>> entries) {
    std::sort(entries.begin(), entries.end());
    return Move{std::move(entries)};
}

}  // namespace

std::vector<std::vector<std::size_t>> chordless_class_cycles(const DesignMatrix& design) {
    const auto kk = design.blocks;
    const auto n = 2 * kk;  // vertices: sender blocks 0..K-1, receiver blocks K..2K-1
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (auto c : design.dyad_class) {
        const auto k = c / kk, l = kk + c % kk;
        adj[k][l] = adj[l][k] = true;
    }
    std::vector<std::vector<std::size_t>> cycles;
    std::vector<std::size_t> path;
    std::vector<bool> on_path(n, false);

    std::function<void(std::size_t)> extend = [&](std::size_t start) {
        const auto last = path.back();
        for (std::size_t w = 0; w < n; ++w) {
            if (!adj[last][w] || on_path[w]) continue;
            if (w < kk && w < start) continue;  // start is the smallest sender on the cycle
            bool chord = false;
            for (std::size_t i = 1; i + 1 < path.size(); ++i)
                if (adj[path[i]][w]) {
                    chord = true;
                    break;
                }
            if (chord) continue;
            if (path.size() >= 2 && adj[w][start]) {
                // w closes the cycle; each cycle is reported in one direction.
                if (path.size() >= 3 && path[1] < w) {
                    auto cycle = path;
                    cycle.push_back(w);
                    cycles.push_back(std::move(cycle));
                }
                continue;
            }
            path.push_back(w);
            on_path[w] = true;
            extend(start);
            on_path[w] = false;
            path.pop_back();
        }
    };
    for (std::size_t s = 0; s < kk; ++s) {
        path.assign(1, s);
        on_path[s] = true;
        extend(s);
        on_path[s] = false;
    }
    return cycles;
}

MarkovBasis structural_basis(const DesignMatrix& design) {
    MarkovBasis basis;
    basis.design = design;
    const auto members = design.class_members();
    for (const auto& cls : members)
        for (std::size_t i = 1; i < cls.size(); ++i) basis.moves.push_back(make_move({{cls[i], +1}, {cls[0], -1}}));
    basis.intra_moves = basis.moves.size();

    const auto kk = design.blocks;
    for (const auto& cycle : chordless_class_cycles(design)) {
        std::vector<std::pair<std::uint32_t, std::int32_t>> entries;
        const auto len = cycle.size();
        for (std::size_t t = 0; t < len; ++t) {
            const auto u = cycle[t], v = cycle[(t + 1) % len];
            const auto sender = u < kk ? u : v;
            const auto receiver = (u < kk ? v : u) - kk;
            const auto representative = members[sender * kk + receiver].front();
            entries.emplace_back(representative, t % 2 == 0 ? +1 : -1);
        }
        basis.moves.push_back(make_move(std::move(entries)));
    }
    return basis;
}

std::size_t TableHash::operator()(const Table& t) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto v : t) {
        h ^= v;
        h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
}

std::vector<Table> enumerate_fiber(const DesignMatrix& design, const Table& u, std::size_t cap) {
    const auto margins = sufficient_statistic(design, u);
    const auto r = design.dyads();
    const auto kk = design.blocks;
    std::vector<std::int64_t> rem_send = margins.sender, rem_recv = margins.receiver;
    std::vector<std::size_t> last_send(kk, 0), last_recv(kk, 0);
    for (std::size_t d = 0; d < r; ++d) {
        last_send[design.sender(d)] = d;
        last_recv[design.receiver(d)] = d;
    }
    std::vector<Table> fiber;
    Table current(r, 0);

    std::function<void(std::size_t)> descend = [&](std::size_t d) {
        if (d == r) {
            if (fiber.size() >= cap)
                fail(ErrorKind::Capacity, "fiber has more than " + std::to_string(cap) + " tables");
            fiber.push_back(current);
            return;
        }
        const auto k = design.sender(d), l = design.receiver(d);
        const auto hi = std::min(rem_send[k], rem_recv[l]);
        std::int64_t lo = 0;
        if (last_send[k] == d) lo = std::max(lo, rem_send[k]);
        if (last_recv[l] == d) lo = std::max(lo, rem_recv[l]);
        for (auto x = lo; x <= hi; ++x) {
            if (last_send[k] == d && x != rem_send[k]) continue;
            if (last_recv[l] == d && x != rem_recv[l]) continue;
            current[d] = static_cast<std::uint32_t>(x);
            rem_send[k] -= x;
            rem_recv[l] -= x;
            descend(d + 1);
            rem_send[k] += x;
            rem_recv[l] += x;
        }
        current[d] = 0;
    };
    descend(0);
    return fiber;
}

bool verify_connectivity(const MarkovBasis& basis, const Table& u, std::size_t cap) {
    const auto fiber = enumerate_fiber(basis.design, u, cap);
    std::unordered_map<Table, std::size_t, TableHash> index;
    for (std::size_t i = 0; i < fiber.size(); ++i) index.emplace(fiber[i], i);
    std::vector<bool> seen(fiber.size(), false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const auto& v = fiber[queue.front()];
        queue.pop_front();
        for (const auto& move : basis.moves) {
            for (int sign : {+1, -1}) {
                Table w = v;
                bool ok = true;
                for (const auto& [d, c] : move.entries) {
                    const auto value = static_cast<std::int64_t>(w[d]) + sign * c;
                    if (value < 0) {
                        ok = false;
                        break;
                    }
                    w[d] = static_cast<std::uint32_t>(value);
                }
                if (!ok) continue;
                const auto it = index.find(w);
                if (it == index.end()) return false;  // a move left the fiber
                if (!seen[it->second]) {
                    seen[it->second] = true;
                    ++reached;
                    queue.push_back(it->second);
                }
            }
        }
    }
    return reached == fiber.size();
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) fail(ErrorKind::Capacity, "integer overflow in lattice reduction");
    return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_sub_overflow(a, b, &out)) fail(ErrorKind::Capacity, "integer overflow in lattice reduction");
    return out;
}

}  // namespace

std::vector<std::vector<std::int64_t>> kernel_lattice_basis(const DenseMatrix& a) {
    if (a.empty()) fail(ErrorKind::Shape, "empty matrix");
    const auto k = a.size();
    const auto r = a.front().size();
    for (const auto& row : a)
        if (row.size() != r) fail(ErrorKind::Shape, "ragged matrix");
    if (r > 64) fail(ErrorKind::Capacity, "kernel oracle is limited to 64 columns");

    // Row-reduce [A^T | I] with unimodular operations; rows whose A^T part
    // vanishes carry a basis of the integer kernel.
    std::vector<std::vector<std::int64_t>> m(r, std::vector<std::int64_t>(k + r, 0));
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < k; ++i) m[j][i] = a[i][j];
        m[j][k + j] = 1;
    }
    std::size_t pivot = 0;
    for (std::size_t c = 0; c < k && pivot < r; ++c) {
        while (true) {
            std::size_t best = r;
            for (std::size_t i = pivot; i < r; ++i)
                if (m[i][c] != 0 && (best == r || std::llabs(m[i][c]) < std::llabs(m[best][c]))) best = i;
            if (best == r) break;
            std::swap(m[pivot], m[best]);
            bool clean = true;
            for (std::size_t i = pivot + 1; i < r; ++i) {
                if (m[i][c] == 0) continue;
                const auto q = m[i][c] / m[pivot][c];
                for (std::size_t t = 0; t < k + r; ++t) m[i][t] = checked_sub(m[i][t], checked_mul(q, m[pivot][t]));
                if (m[i][c] != 0) clean = false;
            }
            if (clean) {
                ++pivot;
                break;
            }
        }
    }
    std::vector<std::vector<std::int64_t>> kernel;
    for (std::size_t i = pivot; i < r; ++i) kernel.emplace_back(m[i].begin() + static_cast<std::ptrdiff_t>(k), m[i].end());
    return kernel;
}

Binomial Binomial::from_vector(std::span<const std::int64_t> v) {
    Binomial b{std::vector<std::int32_t>(v.size(), 0), std::vector<std::int32_t>(v.size(), 0)};
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > 0) b.plus[i] = static_cast<std::int32_t>(v[i]);
        if (v[i] < 0) b.minus[i] = static_cast<std::int32_t>(-v[i]);
    }
    return b;
}

Binomial Binomial::from_move(const Move& m, std::size_t dyads) { return from_vector(m.dense(dyads)); }

std::vector<std::int64_t> Binomial::difference() const {
    std::vector<std::int64_t> v(plus.size());
    for (std::size_t i = 0; i < plus.size(); ++i) v[i] = std::int64_t{plus[i]} - minus[i];
    return v;
}

GrevlexOrder::GrevlexOrder(std::size_t variables) : precedence_(variables) {
    std::iota(precedence_.begin(), precedence_.end(), std::size_t{0});
}

GrevlexOrder::GrevlexOrder(std::vector<std::size_t> precedence) : precedence_(std::move(precedence)) {}

bool GrevlexOrder::greater(std::span<const std::int32_t> a, std::span<const std::int32_t> b) const {
    const auto da = std::accumulate(a.begin(), a.end(), std::int64_t{0});
    const auto db = std::accumulate(b.begin(), b.end(), std::int64_t{0});
    if (da != db) return da > db;
    for (auto it = precedence_.rbegin(); it != precedence_.rend(); ++it)
        if (a[*it] != b[*it]) return a[*it] < b[*it];
    return false;
}

namespace {

bool divides(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

bool coprime(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0 && b[i] > 0) return false;
    return true;
}

// Orients f so that plus is the leading term; false if f is zero.
bool orient(Binomial& f, const GrevlexOrder& order) {
    if (f.plus == f.minus) return false;
    if (!order.greater(f.plus, f.minus)) std::swap(f.plus, f.minus);
    return true;
}

std::vector<std::int32_t> reduce_monomial(std::vector<std::int32_t> m, const std::vector<Binomial>& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : g) {
            if (!divides(e.plus, m)) continue;
            for (std::size_t i = 0; i < m.size(); ++i) m[i] += e.minus[i] - e.plus[i];
            changed = true;
        }
    }
    return m;
}

bool reduce_binomial(Binomial& f, const std::vector<Binomial>& g, const GrevlexOrder& order) {
    f.plus = reduce_monomial(std::move(f.plus), g);
    f.minus = reduce_monomial(std::move(f.minus), g);
    return orient(f, order);
}

}  // namespace

GroebnerBasis::GroebnerBasis(std::vector<Binomial> generators, GrevlexOrder order, GroebnerLimits limits)
    : order_(std::move(order)) {
    std::vector<Binomial> g;
    std::deque<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t processed = 0;
    auto insert = [&](Binomial f) {
        if (g.size() >= limits.max_elements) fail(ErrorKind::Capacity, "Groebner basis grew too large");
        for (std::size_t i = 0; i < g.size(); ++i) pairs.emplace_back(i, g.size());
        g.push_back(std::move(f));
    };
    for (auto& f : generators) {
        if (f.plus.size() != order_.variables() || f.minus.size() != order_.variables())
            fail(ErrorKind::Shape, "binomial has the wrong number of variables");
        if (reduce_binomial(f, g, order_)) insert(std::move(f));
    }
    while (!pairs.empty()) {
        if (++processed > limits.max_pairs) fail(ErrorKind::Capacity, "Buchberger step limit exceeded");
        const auto [i, j] = pairs.front();
        pairs.pop_front();
        const auto& fi = g[i];
        const auto& fj = g[j];
        if (coprime(fi.plus, fj.plus)) continue;
        Binomial s{fi.minus, fj.minus};
        for (std::size_t v = 0; v < s.plus.size(); ++v) {
            const auto lcm = std::max(fi.plus[v], fj.plus[v]);
            s.plus[v] += lcm - fi.plus[v];
            s.minus[v] += lcm - fj.plus[v];
        }
        if (reduce_binomial(s, g, order_)) insert(std::move(s));
    }

    // Reduce: drop redundant leading terms, then tail-reduce.
    std::vector<Binomial> minimal;
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool redundant = false;
        for (std::size_t j = 0; j < g.size() && !redundant; ++j) {
            if (i == j || !divides(g[j].plus, g[i].plus)) continue;
            redundant = g[j].plus != g[i].plus || j < i;
        }
        if (!redundant) minimal.push_back(g[i]);
    }
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<Binomial> others;
        for (std::size_t j = 0; j < minimal.size(); ++j)
            if (j != i) others.push_back(minimal[j]);
        minimal[i].minus = reduce_monomial(minimal[i].minus, others);
    }
    std::sort(minimal.begin(), minimal.end(), [&](const Binomial& a, const Binomial& b) {
        if (a.plus != b.plus) return order_.greater(b.plus, a.plus);
        return order_.greater(b.minus, a.minus);
    });
    elements_ = std::move(minimal);
}

std::vector<std::int32_t> GroebnerBasis::normal_form(std::vector<std::int32_t> monomial) const {
    return reduce_monomial(std::move(monomial), elements_);
}

bool GroebnerBasis::reduces_to_zero(const Binomial& f) const { return normal_form(f.plus) == normal_form(f.minus); }

std::vector<Binomial> toric_generators(const DenseMatrix& a) {
    if (a.empty()) fail(ErrorKind::Shape, "empty matrix");
    const auto n = a.front().size();
    if (n > 12) fail(ErrorKind::Capacity, "toric oracle is limited to 12 variables");
    std::vector<Binomial> current;
    for (const auto& v : kernel_lattice_basis(a)) {
        if (std::accumulate(v.begin(), v.end(), std::int64_t{0}) != 0)
            fail(ErrorKind::Domain, "toric oracle needs the all-ones vector in the row span of A");
        current.push_back(Binomial::from_vector(v));
    }
    if (current.empty()) return {};
    // I_A = I_L : (x_1 ... x_n)^inf, one variable at a time. With x_i last in
    // grevlex, dividing a homogeneous Groebner basis by the largest power of
    // x_i in each element yields generators of I : x_i^inf.
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> precedence;
        for (std::size_t v = 0; v < n; ++v)
            if (v != i) precedence.push_back(v);
        precedence.push_back(i);
        GroebnerBasis gb(std::move(current), GrevlexOrder(std::move(precedence)));
        current = gb.elements();
        for (auto& f : current) {
            const auto common = std::min(f.plus[i], f.minus[i]);
            f.plus[i] -= common;
            f.minus[i] -= common;
        }
    }
    return GroebnerBasis(std::move(current), GrevlexOrder(n)).elements();
}

bool same_ideal(const std::vector<Binomial>& f, const std::vector<Binomial>& g) {
    std::size_t n = 0;
    if (!f.empty()) n = f.front().plus.size();
    else if (!g.empty()) n = g.front().plus.size();
    const GroebnerBasis gf(f, GrevlexOrder(n));
    const GroebnerBasis gg(g, GrevlexOrder(n));
    return std::all_of(g.begin(), g.end(), [&](const Binomial& b) { return gf.reduces_to_zero(b); }) &&
           std::all_of(f.begin(), f.end(), [&](const Binomial& b) { return gg.reduces_to_zero(b); });
}

std::string emit_basis(const MarkovBasis& basis) {
    std::string out;
    for (const auto& move : basis.moves) {
        bool first = true;
        for (const auto& [d, c] : move.entries) {
            const auto dy = dyad_at(basis.design.nodes, d);
            if (!first) out += ' ';
            out += (c > 0 ? "+" : "-") + std::to_string(c > 0 ? c : -c) + "*p" + std::to_string(dy.from + 1) + "_" +
                   std::to_string(dy.to + 1);
            first = false;
        }
        out += '\n';
    }
    return out;
}

std::string emit_binomials(const std::vector<Binomial>& binomials) {
    std::string out;
    auto join = [](const std::vector<std::int32_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
        return s;
    };
    for (const auto& b : binomials) out += join(b.plus) + " | " + join(b.minus) + '\n';
    return out;
}

}  // namespace mmgof
