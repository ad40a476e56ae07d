#pragma once

// Special functions, random streams and the distributions drawn from them.
//
// Everything stochastic in the library runs on RngStream, a counter-based
// Philox4x32-10 generator keyed by a 64-bit master seed. A stream is fully
// identified by (master_seed, stream_id): the id occupies the upper half of
// the 128-bit counter, so distinct ids never share a block of output. All
// variate generation is implemented here (no <random> distributions) so the
// bit streams are identical across standard libraries.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mmgof {

// log Gamma(x) for x > 0 (Lanczos, g = 7, nine coefficients).
[[nodiscard]] double ln_gamma(double x);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series expansion below x < a + 1, Lentz continued fraction above.
[[nodiscard]] double regularized_gamma_p(double a, double x);
[[nodiscard]] double regularized_gamma_q(double a, double x);

[[nodiscard]] double chi_square_cdf(double x, unsigned df);
// Upper tail 1 - F(x), evaluated directly so tiny tails keep full precision.
[[nodiscard]] double chi_square_sf(double x, unsigned df);

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// One Philox4x32 block with 10 rounds.
[[nodiscard]] PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    // Uniform on the open interval (0, 1), 53 bits.
    double uniform01() noexcept;
    // Uniform integer in [0, n), n > 0, without modulo bias.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;
    double normal() noexcept;

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    void refill() noexcept;

    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    unsigned available_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

[[nodiscard]] RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index) noexcept;

// Child master seed for index-th replicate of an experiment.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

// log of a Gamma(shape, 1) variate; stays finite for very small shapes.
[[nodiscard]] double sample_log_gamma(double shape, RngStream& rng);
[[nodiscard]] double sample_gamma(double shape, RngStream& rng);
[[nodiscard]] double sample_beta(double a, double b, RngStream& rng);
[[nodiscard]] std::vector<double> sample_dirichlet(std::span<const double> alpha, RngStream& rng);
[[nodiscard]] std::size_t sample_categorical(std::span<const double> weights, RngStream& rng);
[[nodiscard]] bool sample_bernoulli(double p, RngStream& rng);

}  // namespace mmgof
