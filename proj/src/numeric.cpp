#include "mmgof/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mmgof/error.hpp"

namespace mmgof {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

__extension__ using uint128 = unsigned __int128;

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

double gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Q(a, x) by the modified Lentz continued fraction.
double gamma_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - ln_gamma(a)) * h;
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0)) fail(ErrorKind::Domain, "incomplete gamma needs a > 0");
    if (!(x >= 0.0)) fail(ErrorKind::Domain, "incomplete gamma needs x >= 0, got " + std::to_string(x));
}

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

double ln_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::Domain, "ln_gamma needs x > 0");
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - ln_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double series = kLanczosCoef[0];
    for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) series += kLanczosCoef[i] / (z + static_cast<double>(i));
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

double regularized_gamma_p(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::clamp(gamma_series(a, x), 0.0, 1.0);
    return std::clamp(1.0 - gamma_continued_fraction(a, x), 0.0, 1.0);
}

double regularized_gamma_q(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return std::clamp(1.0 - gamma_series(a, x), 0.0, 1.0);
    return std::clamp(gamma_continued_fraction(a, x), 0.0, 1.0);
}

double chi_square_cdf(double x, unsigned df) {
    if (df == 0) fail(ErrorKind::Domain, "chi-square needs df >= 1");
    if (!(x >= 0.0)) fail(ErrorKind::Domain, "chi-square CDF needs x >= 0");
    return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi_square_sf(double x, unsigned df) {
    if (df == 0) fail(ErrorKind::Domain, "chi-square needs df >= 1");
    if (!(x >= 0.0)) fail(ErrorKind::Domain, "chi-square survival needs x >= 0");
    if (std::isinf(x)) return 0.0;
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
    : master_seed_(master_seed), stream_id_(stream_id) {}

void RngStream::refill() noexcept {
    const PhiloxCounter ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                               static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const PhiloxKey key = {static_cast<std::uint32_t>(master_seed_), static_cast<std::uint32_t>(master_seed_ >> 32)};
    const auto out = philox4x32_10(ctr, key);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++block_;
    available_ = 2;
}

RngStream::result_type RngStream::operator()() noexcept {
    if (available_ == 0) refill();
    return buffer_[2 - available_--];
}

double RngStream::uniform01() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) noexcept {
    // Lemire's multiply-and-reject.
    auto m = static_cast<uint128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = -n % n;
        while (low < threshold) {
            m = static_cast<uint128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index) noexcept { return {master_seed, index}; }

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return splitmix64(master_seed ^ splitmix64(index ^ 0x6A09E667F3BCC909ull));
}

double sample_log_gamma(double shape, RngStream& rng) {
    if (!(shape > 0.0) || !std::isfinite(shape)) fail(ErrorKind::Domain, "gamma shape must be positive");
    // Marsaglia-Tsang; shapes below one are boosted by U^(1/shape).
    const double boosted = shape < 1.0 ? shape + 1.0 : shape;
    const double d = boosted - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    double log_value;
    while (true) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            log_value = std::log(d) + std::log(v);
            break;
        }
    }
    if (shape < 1.0) log_value += std::log(rng.uniform01()) / shape;
    return log_value;
}

double sample_gamma(double shape, RngStream& rng) { return std::exp(sample_log_gamma(shape, rng)); }

double sample_beta(double a, double b, RngStream& rng) {
    if (!(a > 0.0) || !(b > 0.0)) fail(ErrorKind::Domain, "beta shapes must be positive");
    const double lx = sample_log_gamma(a, rng);
    const double ly = sample_log_gamma(b, rng);
    // x / (x + y) = 1 / (1 + exp(ly - lx)), kept strictly inside (0, 1).
    const double value = 1.0 / (1.0 + std::exp(ly - lx));
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(value, lo, hi);
}

std::vector<double> sample_dirichlet(std::span<const double> alpha, RngStream& rng) {
    if (alpha.empty()) fail(ErrorKind::Domain, "dirichlet needs at least one component");
    std::vector<double> logs(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) logs[i] = sample_log_gamma(alpha[i], rng);
    const double top = *std::max_element(logs.begin(), logs.end());
    double total = 0.0;
    for (auto& v : logs) {
        v = std::exp(v - top);
        total += v;
    }
    for (auto& v : logs) v /= total;
    return logs;
}

std::size_t sample_categorical(std::span<const double> weights, RngStream& rng) {
    double total = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            fail(ErrorKind::Domain, "categorical weights must be finite and nonnegative");
        if (weights[i] > 0.0) last_positive = i;
        total += weights[i];
    }
    if (last_positive == weights.size()) fail(ErrorKind::Domain, "categorical weights are all zero");
    const double target = rng.uniform01() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cumulative += weights[i];
        if (target < cumulative && weights[i] > 0.0) return i;
    }
    return last_positive;
}

bool sample_bernoulli(double p, RngStream& rng) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::Domain, "bernoulli p must lie in [0, 1]");
    return rng.uniform01() < p;
}

}  // namespace mmgof
