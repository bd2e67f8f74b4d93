#include "rsub/rng.hpp"

#include <cmath>

#include "rsub/errors.hpp"

namespace rsub {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
}

std::array<std::uint32_t, 4> philox10(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t block) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    for (int i = 0; i < 10; ++i) philox_round(ctr, key);
    return ctr;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97f4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

RandomStream RandomStream::derive(std::uint64_t child) const {
    return RandomStream(seed_, mix64(stream_id_ * 0x9E3779B97f4A7C15ull + child + 1));
}

RandomStream RandomStream::derive(std::string_view name) const {
    return derive(fnv1a64(name));
}

void RandomStream::refill() {
    const auto words = philox10(seed_, stream_id_, block_++);
    buf_[0] = (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
    buf_[1] = (static_cast<std::uint64_t>(words[3]) << 32) | words[2];
    buf_pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
    if (buf_pos_ >= 2) refill();
    return buf_[buf_pos_++];
}

double RandomStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw UsageError("next_below: bound must be positive");
    // Rejection to stay unbiased.
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
}

double RandomStream::next_normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // Marsaglia polar method; avoids trig for cross-platform stability.
    while (true) {
        const double u = 2.0 * next_double() - 1.0;
        const double v = 2.0 * next_double() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            cached_normal_ = v * f;
            has_cached_normal_ = true;
            return u * f;
        }
    }
}

DenseMatrix RandomStream::normal_matrix(std::size_t rows, std::size_t cols,
                                        double mean, double std) {
    if (std < 0.0) throw DomainError("normal_matrix: std must be >= 0");
    DenseMatrix out(rows, cols);
    for (double& v : out.data()) v = mean + std * next_normal();
    out.require_finite("normal_matrix");
    return out;
}

DenseMatrix draw_normal(RandomStream& rng, std::size_t n, double mean, double std) {
    return rng.normal_matrix(n, 1, mean, std);
}

}  // namespace rsub
