#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "rsub/matrix.hpp"

namespace rsub {

// Counter-based random stream (Philox4x32-10). A stream is addressed by
// (seed, stream_id); the same address always reproduces the same sequence,
// independent of platform or how other streams are consumed. Parallel work
// splits streams instead of sharing one.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Child stream with an id derived from this stream's id and `child`.
    RandomStream derive(std::uint64_t child) const;
    RandomStream derive(std::string_view name) const;

    std::uint64_t next_u64();
    // Uniform on [0, 1).
    double next_double();
    // Uniform on (0, 1]; safe as a log() argument.
    double next_double_open();
    std::uint64_t next_below(std::uint64_t bound);
    double next_normal();

    DenseMatrix normal_matrix(std::size_t rows, std::size_t cols, double mean,
                              double std);

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int buf_pos_ = 2;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// FNV-1a, used to derive stream ids from stage names.
std::uint64_t fnv1a64(std::string_view s);
// 64-bit finalizer mix (splitmix64 style).
std::uint64_t mix64(std::uint64_t x);

// n i.i.d. N(mean, std^2) draws as an n x 1 matrix. std may be 0.
DenseMatrix draw_normal(RandomStream& rng, std::size_t n, double mean, double std);

}  // namespace rsub
