#pragma once

// Counter-based random streams. Replication r of a run with master seed s
// draws from stream (s, r, attempt); the i-th 64-bit output of a stream is
// mix64(key + i * 0x9e3779b97f4a7c15), so draws depend only on the stream
// coordinates and never on scheduling.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace pinvlab {

using SeedPath = std::array<std::uint64_t, 3>;  // master seed, replication, attempt

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t master_seed, std::uint64_t replication = 0,
                        std::uint64_t attempt = 0)
      : path_{master_seed, replication, attempt},
        key_(mix64(mix64(mix64(master_seed) ^ (replication * kStreamStride)) ^
                   (attempt * kAttemptStride))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  /// Filled row by row.
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  const SeedPath& seed_path() const { return path_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamStride = 0xd1b54a32d192ed03ULL;
  static constexpr std::uint64_t kAttemptStride = 0x8cb92ba72f3d8dd7ULL;

  SeedPath path_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

}  // namespace pinvlab
