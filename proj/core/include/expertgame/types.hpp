#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace expertgame {

/// Largest number of experts handled anywhere in the library.
inline constexpr int kMaxExperts = 4;

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

/// Raised when an iterative numerical routine fails to converge or an
/// internal solve breaks down. Carries the last residual when one exists.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Differences x_i = G^i - G between each expert's gain and the player's.
/// Holds between 2 and 4 finite coordinates inline.
class RegretState {
 public:
  RegretState(std::initializer_list<double> values);
  explicit RegretState(std::span<const double> values);

  int size() const noexcept { return n_; }
  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  const double* begin() const noexcept { return x_.data(); }
  const double* end() const noexcept { return x_.data() + n_; }
  std::span<const double> values() const noexcept {
    return {x_.data(), static_cast<std::size_t>(n_)};
  }

  /// Returns a copy with `delta` added to coordinate i.
  RegretState shifted(int i, double delta) const;
  /// Returns a copy with `lambda` added to every coordinate.
  RegretState translated(double lambda) const;

  friend bool operator==(const RegretState& a, const RegretState& b) {
    if (a.n_ != b.n_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (a.x_[i] != b.x_[i]) return false;
    return true;
  }

 private:
  Vec4 x_{};
  int n_ = 0;
};

/// Coordinates sorted ascending together with the original index of each
/// sorted slot. Ties keep the lower original index first.
struct RankedState {
  Vec4 sorted{};
  std::array<int, 4> perm{};  // perm[k] = original index of sorted[k]
  int n = 0;
};

/// Nonnegative gaps between consecutive ranked coordinates, N-1 entries.
class GapVector {
 public:
  GapVector(std::initializer_list<double> values);
  explicit GapVector(std::span<const double> values);

  int size() const noexcept { return n_; }
  double operator[](int i) const { return y_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const noexcept {
    return {y_.data(), static_cast<std::size_t>(n_)};
  }

 private:
  std::array<double, 3> y_{};
  int n_ = 0;
};

/// A member of the power set of {0, ..., n-1}, stored as a bitmask.
/// Printing uses the 1-based expert labels.
class ExpertSubset {
 public:
  constexpr ExpertSubset() = default;
  ExpertSubset(std::uint32_t mask, int n);
  static ExpertSubset of(std::initializer_list<int> zero_based, int n);
  static ExpertSubset full(int n) { return {(1u << n) - 1u, n}; }
  static ExpertSubset empty(int n) { return {0u, n}; }

  std::uint32_t mask() const noexcept { return mask_; }
  int universe() const noexcept { return n_; }
  bool contains(int i) const noexcept { return (mask_ >> i) & 1u; }
  int size() const noexcept;
  ExpertSubset complement() const { return {~mask_ & ((1u << n_) - 1u), n_}; }
  /// e_J as a dense 0/1 vector of length kMaxExperts.
  Vec4 indicator() const noexcept;
  /// "{1,3}" with ascending 1-based labels.
  std::string to_string() const;

  friend bool operator==(ExpertSubset a, ExpertSubset b) {
    return a.mask_ == b.mask_ && a.n_ == b.n_;
  }
  friend bool operator<(ExpertSubset a, ExpertSubset b) {
    return a.mask_ < b.mask_;
  }

 private:
  std::uint32_t mask_ = 0;
  int n_ = 0;
};

/// Geometric stopping parameter, 0 < delta <= 1.
class StoppingParam {
 public:
  explicit StoppingParam(double delta);
  double value() const noexcept { return delta_; }

 private:
  double delta_;
};

}  // namespace expertgame
