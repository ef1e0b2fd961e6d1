#include "expertgame/types.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace expertgame {

namespace {

template <typename Array>
int fill_checked(Array& dst, std::span<const double> src, int lo, int hi,
                 const char* what) {
  const int n = static_cast<int>(src.size());
  if (n < lo || n > hi) {
    std::ostringstream os;
    os << what << ": expected between " << lo << " and " << hi
       << " coordinates, got " << n;
    throw std::invalid_argument(os.str());
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(src[i]))
      throw std::invalid_argument(std::string(what) +
                                  ": non-finite coordinate");
    dst[static_cast<std::size_t>(i)] = src[i];
  }
  return n;
}

}  // namespace

RegretState::RegretState(std::initializer_list<double> values)
    : RegretState(std::span<const double>(values.begin(), values.size())) {}

RegretState::RegretState(std::span<const double> values)
    : n_(fill_checked(x_, values, 2, kMaxExperts, "RegretState")) {}

RegretState RegretState::shifted(int i, double delta) const {
  RegretState out = *this;
  out.x_[static_cast<std::size_t>(i)] += delta;
  if (!std::isfinite(out.x_[i]))
    throw std::invalid_argument("RegretState: non-finite coordinate");
  return out;
}

RegretState RegretState::translated(double lambda) const {
  RegretState out = *this;
  for (int i = 0; i < n_; ++i) out.x_[i] += lambda;
  return out;
}

GapVector::GapVector(std::initializer_list<double> values)
    : GapVector(std::span<const double>(values.begin(), values.size())) {}

GapVector::GapVector(std::span<const double> values)
    : n_(fill_checked(y_, values, 1, kMaxExperts - 1, "GapVector")) {
  for (int i = 0; i < n_; ++i)
    if (y_[i] < 0.0)
      throw std::invalid_argument("GapVector: negative gap");
}

ExpertSubset::ExpertSubset(std::uint32_t mask, int n) : mask_(mask), n_(n) {
  if (n < 1 || n > kMaxExperts)
    throw std::invalid_argument("ExpertSubset: universe size out of range");
  if ((mask >> n) != 0u)
    throw std::invalid_argument("ExpertSubset: bits above universe size");
}

ExpertSubset ExpertSubset::of(std::initializer_list<int> zero_based, int n) {
  std::uint32_t m = 0;
  for (int i : zero_based) {
    if (i < 0 || i >= n)
      throw std::invalid_argument("ExpertSubset: member out of range");
    m |= 1u << i;
  }
  return {m, n};
}

int ExpertSubset::size() const noexcept { return std::popcount(mask_); }

Vec4 ExpertSubset::indicator() const noexcept {
  Vec4 e{};
  for (int i = 0; i < n_; ++i) e[i] = contains(i) ? 1.0 : 0.0;
  return e;
}

std::string ExpertSubset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < n_; ++i) {
    if (!contains(i)) continue;
    if (!first) s += ',';
    s += std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

StoppingParam::StoppingParam(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("StoppingParam: delta must lie in (0, 1]");
}

}  // namespace expertgame
