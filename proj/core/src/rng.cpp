#include "zest/rng.hpp"

namespace zest {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kSubstreamSalt = 0xd1b54a32d192ed03ull;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  RngStream child(0);
  child.key_ = mix64(key_ ^ mix64((index + 1) * kSubstreamSalt));
  return child;
}

RngStream::result_type RngStream::operator()() {
  ++counter_;
  return mix64(key_ ^ mix64(counter_ * kGolden));
}

double RngStream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(*this); }

}  // namespace zest
