#include "cgw/rng.hpp"

#include "cgw/error.hpp"

namespace cgw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ZeroAtOrigin: return "ZeroAtOrigin";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotSupercritical: return "NotSupercritical";
    case ErrorCode::LevelTooSmall: return "LevelTooSmall";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::HardCap: return "HardCap";
    case ErrorCode::AllTruncated: return "AllTruncated";
    case ErrorCode::TooFewChildren: return "TooFewChildren";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::TooFewCategories: return "TooFewCategories";
    case ErrorCode::UnderpooledExpectation: return "UnderpooledExpectation";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
  }
  return "Unknown";
}

Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 uint128;

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  // Lemire's multiply-shift with rejection, exactly uniform.
  uint128 m = static_cast<uint128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<uint128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace cgw
