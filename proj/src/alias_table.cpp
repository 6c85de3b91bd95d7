#include "cgw/alias_table.hpp"

#include <numeric>

#include "cgw/error.hpp"

namespace cgw {

AliasTable::AliasTable(std::span<const double> weights)
    : threshold_(weights.size(), 1.0), alias_(weights.size()) {
  const std::size_t n = weights.size();
  if (n == 0) throw Error(ErrorCode::InvalidInput, "alias table needs at least one weight");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::NotNormalized, "alias table weights sum to zero");

  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) throw Error(ErrorCode::NegativeMass, "negative alias weight");
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    alias_[i] = i;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    threshold_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::size_t i : small) threshold_[i] = 1.0;
  for (std::size_t i : large) threshold_[i] = 1.0;
}

std::size_t AliasTable::sample(Rng& rng) const {
  const auto column = static_cast<std::size_t>(uniform_below(rng, threshold_.size()));
  if (threshold_[column] >= 1.0) return column;
  return uniform01(rng) < threshold_[column] ? column : alias_[column];
}

}  // namespace cgw
