#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cgw/rng.hpp"

namespace cgw {

/// Walker/Vose alias table over indices {0, ..., n-1}. Weights need not be
/// normalized but must be non-negative with a positive sum.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return threshold_.size(); }

 private:
  std::vector<double> threshold_;
  std::vector<std::size_t> alias_;
};

}  // namespace cgw
