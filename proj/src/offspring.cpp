#include "cgw/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>

#include "cgw/error.hpp"

namespace cgw {
namespace {

constexpr double kNormalizationTolerance = 1e-9;

std::vector<double> probabilities_of(std::span<const PairEntry> entries) {
  std::vector<double> weights;
  weights.reserve(entries.size());
  for (const auto& e : entries) weights.push_back(e.probability);
  return weights;
}

std::vector<double> positive_masses(std::span<const double> pmf, std::vector<int>& support) {
  std::vector<double> masses;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (pmf[k] > 0.0) {
      support.push_back(static_cast<int>(k));
      masses.push_back(pmf[k]);
    }
  }
  return masses;
}

// Splits a data line into whitespace-separated fields, dropping `#` comments.
std::vector<std::string> fields_of(const std::string& line) {
  const std::string content = line.substr(0, line.find('#'));
  std::istringstream in(content);
  std::vector<std::string> fields;
  for (std::string f; in >> f;) fields.push_back(f);
  return fields;
}

int parse_count(const std::string& text, int line_no) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 0 || value > 1'000'000)
    throw Error(ErrorCode::InvalidInput,
                "line " + std::to_string(line_no) + ": bad count '" + text + "'");
  return static_cast<int>(value);
}

double parse_mass(const std::string& text, int line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(value))
    throw Error(ErrorCode::InvalidInput,
                "line " + std::to_string(line_no) + ": bad probability '" + text + "'");
  return value;
}

}  // namespace

OffspringDistribution::OffspringDistribution(std::vector<double> pmf, std::optional<double> alpha)
    : pmf_(std::move(pmf)),
      alias_(positive_masses(pmf_, support_)),
      binomial2_alpha_(alpha) {}

OffspringDistribution OffspringDistribution::from_pmf(std::span<const PmfEntry> table) {
  if (table.empty()) throw Error(ErrorCode::InvalidInput, "empty pmf table");
  std::set<int> seen;
  double total = 0.0;
  int max_value = 0;
  for (const auto& [value, p] : table) {
    if (value < 0) throw Error(ErrorCode::InvalidInput, "negative offspring value");
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidInput, "non-finite probability");
    if (p < 0.0) throw Error(ErrorCode::NegativeMass, "probability of " + std::to_string(value));
    if (!seen.insert(value).second)
      throw Error(ErrorCode::InvalidInput, "duplicate value " + std::to_string(value));
    total += p;
    if (p > 0.0) max_value = std::max(max_value, value);
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance)
    throw Error(ErrorCode::NotNormalized, "masses sum to " + std::to_string(total));

  std::vector<double> pmf(static_cast<std::size_t>(max_value) + 1, 0.0);
  for (const auto& [value, p] : table) {
    if (p > 0.0) pmf[static_cast<std::size_t>(value)] = p / total;
  }
  if (!(pmf[0] > 0.0)) throw Error(ErrorCode::ZeroAtOrigin, "offspring law needs P(0) > 0");
  return OffspringDistribution(std::move(pmf), std::nullopt);
}

OffspringDistribution OffspringDistribution::parse(std::istream& in) {
  std::vector<PmfEntry> table;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto f = fields_of(line);
    if (f.empty()) continue;
    if (f.size() != 2)
      throw Error(ErrorCode::InvalidInput,
                  "line " + std::to_string(line_no) + ": expected `k p_k`");
    table.push_back({parse_count(f[0], line_no), parse_mass(f[1], line_no)});
  }
  return from_pmf(table);
}

OffspringDistribution OffspringDistribution::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  return parse(in);
}

double OffspringDistribution::probability(int k) const {
  if (k < 0 || k > max_value()) return 0.0;
  return pmf_[static_cast<std::size_t>(k)];
}

double OffspringDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 1; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
  return m;
}

int OffspringDistribution::sample(Rng& rng) const {
  return support_[alias_.sample(rng)];
}

PairedOffspring::PairedOffspring(std::vector<PairEntry> entries, std::optional<double> alpha)
    : entries_(std::move(entries)),
      alias_(probabilities_of(entries_)),
      binomial2_alpha_(alpha) {}

PairedOffspring PairedOffspring::from_table(std::vector<PairEntry> table) {
  std::set<std::pair<int, int>> seen;
  std::vector<PairEntry> kept;
  double total = 0.0;
  for (const auto& e : table) {
    if (e.advance < 0 || e.stay < 0)
      throw Error(ErrorCode::InvalidInput, "negative child count in pair law");
    if (!std::isfinite(e.probability)) throw Error(ErrorCode::InvalidInput, "non-finite mass");
    if (e.probability < 0.0) throw Error(ErrorCode::NegativeMass, "negative pair mass");
    if (!seen.insert({e.advance, e.stay}).second)
      throw Error(ErrorCode::InvalidInput, "duplicate pair in law");
    if (e.probability == 0.0) continue;
    if (e.advance + e.stay < 1)
      throw Error(ErrorCode::InvalidInput, "pair (0,0) has positive mass; need x + x' >= 1");
    total += e.probability;
    kept.push_back(e);
  }
  if (kept.empty() || std::abs(total - 1.0) > kNormalizationTolerance)
    throw Error(ErrorCode::NotNormalized, "pair masses sum to " + std::to_string(total));
  for (auto& e : kept) e.probability /= total;
  return PairedOffspring(std::move(kept), std::nullopt);
}

PairedOffspring PairedOffspring::parse(std::istream& in) {
  std::vector<PairEntry> table;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto f = fields_of(line);
    if (f.empty()) continue;
    if (f.size() != 3)
      throw Error(ErrorCode::InvalidInput,
                  "line " + std::to_string(line_no) + ": expected `x x' p`");
    table.push_back(
        {parse_count(f[0], line_no), parse_count(f[1], line_no), parse_mass(f[2], line_no)});
  }
  return from_table(std::move(table));
}

PairedOffspring PairedOffspring::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  return parse(in);
}

std::vector<double> PairedOffspring::marginal_pmf() const {
  int max_advance = 0;
  for (const auto& e : entries_) max_advance = std::max(max_advance, e.advance);
  std::vector<double> pmf(static_cast<std::size_t>(max_advance) + 1, 0.0);
  for (const auto& e : entries_) pmf[static_cast<std::size_t>(e.advance)] += e.probability;
  return pmf;
}

OffspringDistribution PairedOffspring::marginal() const {
  auto pmf = marginal_pmf();
  if (!(pmf[0] > 0.0)) throw Error(ErrorCode::ZeroAtOrigin, "advance law has no mass at 0");
  return OffspringDistribution(std::move(pmf), binomial2_alpha_);
}

double PairedOffspring::advance_mean() const {
  double m = 0.0;
  for (const auto& e : entries_) m += e.advance * e.probability;
  return m;
}

std::pair<int, int> PairedOffspring::sample(Rng& rng) const {
  const auto& e = entries_[alias_.sample(rng)];
  return {e.advance, e.stay};
}

PairedOffspring binomial2(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::OutOfRange, "binomial2 needs 0 < alpha < 1");
  const double beta = 1.0 - alpha;
  return PairedOffspring({{0, 2, beta * beta}, {1, 1, 2.0 * alpha * beta}, {2, 0, alpha * alpha}},
                         alpha);
}

PairedOffspring minimal_stay(const OffspringDistribution& offspring) {
  std::vector<PairEntry> table;
  const auto pmf = offspring.pmf();
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (pmf[k] > 0.0) table.push_back({static_cast<int>(k), k == 0 ? 1 : 0, pmf[k]});
  }
  return PairedOffspring::from_table(std::move(table));
}

double pgf_eval(const OffspringDistribution& d, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::OutOfRange, "pgf argument outside [0,1]");
  if (s == 1.0) return 1.0;
  const auto pmf = d.pmf();
  double acc = 0.0;
  for (std::size_t k = pmf.size(); k-- > 0;) acc = acc * s + pmf[k];
  return acc;
}

double pgf_derivative(const OffspringDistribution& d, double s) {
  const auto pmf = d.pmf();
  double acc = 0.0;
  for (std::size_t k = pmf.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * pmf[k];
  return acc;
}

double pgf_iterate(const OffspringDistribution& d, std::int64_t iterations) {
  if (iterations < 0) throw Error(ErrorCode::OutOfRange, "negative iteration count");
  double x = 0.0;
  for (std::int64_t i = 0; i < iterations; ++i) x = pgf_eval(d, x);
  return x;
}

double extinction_probability(const OffspringDistribution& d) {
  if (d.mean() <= 1.0 + 1e-12)
    throw Error(ErrorCode::NotSupercritical, "offspring mean " + std::to_string(d.mean()));

  auto gap = [&](double x) { return pgf_eval(d, x) - x; };
  double lo = 0.0;
  double hi = 1.0 - 1e-9;
  // Barely supercritical laws have their root above 1 - 1e-9.
  while (gap(hi) >= 0.0) {
    const double next = 1.0 - (1.0 - hi) / 10.0;
    if (next <= hi || 1.0 - next < 1e-15)
      throw Error(ErrorCode::NotSupercritical, "fixed point indistinguishable from 1");
    lo = hi;
    hi = next;
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  double q = 0.5 * (lo + hi);
  for (int polish = 0; polish < 2; ++polish) {
    const double slope = pgf_derivative(d, q) - 1.0;
    if (slope >= 0.0) break;
    const double next = q - gap(q) / slope;
    if (next > 0.0 && next < 1.0) q = next;
  }
  return q;
}

double q_alpha_closed_form(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw Error(ErrorCode::OutOfRange, "closed form needs 1/2 < alpha < 1");
  const double spread = alpha * (1.0 - alpha);
  return (1.0 - 2.0 * spread - std::sqrt(1.0 - 4.0 * spread)) / (2.0 * alpha * alpha);
}

std::vector<double> capped_convolve(std::span<const double> partial, const OffspringDistribution& d,
                                    int cap) {
  const auto pmf = d.pmf();
  std::vector<double> out(static_cast<std::size_t>(cap) + 1, 0.0);
  for (int i = 0; i <= cap; ++i) {
    const double a = partial[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    if (i == cap) {
      out[static_cast<std::size_t>(cap)] += a;
      continue;
    }
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      if (pmf[k] == 0.0) continue;
      const auto j = std::min<std::size_t>(static_cast<std::size_t>(cap), i + k);
      out[j] += a * pmf[k];
    }
  }
  return out;
}

std::vector<double> capped_sum_distribution(const OffspringDistribution& d, std::int64_t m,
                                            int cap) {
  if (m < 0) throw Error(ErrorCode::OutOfRange, "negative number of summands");
  if (cap < 1) throw Error(ErrorCode::OutOfRange, "cap must be at least 1");
  std::vector<double> law(static_cast<std::size_t>(cap) + 1, 0.0);
  law[0] = 1.0;
  for (std::int64_t i = 0; i < m; ++i) {
    law = capped_convolve(law, d, cap);
    if (law[static_cast<std::size_t>(cap)] == 1.0) break;
  }
  return law;
}

}  // namespace cgw
