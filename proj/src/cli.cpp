#include "cgw/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "cgw/branching_selection.hpp"
#include "cgw/censored_sim.hpp"
#include "cgw/csv.hpp"
#include "cgw/error.hpp"
#include "cgw/exact_chain.hpp"
#include "cgw/offspring.hpp"
#include "cgw/stats.hpp"

namespace cgw {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string which;
  std::optional<double> binomial2_alpha;
  std::string pmf_path;
  std::string pair_pmf_path;
  std::string pair;
  std::optional<int> n;
  std::vector<int> n_list;
  std::int64_t runs = 10'000;
  std::int64_t steps = 1'000'000;
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  unsigned workers = 1;
  double tail_eps = kDefaultTailEps;
  std::int64_t ks_max_steps = 10'000'000;
  std::string format = "csv";
  std::string output;
  std::string trajectory;
};

// Reals go through the 9-digit text form so JSON and CSV agree.
json real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_real(x));
}

json real(const std::optional<double>& x) {
  return x ? real(*x) : json(nullptr);
}

std::string field(const std::optional<double>& x) {
  return x ? format_real(*x) : "";
}

int source_count(const RunConfig& c) {
  return (c.binomial2_alpha ? 1 : 0) + (c.pmf_path.empty() ? 0 : 1) +
         (c.pair_pmf_path.empty() ? 0 : 1);
}

OffspringDistribution offspring_of(const RunConfig& c) {
  if (!c.pair_pmf_path.empty() && source_count(c) == 1)
    return PairedOffspring::load(c.pair_pmf_path).marginal();
  if (source_count(c) != 1 || !c.pair_pmf_path.empty())
    throw UsageError("give exactly one of --binomial2 or --pmf");
  if (c.binomial2_alpha) return binomial2(*c.binomial2_alpha).marginal();
  return OffspringDistribution::load(c.pmf_path);
}

PairedOffspring pair_law_of(const RunConfig& c) {
  if (source_count(c) != 1)
    throw UsageError("give exactly one of --binomial2, --pmf or --pair-pmf");
  if (!c.pair_pmf_path.empty()) {
    if (!c.pair.empty()) throw UsageError("--pair does not apply to --pair-pmf");
    return PairedOffspring::load(c.pair_pmf_path);
  }
  const std::string pair = c.pair.empty() ? (c.binomial2_alpha ? "bernoulli" : "minimal-stay")
                                          : c.pair;
  if (pair == "bernoulli") {
    if (!c.binomial2_alpha) throw UsageError("--pair bernoulli needs --binomial2");
    return binomial2(*c.binomial2_alpha);
  }
  return minimal_stay(offspring_of(c));
}

std::vector<int> levels_of(const RunConfig& c) {
  if (c.n && !c.n_list.empty()) throw UsageError("give --n or --n-list, not both");
  if (c.n) return {*c.n};
  if (c.n_list.empty()) throw UsageError("no censor levels given (--n or --n-list)");
  return c.n_list;
}

std::optional<SpeedBracket> bracket_for(const PairedOffspring& law, int n) {
  const auto pmf = law.marginal_pmf();
  if (!(pmf[0] > 0.0) || law.advance_mean() <= 1.0 + 1e-12) return std::nullopt;
  return speed_bracket(law.marginal(), n);
}

std::string emit(const RunConfig& c, const json& doc, const std::vector<CsvTable>& tables) {
  if (c.format == "json") return doc.dump(2) + "\n";
  std::string text;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i > 0) text += '\n';
    text += to_csv(tables[i]);
  }
  return text;
}

std::string cmd_q(const RunConfig& c) {
  const auto d = offspring_of(c);
  const double q = extinction_probability(d);
  std::optional<double> q_alpha;
  std::optional<bool> agrees;
  if (c.binomial2_alpha) {
    q_alpha = q_alpha_closed_form(*c.binomial2_alpha);
    agrees = std::abs(*q_alpha - q) < 1e-10;
  }
  json doc = {{"q", real(q)},
              {"q_alpha", real(q_alpha)},
              {"closed_form_agrees", agrees ? json(*agrees) : json(nullptr)}};
  CsvTable table{{"q", "q_alpha", "closed_form_agrees"},
                 {{format_real(q), field(q_alpha),
                   agrees ? (*agrees ? "true" : "false") : ""}}};
  return emit(c, doc, {table});
}

std::string cmd_exact(const RunConfig& c) {
  const auto d = offspring_of(c);
  ChainReportOptions options;
  options.tail_eps = c.tail_eps;
  options.ks_max_steps = c.ks_max_steps;
  json doc = json::array();
  CsvTable table{{"n", "q", "q_n", "expected_u", "expected_v", "ratio_mean", "ratio_qn",
                  "ks_to_exp", "ks_uncertainty"},
                 {}};
  for (int n : levels_of(c)) {
    const auto r = make_chain_report(d, n, options);
    json expected_u = json::array();
    for (double u : r.expected_u) expected_u.push_back(real(u));
    doc.push_back({{"n", r.n},
                   {"q", real(r.q)},
                   {"q_n", real(r.q_n)},
                   {"expected_u", expected_u},
                   {"expected_v", real(r.expected_v)},
                   {"ratio_mean", real(r.ratio_mean)},
                   {"ratio_qn", real(r.ratio_qn)},
                   {"ks_to_exp", real(r.ks_to_exp)},
                   {"ks_uncertainty", real(r.ks_uncertainty)}});
    table.rows.push_back({std::to_string(r.n), format_real(r.q), format_real(r.q_n),
                          format_real(r.expected_u.back()), format_real(r.expected_v),
                          format_real(r.ratio_mean), format_real(r.ratio_qn),
                          field(r.ks_to_exp), field(r.ks_uncertainty)});
  }
  return emit(c, doc, {table});
}

std::string cmd_sim_censored(const RunConfig& c) {
  const auto d = offspring_of(c);
  bool supercritical = true;
  try {
    extinction_probability(d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSupercritical) throw;
    supercritical = false;
  }
  BatchConfig config;
  config.runs = c.runs;
  config.horizon = c.horizon;
  config.seed = c.seed;
  config.workers = c.workers;

  json doc = json::array();
  CsvTable batch{{"n", "runs", "mean_u", "ci_u", "mean_v", "ci_v", "mean_t", "ci_t", "p_hat"}, {}};
  CsvTable ks{{"n", "runs", "ks_statistic", "ks_p_value"}, {}};
  for (int n : levels_of(c)) {
    const auto replicas = simulate_replicas(d, n, config);
    const auto est = summarize(n, replicas);
    std::optional<double> ks_d, ks_p;
    if (supercritical) {
      try {
        const auto g = ks_statistic(rescale_u(d, n, replicas),
                                    [](double t) { return -std::expm1(-t); });
        ks_d = g.statistic;
        ks_p = g.p_value;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::HardCap) throw;
      }
    }
    doc.push_back({{"n", n},
                   {"runs", est.runs},
                   {"mean_u", real(est.mean_u)},
                   {"ci_u", real(est.ci_u)},
                   {"mean_v", real(est.mean_v)},
                   {"ci_v", real(est.ci_v)},
                   {"mean_t", real(est.mean_t)},
                   {"ci_t", real(est.ci_t)},
                   {"p_hat", real(est.t_geometric_p_hat)},
                   {"ks_statistic", real(ks_d)},
                   {"ks_p_value", real(ks_p)}});
    batch.rows.push_back({std::to_string(n), std::to_string(est.runs), format_real(est.mean_u),
                          format_real(est.ci_u), format_real(est.mean_v), format_real(est.ci_v),
                          format_real(est.mean_t), format_real(est.ci_t),
                          format_real(est.t_geometric_p_hat)});
    if (supercritical)
      ks.rows.push_back({std::to_string(n), std::to_string(est.runs), field(ks_d), field(ks_p)});
  }
  std::vector<CsvTable> tables{batch};
  if (supercritical) tables.push_back(ks);
  return emit(c, doc, tables);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  file << text;
}

std::string cmd_sim_selection(const RunConfig& c) {
  const auto law = pair_law_of(c);
  const auto levels = levels_of(c);
  if (!c.trajectory.empty() && levels.size() != 1)
    throw UsageError("--trajectory needs a single --n");
  SpeedOptions options;
  options.keep_trace = !c.trajectory.empty();

  json doc = json::array();
  CsvTable table{{"n", "k", "v_hat", "v_err", "bracket_low", "bracket_high"}, {}};
  for (int n : levels) {
    const auto est = simulate_speed(law, n, c.steps, c.seed, options);
    const auto bracket = bracket_for(law, n);
    std::optional<double> low;
    std::optional<double> high;
    if (bracket) {
      low = bracket->low;
      high = bracket->high;
    }
    doc.push_back({{"n", n},
                   {"k", est.steps},
                   {"v_hat", real(est.v_hat)},
                   {"v_err", real(est.v_err)},
                   {"bracket_low", real(low)},
                   {"bracket_high", real(high)}});
    table.rows.push_back({std::to_string(n), std::to_string(est.steps), format_real(est.v_hat),
                          format_real(est.v_err), field(low), field(high)});
    if (options.keep_trace) {
      CsvTable trace{{"k", "max_y", "frontier_count"}, {}};
      for (const auto& s : est.trace)
        trace.rows.push_back(
            {std::to_string(s.k), std::to_string(s.max_y), std::to_string(s.frontier_count)});
      write_text(c.trajectory, to_csv(trace));
    }
  }
  return emit(c, doc, {table});
}

std::string cmd_verify_th1(const RunConfig& c) {
  const auto d = offspring_of(c);
  ChainReportOptions options;
  options.tail_eps = c.tail_eps;
  options.ks_max_steps = c.ks_max_steps;
  json doc = json::array();
  CsvTable table{{"n", "q_pow_n", "ratio_mean", "ratio_qn", "ks_d"}, {}};
  for (int n : levels_of(c)) {
    const auto r = make_chain_report(d, n, options);
    const double q_pow = std::pow(r.q, n);
    doc.push_back({{"n", n},
                   {"q_pow_n", real(q_pow)},
                   {"ratio_mean", real(r.ratio_mean)},
                   {"ratio_qn", real(r.ratio_qn)},
                   {"ks_d", real(r.ks_to_exp)}});
    table.rows.push_back({std::to_string(n), format_real(q_pow), format_real(r.ratio_mean),
                          format_real(r.ratio_qn), field(r.ks_to_exp)});
  }
  return emit(c, doc, {table});
}

std::string cmd_verify_th2(const RunConfig& c) {
  const auto law = pair_law_of(c);
  const auto offspring = law.marginal();
  const double q = extinction_probability(offspring);
  json doc = json::array();
  CsvTable table{{"n", "q_pow_n", "one_minus_v", "v_err", "ratio", "gap_low", "gap_high",
                  "inside"},
                 {}};
  for (int n : levels_of(c)) {
    const auto est = simulate_speed(law, n, c.steps, c.seed);
    const auto bracket = speed_bracket(offspring, n);
    const double q_pow = std::pow(q, n);
    const double lag = 1.0 - est.v_hat;
    const double gap_low = 1.0 - bracket.high;   // 1 / E[U_N]
    const double gap_high = 1.0 - bracket.low;   // 1 / (E[V_N] + 1)
    const bool inside = lag >= gap_low - 3.0 * est.v_err && lag <= gap_high + 3.0 * est.v_err;
    doc.push_back({{"n", n},
                   {"q_pow_n", real(q_pow)},
                   {"one_minus_v", real(lag)},
                   {"v_err", real(est.v_err)},
                   {"ratio", real(lag / q_pow)},
                   {"gap_low", real(gap_low)},
                   {"gap_high", real(gap_high)},
                   {"inside", inside}});
    table.rows.push_back({std::to_string(n), format_real(q_pow), format_real(lag),
                          format_real(est.v_err), format_real(lag / q_pow), format_real(gap_low),
                          format_real(gap_high), inside ? "true" : "false"});
  }
  return emit(c, doc, {table});
}

void add_source(CLI::App* sub, RunConfig& c, bool with_pairs) {
  sub->add_option("--binomial2", c.binomial2_alpha, "Binomial(2, alpha) offspring");
  sub->add_option("--pmf", c.pmf_path, "offspring pmf file (`k p_k` per line)");
  if (with_pairs) {
    sub->add_option("--pair-pmf", c.pair_pmf_path, "joint (x, x') law file (`x x' p` per line)");
    sub->add_option("--pair", c.pair, "pairing for --pmf/--binomial2")
        ->check(CLI::IsMember({"minimal-stay", "bernoulli"}));
  }
}

void add_levels(CLI::App* sub, RunConfig& c) {
  sub->add_option("--n", c.n, "censor level / particle count");
  sub->add_option("--n-list", c.n_list, "comma-separated levels")->delimiter(',');
}

void add_output(CLI::App* sub, RunConfig& c) {
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output", c.output, "write to this file instead of stdout");
}

void add_exact_knobs(CLI::App* sub, RunConfig& c) {
  sub->add_option("--tail-eps", c.tail_eps, "truncation of the exact law of U");
  sub->add_option("--ks-max-steps", c.ks_max_steps,
                  "skip the exact KS distance when the law of U needs more steps");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Censored Galton-Watson processes and branching-selection particle systems", "cgw"};
  app.require_subcommand(1);

  auto* q = app.add_subcommand("q", "extinction probability");
  add_source(q, c, false);
  add_output(q, c);
  q->add_option("--workers", c.workers, "threads (unused)");

  auto* exact = app.add_subcommand("exact", "exact censored-chain report per level");
  add_source(exact, c, false);
  add_levels(exact, c);
  add_exact_knobs(exact, c);
  add_output(exact, c);
  exact->add_option("--workers", c.workers, "threads (unused)");

  auto* sim_censored = app.add_subcommand("sim-censored", "Monte Carlo censored process");
  add_source(sim_censored, c, false);
  add_levels(sim_censored, c);
  sim_censored->add_option("--runs", c.runs, "replicas per level");
  sim_censored->add_option("--seed", c.seed, "base seed");
  sim_censored->add_option("--horizon", c.horizon, "step cap per path (0: automatic)");
  sim_censored->add_option("--workers", c.workers, "threads");
  add_output(sim_censored, c);

  auto* sim_selection = app.add_subcommand("sim-selection", "branching-selection speed");
  add_source(sim_selection, c, true);
  add_levels(sim_selection, c);
  sim_selection->add_option("--steps", c.steps, "time steps");
  sim_selection->add_option("--seed", c.seed, "seed");
  sim_selection->add_option("--workers", c.workers, "threads (single trajectory: unused)");
  sim_selection->add_option("--trajectory", c.trajectory, "CSV dump of k,max_y,frontier_count");
  add_output(sim_selection, c);

  auto* verify = app.add_subcommand("verify", "multi-level tables: th1 (law of U), th2 (selection speed)");
  verify->add_option("which", c.which, "th1 or th2")
      ->required()
      ->check(CLI::IsMember({"th1", "th2"}));
  add_source(verify, c, true);
  add_levels(verify, c);
  add_exact_knobs(verify, c);
  verify->add_option("--steps", c.steps, "time steps (th2)");
  verify->add_option("--seed", c.seed, "seed (th2)");
  verify->add_option("--workers", c.workers, "threads");
  add_output(verify, c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c.workers == 0) throw UsageError("--workers must be positive");
    std::string text;
    if (app.got_subcommand(q)) {
      text = cmd_q(c);
    } else if (app.got_subcommand(exact)) {
      text = cmd_exact(c);
    } else if (app.got_subcommand(sim_censored)) {
      text = cmd_sim_censored(c);
    } else if (app.got_subcommand(sim_selection)) {
      text = cmd_sim_selection(c);
    } else {
      text = c.which == "th1" ? cmd_verify_th1(c) : cmd_verify_th2(c);
    }
    if (c.output.empty()) {
      out << text;
    } else {
      write_text(c.output, text);
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::SingularSystem ? 1 : 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cgw
