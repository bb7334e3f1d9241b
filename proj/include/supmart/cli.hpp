#pragma once

// Batch front end: check / decompose / price / hedge over a JSON market spec.
// Reports are plain text with numbers printed to 12 significant digits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "supmart/decomposition.hpp"
#include "supmart/error.hpp"
#include "supmart/hedging.hpp"
#include "supmart/pricing.hpp"
#include "supmart/process_calculus.hpp"
#include "supmart/spec_io.hpp"

namespace supmart {

namespace cli {

inline std::string num(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string cell_name(const Cell& cell) {
  std::string s = "{";
  for (std::size_t i = 0; i < cell.size(); ++i) s += (i ? "," : "") + std::to_string(cell[i]);
  return s + "}";
}

inline std::string outcome_row(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

// One line per time: value on each cell.
inline void print_process(std::ostream& out, const FilteredSpace& space, const ProcessRows& rows,
                          const std::string& indent = "  ") {
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out << indent << "t=" << t << ":";
    for (const auto& cell : space.partition(t)) out << " " << cell_name(cell) << "=" << num(rows[t][cell.front()]);
    out << "\n";
  }
}

inline std::string verdict_name(const MeasureSet& set, const AdaptedProcess& p) {
  if (is_martingale(set, p)) return "martingale";
  if (is_supermartingale(set, p)) return "super-martingale";
  return "neither";
}

inline Json rows_json(const ProcessRows& rows) { return Json(rows); }

struct PricingJob {
  Vector claim;
  PriceMode mode;
  std::optional<double> closed_form;
  std::string closed_form_label;
};

struct PricingFlags {
  std::string mode = "full";
  std::vector<std::string> generators;
  std::optional<double> strike, d1, d2, s0;
};

inline std::vector<Vector> default_generating_claims(const Model& model) {
  if (model.measures.is_hull() || model.measures.assets().size() != 1)
    fail(ErrorKind::InvalidArgument, "--generators is required unless the measure set has exactly one traded asset");
  return asset_ratio_claims(model.measures.assets().front());
}

inline PricingJob pricing_job(const Model& model, const std::string& name, const PricingFlags& flags) {
  PricingJob job;
  const bool option = flags.mode == "call" || flags.mode == "put";
  if (!option && (flags.strike || flags.d1 || flags.d2 || flags.s0))
    fail(ErrorKind::InvalidArgument, "--strike, --d1, --d2 and --s0 apply only to call and put modes");
  if (flags.mode == "full" && !flags.generators.empty())
    fail(ErrorKind::InvalidArgument, "--generators applies only to generated, call and put modes");
  std::vector<Vector> gens;
  for (const auto& g : flags.generators) gens.push_back(model.claim(g));

  if (!option) {
    job.claim = model.claim(name);
    if (flags.mode == "full") {
      job.mode = PriceMode::full();
    } else {
      job.mode = PriceMode::generated(gens.empty() ? default_generating_claims(model) : gens);
    }
    return job;
  }
  if (!flags.strike) fail(ErrorKind::InvalidArgument, "--strike is required in " + flags.mode + " mode");
  const auto& asset = model.process(name);
  const double k = *flags.strike;
  const auto& terminal = asset.terminal();
  const double lo = flags.d1.value_or(*std::min_element(terminal.begin(), terminal.end()));
  const double hi = flags.d2.value_or(*std::max_element(terminal.begin(), terminal.end()));
  const double s0 = flags.s0.value_or(asset(0, 0));
  job.claim.resize(terminal.size());
  for (std::size_t w = 0; w < terminal.size(); ++w)
    job.claim[w] = flags.mode == "call" ? std::max(0.0, terminal[w] - k) : std::max(0.0, k - terminal[w]);
  if (gens.empty()) gens = asset_ratio_claims(asset);
  job.mode = PriceMode::generated(std::move(gens));
  if (flags.mode == "call") {
    job.closed_form = euro_call_price(s0, hi, k);
    job.closed_form_label = "S0=" + num(s0) + " D2=" + num(hi) + " K=" + num(k);
  } else {
    job.closed_form = euro_put_price(lo, k);
    job.closed_form_label = "D1=" + num(lo) + " K=" + num(k);
  }
  return job;
}

inline FairPriceResult run_pricing(const MeasureSet& set, const PricingJob& job) {
  return job.mode.kind == PriceMode::Kind::Full ? fair_price_full(set, job.claim)
                                                : fair_price_generated(set, job.mode.unit_claims, job.claim);
}

inline void print_set(std::ostream& out, const MarketSpec& spec, const Model& model) {
  const auto& set = model.measures;
  if (set.is_hull()) {
    out << "measure set: generator hull (" << set.generators().size() << " generators)\n";
  } else {
    out << "measure set: martingale polytope (assets:";
    for (const auto& a : *spec.martingale_assets) out << " " << a;
    out << ")\n";
    out << "  interior measure: " << outcome_row(set.reference().probabilities()) << "\n";
  }
}

inline void add_common(CLI::App* cmd, std::string& spec, std::string& name, const char* what) {
  cmd->add_option("spec", spec, "market specification (JSON)")->required();
  cmd->add_option("name", name, what)->required();
}

inline void add_pricing_flags(CLI::App* cmd, PricingFlags& f) {
  cmd->add_option("--mode", f.mode, "full | generated | call | put")
      ->check(CLI::IsMember({"full", "generated", "call", "put"}));
  cmd->add_option("--generators", f.generators, "claim names forming the generating unit claims")->delimiter(',');
  cmd->add_option("--strike", f.strike, "option strike");
  cmd->add_option("--d1", f.d1, "lower price bound D_N^1 (default: min of S_N)");
  cmd->add_option("--d2", f.d2, "upper price bound D_N^2 (default: max of S_N)");
  cmd->add_option("--s0", f.s0, "initial asset price (default: S_0)");
}

inline int cmd_check(const std::string& path, const std::optional<std::string>& strategy_path, std::ostream& out) {
  const MarketSpec spec = load_spec(path);
  const Model model = build_model(spec);
  const auto& space = model.space;
  out << "space: outcomes=" << space.outcome_count() << " horizon=" << space.horizon() << " cells=";
  for (std::size_t t = 0; t <= space.horizon(); ++t) out << (t ? "," : "") << space.cell_count(t);
  out << "\n";
  print_set(out, spec, model);
  out << "processes:\n";
  for (const auto& [name, p] : model.processes) out << "  " << name << ": " << verdict_name(model.measures, p) << "\n";
  out << "claims:\n";
  for (const auto& [name, v] : model.claims) {
    const bool nonneg = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
    out << "  " << name << ": sup E = " << num(sup_expectation(model.measures, v))
        << ", unit claim: " << (nonneg && is_unit_claim(model.measures, v) ? "yes" : "no") << "\n";
  }
  if (strategy_path) {
    const std::string text = read_file(*strategy_path);
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      const auto [line, col] = detail::line_column(text, e.byte);
      fail(ErrorKind::Parse, *strategy_path + ": line " + std::to_string(line) + ", column " + std::to_string(col) +
                                 ": malformed JSON");
    }
    const auto strategy = strategy_from_json(doc, model);
    std::vector<std::string> names;
    for (const auto& n : doc["assets"]) names.push_back(n.get<std::string>());
    const bool identical = strategy_to_json(strategy, names) == doc;
    const auto sf = verify_self_financing(strategy);
    out << "strategy:\n";
    out << "  round-trip: " << (identical ? "identical" : "differs") << "\n";
    out << "  self-financing: " << (sf ? "yes" : "no") << " (max residual " << num(sf.max_residual) << ")\n";
    out << "  capital:\n";
    print_process(out, space, strategy_capital(strategy).rows(), "    ");
    if (!sf || !identical) return 3;
  }
  return 0;
}

inline int cmd_decompose(const std::string& path, const std::string& name, const std::string& method,
                         const std::optional<std::string>& xi0_name, const std::optional<std::string>& out_path,
                         std::ostream& out) {
  const Model model = build_model(load_spec(path));
  const auto& f = model.process(name);
  Decomposition dec = [&] {
    if (method == "witness") {
      if (xi0_name) fail(ErrorKind::InvalidArgument, "--xi0 applies only to the complete method");
      return local_regular_witness(model.measures, f);
    }
    if (!xi0_name) fail(ErrorKind::InvalidArgument, "--xi0 is required for the complete method");
    return optional_decomposition_complete(model.measures, model.claim(*xi0_name), f);
  }();
  const auto chk = check_decomposition(model.measures, dec);
  out << "decomposition of " << name << " (method " << method << ")\n";
  out << "martingale M:\n";
  print_process(out, model.space, dec.martingale.rows());
  out << "compensator g:\n";
  print_process(out, model.space, dec.compensator.rows());
  if (dec.step_claims) {
    out << "step claims:\n";
    for (std::size_t n = 0; n < dec.step_claims->size(); ++n)
      out << "  n=" << n + 1 << ": " << outcome_row((*dec.step_claims)[n]) << "\n";
  }
  out << "verification: " << (chk ? "valid" : "INVALID " + chk.message) << "\n";
  out << "  reconstruction error " << num(chk.reconstruction_error) << "\n";
  out << "  min increment of g " << num(chk.min_increment) << "\n";
  out << "  M martingale: " << (chk.martingale ? "yes" : "no") << "\n";
  if (out_path) {
    Json doc;
    doc["process"] = name;
    doc["method"] = method;
    doc["martingale"] = rows_json(dec.martingale.rows());
    doc["compensator"] = rows_json(dec.compensator.rows());
    if (dec.step_claims) doc["step_claims"] = *dec.step_claims;
    write_file(*out_path, doc.dump(2) + "\n");
  }
  return 0;
}

inline int cmd_price(const std::string& path, const std::string& name, const PricingFlags& flags, std::ostream& out) {
  const Model model = build_model(load_spec(path));
  const auto job = pricing_job(model, name, flags);
  const auto res = run_pricing(model.measures, job);
  out << "claim: " << name << "\n";
  out << "mode: " << flags.mode << "\n";
  if (job.closed_form) {
    out << "closed-form price (box worst case, " << job.closed_form_label << "): " << num(*job.closed_form) << "\n";
    out << "LP price (generated): " << num(res.price) << "\n";
  } else {
    out << "price: " << num(res.price) << "\n";
  }
  out << "lower bound sup E f_N: " << num(res.lower_bound) << "\n";
  out << "witness claim: " << outcome_row(res.witness_claim) << "\n";
  out << "witness bound: " << (res.witness_bound ? "holds" : "fails") << " (slack " << num(res.witness_slack)
      << ")\n";
  return 0;
}

inline int cmd_hedge(const std::string& path, const std::string& name, const PricingFlags& flags,
                     const std::optional<std::string>& out_path, std::ostream& out) {
  const MarketSpec spec = load_spec(path);
  const Model model = build_model(spec);
  const auto job = pricing_job(model, name, flags);
  const auto res = superhedge(model.measures, job.claim, job.mode);
  const auto& space = model.space;
  const auto& names = *spec.martingale_assets;
  out << "claim: " << name << "\n";
  out << "price: " << num(res.price.price) << "\n";
  out << "strategy (cash; risky";
  for (const auto& n : names) out << " " << n;
  out << "):\n";
  for (std::size_t t = 0; t <= space.horizon(); ++t) {
    const std::size_t info = t == 0 ? 0 : t - 1;
    for (const auto& cell : space.partition(info)) {
      const std::size_t w = cell.front();
      out << "  t=" << t << " " << cell_name(cell) << ": " << num(res.strategy.cash(t, w, 0)) << ";";
      for (std::size_t j = 0; j < names.size(); ++j) out << " " << num(res.strategy.risky(t, w, j));
      out << "\n";
    }
  }
  const auto capital = strategy_capital(res.strategy);
  out << "capital:\n";
  print_process(out, space, capital.rows());
  const auto sf = verify_self_financing(res.strategy);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < space.outcome_count(); ++w)
    margin = std::min(margin, capital(space.horizon(), w) - job.claim[w]);
  out << "self-financing: " << (sf ? "yes" : "no") << " (max residual " << num(sf.max_residual) << ")\n";
  out << "domination: " << (margin >= -tol::eq ? "yes" : "no") << " (min X_N - f_N " << num(margin) << ")\n";
  if (out_path) write_file(*out_path, strategy_to_json(res.strategy, names).dump(2) + "\n");
  return sf && margin >= -tol::eq ? 0 : 3;
}

}  // namespace cli

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 success, 2 validation, 3 mathematical infeasibility, 4 I/O.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Super-martingale decomposition, fair pricing and superhedging on finite filtered spaces",
               "supmart"};
  app.require_subcommand(1);

  std::string spec, name, method = "witness";
  std::optional<std::string> strategy, xi0, out_path;
  cli::PricingFlags flags;

  auto* check = app.add_subcommand("check", "validate a spec and classify its processes and claims");
  check->add_option("spec", spec, "market specification (JSON)")->required();
  check->add_option("--strategy", strategy, "strategy file to verify against the spec");

  auto* decompose = app.add_subcommand("decompose", "optional decomposition f = M - g of a process");
  cli::add_common(decompose, spec, name, "process name");
  decompose->add_option("--method", method, "witness | complete")->check(CLI::IsMember({"witness", "complete"}));
  decompose->add_option("--xi0", xi0, "claim name of the driving unit claim (complete method)");
  decompose->add_option("--out", out_path, "write M, g and step claims as JSON");

  auto* price = app.add_subcommand("price", "fair price of a claim");
  cli::add_common(price, spec, name, "claim name (asset process name in call/put mode)");
  cli::add_pricing_flags(price, flags);

  auto* hedge = app.add_subcommand("hedge", "self-financed superhedging strategy");
  cli::add_common(hedge, spec, name, "claim name (asset process name in call/put mode)");
  cli::add_pricing_flags(hedge, flags);
  hedge->add_option("--out", out_path, "write the strategy as JSON");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*check) return cli::cmd_check(spec, strategy, out);
    if (*decompose) return cli::cmd_decompose(spec, name, method, xi0, out_path, out);
    if (*price) return cli::cmd_price(spec, name, flags, out);
    return cli::cmd_hedge(spec, name, flags, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}

}  // namespace supmart
