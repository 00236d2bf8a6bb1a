#pragma once

// Command-line surface: `run`, `synth` and `verify-mb`.
// Exit codes: 0 success, 1 a variant failed, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sfcf/dataflow.hpp"
#include "sfcf/evaluation.hpp"
#include "sfcf/pipeline.hpp"
#include "sfcf/selector.hpp"

namespace sfcf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVariantFailed = 1;
inline constexpr int kExitConfig = 2;

// Raised for invalid flag values; `flag` names the offending option.
struct ConfigError {
  std::string flag;
  std::string message;
};

struct RunConfig {
  std::optional<std::string> input;
  std::optional<SyntheticSpec> synthetic;
  std::string label = "Y";
  std::string protected_col = "S";
  std::vector<std::string> categorical;
  BenchmarkConfig bench;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  bool dump_graph = false;
  bool dump_selection = false;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

inline std::vector<Variant> parse_variants(const std::vector<std::string>& raw) {
  std::vector<Variant> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      auto v = parse_variant(name);
      if (!v) {
        throw ConfigError{"--variant", "unknown variant '" + name +
                                           "' (expected baseline, remove-s, osfs, sfcf-ri, "
                                           "sfcf-ad1, sfcf-ad2)"};
      }
      out.push_back(*v);
    }
  }
  if (out.empty()) out.assign(std::begin(kAllVariants), std::end(kAllVariants));
  return out;
}

inline void parse_order(const std::string& raw, BenchmarkConfig& cfg) {
  if (raw == "natural") {
    cfg.order = OrderKind::kNatural;
    return;
  }
  const std::string prefix = "shuffled:";
  if (raw.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string num = raw.substr(prefix.size());
      cfg.order_seed = std::stoull(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
      cfg.order = OrderKind::kShuffled;
      return;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError{"--order", "expected 'natural' or 'shuffled:SEED', got '" + raw + "'"};
}

inline CiKind parse_ci(const std::string& raw) {
  if (raw == "fisher" || raw == "fisher-z") return CiKind::kFisherZ;
  if (raw == "g2") return CiKind::kG2;
  throw ConfigError{"--ci", "expected 'fisher' or 'g2', got '" + raw + "'"};
}

inline Dataset load_for(const RunConfig& cfg) {
  if (cfg.synthetic) return generate_sem(*cfg.synthetic).dataset;
  TypeMap types;
  for (const auto& c : cfg.categorical) types[c] = ColumnKind::kCategorical;
  return load_csv(*cfg.input, cfg.label, cfg.protected_col, types);
}

inline int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Dataset ds;
  try {
    cfg.bench.sig.validate();
    ds = load_for(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  BenchmarkConfig bench = cfg.bench;
  bench.seed = cfg.seed;
  const BenchmarkResult res = benchmark(ds, bench);

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  try {
    fs::create_directories(dir);
    write_json(dir / "report.json", report_json(res, bench));
    write_json(dir / "timing.json", timing_json(res));
    if (cfg.dump_graph) {
      nlohmann::json g = nlohmann::json::object();
      for (const auto& vr : res.variants) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& rec : vr.runs) runs.push_back(rec.graphs);
        g[std::string(to_string(vr.variant))] = std::move(runs);
      }
      write_json(dir / "graphs.json", g);
    }
    if (cfg.dump_selection) {
      nlohmann::json s = nlohmann::json::object();
      for (const auto& vr : res.variants) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& rec : vr.runs) runs.push_back(to_json(rec.snapshot));
        s[std::string(to_string(vr.variant))] = std::move(runs);
      }
      write_json(dir / "selection.json", s);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  out << "n=" << res.n << " features=" << res.features << " runs=" << bench.runs << '\n';
  out << report_table(res);
  return res.any_failed() ? kExitVariantFailed : kExitOk;
}

struct SynthConfig {
  SyntheticSpec spec;
  std::string out_csv = "synth.csv";
  std::string out_truth = "synth_truth.json";
};

inline int cmd_synth(const SynthConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto data = generate_sem(cfg.spec);
    write_csv(data.dataset, cfg.out_csv);
    write_json(cfg.out_truth, to_json(data.truth));
    out << "wrote " << cfg.out_csv << " (" << data.dataset.n() << " rows, "
        << data.dataset.feature_count() << " features) and " << cfg.out_truth << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

struct VerifyConfig {
  std::string input;
  std::string truth;
  std::string label = "Y";
  std::string protected_col = "S";
  SignificanceConfig sig;
  CiKind ci = CiKind::kFisherZ;
  int bins = 5;
  BenchmarkConfig order;  // only order/order_seed are read
};

struct VerifyResult {
  Recovery label;
  Recovery protected_attr;
  std::set<std::string> found_label;
  std::set<std::string> found_protected;
};

inline VerifyResult verify_mb(const Dataset& raw, const SyntheticTruth& truth, const VerifyConfig& cfg) {
  std::set<std::string> have;
  for (const auto& c : raw.columns) have.insert(c.name);
  const std::set<std::string> want(truth.features.begin(), truth.features.end());
  if (have != want) throw ConfigError{"--truth", "feature names differ between dataset and truth"};
  const Dataset ds = ci_view(raw, cfg.ci, cfg.bins);
  const StreamOrder order = cfg.order.order == OrderKind::kNatural
                                ? StreamOrder::natural(ds.feature_count())
                                : StreamOrder::shuffled(ds.feature_count(), cfg.order.order_seed);
  const auto sel = run_stream(ds, cfg.ci, cfg.sig, order);
  VerifyResult r;
  r.found_label = names_of(markov_blanket(sel.label_graph()));
  r.found_protected = names_of(markov_blanket(sel.protected_graph()));
  r.label = score_recovery(r.found_label, truth.mb_label);
  r.protected_attr = score_recovery(r.found_protected, truth.mb_protected);
  return r;
}

inline int cmd_verify_mb(const VerifyConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.sig.validate();
    const Dataset raw = load_csv(cfg.input, cfg.label, cfg.protected_col);
    std::ifstream in(cfg.truth);
    if (!in) throw Error(Errc::kIo, "cannot open '" + cfg.truth + "'");
    const SyntheticTruth truth = truth_from_json(nlohmann::json::parse(in));
    const auto r = verify_mb(raw, truth, cfg);
    out << std::fixed << std::setprecision(4);
    auto line = [&](const char* name, const Recovery& rec) {
      out << name << " precision=" << rec.precision << " recall=" << rec.recall << " f1=" << rec.f1
          << '\n';
    };
    line("MB(Y)", r.label);
    line("MB(S)", r.protected_attr);
  } catch (const ConfigError& e) {
    err << "error: " << e.flag << ": " << e.message << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

// Parses argv and dispatches. Usable in-process by tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Streaming feature selection with causal fairness"};
  app.require_subcommand(1);

  RunConfig run;
  std::vector<std::string> variants;
  std::string order = "natural";
  std::string ci = "fisher";
  bool synthetic = false;
  SyntheticSpec run_spec;
  auto* run_cmd = app.add_subcommand("run", "Select features and evaluate each variant");
  run_cmd->add_option("--input", run.input, "CSV file with a header row");
  run_cmd->add_flag("--synthetic", synthetic, "Use a generated SEM instead of --input");
  run_cmd->add_option("--p", run_spec.p, "Synthetic node count");
  run_cmd->add_option("--n", run_spec.n, "Synthetic sample count");
  run_cmd->add_option("--edge-prob", run_spec.edge_prob, "Synthetic edge probability");
  run_cmd->add_option("--proxy-paths", run_spec.proxy_paths, "Forced S->X->Y paths");
  run_cmd->add_option("--synth-seed", run_spec.seed, "Synthetic generator seed");
  run_cmd->add_option("--label", run.label, "Label column");
  run_cmd->add_option("--protected", run.protected_col, "Protected attribute column");
  run_cmd->add_option("--categorical", run.categorical, "Columns to treat as categorical")
      ->delimiter(',');
  run_cmd->add_option("--variant", variants, "Variants (repeatable or comma-separated)");
  run_cmd->add_option("--alpha", run.bench.sig.alpha, "Significance level");
  run_cmd->add_option("--max-cond", run.bench.sig.max_cond_size, "Largest conditioning set");
  run_cmd->add_option("--order", order, "natural | shuffled:SEED");
  run_cmd->add_option("--runs", run.bench.runs, "Repeated train/test splits");
  run_cmd->add_option("--ci", ci, "fisher | g2");
  run_cmd->add_option("--bins", run.bench.bins, "Bins per continuous column for g2");
  run_cmd->add_option("--output", run.output_dir, "Directory for report.json");
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_option("--lr", run.bench.logistic.lr, "Logistic regression step size");
  run_cmd->add_option("--l2", run.bench.logistic.l2, "Logistic regression L2 weight");
  run_cmd->add_option("--epochs", run.bench.logistic.epochs, "Logistic regression epochs");
  run_cmd->add_flag("--stream-protected", run.bench.stream_protected,
                    "Also stream the protected attribute as a feature");
  run_cmd->add_flag("--dump-graph", run.dump_graph, "Write graphs.json");
  run_cmd->add_flag("--dump-selection", run.dump_selection, "Write selection.json");
  run_cmd->add_flag("--revalidate", run.bench.revalidate, "Re-test replacement features");

  SynthConfig synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic SEM dataset");
  synth_cmd->add_option("--p", synth.spec.p, "Node count (>= 3)");
  synth_cmd->add_option("--n", synth.spec.n, "Sample count");
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed");
  synth_cmd->add_option("--edge-prob", synth.spec.edge_prob, "Edge probability");
  synth_cmd->add_option("--noise", synth.spec.noise, "Noise scale");
  synth_cmd->add_option("--proxy-paths", synth.spec.proxy_paths, "Forced S->X->Y paths");
  synth_cmd->add_option("--out-csv", synth.out_csv, "Dataset path");
  synth_cmd->add_option("--out-truth", synth.out_truth, "Ground-truth JSON path");

  VerifyConfig verify;
  std::string verify_order = "natural";
  std::string verify_ci = "fisher";
  std::uint64_t verify_seed = 0;
  auto* verify_cmd = app.add_subcommand("verify-mb", "Score streamed Markov blankets against truth");
  verify_cmd->add_option("--input", verify.input, "Dataset CSV")->required();
  verify_cmd->add_option("--truth", verify.truth, "Ground-truth JSON")->required();
  verify_cmd->add_option("--label", verify.label, "Label column");
  verify_cmd->add_option("--protected", verify.protected_col, "Protected attribute column");
  verify_cmd->add_option("--alpha", verify.sig.alpha, "Significance level");
  verify_cmd->add_option("--max-cond", verify.sig.max_cond_size, "Largest conditioning set");
  verify_cmd->add_option("--ci", verify_ci, "fisher | g2");
  verify_cmd->add_option("--order", verify_order, "natural | shuffled:SEED");
  verify_cmd->add_option("--seed", verify_seed, "Seed for shuffled order when --order shuffled");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*run_cmd) {
      run.bench.variants = parse_variants(variants);
      parse_order(order, run.bench);
      run.bench.ci = parse_ci(ci);
      if (synthetic) {
        run.synthetic = run_spec;
        run.label = "Y";
        run.protected_col = "S";
      } else if (!run.input) {
        throw ConfigError{"--input", "either --input or --synthetic is required"};
      }
      if (!(run.bench.sig.alpha > 0.0 && run.bench.sig.alpha < 1.0)) {
        throw ConfigError{"--alpha", "must lie in (0,1)"};
      }
      if (run.bench.sig.max_cond_size < 0) throw ConfigError{"--max-cond", "must be >= 0"};
      if (run.bench.runs < 1) throw ConfigError{"--runs", "must be >= 1"};
      return cmd_run(run, out, err);
    }
    if (*synth_cmd) {
      try {
        synth.spec.validate();
      } catch (const Error& e) {
        throw ConfigError{"synth", e.what()};
      }
      return cmd_synth(synth, out, err);
    }
    if (*verify_cmd) {
      verify.ci = parse_ci(verify_ci);
      parse_order(verify_order == "shuffled" ? "shuffled:" + std::to_string(verify_seed) : verify_order,
                  verify.order);
      return cmd_verify_mb(verify, out, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.flag << ": " << e.message << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace sfcf::cli
