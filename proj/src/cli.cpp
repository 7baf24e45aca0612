// Copyright 2026 The SFT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sft/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sft/btl.hpp"
#include "sft/dynamics.hpp"
#include "sft/error.hpp"
#include "sft/field.hpp"
#include "sft/fixtures.hpp"
#include "sft/lockfilter.hpp"
#include "sft/matrix_io.hpp"
#include "sft/probes.hpp"
#include "sft/report.hpp"
#include "sft/scorefile.hpp"

namespace sft {

namespace {

namespace fs = std::filesystem;

// Writes to `path`, or to `fallback` when the path is empty.
void write_to(const std::string& path, std::ostream& fallback,
              const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, fmt::format("cannot write '{}'", path));
  body(f);
  if (!f) throw Error(Errc::IoError, fmt::format("write to '{}' failed", path));
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, fmt::format("cannot read '{}'", path));
  return f;
}

std::string slurp(const std::string& path) {
  auto f = open_in(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

BtlOptions btl_options(const RunConfig& cfg) {
  if (cfg.iterations <= 0) throw Error(Errc::InvalidArgument, "iterations must be positive");
  if (!(cfg.epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  return {cfg.iterations, cfg.epsilon};
}

// Truth reordered to follow `brands`; the two brand sets must coincide.
GroundTruth aligned_truth(const RunConfig& cfg, const std::vector<std::string>& brands) {
  const GroundTruth truth = load_truth(cfg.category);
  if (truth.brands.size() != brands.size()) {
    throw Error(Errc::ShapeMismatch,
                fmt::format("matrices have {} brands, category '{}' has {}", brands.size(),
                            cfg.category, truth.brands.size()));
  }
  GroundTruth out;
  out.brands = brands;
  out.shares_pct.resize(static_cast<Eigen::Index>(brands.size()));
  for (std::size_t i = 0; i < brands.size(); ++i) {
    auto it = std::find(truth.brands.begin(), truth.brands.end(), brands[i]);
    if (it == truth.brands.end()) {
      throw Error(Errc::UnknownEntity,
                  fmt::format("brand '{}' is not in category '{}'", brands[i], cfg.category));
    }
    out.shares_pct(static_cast<Eigen::Index>(i)) =
        truth.shares_pct(static_cast<Eigen::Index>(it - truth.brands.begin()));
  }
  return out;
}

std::optional<std::vector<bool>> calibration_mask(const RunConfig& cfg,
                                                  const std::vector<std::string>& brands) {
  if (cfg.calibration_split.empty()) return std::nullopt;
  std::vector<bool> mask(brands.size(), false);
  for (const auto& b : cfg.calibration_split) {
    auto it = std::find(brands.begin(), brands.end(), b);
    if (it == brands.end()) {
      throw Error(Errc::UnknownEntity, fmt::format("calibration brand '{}' not found", b));
    }
    mask[static_cast<std::size_t>(it - brands.begin())] = true;
  }
  return mask;
}

// Fixed gamma from the config, or one calibrated on `pi` and then frozen.
double resolve_gamma(const RunConfig& cfg, const Eigen::VectorXd& pi, const GroundTruth& truth) {
  if (cfg.gamma == "calibrate") {
    return power_calibrate(pi, truth, calibration_mask(cfg, truth.brands)).gamma;
  }
  double g = 0.0;
  const auto* first = cfg.gamma.data();
  const auto* last = first + cfg.gamma.size();
  auto [ptr, ec] = std::from_chars(first, last, g);
  if (ec != std::errc() || ptr != last) {
    throw Error(Errc::InvalidArgument,
                fmt::format("gamma must be a number or 'calibrate', got '{}'", cfg.gamma));
  }
  if (!(g > 0.0)) throw Error(Errc::GammaNonPositive, fmt::format("gamma = {} must be > 0", g));
  return g;
}

ConfigEcho echo(const RunConfig& cfg, double gamma, std::optional<double> tau) {
  return {tau, cfg.alpha, gamma, cfg.R, cfg.seed};
}

std::string model_label(const RunConfig& cfg) {
  return cfg.model_id.empty() ? std::string("unknown-model") : cfg.model_id;
}

std::vector<ProbeTemplate> selected_templates(const RunConfig& cfg) {
  const auto all = standard_templates();
  if (cfg.templates.empty()) return {all.begin(), all.end()};
  std::vector<ProbeTemplate> out;
  for (int id : cfg.templates) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& t) { return t.id == id; });
    if (it == all.end()) throw Error(Errc::InvalidArgument, fmt::format("no template {}", id));
    out.push_back(*it);
  }
  return out;
}

void cmd_prompts(const RunConfig& cfg, bool yes_no, bool swap_audit, const std::string& out_path,
                 std::ostream& out) {
  const auto& fixture = find_category(cfg.category);
  const auto templates = selected_templates(cfg);
  const auto prompts = render_prompts(fixture.category, fixture.brand_names(), templates,
                                      {yes_no, swap_audit});
  write_to(out_path, out, [&](std::ostream& o) { write_prompt_batch(o, prompts); });
}

void cmd_aggregate(const RunConfig& cfg, const std::string& scores_path,
                   const std::string& out_dir, std::ostream& out) {
  const auto& fixture = find_category(cfg.category);
  auto in = open_in(scores_path);
  const auto all = parse_scores(in);
  std::vector<ScoreRecord> records;
  std::string model;
  for (const auto& r : all) {
    if (r.category != fixture.category) {
      throw Error(Errc::SchemaViolation, fmt::format("record for category '{}' while '{}' is "
                                                     "configured",
                                                     r.category, fixture.category));
    }
    if (!cfg.model_id.empty() && r.model_id != cfg.model_id) continue;
    if (model.empty()) model = r.model_id;
    if (r.model_id != model) {
      throw Error(Errc::SchemaViolation,
                  fmt::format("scores mix models '{}' and '{}'; pass --model-id", model,
                              r.model_id));
    }
    records.push_back(r);
  }
  const auto m = aggregate_records(records, fixture.brand_names());
  fs::create_directories(out_dir);
  save_matrices(out_dir, m);
  out << fmt::format("wrote {} brands from {} records ({}) to {}\n", m.size(), records.size(),
                     model, out_dir);
}

void cmd_fit(const RunConfig& cfg, const std::string& matrices_dir, ReportFormat format,
             const std::string& out_path, std::ostream& out) {
  const auto m = load_matrices(matrices_dir);
  const auto truth = aligned_truth(cfg, m.brands);
  const auto opts = btl_options(cfg);
  const auto fit = btl_fit(m, opts);
  const double gamma = resolve_gamma(cfg, fit.pi, truth);
  const auto summary = summarize_fit(m, gamma, truth, opts);
  auto report = make_run_report(model_label(cfg), cfg.category, truth, summary.predicted,
                                summary.spearman, echo(cfg, gamma, cfg.tau));
  for (const auto& w : fit.warnings) report.notes.push_back(w);
  write_to(out_path, out, [&](std::ostream& o) { emit_report(o, report, format); });
}

void cmd_lockfilter(const RunConfig& cfg, const std::string& matrices_dir,
                    const std::vector<double>& sweep, ReportFormat format,
                    const std::string& out_path, std::ostream& out) {
  const auto m = load_matrices(matrices_dir);
  const auto truth = aligned_truth(cfg, m.brands);
  const auto opts = btl_options(cfg);
  const double gamma = resolve_gamma(cfg, btl_fit(m, opts).pi, truth);
  PermutationOptions perm{static_cast<std::size_t>(cfg.R), cfg.seed, cfg.threads, opts};

  if (!sweep.empty()) {
    std::vector<SweepRow> rows;
    double baseline = 0.0;
    for (double tau : sweep) {
      const auto run = lock_filter_run(m, tau, cfg.alpha, gamma, truth, opts);
      baseline = run.baseline.mae;
      SweepRow row{tau, run.locks.k(), run.filtered.spearman, run.filtered.mae,
                   run.improvement_pct(), std::nullopt};
      if (run.locks.k() > 0) {
        row.p_value = perm_test(m, run.locks, cfg.alpha, gamma, truth, perm).p_value;
      }
      rows.push_back(row);
    }
    write_to(out_path, out, [&](std::ostream& o) {
      o << fmt::format("{} ({}): baseline MAE = {:.3f} pp, gamma = {:.6f}, alpha = {}, R = {}, "
                       "seed = {}\n",
                       model_label(cfg), cfg.category, baseline, gamma, cfg.alpha, cfg.R,
                       cfg.seed);
      emit_sweep_table(o, rows);
    });
    return;
  }

  if (!cfg.tau) throw Error(Errc::InvalidArgument, "lockfilter needs --tau or --sweep");
  const auto run = lock_filter_run(m, *cfg.tau, cfg.alpha, gamma, truth, opts);
  std::optional<PermutationOutcome> outcome;
  if (run.locks.k() > 0) outcome = perm_test(m, run.locks, cfg.alpha, gamma, truth, perm);
  auto report = make_run_report(model_label(cfg), cfg.category, truth, run.filtered.predicted,
                                run.filtered.spearman, echo(cfg, gamma, cfg.tau));
  write_to(out_path, out, [&](std::ostream& o) {
    if (format == ReportFormat::kJson) {
      emit_report(o, report, format);
      return;
    }
    o << fmt::format("locked pairs at tau = {:.3f}: k = {}\n", *cfg.tau, run.locks.k());
    if (run.locks.k() > 0) emit_lock_table(o, run.locks, m.brands);
    o << fmt::format("baseline: Spearman = {:.3f}, MAE = {:.3f} pp\n", run.baseline.spearman,
                     run.baseline.mae);
    emit_report(o, report, format);
    o << fmt::format("MAE improvement = {:.1f}%\n", run.improvement_pct());
    if (outcome) {
      o << fmt::format("permutation: R = {}, seed = {}, delta_MAE = {:.4f} pp, p = {:.4f}\n",
                       outcome->R, outcome->seed, outcome->delta_mae_lock, outcome->p_value);
    } else {
      o << "permutation: ---\n";
    }
  });
}

void cmd_report(const std::string& in_path, ReportFormat format, const std::string& out_path,
                std::ostream& out) {
  const auto report = parse_report_json(slurp(in_path));
  write_to(out_path, out, [&](std::ostream& o) { emit_report(o, report, format); });
}

SimilarityField load_field(const std::string& path) {
  auto in = open_in(path);
  return read_field_csv(in);
}

SequenceTrace load_trace(const std::string& path) {
  auto in = open_in(path);
  return read_trace_csv(in);
}

std::size_t window_or_default(std::size_t w, const SequenceTrace& t) {
  return w == 0 ? default_tail_window(t.length()) : w;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

struct TheoryArgs {
  std::string field;
  std::string trace;
  std::string concept_label;
  std::string x;
  std::string y;
  std::vector<std::string> generated;
  double alpha = 0.5;
  double epsilon = 0.05;
  double tolerance = 0.1;
  double radius = 0.1;
  double delta = 0.1;
  double below = 0.0;
  double above = 1.0;
  std::size_t coord = 0;
  std::size_t min_visits = 3;
  std::size_t window = 0;
  std::optional<double> limit;
};

void theory_fibre(const TheoryArgs& a, std::ostream& out) {
  const auto f = load_field(a.field);
  const auto k = f.entities().find(a.concept_label);
  const auto fb = fibre(f, k, a.alpha);
  std::vector<std::string> names;
  for (const auto& e : fb.members) names.push_back(e.label);
  out << fmt::format("F_{}({}) = {{{}}}\n", a.alpha, k.label, fmt::join(names, ", "));
}

void theory_incompat(const TheoryArgs& a, std::ostream& out) {
  const auto f = load_field(a.field);
  const auto ex = f.entities().find(a.x);
  const auto ey = f.entities().find(a.y);
  const auto r = incompatibility(f, ex, ey);
  out << fmt::format("S({0},{1}) = {2}, S({1},{0}) = {3}\n", ex.label, ey.label, r.x, r.y);
  out << fmt::format("S(x,y) >= S(y,x): {}, S(y,x) >= S(x,y): {}, mutual membership: {}\n",
                     yes_no(r.cond1), yes_no(r.cond2), yes_no(r.mutual()));
}

void theory_metrics(const TheoryArgs& a, std::ostream& out) {
  const auto f = load_field(a.field);
  const auto k = f.entities().find(a.concept_label);
  std::vector<EntityId> gen;
  for (const auto& g : a.generated) gen.push_back(f.entities().find(g));
  const auto s = intelligence_metrics(f, k, a.alpha, std::span<const EntityId>(gen));
  out << fmt::format("coverage = {:.6f}, fidelity = {:.6f}, alpha = {}\n", s.coverage,
                     s.fidelity, s.threshold);
}

void theory_stability(const TheoryArgs& a, std::ostream& out) {
  const auto t = load_trace(a.trace);
  const auto w = window_or_default(a.window, t);
  const auto v = stability_assess(t, a.epsilon, w, a.limit);
  out << fmt::format("stable: {}, c = {:.6f}, epsilon = {}, window = {}, tail_start = {}, "
                     "tube violations = {}\n",
                     yes_no(v.stable), v.limit, v.epsilon, w,
                     v.tail_start ? fmt::format("{}", *v.tail_start) : std::string("none"),
                     v.tube_violations);
}

void theory_anchors(const TheoryArgs& a, std::ostream& out) {
  const auto t = load_trace(a.trace);
  const auto w = window_or_default(a.window, t);
  const auto r = anchor_detect(t, a.tolerance, w);
  out << fmt::format("tolerance = {}, window = {}\n", r.tolerance, r.tail_window);
  for (std::size_t i = 0; i < r.coordinates.size(); ++i) {
    const auto& c = r.coordinates[i];
    out << fmt::format("v{}: converged = {}, limit = {:.6f}, oscillation = {:.6f}\n", i + 1,
                       yes_no(c.converged), c.limit, c.oscillation);
  }
}

void theory_clusters(const TheoryArgs& a, std::ostream& out) {
  const auto t = load_trace(a.trace);
  const auto cs =
      cluster_estimate(t, a.radius, a.window == 0 ? std::nullopt : std::optional(a.window));
  out << fmt::format("{} cluster(s) at radius {}\n", cs.size(), a.radius);
  for (const auto& c : cs) {
    std::vector<std::string> coords;
    for (Eigen::Index i = 0; i < c.center.size(); ++i) {
      coords.push_back(fmt::format("{:.6f}", c.center(i)));
    }
    out << fmt::format("center ({}), visits = {}\n", fmt::join(coords, ", "), c.visits);
  }
}

void theory_separation(const TheoryArgs& a, std::ostream& out) {
  const auto t = load_trace(a.trace);
  if (a.coord >= t.dimension()) {
    throw Error(Errc::InvalidArgument,
                fmt::format("coordinate {} outside dimension {}", a.coord, t.dimension()));
  }
  const auto c = static_cast<Eigen::Index>(a.coord);
  const double lo = a.below;
  const double hi = a.above;
  const auto r = separation_check(
      t, [c, lo](const Eigen::VectorXd& v) { return v(c) <= lo; },
      [c, hi](const Eigen::VectorXd& v) { return v(c) >= hi; }, a.delta, a.min_visits);
  out << fmt::format("nonconvergent: {}, visits A = {}, visits B = {}, gap = {:.6f}, "
                     "separated: {}\n",
                     yes_no(r.nonconvergent), r.visits_a, r.visits_b, r.observed_gap,
                     yes_no(r.separated));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity-field typicality probes, BTL aggregation and lock filtering", "sft"};
  app.set_config("--config", "", "INI file with run settings; flags win");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  double tau_value = 0.0;
  app.add_option("--category", cfg.category, "Category token or alias");
  app.add_option("--model-id", cfg.model_id, "Model identifier");
  app.add_option("--templates", cfg.templates, "Template ids (default: all)")->delimiter(',');
  auto* tau_opt = app.add_option("--tau", tau_value, "Lock threshold in (0.5, 1]");
  app.add_option("--alpha", cfg.alpha, "Down-weight factor in (0, 1)");
  app.add_option("--gamma", cfg.gamma, "Power gauge, or 'calibrate'");
  app.add_option("--iterations", cfg.iterations, "BTL MM iterations");
  app.add_option("--epsilon", cfg.epsilon, "BTL numerical floor");
  app.add_option("--R", cfg.R, "Permutation replicates");
  app.add_option("--seed", cfg.seed, "Permutation seed");
  app.add_option("--threads", cfg.threads, "Permutation worker threads (0 = all cores)");
  app.add_option("--calibration-split", cfg.calibration_split,
                 "Brands used to calibrate gamma (default: all)")
      ->delimiter(',');

  const std::map<std::string, ReportFormat> formats{{"table", ReportFormat::kTable},
                                                    {"json", ReportFormat::kJson}};
  ReportFormat format = ReportFormat::kTable;
  std::string out_path;
  std::string in_path;
  std::string matrices_dir;
  bool yes_no_flag = false;
  bool swap_flag = false;
  std::vector<double> sweep;

  auto* prompts = app.add_subcommand("prompts", "Render the prompt batch for a category");
  prompts->add_flag("--yes-no", yes_no_flag, "Add yes/no probes for every ordered pair");
  prompts->add_flag("--swap-audit", swap_flag, "Add position-swapped A/B probes");
  prompts->add_option("--out", out_path, "Output file (default stdout)");

  auto* aggregate = app.add_subcommand("aggregate", "Reduce a score file into P, C and Y");
  aggregate->add_option("--scores", in_path, "Score file")->required();
  aggregate->add_option("--out", out_path, "Output directory")->required();

  auto* fit = app.add_subcommand("fit", "Fit BTL, calibrate and report");
  fit->add_option("--matrices", matrices_dir, "Directory with P.csv and C.csv")->required();
  fit->add_option("--format", format, "table or json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  fit->add_option("--out", out_path, "Output file (default stdout)");

  auto* lock = app.add_subcommand("lockfilter", "Detect locked pairs, refit and test");
  lock->add_option("--matrices", matrices_dir, "Directory with P.csv, C.csv and Y.csv")
      ->required();
  lock->add_option("--sweep", sweep, "Comma-separated tau values")->delimiter(',');
  lock->add_option("--format", format, "table or json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  lock->add_option("--out", out_path, "Output file (default stdout)");

  auto* report = app.add_subcommand("report", "Re-render a JSON run report");
  report->add_option("--in", in_path, "JSON report")->required();
  report->add_option("--format", format, "table or json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  report->add_option("--out", out_path, "Output file (default stdout)");

  TheoryArgs ta;
  auto* theory = app.add_subcommand("theory", "Similarity-field and sequence checks");
  theory->require_subcommand(1);
  auto* t_fibre = theory->add_subcommand("fibre", "Members of F_alpha(K)");
  t_fibre->add_option("--field", ta.field, "Field CSV")->required();
  t_fibre->add_option("--concept", ta.concept_label, "Concept entity")->required();
  t_fibre->add_option("--alpha", ta.alpha, "Threshold")->required();
  auto* t_incompat = theory->add_subcommand("incompat", "Mutual membership check for x, y");
  t_incompat->add_option("--field", ta.field, "Field CSV")->required();
  t_incompat->add_option("--x", ta.x, "First entity")->required();
  t_incompat->add_option("--y", ta.y, "Second entity")->required();
  auto* t_metrics = theory->add_subcommand("metrics", "Coverage and fidelity");
  t_metrics->add_option("--field", ta.field, "Field CSV")->required();
  t_metrics->add_option("--concept", ta.concept_label, "Concept entity")->required();
  t_metrics->add_option("--alpha", ta.alpha, "Threshold")->required();
  t_metrics->add_option("--generated", ta.generated, "Generated entities")
      ->delimiter(',')
      ->required();
  auto* t_stab = theory->add_subcommand("stability", "Tail stability verdict on readouts");
  t_stab->add_option("--trace", ta.trace, "Trace CSV with a y column")->required();
  t_stab->add_option("--epsilon", ta.epsilon, "Tube half-width");
  t_stab->add_option("--window", ta.window, "Tail window (default max(len/4, 8))");
  t_stab->add_option("--limit", ta.limit, "Candidate limit c (default tail mean)");
  auto* t_anchor = theory->add_subcommand("anchors", "Per-coordinate convergence");
  t_anchor->add_option("--trace", ta.trace, "Trace CSV")->required();
  t_anchor->add_option("--tolerance", ta.tolerance, "Oscillation tolerance");
  t_anchor->add_option("--window", ta.window, "Tail window (default max(len/4, 8))");
  auto* t_clust = theory->add_subcommand("clusters", "Greedy covering of the tail samples");
  t_clust->add_option("--trace", ta.trace, "Trace CSV")->required();
  t_clust->add_option("--radius", ta.radius, "Ball radius (max norm)");
  t_clust->add_option("--window", ta.window, "Tail window (default max(len/4, 8))");
  auto* t_sep = theory->add_subcommand("separation", "Two-set visiting nonconvergence test");
  t_sep->add_option("--trace", ta.trace, "Trace CSV with a y column")->required();
  t_sep->add_option("--coord", ta.coord, "Sample coordinate defining the sets (0-based)");
  t_sep->add_option("--below", ta.below, "Set A: coordinate <= value");
  t_sep->add_option("--above", ta.above, "Set B: coordinate >= value");
  t_sep->add_option("--delta", ta.delta, "Required readout gap");
  t_sep->add_option("--min-visits", ta.min_visits, "Visits required per set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }
  if (tau_opt->count() > 0) cfg.tau = tau_value;

  try {
    if (*prompts) {
      cmd_prompts(cfg, yes_no_flag, swap_flag, out_path, out);
    } else if (*aggregate) {
      cmd_aggregate(cfg, in_path, out_path, out);
    } else if (*fit) {
      cmd_fit(cfg, matrices_dir, format, out_path, out);
    } else if (*lock) {
      cmd_lockfilter(cfg, matrices_dir, sweep, format, out_path, out);
    } else if (*report) {
      cmd_report(in_path, format, out_path, out);
    } else if (*t_fibre) {
      theory_fibre(ta, out);
    } else if (*t_incompat) {
      theory_incompat(ta, out);
    } else if (*t_metrics) {
      theory_metrics(ta, out);
    } else if (*t_stab) {
      theory_stability(ta, out);
    } else if (*t_anchor) {
      theory_anchors(ta, out);
    } else if (*t_clust) {
      theory_clusters(ta, out);
    } else if (*t_sep) {
      theory_separation(ta, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  out.flush();
  return 0;
}

}  // namespace sft
