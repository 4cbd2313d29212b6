#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI/CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gqic/gqic.hpp"
#include "toml_json.hpp"

namespace gqic::cli {

namespace {

using nlohmann::json;

// Settings of a single invocation that are not part of the experiment design.
struct RunSettings {
  std::string input;
  std::optional<double> h;  // declared step of the input CSV
  std::string scale = "Scale2";
  std::string drift = "Drift2";
  double level = 0.95;
  bool full_grid = false;
  std::size_t n_mc = 1000000;
  std::string reference;
  double tolerance = 3.0;
};

struct Resolved {
  ExperimentConfig exp;
  RunSettings run;
};

json to_json(const RunSettings& r) {
  json j{{"input", r.input},
         {"scale", r.scale},
         {"drift", r.drift},
         {"level", r.level},
         {"full_grid", r.full_grid},
         {"n_mc", r.n_mc},
         {"reference", r.reference},
         {"tolerance", r.tolerance}};
  if (r.h) j["h"] = *r.h;
  return j;
}

void overlay(RunSettings& r, const json& j) {
  r.input = j.value("input", r.input);
  if (j.contains("h")) r.h = j.at("h").get<double>();
  r.scale = j.value("scale", r.scale);
  r.drift = j.value("drift", r.drift);
  r.level = j.value("level", r.level);
  r.full_grid = j.value("full_grid", r.full_grid);
  r.n_mc = j.value("n_mc", r.n_mc);
  r.reference = j.value("reference", r.reference);
  r.tolerance = j.value("tolerance", r.tolerance);
}

json to_json(const Resolved& r) {
  json j = gqic::to_json(r.exp);
  j["run"] = to_json(r.run);
  return j;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << content;
  if (!f) throw DataError("failed while writing '" + path + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::string> comment_lines(const std::string& title, const Resolved& r) {
  std::vector<std::string> out{title};
  std::istringstream lines(json_to_toml(to_json(r)));
  std::string line;
  while (std::getline(lines, line)) out.push_back(line);
  return out;
}

std::string comment_block(const std::string& title, const Resolved& r) {
  std::string out;
  for (const auto& line : comment_lines(title, r)) out += "# " + line + '\n';
  return out;
}

std::size_t default_threads() {
  if (const char* env = std::getenv("GQIC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("GQIC_THREADS must be a nonnegative integer");
  }
  return 1;
}

// Command-line flags shared by all subcommands. Each is applied only when it
// was given.
struct Flags {
  std::string config;
  std::string case_name;
  std::string output;
  std::string csv_out;
  std::string json_out;
  bool print_config = false;
  bool quiet = false;

  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::size_t n = 0;
  double h = 0.0;
  double T = 0.0;
  std::size_t reps = 0;
  std::size_t refine = 0;
  double x0 = 0.0;
  double trunc_kappa = 0.0;
  std::string criteria;
  std::string scales;
  std::string drifts;

  std::string input;
  std::string scale;
  std::string drift;
  double level = 0.0;
  bool full_grid = false;
  std::size_t n_mc = 0;
  std::string reference;
  double tolerance = 0.0;

  std::map<std::string, CLI::Option*> opts;
  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_common(CLI::App* sub, Flags& f) {
  f.opts["config"] = sub->add_option("--config", f.config, "TOML configuration file");
  f.opts["case"] =
      sub->add_option("--case", f.case_name, "Preset noise and grid: i, ii, iii or gaussian");
  f.opts["seed"] = sub->add_option("--seed", f.seed, "Base seed");
  f.opts["threads"] = sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  f.opts["scales"] = sub->add_option("--scales", f.scales, "Comma-separated scale candidates");
  f.opts["drifts"] = sub->add_option("--drifts", f.drifts, "Comma-separated drift candidates");
  f.opts["criteria"] = sub->add_option(
      "--criteria", f.criteria, "Criterion preset(s) or SCALE:DRIFT pairs, comma separated");
  f.opts["trunc-kappa"] = sub->add_option("--trunc-kappa", f.trunc_kappa, "Truncation exponent kappa");
  f.opts["output"] = sub->add_option("-o,--output", f.output, "Output file (default stdout)");
  sub->add_flag("--print-config", f.print_config, "Print the resolved configuration as TOML and exit");
  sub->add_flag("-q,--quiet", f.quiet, "Suppress warnings");
}

void add_input(CLI::App* sub, Flags& f) {
  f.opts["input"] = sub->add_option("-i,--input", f.input, "Path CSV (time,value); '-' for stdin");
  f.opts["h"] = sub->add_option("--h", f.h, "Declared sampling step (otherwise inferred)");
}

Resolved resolve(const Flags& f, const std::string& command) {
  Resolved r;
  json file;
  if (!f.config.empty()) file = toml_to_json(read_file(f.config), f.config);
  if (!file.is_null() && !file.is_object()) throw DataError("configuration must be a TOML table");

  std::string preset;
  if (file.contains("case")) preset = file.at("case").get<std::string>();
  if (f.given("case")) preset = f.case_name;
  if (!preset.empty()) r.exp = case_config(preset);
  r.exp.threads = default_threads();

  if (!file.is_null()) {
    json exp = file;
    exp.erase("case");
    exp.erase("run");
    r.exp = experiment_config_from_json(exp, r.exp);
    if (file.contains("run")) overlay(r.run, file.at("run"));
  }

  auto& e = r.exp;
  if (f.given("seed")) e.base_seed = f.seed;
  if (f.given("threads")) e.threads = f.threads;
  if (f.given("reps")) e.replications = f.reps;
  if (f.given("refine")) e.refine = f.refine;
  if (f.given("x0")) e.x0 = f.x0;
  if (f.given("trunc-kappa")) e.trunc_kappa = f.trunc_kappa;
  if (f.given("scales")) e.scales = split_list(f.scales);
  if (f.given("drifts")) e.drifts = split_list(f.drifts);
  if (f.given("criteria")) e.criteria = criterion_preset(f.criteria);

  if (command == "simulate") {
    const double h = f.given("h") ? f.h : e.grid.front().h;
    const std::size_t n = f.given("n") ? f.n : e.grid.front().n();
    e.grid = {{h, static_cast<double>(n) * h}};
  } else if (command == "mc") {
    if (f.given("h") || f.given("T")) {
      std::vector<double> hs{f.h}, ts{f.T};
      if (!f.given("h")) {
        hs.clear();
        for (const auto& g : e.grid) hs.push_back(g.h);
      }
      if (!f.given("T")) {
        ts.clear();
        for (const auto& g : e.grid) ts.push_back(g.T);
      }
      std::vector<GridPoint> grid;
      for (double t : ts)
        for (double h : hs) {
          GridPoint gp{h, t};
          if (std::find_if(grid.begin(), grid.end(), [&](const GridPoint& g) {
                return g.h == gp.h && g.T == gp.T;
              }) == grid.end())
            grid.push_back(gp);
        }
      e.grid = grid;
    }
  } else if (f.given("h")) {
    r.run.h = f.h;
  }

  if (f.given("input")) r.run.input = f.input;
  if (f.given("scale")) r.run.scale = f.scale;
  if (f.given("drift")) r.run.drift = f.drift;
  if (f.given("level")) r.run.level = f.level;
  if (f.full_grid) r.run.full_grid = true;
  if (f.given("n-mc")) r.run.n_mc = f.n_mc;
  if (f.given("reference")) r.run.reference = f.reference;
  if (f.given("tolerance")) r.run.tolerance = f.tolerance;

  e.validate();
  return r;
}

void warn(std::ostream& err, const Flags& f, const std::vector<std::string>& ws) {
  if (f.quiet) return;
  for (const auto& w : ws) err << json{{"warning", w}}.dump() << '\n';
}

SamplePath load_path(const Resolved& r) {
  if (r.run.input.empty()) throw std::invalid_argument("an input path CSV is required (--input)");
  std::istringstream in(read_file(r.run.input));
  return read_path_csv(in, r.run.h);
}

std::vector<Coefficient> coefficients(const std::vector<std::string>& names) {
  std::vector<Coefficient> out;
  for (const auto& n : names) out.push_back(registry(n));
  return out;
}

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int cmd_simulate(const Resolved& r, const Flags& f, std::ostream& out, std::ostream& err) {
  warn(err, f, design_warnings(r.exp));
  const auto& gp = r.exp.grid.front();
  const auto path = simulate_replication(r.exp, gp, 0);
  std::ostringstream os;
  write_path_csv(os, path, comment_lines("gqic simulate", r));
  emit(f.output, os.str(), out);
  return kOk;
}

int cmd_fit(const Resolved& r, const Flags& f, std::ostream& out, std::ostream&) {
  const auto path = load_path(r);
  const CandidateModel model{registry(r.run.scale), registry(r.run.drift)};
  const auto fr = fit(path, model, r.exp.opt);
  json j;
  j["config"] = to_json(r);
  j["fit"] = gqic::to_json(fr);
  try {
    const auto ci = confidence_interval(fr, r.run.level);
    json arr = json::array();
    for (std::size_t k = 0; k < ci.size(); ++k) {
      const bool is_alpha = k < fr.p_alpha();
      const std::string name = (is_alpha ? "alpha[" + std::to_string(k)
                                         : "gamma[" + std::to_string(k - fr.p_alpha())) + "]";
      arr.push_back({{"parameter", name},
                     {"estimate", ci[k].estimate},
                     {"lower", ci[k].lower},
                     {"upper", ci[k].upper},
                     {"degenerate", ci[k].degenerate}});
    }
    j["confidence_intervals"] = std::move(arr);
  } catch (const NumericalError& e) {
    j["confidence_intervals_error"] = e.what();
  }
  emit(f.output, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_criteria(const Resolved& r, const Flags& f, std::ostream& out, std::ostream&) {
  const auto path = load_path(r);
  const auto scales = coefficients(r.exp.scales);
  const auto drifts = coefficients(r.exp.drifts);
  std::ostringstream os;
  os << comment_block("gqic criteria", r);
  os << "stage,scale,drift,criterion,value,flag\n";
  FitCache cache;
  for (const auto& sc : scales) {
    const auto& e = cache.scale(path, sc, r.exp.opt);
    for (auto kind : all_scale_kinds()) {
      os << "scale," << sc.name << ",," << to_string(kind) << ',';
      if (!e.fit) {
        os << "inf,failed\n";
        continue;
      }
      try {
        const auto v = scale_criterion(*e.fit, kind, r.exp.trunc_kappa);
        os << fmt17(v.value) << ',' << (v.truncated ? "truncated" : "") << '\n';
      } catch (const NumericalError&) {
        os << "inf,singular\n";
      }
    }
  }
  for (const auto& sc : scales) {
    const auto& se = cache.scale(path, sc, r.exp.opt);
    for (const auto& dr : drifts) {
      const DriftFit* df = nullptr;
      if (se.fit) {
        const auto& de = cache.drift(path, CandidateModel{sc, dr}, *se.fit, r.exp.opt);
        if (de.fit) df = &*de.fit;
      }
      for (auto kind : all_drift_kinds()) {
        os << "drift," << sc.name << ',' << dr.name << ',' << to_string(kind) << ',';
        if (!df) {
          os << "inf,failed\n";
          continue;
        }
        os << fmt17(drift_criterion(*df, path.horizon(), kind)) << ",\n";
      }
    }
  }
  emit(f.output, os.str(), out);
  return kOk;
}

int cmd_select(const Resolved& r, const Flags& f, std::ostream& out, std::ostream&) {
  const auto path = load_path(r);
  const auto scales = coefficients(r.exp.scales);
  const auto drifts = coefficients(r.exp.drifts);
  SelectionConfig sc;
  sc.opt = r.exp.opt;
  sc.trunc_kappa = r.exp.trunc_kappa;
  sc.full_grid = r.run.full_grid;
  FitCache cache;
  json outcomes = json::array();
  for (const auto& pair : r.exp.criteria) {
    const auto o = stepwise_select(path, scales, drifts, pair.scale, pair.drift, sc, &cache);
    outcomes.push_back(gqic::to_json(o));
  }
  json j{{"config", to_json(r)},
         {"n", path.n()},
         {"h", path.h},
         {"T", path.horizon()},
         {"outcomes", std::move(outcomes)}};
  emit(f.output, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_mc(const Resolved& r, const Flags& f, std::ostream& out, std::ostream& err) {
  warn(err, f, design_warnings(r.exp));
  const auto table = run_experiment(r.exp);
  json j = gqic::to_json(table);
  j["metadata"]["resolved_config"] = to_json(r);

  if (!r.run.reference.empty()) {
    std::istringstream in(read_file(r.run.reference));
    const auto rows = read_reference_csv(in);
    json reports = json::array();
    for (const auto& g : table.grid) {
      for (const auto& ct : g.tables) {
        const auto label = reference_label(ct.pair);
        if (label.empty()) continue;
        ReferenceBlock block;
        try {
          block = reference_block(rows, label, g.point.T, g.point.h, table.drifts, table.scales);
        } catch (const std::invalid_argument&) {
          continue;
        }
        const auto rep = compare_to_reference(ct, block, r.run.tolerance);
        json cells = json::array();
        for (const auto& c : rep.cells)
          cells.push_back({{"drift", table.drifts[c.drift]},
                           {"scale", table.scales[c.scale]},
                           {"observed", c.observed},
                           {"reference", c.reference},
                           {"std_error", c.std_error},
                           {"pass", c.pass}});
        reports.push_back({{"criterion", ct.pair.label()},
                           {"reference_label", label},
                           {"T", g.point.T},
                           {"h", g.point.h},
                           {"tolerance_se", r.run.tolerance},
                           {"pass", rep.pass},
                           {"cells", std::move(cells)}});
      }
    }
    j["reference_comparison"] = std::move(reports);
  }

  std::ostringstream csv;
  csv << comment_block("gqic mc", r);
  write_frequency_csv(csv, table);
  const std::string csv_path = !f.csv_out.empty() ? f.csv_out : f.output;
  if (!f.json_out.empty()) emit(f.json_out, j.dump(2) + "\n", out);
  if (!csv_path.empty() || f.json_out.empty()) emit(csv_path, csv.str(), out);
  return kOk;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw DataError(std::string(what) + " must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).is_array() ? j.at(0).size() : 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw DataError(std::string(what) + " rows must all have the same length");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

int cmd_limit(const Resolved& r, const Flags& f, std::ostream& out, std::ostream&) {
  if (r.run.input.empty()) throw std::invalid_argument("limit-prob needs --input with a JSON matrix file");
  json in;
  try {
    in = json::parse(read_file(r.run.input));
  } catch (const json::parse_error& e) {
    throw DataError("invalid JSON in '" + r.run.input + "': " + e.what(), std::nullopt,
                    static_cast<std::size_t>(e.byte));
  }
  LimitInputs li;
  li.Gamma = matrix_from_json(in.at("Gamma"), "Gamma");
  const std::string kind = in.value("kind", std::string("scale"));
  if (kind != "scale" && kind != "drift") throw DataError("kind must be 'scale' or 'drift'");
  li.W = in.contains("W") ? matrix_from_json(in.at("W"), "W") : li.Gamma;
  NestingMap map;
  map.F = matrix_from_json(in.at("F"), "F");
  map.c = Eigen::VectorXd::Zero(map.F.rows());
  if (in.contains("c")) {
    const auto c = in.at("c").get<std::vector<double>>();
    map.c = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  }
  if (kind == "scale") {
    if (in.contains("threshold")) {
      li.penalty_threshold = in.at("threshold").get<double>();
    } else if (in.contains("Gamma_small") && in.contains("W_small")) {
      li.penalty_threshold =
          scale_penalty_threshold(li.Gamma, li.W, matrix_from_json(in.at("Gamma_small"), "Gamma_small"),
                                  matrix_from_json(in.at("W_small"), "W_small"));
    } else {
      throw DataError("scale kind needs 'threshold' or both 'Gamma_small' and 'W_small'");
    }
  }
  RngStream rng(r.exp.base_seed, 0);
  const auto lk = kind == "scale" ? LimitKind::Scale : LimitKind::Drift;
  const auto est = asymptotic_selection_prob(li, map, lk, r.run.n_mc, rng);
  LimitInputs eig_in = li;
  if (lk == LimitKind::Drift) eig_in.W = li.Gamma;
  const auto lam = nesting_eigenvalues(eig_in, map);
  const double thr = lk == LimitKind::Drift
                         ? 2.0 * static_cast<double>(map.F.rows() - map.F.cols())
                         : li.penalty_threshold;
  json j{{"config", to_json(r)},
         {"kind", kind},
         {"probability", est.prob},
         {"std_error", est.std_error},
         {"threshold", thr},
         {"eigenvalues", std::vector<double>(lam.data(), lam.data() + lam.size())},
         {"n_mc", r.run.n_mc},
         {"seed", r.exp.base_seed}};
  emit(f.output, j.dump(2) + "\n", out);
  return kOk;
}

void report_error(std::ostream& err, const char* kind, const std::string& msg,
                  std::optional<std::size_t> line = std::nullopt,
                  std::optional<std::size_t> column = std::nullopt) {
  json e{{"kind", kind}, {"message", msg}};
  if (line) e["line"] = *line;
  if (column) e["column"] = *column;
  err << json{{"error", e}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian quasi-likelihood estimation and model selection for Levy-driven SDEs",
               "gqic"};
  // "-h" would clash with the sampling-step option "--h".
  app.set_help_flag("--help", "Print help and exit");
  app.require_subcommand(1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "Simulate one path and write it as CSV");
  add_common(sim, f);
  sim->add_option("--n", f.n, "Number of increments");
  sim->add_option("--h", f.h, "Sampling step");
  sim->add_option("--refine", f.refine, "Euler sub-steps per observation");
  sim->add_option("--x0", f.x0, "Initial value");

  auto* fit_cmd = app.add_subcommand("fit", "Two-stage estimation of one candidate model");
  add_common(fit_cmd, f);
  add_input(fit_cmd, f);
  fit_cmd->add_option("--scale", f.scale, "Scale candidate (default Scale2)");
  fit_cmd->add_option("--drift", f.drift, "Drift candidate (default Drift2)");
  fit_cmd->add_option("--level", f.level, "Confidence level (default 0.95)");

  auto* crit = app.add_subcommand("criteria", "Every criterion for every candidate");
  add_common(crit, f);
  add_input(crit, f);

  auto* sel = app.add_subcommand("select", "Stepwise scale-then-drift selection");
  add_common(sel, f);
  add_input(sel, f);
  sel->add_flag("--full-grid", f.full_grid, "Also score every drift under every scale");

  auto* mc = app.add_subcommand("mc", "Monte Carlo selection-frequency experiment");
  add_common(mc, f);
  mc->add_option("--h", f.h, "Sampling step (replaces the grid)");
  mc->add_option("--T", f.T, "Horizon (replaces the grid)");
  mc->add_option("--reps", f.reps, "Replications");
  mc->add_option("--refine", f.refine, "Euler sub-steps per observation");
  mc->add_option("--csv", f.csv_out, "Frequency table CSV output");
  mc->add_option("--json", f.json_out, "Frequency table JSON output");
  mc->add_option("--reference", f.reference, "Reference counts CSV to compare against");
  mc->add_option("--tolerance", f.tolerance, "Comparison tolerance in binomial SEs");

  auto* lim = app.add_subcommand("limit-prob", "Asymptotic probability of preferring the larger model");
  add_common(lim, f);
  lim->add_option("-i,--input", f.input, "JSON with Gamma, W, F and threshold");
  lim->add_option("--n-mc", f.n_mc, "Monte Carlo draws (>= 1e4)");

  for (auto* sub : {sim, fit_cmd, crit, sel, mc, lim}) sub->set_help_flag("--help", "Print help and exit");

  // Record per-subcommand options that are not in add_common.
  for (auto* sub : {sim, fit_cmd, crit, sel, mc, lim}) {
    for (const char* name : {"n", "h", "T", "reps", "refine", "x0", "input", "scale", "drift",
                             "level", "n-mc", "reference", "tolerance"}) {
      if (auto* o = sub->get_option_no_throw(std::string("--") + name)) f.opts[name] = o;
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kUsage;
  }

  CLI::App* active = nullptr;
  for (auto* sub : {sim, fit_cmd, crit, sel, mc, lim})
    if (sub->parsed()) active = sub;
  // CLI11 keeps options per subcommand; point the registry at the active one.
  for (auto& [name, opt] : f.opts) {
    if (auto* o = active->get_option_no_throw(opt->get_name())) opt = o;
  }

  try {
    const auto r = resolve(f, active->get_name());
    if (f.print_config) {
      emit(f.output, json_to_toml(to_json(r)), out);
      return kOk;
    }
    const auto& name = active->get_name();
    if (name == "simulate") return cmd_simulate(r, f, out, err);
    if (name == "fit") return cmd_fit(r, f, out, err);
    if (name == "criteria") return cmd_criteria(r, f, out, err);
    if (name == "select") return cmd_select(r, f, out, err);
    if (name == "mc") return cmd_mc(r, f, out, err);
    return cmd_limit(r, f, out, err);
  } catch (const DataError& e) {
    report_error(err, "data", e.what(), e.line(), e.column());
    return kDataError;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", e.what());
    return kNumericalError;
  } catch (const json::exception& e) {
    report_error(err, "usage", std::string("configuration: ") + e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    report_error(err, "usage", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    report_error(err, "numerical", e.what());
    return kNumericalError;
  }
}

}  // namespace gqic::cli
