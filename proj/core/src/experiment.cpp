#include "gqic/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gqic/error.hpp"
#include "gqic/model.hpp"
#include "gqic/selection.hpp"

namespace gqic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

CriterionPair parse_pair(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("criterion pair must look like SCALE:DRIFT, got '" + s + "'");
  const auto sk = parse_scale_kind(s.substr(0, colon));
  const auto dk = parse_drift_kind(s.substr(colon + 1));
  if (!sk) throw std::invalid_argument("unknown scale criterion '" + s.substr(0, colon) + "'");
  if (!dk) throw std::invalid_argument("unknown drift criterion '" + s.substr(colon + 1) + "'");
  return {*sk, *dk};
}

struct ReplicationOutcome {
  bool path_failed = false;
  // per criterion pair: (drift, scale) or nullopt when selection failed
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> picks;
};

std::vector<Coefficient> resolve(const std::vector<std::string>& names) {
  std::vector<Coefficient> out;
  for (const auto& n : names) out.push_back(registry(n));
  return out;
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t t = requested;
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, jobs));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::size_t GridPoint::n() const {
  if (!(h > 0.0) || !(T > 0.0)) throw std::invalid_argument("grid point needs h > 0 and T > 0");
  const double r = T / h;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-6 * r)
    throw std::invalid_argument("grid point: T / h must be a positive integer");
  return static_cast<std::size_t>(n);
}

std::string CriterionPair::label() const {
  return std::string(to_string(scale)) + ":" + std::string(to_string(drift));
}

void ExperimentConfig::validate() const {
  gqic::validate(noise);
  if (replications == 0) throw std::invalid_argument("replications must be at least 1");
  if (grid.empty()) throw std::invalid_argument("grid must contain at least one (h, T) point");
  for (const auto& g : grid) (void)g.n();
  if (scales.empty() || drifts.empty()) throw std::invalid_argument("candidate lists must be nonempty");
  for (const auto& s : scales)
    if (!is_scale_name(s)) throw std::invalid_argument("unknown scale candidate '" + s + "'");
  for (const auto& d : drifts)
    if (!is_drift_name(d)) throw std::invalid_argument("unknown drift candidate '" + d + "'");
  if (criteria.empty()) throw std::invalid_argument("at least one criterion pair is required");
  if (refine == 0) throw std::invalid_argument("refine must be at least 1");
  if (!is_scale_name(truth_scale) || registry(truth_scale).dim != truth_gamma.size())
    throw std::invalid_argument("truth scale and its parameters do not match");
  if (!is_drift_name(truth_drift) || registry(truth_drift).dim != truth_alpha.size())
    throw std::invalid_argument("truth drift and its parameters do not match");
  if (!(trunc_kappa > 0.0 && trunc_kappa < 1.0)) throw std::invalid_argument("trunc_kappa must lie in (0, 1)");
}

TrueModel ExperimentConfig::true_model() const {
  const auto sc = registry(truth_scale);
  const auto dr = registry(truth_drift);
  TrueModel m;
  m.scale = [sc, g = truth_gamma](double x) { return sc(x, g); };
  m.drift = [dr, a = truth_alpha](double x) { return dr(x, a); };
  m.x0 = x0;
  return m;
}

std::vector<CriterionPair> criterion_preset(const std::string& name) {
  using S = ScaleCriterionKind;
  using D = DriftCriterionKind;
  if (name == "gqaic") return {{S::GQAIC1, D::GQAIC2}};
  if (name == "gqaic-scalar") return {{S::GQAIC1_SCALAR, D::GQAIC2}};
  if (name == "gqaic-trunc") return {{S::GQAIC1_TRUNC, D::GQAIC2}};
  if (name == "gqaic-mod") return {{S::GQAIC1_MOD, D::GQAIC2}};
  if (name == "gqbic") return {{S::GQBIC1, D::GQBIC2}};
  if (name == "gqbic-sharp") return {{S::GQBIC1_SHARP, D::GQBIC2}};
  if (name == "faic") return {{S::FAIC1, D::FAIC2}};
  if (name == "standard" || name == "all")
    return {{S::FAIC1, D::FAIC2}, {S::GQAIC1, D::GQAIC2}, {S::GQBIC1, D::GQBIC2},
            {S::GQBIC1_SHARP, D::GQBIC2}};
  if (name.find(',') == std::string::npos && name.find(':') == std::string::npos)
    throw std::invalid_argument("unknown criterion preset '" + name + "'");
  std::vector<CriterionPair> out;
  std::stringstream ss(name);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.find(':') == std::string::npos) {
      auto more = criterion_preset(item);
      out.insert(out.end(), more.begin(), more.end());
    } else {
      out.push_back(parse_pair(item));
    }
  }
  if (out.empty()) throw std::invalid_argument("unknown criterion preset '" + name + "'");
  return out;
}

ExperimentConfig case_config(const std::string& name) {
  ExperimentConfig c;
  if (name == "i") {
    c.noise = NigNoise{10.0, 0.0, 10.0, 0.0};
  } else if (name == "ii") {
    c.noise = BilateralGammaNoise{1.0, std::sqrt(2.0), 1.0, std::sqrt(2.0)};
  } else if (name == "iii") {
    c.noise = NigNoise{25.0 / 3.0, 20.0 / 3.0, 9.0 / 5.0, -12.0 / 5.0};
  } else if (name == "gaussian") {
    c.noise = GaussianNoise{};
  } else {
    throw std::invalid_argument("unknown case '" + name + "' (expected i, ii, iii or gaussian)");
  }
  c.grid = {{0.01, 10.0}, {0.005, 10.0}, {0.01, 50.0}, {0.005, 50.0}};
  c.criteria = criterion_preset("standard");
  return c;
}

std::vector<std::string> design_warnings(const ExperimentConfig& cfg) {
  std::vector<std::string> w;
  if (auto s = standardization_warning(cfg.noise)) w.push_back(*s);
  for (const auto& g : cfg.grid) {
    const double nh2 = static_cast<double>(g.n()) * g.h * g.h;
    if (nh2 >= 0.5) {
      std::ostringstream os;
      os << "n h^2 = " << nh2 << " at (h = " << g.h << ", T = " << g.T
         << ") is not small; the theory needs n h^2 -> 0";
      w.push_back(os.str());
    }
  }
  return w;
}

std::size_t CellTable::total() const {
  std::size_t t = failed;
  for (const auto& row : counts)
    for (auto c : row) t += c;
  return t;
}

SamplePath simulate_replication(const ExperimentConfig& cfg, const GridPoint& gp, std::size_t r) {
  RngStream rng(cfg.base_seed, replication_stream_id(cfg.base_seed, r));
  EulerOptions eo;
  eo.refine = cfg.refine;
  return euler_path(cfg.true_model(), cfg.noise, gp.n(), gp.h, rng, eo);
}

FrequencyTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto scales = resolve(cfg.scales);
  const auto drifts = resolve(cfg.drifts);
  SelectionConfig sc;
  sc.opt = cfg.opt;
  sc.trunc_kappa = cfg.trunc_kappa;

  FrequencyTable table;
  table.scales = cfg.scales;
  table.drifts = cfg.drifts;
  table.replications = cfg.replications;

  const std::size_t workers = worker_count(cfg.threads, cfg.replications);
  for (const auto& gp : cfg.grid) {
    std::vector<ReplicationOutcome> outcomes(cfg.replications);
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mu;
    auto work = [&] {
      for (;;) {
        const std::size_t r = next.fetch_add(1);
        if (r >= cfg.replications) return;
        auto& out = outcomes[r];
        out.picks.assign(cfg.criteria.size(), std::nullopt);
        try {
          const auto path = simulate_replication(cfg, gp, r);
          FitCache cache;
          for (std::size_t k = 0; k < cfg.criteria.size(); ++k) {
            try {
              const auto o = stepwise_select(path, scales, drifts, cfg.criteria[k].scale,
                                             cfg.criteria[k].drift, sc, &cache);
              out.picks[k] = std::make_pair(o.drift.chosen, o.scale.chosen);
            } catch (const NumericalError&) {
            }
          }
        } catch (const NumericalError&) {
          out.path_failed = true;
        } catch (...) {
          std::lock_guard<std::mutex> lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          next = cfg.replications;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (fatal) std::rethrow_exception(fatal);

    GridResult gr;
    gr.point = gp;
    for (const auto& pair : cfg.criteria) {
      CellTable ct;
      ct.pair = pair;
      ct.counts.assign(drifts.size(), std::vector<std::size_t>(scales.size(), 0));
      gr.tables.push_back(std::move(ct));
    }
    for (const auto& o : outcomes) {
      for (std::size_t k = 0; k < cfg.criteria.size(); ++k) {
        if (o.path_failed || !o.picks[k]) {
          ++gr.tables[k].failed;
        } else {
          ++gr.tables[k].counts[o.picks[k]->first][o.picks[k]->second];
        }
      }
    }
    table.grid.push_back(std::move(gr));
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json boxes;
  for (const auto& c : scales) boxes[c.name] = {{"lo", c.box.lo()}, {"hi", c.box.hi()}};
  for (const auto& c : drifts) boxes[c.name] = {{"lo", c.box.lo()}, {"hi", c.box.hi()}};
  table.metadata = {{"config", to_json(cfg)},
                    {"parameter_boxes", boxes},
                    {"seed_derivation", "stream_id = base_seed XOR replication"},
                    {"runtime_seconds", secs},
                    {"threads", workers},
                    {"warnings", design_warnings(cfg)}};
  return table;
}

nlohmann::json to_json(const LevySpec& spec) {
  return std::visit(
      overloaded{[](const GaussianNoise&) { return nlohmann::json{{"kind", "gaussian"}}; },
                 [](const NigNoise& p) {
                   return nlohmann::json{{"kind", "nig"},
                                         {"alpha", p.alpha},
                                         {"beta", p.beta},
                                         {"delta_rate", p.delta_rate},
                                         {"mu_rate", p.mu_rate}};
                 },
                 [](const BilateralGammaNoise& p) {
                   return nlohmann::json{{"kind", "bilateral_gamma"},
                                         {"shape_pos_rate", p.shape_pos_rate},
                                         {"rate_pos", p.rate_pos},
                                         {"shape_neg_rate", p.shape_neg_rate},
                                         {"rate_neg", p.rate_neg}};
                 }},
      spec);
}

LevySpec levy_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  LevySpec spec;
  if (kind == "gaussian") {
    spec = GaussianNoise{};
  } else if (kind == "nig") {
    spec = NigNoise{j.at("alpha").get<double>(), j.value("beta", 0.0), j.at("delta_rate").get<double>(),
                    j.value("mu_rate", 0.0)};
  } else if (kind == "bilateral_gamma") {
    spec = BilateralGammaNoise{j.at("shape_pos_rate").get<double>(), j.at("rate_pos").get<double>(),
                               j.at("shape_neg_rate").get<double>(), j.at("rate_neg").get<double>()};
  } else {
    throw std::invalid_argument("unknown noise kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["noise"] = to_json(c.noise);
  j["truth"] = {{"scale", c.truth_scale},
                {"gamma", c.truth_gamma},
                {"drift", c.truth_drift},
                {"alpha", c.truth_alpha},
                {"x0", c.x0}};
  auto grid = nlohmann::json::array();
  for (const auto& g : c.grid) grid.push_back({{"h", g.h}, {"T", g.T}});
  j["grid"] = std::move(grid);
  j["replications"] = c.replications;
  j["scales"] = c.scales;
  j["drifts"] = c.drifts;
  auto crit = nlohmann::json::array();
  for (const auto& p : c.criteria) crit.push_back(p.label());
  j["criteria"] = std::move(crit);
  j["base_seed"] = c.base_seed;
  j["refine"] = c.refine;
  j["threads"] = c.threads;
  j["trunc_kappa"] = c.trunc_kappa;
  j["optimizer"] = {{"starts_per_axis", c.opt.starts_per_axis},
                    {"max_iter", c.opt.max_iter},
                    {"f_tol", c.opt.f_tol},
                    {"x_tol", c.opt.x_tol},
                    {"coarse_iter", c.opt.coarse_iter},
                    {"coarse_x_tol", c.opt.coarse_x_tol}};
  return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const ExperimentConfig& base) {
  ExperimentConfig c = base;
  if (j.contains("noise")) c.noise = levy_from_json(j.at("noise"));
  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    c.truth_scale = t.value("scale", c.truth_scale);
    c.truth_gamma = t.value("gamma", c.truth_gamma);
    c.truth_drift = t.value("drift", c.truth_drift);
    c.truth_alpha = t.value("alpha", c.truth_alpha);
    c.x0 = t.value("x0", c.x0);
  }
  if (j.contains("grid")) {
    c.grid.clear();
    for (const auto& g : j.at("grid")) c.grid.push_back({g.at("h").get<double>(), g.at("T").get<double>()});
  }
  c.replications = j.value("replications", c.replications);
  c.scales = j.value("scales", c.scales);
  c.drifts = j.value("drifts", c.drifts);
  if (j.contains("criteria")) {
    c.criteria.clear();
    for (const auto& s : j.at("criteria")) {
      auto more = criterion_preset(s.get<std::string>());
      c.criteria.insert(c.criteria.end(), more.begin(), more.end());
    }
  }
  c.base_seed = j.value("base_seed", c.base_seed);
  c.refine = j.value("refine", c.refine);
  c.threads = j.value("threads", c.threads);
  c.trunc_kappa = j.value("trunc_kappa", c.trunc_kappa);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    c.opt.starts_per_axis = o.value("starts_per_axis", c.opt.starts_per_axis);
    c.opt.max_iter = o.value("max_iter", c.opt.max_iter);
    c.opt.f_tol = o.value("f_tol", c.opt.f_tol);
    c.opt.x_tol = o.value("x_tol", c.opt.x_tol);
    c.opt.coarse_iter = o.value("coarse_iter", c.opt.coarse_iter);
    c.opt.coarse_x_tol = o.value("coarse_x_tol", c.opt.coarse_x_tol);
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const FrequencyTable& t) {
  nlohmann::json j;
  j["scales"] = t.scales;
  j["drifts"] = t.drifts;
  j["replications"] = t.replications;
  auto grid = nlohmann::json::array();
  for (const auto& g : t.grid) {
    nlohmann::json gj{{"h", g.point.h}, {"T", g.point.T}, {"n", g.point.n()}};
    auto tabs = nlohmann::json::array();
    for (const auto& ct : g.tables) {
      tabs.push_back({{"criterion", ct.pair.label()},
                      {"counts", ct.counts},
                      {"failed", ct.failed},
                      {"total", ct.total()}});
    }
    gj["tables"] = std::move(tabs);
    grid.push_back(std::move(gj));
  }
  j["grid"] = std::move(grid);
  j["metadata"] = t.metadata;
  return j;
}

void write_frequency_csv(std::ostream& os, const FrequencyTable& t) {
  os << "T,h,n,criterion,scale_idx,drift_idx,count\n";
  const auto old = os.precision(17);
  for (const auto& g : t.grid) {
    for (const auto& ct : g.tables) {
      const auto prefix = [&] {
        std::ostringstream p;
        p.precision(17);
        p << g.point.T << ',' << g.point.h << ',' << g.point.n() << ',' << ct.pair.label() << ',';
        return p.str();
      }();
      for (std::size_t d = 0; d < ct.counts.size(); ++d)
        for (std::size_t s = 0; s < ct.counts[d].size(); ++s)
          os << prefix << s << ',' << d << ',' << ct.counts[d][s] << '\n';
      os << prefix << "-1,-1," << ct.failed << '\n';
    }
  }
  os.precision(old);
}

std::vector<ReferenceRow> read_reference_csv(std::istream& is) {
  std::vector<ReferenceRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "case,criterion,T,h,n,drift,scale,count")
        throw DataError("unexpected reference header '" + line + "'", lineno, 1);
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(trim(item));
    if (f.size() != 8) throw DataError("reference row needs 8 fields", lineno, 1);
    try {
      rows.push_back({f[0], f[1], std::stod(f[2]), std::stod(f[3]),
                      static_cast<std::size_t>(std::stoull(f[4])), f[5], f[6],
                      static_cast<std::size_t>(std::stoull(f[7]))});
    } catch (const std::logic_error&) {
      throw DataError("malformed number in reference row", lineno, 1);
    }
  }
  if (!header) throw DataError("missing reference header", lineno + 1, 1);
  return rows;
}

std::size_t ReferenceBlock::total() const {
  std::size_t t = 0;
  for (const auto& r : counts)
    for (auto c : r) t += c;
  return t;
}

ReferenceBlock reference_block(const std::vector<ReferenceRow>& rows, const std::string& criterion,
                               double T, double h, const std::vector<std::string>& drifts,
                               const std::vector<std::string>& scales) {
  ReferenceBlock b;
  b.counts.assign(drifts.size(), std::vector<std::size_t>(scales.size(), 0));
  std::size_t hits = 0;
  for (const auto& r : rows) {
    if (r.criterion != criterion || std::abs(r.T - T) > 1e-9 * T || std::abs(r.h - h) > 1e-9 * h)
      continue;
    const auto d = std::find(drifts.begin(), drifts.end(), r.drift);
    const auto s = std::find(scales.begin(), scales.end(), r.scale);
    if (d == drifts.end() || s == scales.end())
      throw std::invalid_argument("reference cell " + r.drift + "/" + r.scale +
                                  " is not in the candidate grid");
    b.counts[static_cast<std::size_t>(d - drifts.begin())][static_cast<std::size_t>(s - scales.begin())] =
        r.count;
    ++hits;
  }
  if (hits == 0) throw std::invalid_argument("reference has no block for " + criterion);
  if (hits != drifts.size() * scales.size())
    throw std::invalid_argument("reference block for " + criterion + " does not cover the grid");
  return b;
}

ComparisonReport compare_to_reference(const CellTable& table, const ReferenceBlock& ref,
                                      double tolerance) {
  if (ref.counts.empty()) throw std::invalid_argument("compare_to_reference: empty reference");
  if (ref.counts.size() != table.counts.size())
    throw std::invalid_argument("compare_to_reference: drift dimension mismatch");
  for (std::size_t d = 0; d < ref.counts.size(); ++d)
    if (ref.counts[d].size() != table.counts[d].size())
      throw std::invalid_argument("compare_to_reference: scale dimension mismatch");
  const double n1 = static_cast<double>(table.total());
  const double n2 = static_cast<double>(ref.total());
  if (n1 == 0.0 || n2 == 0.0) throw std::invalid_argument("compare_to_reference: empty table");
  const double floor = 1.0 / (2.0 * std::max(n1, n2));
  ComparisonReport rep;
  for (std::size_t d = 0; d < ref.counts.size(); ++d) {
    for (std::size_t s = 0; s < ref.counts[d].size(); ++s) {
      const double c1 = static_cast<double>(table.counts[d][s]);
      const double c2 = static_cast<double>(ref.counts[d][s]);
      CellComparison cc;
      cc.drift = d;
      cc.scale = s;
      cc.observed = c1 / n1;
      cc.reference = c2 / n2;
      const double pooled = (c1 + c2) / (n1 + n2);
      cc.std_error = std::max(floor, std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)));
      cc.pass = std::abs(cc.observed - cc.reference) <= tolerance * cc.std_error;
      rep.pass = rep.pass && cc.pass;
      rep.cells.push_back(cc);
    }
  }
  return rep;
}

std::optional<CriterionPair> pair_for_reference_label(const std::string& label) {
  using S = ScaleCriterionKind;
  using D = DriftCriterionKind;
  if (label == "fAIC") return CriterionPair{S::FAIC1, D::FAIC2};
  if (label == "GQAIC") return CriterionPair{S::GQAIC1, D::GQAIC2};
  if (label == "GQBIC") return CriterionPair{S::GQBIC1, D::GQBIC2};
  if (label == "GQBIC_sharp") return CriterionPair{S::GQBIC1_SHARP, D::GQBIC2};
  return std::nullopt;
}

std::string reference_label(const CriterionPair& pair) {
  for (const char* l : {"fAIC", "GQAIC", "GQBIC", "GQBIC_sharp"})
    if (pair_for_reference_label(l) == pair) return l;
  return {};
}

}  // namespace gqic
