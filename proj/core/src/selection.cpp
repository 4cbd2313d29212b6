#include "gqic/selection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gqic/error.hpp"

namespace gqic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void finish(StepResult& r) {
  double best = kInf;
  std::size_t count = 0;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (r.values[i] < best) {
      best = r.values[i];
      r.chosen = i;
      count = 1;
    } else if (r.values[i] == best && std::isfinite(best)) {
      ++count;
    }
  }
  r.tie = count > 1;
}

void resize(StepResult& r, std::size_t m) {
  r.names.resize(m);
  r.values.assign(m, kInf);
  r.failed.assign(m, false);
  r.errors.assign(m, std::string());
  r.truncated.assign(m, false);
}

nlohmann::json value_json(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

const FitCache::ScaleEntry& FitCache::scale(const SamplePath& path, const Coefficient& c,
                                            const OptConfig& cfg) {
  auto it = scale_.find(c.name);
  if (it != scale_.end()) return it->second;
  ScaleEntry e;
  try {
    e.fit = fit_scale(path, c, cfg);
  } catch (const NumericalError& ex) {
    e.error = ex.what();
  }
  return scale_.emplace(c.name, std::move(e)).first->second;
}

const FitCache::DriftEntry& FitCache::drift(const SamplePath& path, const CandidateModel& m,
                                            const ScaleFit& scale_fit, const OptConfig& cfg) {
  const std::string key = m.scale.name + "|" + m.drift.name;
  auto it = drift_.find(key);
  if (it != drift_.end()) return it->second;
  DriftEntry e;
  try {
    e.fit = fit_drift(path, m, scale_fit.gamma, cfg);
  } catch (const NumericalError& ex) {
    e.error = ex.what();
  }
  return drift_.emplace(key, std::move(e)).first->second;
}

StepResult select_scale(const SamplePath& path, const std::vector<Coefficient>& scales,
                        ScaleCriterionKind kind, const SelectionConfig& cfg, FitCache* cache) {
  if (scales.empty()) throw std::invalid_argument("select_scale: no scale candidates");
  FitCache local;
  FitCache& fc = cache ? *cache : local;
  StepResult r;
  resize(r, scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) {
    r.names[i] = scales[i].name;
    const auto& e = fc.scale(path, scales[i], cfg.opt);
    if (!e.fit) {
      r.failed[i] = true;
      r.errors[i] = e.error;
      continue;
    }
    try {
      const auto cv = scale_criterion(*e.fit, kind, cfg.trunc_kappa);
      r.values[i] = std::isnan(cv.value) ? kInf : cv.value;
      r.truncated[i] = cv.truncated;
      if (!std::isfinite(cv.value)) r.failed[i] = true;
    } catch (const NumericalError& ex) {
      r.failed[i] = true;
      r.errors[i] = ex.what();
    }
  }
  finish(r);
  if (!std::isfinite(r.values[r.chosen]))
    throw NumericalError("select_scale: every scale candidate failed");
  return r;
}

StepResult select_drift(const SamplePath& path, const std::vector<Coefficient>& drifts,
                        const Coefficient& scale, const ScaleFit& scale_fit,
                        DriftCriterionKind kind, const SelectionConfig& cfg, FitCache* cache) {
  if (drifts.empty()) throw std::invalid_argument("select_drift: no drift candidates");
  FitCache local;
  FitCache& fc = cache ? *cache : local;
  StepResult r;
  resize(r, drifts.size());
  for (std::size_t i = 0; i < drifts.size(); ++i) {
    r.names[i] = drifts[i].name;
    const auto& e = fc.drift(path, CandidateModel{scale, drifts[i]}, scale_fit, cfg.opt);
    if (!e.fit) {
      r.failed[i] = true;
      r.errors[i] = e.error;
      continue;
    }
    r.values[i] = drift_criterion(*e.fit, path.horizon(), kind);
    if (!std::isfinite(r.values[i])) r.values[i] = kInf, r.failed[i] = true;
  }
  finish(r);
  if (!std::isfinite(r.values[r.chosen]))
    throw NumericalError("select_drift: every drift candidate failed");
  return r;
}

SelectionOutcome stepwise_select(const SamplePath& path, const std::vector<Coefficient>& scales,
                                 const std::vector<Coefficient>& drifts,
                                 ScaleCriterionKind scale_kind, DriftCriterionKind drift_kind,
                                 const SelectionConfig& cfg, FitCache* cache) {
  if (scales.empty() || drifts.empty())
    throw std::invalid_argument("stepwise_select: candidate lists must be nonempty");
  FitCache local;
  FitCache& fc = cache ? *cache : local;
  SelectionOutcome out;
  out.scale_kind = scale_kind;
  out.drift_kind = drift_kind;
  out.scale = select_scale(path, scales, scale_kind, cfg, &fc);
  for (const auto& c : scales) {
    const auto& e = fc.scale(path, c, cfg.opt);
    if (e.fit) out.scale_fits.push_back(*e.fit);
  }
  const auto& chosen = scales[out.scale.chosen];
  const auto& chosen_fit = *fc.scale(path, chosen, cfg.opt).fit;
  out.drift = select_drift(path, drifts, chosen, chosen_fit, drift_kind, cfg, &fc);
  out.chosen_drift_fit =
      fc.drift(path, CandidateModel{chosen, drifts[out.drift.chosen]}, chosen_fit, cfg.opt).fit;
  out.evaluations = scales.size() + drifts.size();
  if (cfg.full_grid) {
    for (const auto& c : scales) {
      const auto& e = fc.scale(path, c, cfg.opt);
      if (!e.fit) {
        StepResult failed;
        resize(failed, drifts.size());
        for (std::size_t i = 0; i < drifts.size(); ++i) {
          failed.names[i] = drifts[i].name;
          failed.failed[i] = true;
          failed.errors[i] = e.error;
        }
        out.full_grid.push_back(std::move(failed));
        continue;
      }
      try {
        out.full_grid.push_back(select_drift(path, drifts, c, *e.fit, drift_kind, cfg, &fc));
      } catch (const NumericalError&) {
        StepResult failed;
        resize(failed, drifts.size());
        for (std::size_t i = 0; i < drifts.size(); ++i) {
          failed.names[i] = drifts[i].name;
          failed.failed[i] = true;
        }
        out.full_grid.push_back(std::move(failed));
      }
    }
  }
  return out;
}

nlohmann::json to_json(const StepResult& s) {
  nlohmann::json j;
  j["candidates"] = s.names;
  auto vals = nlohmann::json::array();
  for (double v : s.values) vals.push_back(value_json(v));
  j["values"] = std::move(vals);
  j["failed"] = s.failed;
  j["errors"] = s.errors;
  j["truncated"] = s.truncated;
  j["chosen"] = s.chosen;
  j["chosen_name"] = s.names.empty() ? std::string() : s.names[s.chosen];
  j["tie"] = s.tie;
  return j;
}

nlohmann::json to_json(const SelectionOutcome& o) {
  nlohmann::json j;
  j["scale_criterion"] = std::string(to_string(o.scale_kind));
  j["drift_criterion"] = std::string(to_string(o.drift_kind));
  j["scale_step"] = to_json(o.scale);
  j["drift_step"] = to_json(o.drift);
  j["evaluations"] = o.evaluations;
  auto fits = nlohmann::json::array();
  for (const auto& f : o.scale_fits) {
    fits.push_back({{"scale", f.name},
                    {"gamma_hat", f.gamma},
                    {"h1_value", f.h1_value},
                    {"gamma_gamma_hat", matrix_to_json(f.gamma_gamma_hat)},
                    {"w_gamma_hat", matrix_to_json(f.w_gamma_hat)},
                    {"nu2_hat", f.nu2_hat},
                    {"nu4_hat", f.nu4_hat},
                    {"converged", f.converged},
                    {"boundary_hit", f.boundary_hit}});
  }
  j["scale_fits"] = std::move(fits);
  if (o.chosen_drift_fit) {
    const auto& d = *o.chosen_drift_fit;
    j["drift_fit"] = {{"drift", d.name},
                      {"alpha_hat", d.alpha},
                      {"h2_value", d.h2_value},
                      {"converged", d.converged},
                      {"boundary_hit", d.boundary_hit}};
  }
  if (!o.full_grid.empty()) {
    auto g = nlohmann::json::array();
    for (const auto& s : o.full_grid) g.push_back(to_json(s));
    j["full_grid"] = std::move(g);
  }
  return j;
}

}  // namespace gqic
