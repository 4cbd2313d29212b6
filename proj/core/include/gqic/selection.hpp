#ifndef GQIC_SELECTION_HPP_
#define GQIC_SELECTION_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gqic/criteria.hpp"
#include "gqic/estimator.hpp"

namespace gqic {

struct SelectionConfig {
  OptConfig opt;
  double trunc_kappa = kDefaultTruncKappa;
  bool full_grid = false;  // also score every drift under every scale
};

// Fits shared across criterion pairs on one path. Keys are candidate names.
class FitCache {
 public:
  struct ScaleEntry {
    std::optional<ScaleFit> fit;
    std::string error;
  };
  struct DriftEntry {
    std::optional<DriftFit> fit;
    std::string error;
  };

  const ScaleEntry& scale(const SamplePath& path, const Coefficient& c, const OptConfig& cfg);
  const DriftEntry& drift(const SamplePath& path, const CandidateModel& m,
                          const ScaleFit& scale_fit, const OptConfig& cfg);
  std::size_t scale_fits() const { return scale_.size(); }
  std::size_t drift_fits() const { return drift_.size(); }

 private:
  std::map<std::string, ScaleEntry> scale_;
  std::map<std::string, DriftEntry> drift_;
};

struct StepResult {
  std::vector<std::string> names;
  std::vector<double> values;  // +inf for failed candidates
  std::vector<bool> failed;
  std::vector<std::string> errors;
  std::vector<bool> truncated;  // GQAIC1_TRUNC only
  std::size_t chosen = 0;
  bool tie = false;  // several candidates attained the minimum
};

// Argmin over scale candidates; throws NumericalError when every candidate fails.
StepResult select_scale(const SamplePath& path, const std::vector<Coefficient>& scales,
                        ScaleCriterionKind kind, const SelectionConfig& cfg = {},
                        FitCache* cache = nullptr);

// Argmin over drift candidates, every H2 conditioned on the chosen scale fit.
StepResult select_drift(const SamplePath& path, const std::vector<Coefficient>& drifts,
                        const Coefficient& scale, const ScaleFit& scale_fit,
                        DriftCriterionKind kind, const SelectionConfig& cfg = {},
                        FitCache* cache = nullptr);

struct SelectionOutcome {
  ScaleCriterionKind scale_kind{};
  DriftCriterionKind drift_kind{};
  StepResult scale;
  StepResult drift;
  std::size_t evaluations = 0;  // M1 + M2
  std::vector<ScaleFit> scale_fits;  // successful fits, by candidate order
  std::optional<DriftFit> chosen_drift_fit;
  std::vector<StepResult> full_grid;  // drift step under every scale, if requested
};

SelectionOutcome stepwise_select(const SamplePath& path, const std::vector<Coefficient>& scales,
                                 const std::vector<Coefficient>& drifts,
                                 ScaleCriterionKind scale_kind, DriftCriterionKind drift_kind,
                                 const SelectionConfig& cfg = {}, FitCache* cache = nullptr);

nlohmann::json to_json(const StepResult& step);
nlohmann::json to_json(const SelectionOutcome& outcome);

}  // namespace gqic

#endif  // GQIC_SELECTION_HPP_
