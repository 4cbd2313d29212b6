#ifndef GQIC_EXPERIMENT_HPP_
#define GQIC_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gqic/criteria.hpp"
#include "gqic/levy.hpp"
#include "gqic/optimize.hpp"
#include "gqic/sde.hpp"

namespace gqic {

struct GridPoint {
  double h = 0.01;
  double T = 50.0;
  std::size_t n() const;  // round(T / h); throws unless T/h is (nearly) an integer
};

struct CriterionPair {
  ScaleCriterionKind scale = ScaleCriterionKind::GQBIC1;
  DriftCriterionKind drift = DriftCriterionKind::GQBIC2;
  std::string label() const;  // "GQBIC1:GQBIC2"
  bool operator==(const CriterionPair&) const = default;
};

struct ExperimentConfig {
  LevySpec noise = GaussianNoise{};
  // Truth as registry coefficients with fixed parameters.
  std::string truth_scale = "Scale2";
  std::vector<double> truth_gamma{3.0};
  std::string truth_drift = "Drift2";
  std::vector<double> truth_alpha{0.5};
  double x0 = 0.0;
  std::vector<GridPoint> grid{{0.01, 50.0}};
  std::size_t replications = 200;
  std::vector<std::string> scales{"Scale1", "Scale2", "Scale3", "Scale4"};
  std::vector<std::string> drifts{"Drift1", "Drift2", "Drift3"};
  std::vector<CriterionPair> criteria{{}};
  std::uint64_t base_seed = 20240601;
  std::size_t refine = 10;
  std::size_t threads = 1;
  double trunc_kappa = kDefaultTruncKappa;
  OptConfig opt;

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  TrueModel true_model() const;
};

// Presets for the three simulation noises (plus Gaussian), all on the
// four (h, T) grid points and the four standard criterion pairs.
ExperimentConfig case_config(const std::string& name);
std::vector<CriterionPair> criterion_preset(const std::string& name);

// Warnings about the design, e.g. n h^2 >= 0.5 or a non-standardized noise.
std::vector<std::string> design_warnings(const ExperimentConfig& cfg);

struct CellTable {
  CriterionPair pair;
  // counts[drift][scale]
  std::vector<std::vector<std::size_t>> counts;
  std::size_t failed = 0;
  std::size_t total() const;
};

struct GridResult {
  GridPoint point;
  std::vector<CellTable> tables;  // one per criterion pair
};

struct FrequencyTable {
  std::vector<std::string> scales;
  std::vector<std::string> drifts;
  std::vector<GridResult> grid;
  std::size_t replications = 0;
  nlohmann::json metadata;  // config echo, seeds, runtime
};

// Stream id of replication r is base_seed ^ r; results do not depend on the
// number of threads.
FrequencyTable run_experiment(const ExperimentConfig& cfg);

// Replication-level hook used by the experiment and by tests: simulates the
// path of replication r at one grid point.
SamplePath simulate_replication(const ExperimentConfig& cfg, const GridPoint& gp,
                                std::size_t r);

nlohmann::json to_json(const LevySpec& spec);
LevySpec levy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
// Keys absent from j keep the value they have in base.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const ExperimentConfig& base = {});
nlohmann::json to_json(const FrequencyTable& table);

// CSV columns: T,h,n,criterion,scale_idx,drift_idx,count. Failed replications
// use scale_idx = drift_idx = -1. Indices are 0-based.
void write_frequency_csv(std::ostream& os, const FrequencyTable& table);

// Reference counts shipped with the library (columns
// case,criterion,T,h,n,drift,scale,count).
struct ReferenceRow {
  std::string case_name;
  std::string criterion;
  double T = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  std::string drift;
  std::string scale;
  std::size_t count = 0;
};
std::vector<ReferenceRow> read_reference_csv(std::istream& is);

// Reference block for one criterion label and grid point as a count matrix
// over (drift, scale) in the given name order.
struct ReferenceBlock {
  std::vector<std::vector<std::size_t>> counts;
  std::size_t total() const;
};
ReferenceBlock reference_block(const std::vector<ReferenceRow>& rows, const std::string& criterion,
                               double T, double h, const std::vector<std::string>& drifts,
                               const std::vector<std::string>& scales);

struct CellComparison {
  std::size_t drift = 0;
  std::size_t scale = 0;
  double observed = 0.0;   // frequency
  double reference = 0.0;  // frequency
  double std_error = 0.0;  // pooled binomial SE of the difference
  bool pass = true;
};

struct ComparisonReport {
  std::vector<CellComparison> cells;
  bool pass = true;
};

// Per-cell frequency differences against a reference block; a cell fails when
// |diff| > tolerance * SE (SE floored at 1 / (2 max(N_obs, N_ref)) so that
// zero-count cells are comparable).
ComparisonReport compare_to_reference(const CellTable& table, const ReferenceBlock& reference,
                                      double tolerance);

// Maps a reference-table criterion label (fAIC, GQAIC, GQBIC, GQBIC_sharp) to the pair
// that reproduces it.
std::optional<CriterionPair> pair_for_reference_label(const std::string& label);
std::string reference_label(const CriterionPair& pair);

}  // namespace gqic

#endif  // GQIC_EXPERIMENT_HPP_
