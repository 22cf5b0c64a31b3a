#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simple/dcmm.hpp"
#include "simple/graph_io.hpp"
#include "simple/inference.hpp"
#include "simple/oracle.hpp"

namespace simple {

enum class ModelKind { model1, model2 };
enum class KMode { true_k, estimated_k };
// `both` tests the size pair and the power pair on every simulated network.
enum class PairMode { size, power, both };

std::string_view model_name(ModelKind model);

struct ExperimentConfig {
  ModelKind model = ModelKind::model1;
  Index n = 1500;
  Index n0 = 300;
  double rho = 0.2;
  std::vector<double> grid;  // theta (model 1) or r^2 (model 2)
  Index replications = 200;
  double alpha = 0.05;
  KMode k_mode = KMode::true_k;
  std::uint64_t master_seed = 1;
  PairMode pair_mode = PairMode::both;
  bool self_loops = false;
  bool keep_statistics = false;
  unsigned threads = 1;

  // Throws UsageError on the first violated invariant.
  void validate() const;
};

// Model parameters of grid point g. Model 2 degree parameters are drawn once
// per grid point and shared by its replications.
DcmmParams grid_params(const ExperimentConfig& cfg, std::size_t g);

// Seed of the network simulated for replication `rep` of grid point g.
std::uint64_t replication_seed(const ExperimentConfig& cfg, std::size_t g, Index rep);

// Rejections among the replications that produced a valid test. The rate is
// NaN when no test was run, or when at least 1% of replications failed.
struct RateEstimate {
  Index rejections = 0;
  Index valid = 0;
  Index failures = 0;
  double rate = 0.0;

  bool flagged() const { return std::isnan(rate); }
};

RateEstimate make_rate(Index rejections, Index valid, Index failures);

struct GridPointReport {
  double signal = 0.0;
  Index replications = 0;
  std::optional<RateEstimate> size;
  std::optional<RateEstimate> power;
  std::vector<double> size_statistics;  // valid null statistics, by replication
  Index df = 0;                        // degrees of freedom of the null law
  std::map<Index, Index> k_hat_counts;  // K_hat -> replications
  std::optional<RateEstimate> k_exact;  // P(K_hat = K)
  std::optional<RateEstimate> k_at_most;  // P(K_hat <= K)
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<GridPointReport> points;
  double wall_seconds = 0.0;  // metadata only, never part of CSV output
};

// T for model 1 and G for model 2, at the pairs selected by cfg.pair_mode.
ExperimentReport run_size_power(const ExperimentConfig& cfg);

// Frequencies of K_hat = K and K_hat <= K with K = 3.
ExperimentReport run_k_accuracy(const ExperimentConfig& cfg);

struct NullHistogram {
  double signal = 0.0;
  Index df = 0;
  std::vector<double> samples;
  Index failures = 0;
  double ks_distance = 0.0;
};

// Null statistics at the size pair and their KS distance to chi-square(df).
// Requires pair_mode = size and the true K.
std::vector<NullHistogram> null_histogram(const ExperimentConfig& cfg);

// Rows (model, n, signal, metric, value, replications, failures).
void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_histogram_csv(std::ostream& out, const std::vector<NullHistogram>& hists,
                         const ExperimentConfig& cfg);
// One statistic per line under the header "statistic".
void write_samples_csv(std::ostream& out, const std::vector<double>& samples);

enum class StudyKind { size_power, k_accuracy, null_histogram };

struct Preset {
  std::string name;
  StudyKind kind = StudyKind::size_power;
  ExperimentConfig config;
};

std::vector<std::string> preset_names();
// Throws UsageError for unknown names.
Preset find_preset(std::string_view name);

// Plug-in covariance error study against the known truth.
struct ConsistencyConfig {
  ModelKind model = ModelKind::model1;
  std::vector<std::pair<Index, Index>> sizes = {{500, 100}, {1000, 200}, {2000, 400}};
  double rho = 0.2;
  double signal = 0.9;
  Index replications = 20;
  std::uint64_t master_seed = 1;
  TkOptions tk;  // model 2 only
  unsigned threads = 1;
};

struct ConsistencyRow {
  Index n = 0;
  std::string metric;
  double value = 0.0;
};

// Mean over replications of the scaled spectral error of the plug-in
// covariance at the size pair: n^2 theta |S1 - Sigma1| for model 1 and
// n theta_min^2 |S2 - Sigma2| for model 2.
std::vector<ConsistencyRow> run_consistency(const ConsistencyConfig& cfg);

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows);

}  // namespace simple
