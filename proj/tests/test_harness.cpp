#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "simple/errors.hpp"
#include "simple/harness.hpp"

using namespace simple;

namespace {

ExperimentConfig small(ModelKind model) {
  ExperimentConfig cfg;
  cfg.model = model;
  cfg.n = 300;
  cfg.n0 = 60;
  cfg.grid = {0.9};
  cfg.replications = 8;
  cfg.master_seed = 5;
  return cfg;
}

std::string csv(const ExperimentReport& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

}  // namespace

TEST(Harness, ConfigValidation) {
  ExperimentConfig cfg = small(ModelKind::model1);
  EXPECT_NO_THROW(cfg.validate());
  cfg.grid.clear();
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = small(ModelKind::model1);
  cfg.replications = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = small(ModelKind::model1);
  cfg.alpha = 1.0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = small(ModelKind::model1);
  cfg.n = 301;
  EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(Harness, FailurePolicy) {
  EXPECT_DOUBLE_EQ(make_rate(10, 200, 0).rate, 0.05);
  EXPECT_DOUBLE_EQ(make_rate(10, 199, 1).rate, 10.0 / 199.0);
  EXPECT_TRUE(make_rate(10, 198, 2).flagged());
  EXPECT_TRUE(make_rate(0, 0, 0).flagged());
}

TEST(Harness, SeedsDependOnlyOnIndices) {
  const ExperimentConfig cfg = small(ModelKind::model2);
  EXPECT_EQ(replication_seed(cfg, 0, 3), replication_seed(cfg, 0, 3));
  EXPECT_NE(replication_seed(cfg, 0, 3), replication_seed(cfg, 0, 4));
  EXPECT_NE(replication_seed(cfg, 0, 3), replication_seed(cfg, 1, 3));
  ExperimentConfig two = cfg;
  two.grid = {0.9, 0.5};
  EXPECT_EQ(grid_params(cfg, 0).theta, grid_params(two, 0).theta);
}

TEST(Harness, ReportsAreReproducibleAcrossThreadCounts) {
  for (ModelKind m : {ModelKind::model1, ModelKind::model2}) {
    ExperimentConfig cfg = small(m);
    cfg.keep_statistics = true;
    const ExperimentReport a = run_size_power(cfg);
    cfg.threads = 3;
    const ExperimentReport b = run_size_power(cfg);
    EXPECT_EQ(csv(a), csv(b));
    EXPECT_EQ(a.points[0].size_statistics, b.points[0].size_statistics);
  }
}

TEST(Harness, SizeAndPowerRates) {
  ExperimentConfig cfg = small(ModelKind::model1);
  cfg.replications = 40;
  const ExperimentReport r = run_size_power(cfg);
  ASSERT_EQ(r.points.size(), 1u);
  const auto& p = r.points[0];
  ASSERT_TRUE(p.size && p.power);
  EXPECT_LT(p.size->rate, 0.3);
  EXPECT_GT(p.power->rate, 0.7);
  EXPECT_EQ(p.size->valid + p.size->failures, 40);
  EXPECT_GE(p.size->rate, 0.0);
  EXPECT_LE(p.power->rate, 1.0);
}

TEST(Harness, PairModeSelectsTests) {
  ExperimentConfig cfg = small(ModelKind::model1);
  cfg.pair_mode = PairMode::power;
  const ExperimentReport r = run_size_power(cfg);
  EXPECT_FALSE(r.points[0].size);
  EXPECT_TRUE(r.points[0].power);
}

TEST(Harness, EstimatedKRecordsFrequencies) {
  ExperimentConfig cfg = small(ModelKind::model1);
  cfg.k_mode = KMode::estimated_k;
  const ExperimentReport r = run_size_power(cfg);
  Index total = 0;
  for (const auto& [k, count] : r.points[0].k_hat_counts) total += count;
  EXPECT_EQ(total, cfg.replications);
}

TEST(Harness, KAccuracyFrequencies) {
  ExperimentConfig cfg = small(ModelKind::model2);
  cfg.grid = {0.3, 0.9};
  const ExperimentReport r = run_k_accuracy(cfg);
  for (const auto& p : r.points) {
    ASSERT_TRUE(p.k_exact && p.k_at_most);
    EXPECT_GE(p.k_at_most->rate, p.k_exact->rate);
    Index total = p.k_exact->failures;
    for (const auto& [k, count] : p.k_hat_counts) total += count;
    EXPECT_EQ(total, cfg.replications);
  }
}

TEST(Harness, NullHistogram) {
  ExperimentConfig cfg = small(ModelKind::model1);
  EXPECT_THROW(null_histogram(cfg), UsageError);
  cfg.pair_mode = PairMode::size;
  cfg.replications = 1;
  const auto h = null_histogram(cfg);
  ASSERT_EQ(h.size(), 1u);
  ASSERT_EQ(h[0].samples.size(), 1u);
  EXPECT_EQ(h[0].df, 3);
  EXPECT_GT(h[0].ks_distance, 0.0);
  EXPECT_LE(h[0].ks_distance, 1.0);
  std::ostringstream out;
  write_samples_csv(out, h[0].samples);
  EXPECT_EQ(out.str().substr(0, 10), "statistic\n");
}

TEST(Harness, CsvLayout) {
  const ExperimentReport r = run_size_power(small(ModelKind::model2));
  const std::string text = csv(r);
  EXPECT_EQ(text.substr(0, text.find('\n')), "model,n,signal,metric,value,replications,failures");
  EXPECT_NE(text.find("model2,300,0.9,size,"), std::string::npos);
  EXPECT_NE(text.find("model2,300,0.9,power,"), std::string::npos);
}

TEST(Harness, Presets) {
  const auto names = preset_names();
  EXPECT_EQ(names.size(), 10u);
  for (const auto& name : names) EXPECT_NO_THROW(find_preset(name).config.validate()) << name;
  const Preset p = find_preset("table1h-model1");
  EXPECT_EQ(p.config.n, 1500);
  EXPECT_EQ(p.config.n0, 300);
  EXPECT_EQ(p.config.grid.size(), 8u);
  EXPECT_EQ(find_preset("table1-model2").config.n0, 500);
  EXPECT_EQ(find_preset("table2-model1").config.k_mode, KMode::estimated_k);
  EXPECT_EQ(find_preset("table5-model2").kind, StudyKind::k_accuracy);
  const Preset f = find_preset("fig1-model2");
  EXPECT_EQ(f.kind, StudyKind::null_histogram);
  EXPECT_EQ(f.config.pair_mode, PairMode::size);
  EXPECT_THROW(find_preset("table9-model1"), UsageError);
  EXPECT_THROW(find_preset("table1"), UsageError);
}

TEST(Harness, ConsistencyRows) {
  for (ModelKind m : {ModelKind::model1, ModelKind::model2}) {
    ConsistencyConfig cfg;
    cfg.model = m;
    cfg.sizes = {{500, 100}, {700, 140}};
    cfg.replications = 2;
    cfg.tk.moment_samples = 20;
    const auto rows = run_consistency(cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].n, 700);
    for (const auto& r : rows) EXPECT_TRUE(std::isfinite(r.value) && r.value > 0.0);
  }
}
