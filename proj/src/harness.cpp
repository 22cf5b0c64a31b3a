#include "simple/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "simple/chi_square.hpp"
#include "simple/errors.hpp"
#include "simple/parallel.hpp"
#include "simple/rng.hpp"

namespace simple {

namespace {

constexpr Index kTrueK = 3;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Method model_method(ModelKind model) { return model == ModelKind::model1 ? Method::t : Method::g; }

struct PairOutcome {
  bool ran = false;
  bool failed = false;
  bool rejected = false;
  double statistic = 0.0;
  Index df = 0;
};

struct ReplicationOutcome {
  PairOutcome size;
  PairOutcome power;
  std::optional<Index> k_hat;
};

PairOutcome run_pair(const PreparedNetwork& prepared, Index i, Index j, double alpha) {
  PairOutcome out;
  out.ran = true;
  const TestResult r = test_pair(prepared, i, j);
  out.df = r.df;
  if (!r.ok()) {
    out.failed = true;
    return out;
  }
  out.statistic = r.statistic;
  out.rejected = reject(r, alpha);
  return out;
}

std::vector<ReplicationOutcome> simulate_tests(const ExperimentConfig& cfg, std::size_t g,
                                               const SimulationLayout& layout) {
  const MeanMatrix h = build_mean_matrix(grid_params(cfg, g));
  const Method method = model_method(cfg.model);
  const bool want_size = cfg.pair_mode != PairMode::power;
  const bool want_power = cfg.pair_mode != PairMode::size;
  std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(cfg.replications));
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t rep) {
    ReplicationOutcome& out = outcomes[rep];
    const auto x = sample_adjacency(h, replication_seed(cfg, g, static_cast<Index>(rep)),
                                    cfg.self_loops);
    std::optional<PreparedNetwork> prepared;
    try {
      prepared = prepare_network(
          x, method,
          cfg.k_mode == KMode::true_k ? std::optional<Index>(kTrueK) : std::nullopt);
    } catch (const NumericalError&) {
      out.size.ran = out.size.failed = want_size;
      out.power.ran = out.power.failed = want_power;
      return;
    }
    if (prepared->k_estimate) out.k_hat = prepared->k_estimate->k_hat;
    if (want_size) {
      const auto [i, j] = layout.size_pair();
      out.size = run_pair(*prepared, i, j, cfg.alpha);
    }
    if (want_power) {
      const auto [i, j] = layout.power_pair();
      out.power = run_pair(*prepared, i, j, cfg.alpha);
    }
  });
  return outcomes;
}

RateEstimate fold_pair(const std::vector<ReplicationOutcome>& outcomes,
                       PairOutcome ReplicationOutcome::*which) {
  Index hits = 0, valid = 0, failures = 0;
  for (const auto& o : outcomes) {
    const PairOutcome& p = o.*which;
    if (!p.ran) continue;
    if (p.failed) {
      ++failures;
    } else {
      ++valid;
      hits += p.rejected ? 1 : 0;
    }
  }
  return make_rate(hits, valid, failures);
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_rate(std::ostream& out, const ExperimentReport& report, const GridPointReport& p,
                std::string_view metric, const RateEstimate& r) {
  const auto& cfg = report.config;
  out << model_name(cfg.model) << ',' << cfg.n << ',' << p.signal << ',' << metric << ',';
  if (r.flagged()) {
    out << "NA";
  } else {
    out << r.rate;
  }
  out << ',' << p.replications << ',' << r.failures << '\n';
}

}  // namespace

RateEstimate make_rate(Index rejections, Index valid, Index failures) {
  RateEstimate r{rejections, valid, failures, kNaN};
  const Index total = valid + failures;
  if (valid > 0 && failures * 100 < total) {
    r.rate = static_cast<double>(rejections) / static_cast<double>(valid);
  }
  return r;
}

std::string_view model_name(ModelKind model) {
  return model == ModelKind::model1 ? "model1" : "model2";
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw UsageError("signal grid is empty");
  if (replications < 1) throw UsageError("replications must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw UsageError("rho must lie in [0, 1]");
  for (double s : grid) {
    if (!(s > 0.0 && s <= 1.0)) throw UsageError("signal values must lie in (0, 1]");
  }
  try {
    simulation_layout(n, n0);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

DcmmParams grid_params(const ExperimentConfig& cfg, std::size_t g) {
  const double s = cfg.grid.at(g);
  if (cfg.model == ModelKind::model1) return model1_params(cfg.n, cfg.n0, cfg.rho, s);
  return model2_params(cfg.n, cfg.n0, cfg.rho, std::sqrt(s),
                       derive_seed(cfg.master_seed, SeedStream::model_params, g));
}

std::uint64_t replication_seed(const ExperimentConfig& cfg, std::size_t g, Index rep) {
  return derive_seed(cfg.master_seed, SeedStream::adjacency, g, static_cast<std::uint64_t>(rep));
}

ExperimentReport run_size_power(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const SimulationLayout layout = simulation_layout(cfg.n, cfg.n0);
  ExperimentReport report{cfg, {}, 0.0};
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const auto outcomes = simulate_tests(cfg, g, layout);
    GridPointReport p;
    p.signal = cfg.grid[g];
    p.replications = cfg.replications;
    p.df = model_method(cfg.model) == Method::t ? kTrueK : kTrueK - 1;
    if (cfg.pair_mode != PairMode::power) p.size = fold_pair(outcomes, &ReplicationOutcome::size);
    if (cfg.pair_mode != PairMode::size) p.power = fold_pair(outcomes, &ReplicationOutcome::power);
    for (const auto& o : outcomes) {
      if (o.k_hat) ++p.k_hat_counts[*o.k_hat];
      if (cfg.keep_statistics && o.size.ran && !o.size.failed) {
        p.size_statistics.push_back(o.size.statistic);
      }
    }
    report.points.push_back(std::move(p));
  }
  report.wall_seconds = elapsed_since(start);
  return report;
}

ExperimentReport run_k_accuracy(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report{cfg, {}, 0.0};
  const Index m = examined_eigenvalue_count(cfg.n);
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const MeanMatrix h = build_mean_matrix(grid_params(cfg, g));
    std::vector<std::optional<Index>> k_hat(static_cast<std::size_t>(cfg.replications));
    parallel_for(k_hat.size(), cfg.threads, [&](std::size_t rep) {
      const auto x = sample_adjacency(h, replication_seed(cfg, g, static_cast<Index>(rep)),
                                      cfg.self_loops);
      try {
        k_hat[rep] = estimate_k(x, top_eigenvalues(x.dense(), m)).k_hat;
      } catch (const NumericalError&) {
      }
    });
    GridPointReport p;
    p.signal = cfg.grid[g];
    p.replications = cfg.replications;
    Index exact = 0, at_most = 0, valid = 0, failures = 0;
    for (const auto& k : k_hat) {
      if (!k) {
        ++failures;
        continue;
      }
      ++valid;
      ++p.k_hat_counts[*k];
      exact += *k == kTrueK ? 1 : 0;
      at_most += *k <= kTrueK ? 1 : 0;
    }
    p.k_exact = make_rate(exact, valid, failures);
    p.k_at_most = make_rate(at_most, valid, failures);
    report.points.push_back(std::move(p));
  }
  report.wall_seconds = elapsed_since(start);
  return report;
}

std::vector<NullHistogram> null_histogram(const ExperimentConfig& cfg) {
  if (cfg.pair_mode != PairMode::size) throw UsageError("null histogram needs pair_mode = size");
  if (cfg.k_mode != KMode::true_k) throw UsageError("null histogram needs the true K");
  ExperimentConfig run = cfg;
  run.keep_statistics = true;
  const ExperimentReport report = run_size_power(run);
  std::vector<NullHistogram> out;
  for (const auto& p : report.points) {
    NullHistogram hist;
    hist.signal = p.signal;
    hist.df = p.df;
    hist.samples = p.size_statistics;
    hist.failures = p.size ? p.size->failures : 0;
    hist.ks_distance = hist.samples.empty()
                           ? kNaN
                           : ks_distance_chi2(hist.samples, static_cast<int>(hist.df));
    out.push_back(std::move(hist));
  }
  return out;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "model,n,signal,metric,value,replications,failures\n";
  const auto& cfg = report.config;
  for (const auto& p : report.points) {
    if (p.size) write_rate(out, report, p, "size", *p.size);
    if (p.power) write_rate(out, report, p, "power", *p.power);
    if (p.k_exact) write_rate(out, report, p, "p_k_exact", *p.k_exact);
    if (p.k_at_most) write_rate(out, report, p, "p_k_at_most", *p.k_at_most);
    for (const auto& [k, count] : p.k_hat_counts) {
      out << model_name(cfg.model) << ',' << cfg.n << ',' << p.signal << ",k_hat_" << k << ','
          << count << ',' << p.replications << ",0\n";
    }
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<NullHistogram>& hists,
                         const ExperimentConfig& cfg) {
  out << "model,n,signal,metric,value,replications,failures\n";
  for (const auto& h : hists) {
    out << model_name(cfg.model) << ',' << cfg.n << ',' << h.signal << ",ks_distance_df"
        << h.df << ',';
    if (std::isnan(h.ks_distance)) {
      out << "NA";
    } else {
      out << h.ks_distance;
    }
    out << ',' << cfg.replications << ',' << h.failures << '\n';
  }
}

void write_samples_csv(std::ostream& out, const std::vector<double>& samples) {
  out << "statistic\n";
  const auto old = out.precision(17);
  for (double s : samples) out << s << '\n';
  out.precision(old);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const char* table : {"table1h", "table1", "table2", "table5", "fig1"}) {
    for (const char* model : {"model1", "model2"}) {
      names.push_back(std::string(table) + "-" + model);
    }
  }
  return names;
}

Preset find_preset(std::string_view name) {
  const auto dash = name.rfind('-');
  if (dash == std::string_view::npos) throw UsageError("unknown preset '" + std::string(name) + "'");
  const std::string_view table = name.substr(0, dash);
  const std::string_view model = name.substr(dash + 1);
  Preset preset;
  preset.name = std::string(name);
  ExperimentConfig& c = preset.config;
  if (model == "model1") {
    c.model = ModelKind::model1;
  } else if (model == "model2") {
    c.model = ModelKind::model2;
  } else {
    throw UsageError("unknown preset '" + std::string(name) + "'");
  }
  c.grid = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  c.n = 3000;
  c.n0 = 500;
  if (table == "table1h") {
    c.n = 1500;
    c.n0 = 300;
  } else if (table == "table1") {
  } else if (table == "table2") {
    c.k_mode = KMode::estimated_k;
  } else if (table == "table5") {
    preset.kind = StudyKind::k_accuracy;
  } else if (table == "fig1") {
    preset.kind = StudyKind::null_histogram;
    c.grid = {0.9};
    c.pair_mode = PairMode::size;
  } else {
    throw UsageError("unknown preset '" + std::string(name) + "'");
  }
  return preset;
}

std::vector<ConsistencyRow> run_consistency(const ConsistencyConfig& cfg) {
  if (cfg.replications < 1) throw UsageError("replications must be at least 1");
  std::vector<ConsistencyRow> rows;
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const auto [n, n0] = cfg.sizes[s];
    ExperimentConfig ec;
    ec.model = cfg.model;
    ec.n = n;
    ec.n0 = n0;
    ec.rho = cfg.rho;
    // Each size is its own grid point so sizes never share seeds.
    ec.grid.assign(cfg.sizes.size(), cfg.signal);
    ec.master_seed = cfg.master_seed;
    ec.validate();
    const DcmmParams params = grid_params(ec, s);
    const bool model1 = cfg.model == ModelKind::model1;
    const GroundTruth gt =
        ground_truth(params, false, model1 ? std::nullopt : std::optional<TkOptions>(cfg.tk));
    const auto [i, j] = simulation_layout(n, n0).size_pair();
    const double scale = model1 ? sigma1_scale(params) : sigma2_scale(params);
    const MeanMatrix h(gt.h);
    std::vector<double> errors(static_cast<std::size_t>(cfg.replications));
    parallel_for(errors.size(), cfg.threads, [&](std::size_t rep) {
      const auto x = sample_adjacency(h, replication_seed(ec, s, static_cast<Index>(rep)), false);
      errors[rep] = scale * (model1 ? sigma1_error(gt, x, i, j) : sigma2_error(gt, x, i, j));
    });
    double sum = 0.0;
    for (double e : errors) sum += e;
    rows.push_back({n, model1 ? "sigma1_scaled_error" : "sigma2_scaled_error",
                    sum / static_cast<double>(errors.size())});
  }
  return rows;
}

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows) {
  out << "n,metric,value\n";
  const auto old = out.precision(10);
  for (const auto& r : rows) out << r.n << ',' << r.metric << ',' << r.value << '\n';
  out.precision(old);
}

}  // namespace simple
