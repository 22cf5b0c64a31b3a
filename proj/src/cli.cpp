#include "simple/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "simple/dcmm.hpp"
#include "simple/errors.hpp"
#include "simple/estimation.hpp"
#include "simple/graph_io.hpp"
#include "simple/harness.hpp"
#include "simple/inference.hpp"
#include "simple/spectra.hpp"

namespace simple {

namespace {

struct GraphFlags {
  std::string path;
  bool one_based = false;
  bool self_loops = false;
  std::optional<Index> n;
};

void add_graph_flags(CLI::App* cmd, GraphFlags& g) {
  cmd->add_option("--graph", g.path, "Edge list file")->required();
  cmd->add_flag("--one-based", g.one_based, "Node labels in the file and on the command line start at 1");
  cmd->add_flag("--self-loops", g.self_loops, "Keep self loops instead of rejecting them");
  cmd->add_option("--nodes-total", g.n, "Number of nodes, if isolated nodes trail the edge list");
}

SymmetricBinaryMatrix load(const GraphFlags& g) {
  LoadOptions opts;
  opts.indexing = g.one_based ? Indexing::one_based : Indexing::zero_based;
  opts.self_loops = g.self_loops;
  opts.n = g.n;
  return adjacency(load_edge_list(g.path, opts));
}

Index to_internal(Index label, const GraphFlags& g, Index n) {
  const Index node = g.one_based ? label - 1 : label;
  if (node < 0 || node >= n) {
    throw UsageError("node " + std::to_string(label) + " is outside the graph");
  }
  return node;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  return file;
}

void header(std::ostream& out, std::string_view command) {
  out << "# simple " << kVersion << ' ' << command << '\n';
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("bad grid value '" + item + "'");
    }
  }
  if (grid.empty()) throw UsageError("empty grid");
  return grid;
}

std::vector<std::pair<Index, Index>> parse_sizes(const std::string& text) {
  std::vector<std::pair<Index, Index>> sizes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(item);
      sizes.emplace_back(std::stoll(item.substr(0, colon)), std::stoll(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw UsageError("bad size '" + item + "', expected n:n0");
    }
  }
  if (sizes.empty()) throw UsageError("empty size list");
  return sizes;
}

int finish(std::ostream& err, std::string_view message, int code) {
  err << "error: " << message << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pairwise membership-profile tests for network nodes", "simple"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // simulate
  ModelSpec sim;
  std::optional<double> theta, r2;
  std::string sim_out;
  bool sim_one_based = false;
  auto* simulate = app.add_subcommand("simulate", "Sample a network from model 1 or model 2");
  simulate->add_option("--model", sim.model, "1 (mixed membership) or 2 (degree corrected)")
      ->check(CLI::IsMember({1, 2}));
  simulate->add_option("--n", sim.n, "Number of nodes")->required();
  simulate->add_option("--n0", sim.n0, "Pure nodes per community")->required();
  simulate->add_option("--rho", sim.rho, "Off-diagonal scale of the community matrix");
  simulate->add_option("--theta", theta, "Degree level for model 1");
  simulate->add_option("--r2", r2, "Squared degree range for model 2");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_flag("--self-loops", sim.self_loops, "Sample diagonal entries too");
  simulate->add_flag("--one-based", sim_one_based, "Write 1-based node labels");
  simulate->add_option("--out", sim_out, "Edge list path; parameters go to <out>.params")
      ->required();

  // test-pair
  GraphFlags tp_graph;
  std::string tp_method = "t";
  Index tp_i = 0, tp_j = 0;
  std::optional<Index> tp_k;
  auto* test_pair_cmd = app.add_subcommand("test-pair", "Test whether two nodes share a membership profile");
  add_graph_flags(test_pair_cmd, tp_graph);
  test_pair_cmd->add_option("--method", tp_method, "t or g");
  test_pair_cmd->add_option("--i", tp_i, "First node")->required();
  test_pair_cmd->add_option("--j", tp_j, "Second node")->required();
  test_pair_cmd->add_option("--k", tp_k, "Number of communities (estimated when absent)");

  // pvalue-matrix
  GraphFlags pm_graph;
  std::string pm_method = "t";
  std::vector<Index> pm_nodes;
  std::optional<Index> pm_k;
  bool pm_full = false;
  auto* pvalue_cmd = app.add_subcommand("pvalue-matrix", "P-values for every pair of the listed nodes");
  add_graph_flags(pvalue_cmd, pm_graph);
  pvalue_cmd->add_option("--nodes", pm_nodes, "Comma-separated node labels")
      ->required()
      ->delimiter(',');
  pvalue_cmd->add_option("--method", pm_method, "t or g");
  pvalue_cmd->add_option("--k", pm_k, "Number of communities (estimated when absent)");
  pvalue_cmd->add_flag("--full-precision", pm_full, "Print round-trip precision instead of 4 decimals");

  // estimate-k
  GraphFlags ek_graph;
  std::string ek_dump;
  auto* estimate_cmd = app.add_subcommand("estimate-k", "Estimate the number of communities");
  add_graph_flags(estimate_cmd, ek_graph);
  estimate_cmd->add_option("--dump-spectrum", ek_dump, "Write the examined eigenpairs as CSV");

  // mc
  std::string mc_preset;
  std::optional<Index> mc_reps, mc_n, mc_n0;
  std::uint64_t mc_seed = 1;
  std::string mc_grid, mc_out, mc_samples, mc_k_mode, mc_pairs;
  std::optional<double> mc_alpha;
  unsigned mc_threads = 1;
  auto* mc = app.add_subcommand("mc", "Monte Carlo size, power and K-accuracy studies");
  mc->add_option("--preset", mc_preset, "One of: " + [] {
    std::string s;
    for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }())->required();
  mc->add_option("--reps", mc_reps, "Replications per grid point");
  mc->add_option("--seed", mc_seed, "Master seed");
  mc->add_option("--grid", mc_grid, "Comma-separated signal values");
  mc->add_option("--n", mc_n, "Number of nodes");
  mc->add_option("--n0", mc_n0, "Pure nodes per community");
  mc->add_option("--alpha", mc_alpha, "Nominal level");
  mc->add_option("--k-mode", mc_k_mode, "true or estimated")->check(CLI::IsMember({"true", "estimated"}));
  mc->add_option("--pairs", mc_pairs, "size, power or both")->check(CLI::IsMember({"size", "power", "both"}));
  mc->add_option("--threads", mc_threads, "Worker threads for replications");
  mc->add_option("--out", mc_out, "Report CSV path (stdout when absent)");
  mc->add_option("--samples", mc_samples, "Null statistic samples CSV (histogram presets)");

  // oracle-check
  std::string oc_model = "both";
  std::string oc_sizes = "500:100,1000:200,2000:400";
  Index oc_reps = 20, oc_moments = 200;
  double oc_signal = 0.9;
  std::uint64_t oc_seed = 1;
  unsigned oc_threads = 1;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Plug-in covariance error against the known truth");
  oracle_cmd->add_option("--model", oc_model, "1, 2 or both")->check(CLI::IsMember({"1", "2", "both"}));
  oracle_cmd->add_option("--sizes", oc_sizes, "Comma-separated n:n0 pairs");
  oracle_cmd->add_option("--signal", oc_signal, "theta for model 1, r^2 for model 2");
  oracle_cmd->add_option("--reps", oc_reps, "Replications per size");
  oracle_cmd->add_option("--moment-samples", oc_moments, "Noise draws for the eigenvalue means");
  oracle_cmd->add_option("--seed", oc_seed, "Master seed");
  oracle_cmd->add_option("--threads", oc_threads, "Worker threads for replications");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) {
      if (sim.model == 1) {
        if (!theta || r2) throw UsageError("model 1 takes --theta");
        sim.signal = *theta;
      } else {
        if (!r2 || theta) throw UsageError("model 2 takes --r2");
        sim.signal = *r2;
      }
      const DcmmParams params = params_from_spec(sim);
      const MeanMatrix h = build_mean_matrix(params);
      const Graph g = to_graph(sample_adjacency(h, adjacency_seed(sim), sim.self_loops));
      {
        auto file = open_output(sim_out);
        header(file, "simulate");
        file << "# model " << sim.model << " seed " << sim.seed << " nodes " << sim.n << '\n';
        write_edge_list(file, g, sim_one_based ? Indexing::one_based : Indexing::zero_based);
      }
      {
        auto file = open_output(sim_out + ".params");
        header(file, "simulate");
        write_model_spec(file, sim);
      }
      out << "wrote " << g.edges().size() << " edges to " << sim_out << '\n';
      return 0;
    }

    if (*test_pair_cmd) {
      const auto x = load(tp_graph);
      const Index i = to_internal(tp_i, tp_graph, x.n());
      const Index j = to_internal(tp_j, tp_graph, x.n());
      if (i == j) throw UsageError("--i and --j must name different nodes");
      const Method method = parse_method(tp_method);
      const TestResult r = test_pair(prepare_network(x, method, tp_k), i, j);
      header(out, "test-pair");
      out << "method,i,j,statistic,df,p_value,k_used,status\n";
      out << std::setprecision(17) << method_name(r.method) << ',' << tp_i << ',' << tp_j << ',';
      if (r.ok()) {
        out << r.statistic << ',' << r.df << ',' << r.p_value;
      } else {
        out << "NA," << r.df << ",NA";
      }
      out << ',' << r.k_used << ',' << status_name(r.status) << '\n';
      if (!r.ok()) return finish(err, status_name(r.status), 3);
      return 0;
    }

    if (*pvalue_cmd) {
      const auto x = load(pm_graph);
      std::vector<Index> nodes;
      std::vector<std::string> labels;
      for (Index label : pm_nodes) {
        nodes.push_back(to_internal(label, pm_graph, x.n()));
        labels.push_back(std::to_string(label));
      }
      const Method method = parse_method(pm_method);
      const PValueMatrix pm = pvalue_matrix(x, nodes, method, pm_k);
      header(out, "pvalue-matrix");
      out << "# method " << method_name(method) << " k " << pm.k_used << '\n';
      write_pvalue_csv(out, pm, labels, pm_full ? -1 : 4);
      return 0;
    }

    if (*estimate_cmd) {
      const auto x = load(ek_graph);
      const Index m = examined_eigenvalue_count(x.n());
      KEstimate est;
      if (!ek_dump.empty()) {
        const Spectrum spec = top_eigenpairs(x, m);
        est = estimate_k(x, spec);
        auto file = open_output(ek_dump);
        write_spectrum_csv(file, spec, spec.m());
      } else {
        est = estimate_k(x, top_eigenvalues(x.dense(), m));
      }
      header(out, "estimate-k");
      out << std::setprecision(17);
      out << "k_hat," << est.k_hat << '\n';
      out << "threshold," << est.threshold << '\n';
      out << "max_degree," << est.max_degree << '\n';
      out << "examined," << est.examined.size() << '\n';
      out << "k,eigenvalue,squared\n";
      for (Index k = 0; k < est.examined.size(); ++k) {
        const double d = est.examined(k);
        out << k + 1 << ',' << d << ',' << d * d << '\n';
      }
      return 0;
    }

    if (*mc) {
      Preset preset = find_preset(mc_preset);
      ExperimentConfig& cfg = preset.config;
      if (mc_reps) cfg.replications = *mc_reps;
      if (mc_n) cfg.n = *mc_n;
      if (mc_n0) cfg.n0 = *mc_n0;
      if (mc_alpha) cfg.alpha = *mc_alpha;
      if (!mc_grid.empty()) cfg.grid = parse_grid(mc_grid);
      if (!mc_k_mode.empty()) cfg.k_mode = mc_k_mode == "true" ? KMode::true_k : KMode::estimated_k;
      if (!mc_pairs.empty()) {
        cfg.pair_mode = mc_pairs == "size"    ? PairMode::size
                        : mc_pairs == "power" ? PairMode::power
                                              : PairMode::both;
      }
      cfg.master_seed = mc_seed;
      cfg.threads = mc_threads;
      cfg.validate();
      if (!mc_samples.empty() && preset.kind != StudyKind::null_histogram) {
        throw UsageError("--samples applies only to histogram presets");
      }
      std::ostringstream report;
      header(report, "mc");
      report << "# preset " << preset.name << " seed " << cfg.master_seed << " reps "
             << cfg.replications << '\n';
      const auto start = std::chrono::steady_clock::now();
      if (preset.kind == StudyKind::null_histogram) {
        const auto hists = null_histogram(cfg);
        write_histogram_csv(report, hists, cfg);
        if (!mc_samples.empty()) {
          if (hists.size() != 1) throw UsageError("--samples needs a single grid point");
          auto file = open_output(mc_samples);
          write_samples_csv(file, hists.front().samples);
        }
      } else {
        const ExperimentReport r =
            preset.kind == StudyKind::k_accuracy ? run_k_accuracy(cfg) : run_size_power(cfg);
        write_report_csv(report, r);
      }
      err << "mc: " << std::fixed << std::setprecision(1)
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
          << " s\n";
      if (mc_out.empty()) {
        out << report.str();
      } else {
        auto file = open_output(mc_out);
        file << report.str();
      }
      return 0;
    }

    if (*oracle_cmd) {
      std::vector<ModelKind> models;
      if (oc_model != "2") models.push_back(ModelKind::model1);
      if (oc_model != "1") models.push_back(ModelKind::model2);
      header(out, "oracle-check");
      out << "# seed " << oc_seed << " reps " << oc_reps << " signal " << oc_signal << '\n';
      std::vector<ConsistencyRow> all;
      for (ModelKind model : models) {
        ConsistencyConfig cc;
        cc.model = model;
        cc.sizes = parse_sizes(oc_sizes);
        cc.signal = oc_signal;
        cc.replications = oc_reps;
        cc.master_seed = oc_seed;
        cc.tk.moment_samples = oc_moments;
        cc.tk.seed = oc_seed;
        cc.threads = oc_threads;
        for (auto& row : run_consistency(cc)) {
          row.metric = std::string(model_name(model)) + "_" + row.metric;
          all.push_back(std::move(row));
        }
      }
      write_consistency_csv(out, all);
      return 0;
    }
  } catch (const UsageError& e) {
    return finish(err, e.what(), 1);
  } catch (const DataError& e) {
    return finish(err, e.what(), 2);
  } catch (const NumericalError& e) {
    return finish(err, e.what(), 3);
  } catch (const std::exception& e) {
    return finish(err, e.what(), 2);
  }
  return 1;
}

}  // namespace simple
