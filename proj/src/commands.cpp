#include "yieldfactors/commands.hpp"

#include <sstream>

#include "yieldfactors/error.hpp"
#include "yieldfactors/nmf.hpp"

namespace yf {

void RunConfig::validate() const {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (runs < 1) throw ParameterError("runs must be >= 1");
  if (sets && *sets < 1) throw ParameterError("sets must be >= 1");
  if (command == Command::stability && window < 2) throw ParameterError("window must be >= 2");
  if (command == Command::compare_rank1 && (n < 1 || m < 1)) throw ParameterError("n and m must be >= 1");
  if (command != Command::compare_rank1 && input_path.empty()) throw ParameterError("an input file is required");
}

namespace {

std::string fmt2(double x) { return format_r_number(round_to(x, 2)); }

YieldPanel apply_drops(YieldPanel panel, const std::vector<std::string>& drop) {
  for (const auto& label : drop) panel = drop_maturity(panel, parse_maturity_label(label).label);
  return panel;
}

std::vector<std::string> labels_of(const std::vector<MaturityLabel>& maturities) {
  std::vector<std::string> out;
  for (const auto& m : maturities) out.push_back(m.label);
  return out;
}

void print_matrix(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& row_names,
                  const std::vector<std::string>& col_names) {
  for (const auto& c : col_names) out << '\t' << c;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << row_names[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << '\t' << fmt2(m(i, j));
    out << '\n';
  }
}

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < count; ++j) out.push_back(prefix + std::to_string(j + 1));
  return out;
}

void print_fit(std::ostream& out, const FitReport& fit, const std::vector<std::string>& labels) {
  out << "Fit (correlation %, squared error):\n" << format_fit_table(fit, labels);
}

OutputTarget prepare_target(const RunConfig& config, int k, Stamper& stamper) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
  return OutputTarget{config.out_dir, k, config.runs, stamper.next()};
}

YieldPanel load(const RunConfig& config) { return read_treasury_file(config.input_path); }

}  // namespace

ErankSummary erank_summary(const YieldPanel& panel) {
  ErankSummary out;
  out.correlation = serial_correlation(panel.yields, panel.labels());
  out.average_correlation = 100.0 * out.correlation.average_offdiagonal();
  const auto eig = sym_eigen(out.correlation.entries);
  out.erank = erank(eig.values, false);
  out.mode_rank = erank(eig.values, true);
  return out;
}

Eigen::MatrixXd own_cluster_series(const std::vector<Eigen::MatrixXd>& weights, const Clustering& clustering) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(clustering.size()), static_cast<Eigen::Index>(weights.size()));
  for (std::size_t t = 0; t < weights.size(); ++t) {
    if (weights[t].rows() != out.rows()) throw ParameterError("own_cluster_series: weight rows differ from clustering");
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, t) = weights[t](i, clustering[i]);
  }
  return out;
}

NmfPipeline run_nmf_pipeline(const YieldPanel& panel, const RunConfig& config) {
  NmfPipeline p;
  p.denoised = denoise(panel, config.denoise);
  YieldPanel reduced{p.denoised.values, panel.maturities, panel.dates};
  reduced = apply_drops(std::move(reduced), config.drop);
  p.maturities = reduced.maturities;
  p.x = reduced.yields;

  EnsembleOptions options;
  options.use_median = config.use_median;
  p.ensemble = ensemble_nmf(p.x, config.k, config.runs, config.seed, options);
  p.fitted = reconstruct(p.ensemble.weights(), p.ensemble.factors());
  p.fit = fit_report(p.x, p.fitted);

  LevelDefinition level_def = LevelDefinition::ten_year;
  if (config.level) {
    level_def = *config.level;
  } else if (config.denoise == DenoiseMode::min_level) {
    level_def = LevelDefinition::min_yield;
  } else if (config.denoise == DenoiseMode::max_level) {
    level_def = LevelDefinition::max_yield;
  }
  p.curve = curve_series(panel, level_def);
  p.level = p.denoised.level ? *p.denoised.level : p.curve.level;
  p.correlations = factor_correlations(p.ensemble.factors(), p.level);
  p.interpretation = interpretation_correlations(p.ensemble.factors(), p.curve);
  return p;
}

ClusterPipeline run_cluster_pipeline(const YieldPanel& panel, const RunConfig& config) {
  ClusterPipeline p;
  p.panel = apply_drops(panel, config.drop);
  p.normalized = normalize_rows(p.panel);
  const int sets = config.effective_sets();
  p.stable = sets >= 2 && verify_stability(p.normalized, config.k, config.runs, sets, config.seed);
  p.modal = star_kmeans(p.normalized, config.k, config.runs, sets, config.seed);
  p.modal.clustering = Clustering::from_labels(p.modal.clustering.canonical());

  p.model = cluster_factor_model(p.panel, p.modal.clustering);
  p.fit = fit_report(p.panel.yields, reconstruct(p.model.weights, p.model.factors));
  p.curve = curve_series(panel, config.level.value_or(LevelDefinition::ten_year));
  p.correlations = factor_correlations(p.model.factors, p.curve.level);
  p.interpretation = interpretation_correlations(p.model.factors, p.curve);
  p.lsc = level_slope_curvature_correlations(p.curve);
  return p;
}

StabilityPipeline run_stability_pipeline(const YieldPanel& panel, const RunConfig& config) {
  StabilityPipeline p;
  p.cluster = run_cluster_pipeline(panel, config);
  const auto& clustering = p.cluster.modal.clustering;
  p.windowed = windowed_weights(p.cluster.panel, clustering, config.window);
  p.window_series = own_cluster_series(p.windowed, clustering);
  if (config.daily) {
    p.daily = daily_weights(p.cluster.panel, p.cluster.model);
    p.daily_series = own_cluster_series(p.daily->weights, clustering);
  }
  return p;
}

// ---------------------------------------------------------------------------

std::string cmd_erank(const RunConfig& config) {
  config.validate();
  const auto panel = apply_drops(load(config), config.drop);
  const auto s = erank_summary(panel);
  std::ostringstream out;
  out << "Dates: " << panel.cols() << ", maturities: " << panel.rows() << '\n';
  out << "Average pairwise correlation: " << fmt2(s.average_correlation) << '\n';
  out << "eRank: " << fmt2(s.erank) << '\n';
  out << "ModeRank: " << fmt2(s.mode_rank) << '\n';
  return out.str();
}

namespace {

void print_nmf_summary(std::ostream& out, const NmfPipeline& p, const RunConfig& config) {
  const auto& e = p.ensemble;
  out << "Seed: " << config.seed << '\n';
  out << "De-noising: " << to_string(config.denoise) << '\n';
  for (const auto& line : e.trace) out << line << '\n';
  out << "Batch sizes:";
  for (int b : e.batch_sizes) out << ' ' << b;
  out << '\n';
  const auto labels = labels_of(p.maturities);
  const auto factor_names = numbered("F", e.k_effective);
  out << "Weights (%):\n";
  out << format_weights_table(e.weights(), &e.weights_error(), labels, config.denoise != DenoiseMode::none);
  print_fit(out, p.fit, labels);
  out << "Factor correlations (%):\n";
  print_matrix(out, p.correlations.phi, factor_names, factor_names);
  out << "Factor vs level correlations (%):\n";
  print_matrix(out, p.correlations.theta, factor_names, {"L"});
  out << "Factor vs level/slope/curvature correlations (%):\n";
  print_matrix(out, p.interpretation, factor_names, {"L", "S", "C"});
}

void print_cluster_summary(std::ostream& out, const ClusterPipeline& p, const RunConfig& config) {
  const int sets = config.effective_sets();
  out << "Seed: " << config.seed << '\n';
  if (p.stable) {
    out << "Clustering stable across " << sets << " sets of " << config.runs << " runs\n";
  } else {
    out << "Clustering not stable; using the most frequent of " << sets << " sets\n";
  }
  out << "Modal clustering frequency: " << p.modal.frequency << '/' << sets << '\n';
  const auto labels = p.panel.labels();
  out << "Clusters:\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << labels[i] << '\t' << p.modal.clustering[i] + 1 << '\n';
  const auto factor_names = numbered("F", p.model.factors.rows());
  out << "Weights (%):\n" << format_weights_table(p.model.weights, nullptr, labels, false);
  print_fit(out, p.fit, labels);
  out << "Factor correlations (%):\n";
  print_matrix(out, p.correlations.phi, factor_names, factor_names);
  out << "Factor vs level/slope/curvature correlations (%):\n";
  print_matrix(out, p.interpretation, factor_names, {"L", "S", "C"});
  out << "Level/slope/curvature correlations (%):\n";
  print_matrix(out, p.lsc.correlations, {"L", "S", "C"}, {"L", "S", "C"});
  out << "eRank of level/slope/curvature correlations: " << fmt2(p.lsc.erank) << '\n';
}

std::vector<std::filesystem::path> write_cluster_outputs(const ClusterPipeline& p, const RunConfig& config,
                                                         const OutputTarget& target) {
  std::vector<std::filesystem::path> files;
  const auto labels = p.panel.labels();
  files.push_back(write_weights(p.model.weights, nullptr, labels, target, false));
  files.push_back(write_fit(p.fit, labels, target));
  if (config.plots) {
    for (auto& f : emit_factor_plots(p.model.factors, nullptr, target)) files.push_back(std::move(f));
  }
  return files;
}

}  // namespace

ReportBundle cmd_nmf(const RunConfig& config, Stamper& stamper) {
  config.validate();
  const auto p = run_nmf_pipeline(load(config), config);
  const auto& e = p.ensemble;

  ReportBundle bundle;
  const auto target = prepare_target(config, e.k_effective, stamper);
  const auto labels = labels_of(p.maturities);
  bundle.files.push_back(
      write_weights(e.weights(), &e.weights_error(), labels, target, config.denoise != DenoiseMode::none));
  bundle.files.push_back(write_fit(p.fit, labels, target));
  if (config.plots) {
    for (auto& f : emit_factor_plots(e.factors(), &e.factors_error(), target)) bundle.files.push_back(std::move(f));
    for (auto& f : emit_weight_plots(e.weights(), &e.weights_error(), p.maturities, target)) {
      bundle.files.push_back(std::move(f));
    }
  }
  std::ostringstream out;
  print_nmf_summary(out, p, config);
  bundle.console = out.str();
  return bundle;
}

ReportBundle cmd_cluster(const RunConfig& config, Stamper& stamper) {
  config.validate();
  const auto p = run_cluster_pipeline(load(config), config);
  ReportBundle bundle;
  const auto target = prepare_target(config, p.modal.clustering.k_effective(), stamper);
  bundle.files = write_cluster_outputs(p, config, target);
  std::ostringstream out;
  print_cluster_summary(out, p, config);
  bundle.console = out.str();
  return bundle;
}

ReportBundle cmd_stability(const RunConfig& config, Stamper& stamper) {
  config.validate();
  const auto p = run_stability_pipeline(load(config), config);
  const auto& c = p.cluster;
  const int k = c.modal.clustering.k_effective();
  ReportBundle bundle;
  const auto target = prepare_target(config, k, stamper);
  bundle.files = write_cluster_outputs(c, config, target);

  const auto labels = c.panel.labels();
  const auto& assignment = c.modal.clustering.assignment();
  const auto series_name = [&](const std::string& stem) {
    return target.dir / (stem + "." + std::to_string(k) + "." + target.stamp + ".txt");
  };
  bundle.files.push_back(write_text_file(series_name("ww." + std::to_string(config.window)),
                                         format_series_table(p.window_series, assignment, labels)));
  if (config.plots) {
    for (auto& f : emit_trajectory_plots(p.window_series, assignment, "WindowWeights", "Window", target)) {
      bundle.files.push_back(std::move(f));
    }
  }
  if (p.daily) {
    bundle.files.push_back(write_text_file(series_name("dw"), format_series_table(p.daily_series, assignment, labels)));
    if (config.plots) {
      for (auto& f : emit_trajectory_plots(p.daily_series, assignment, "DailyWeights", "Date index", target)) {
        bundle.files.push_back(std::move(f));
      }
    }
  }

  std::ostringstream out;
  print_cluster_summary(out, c, config);
  out << "Windows of " << config.window << " dates: " << p.windowed.size() << '\n';
  out << "Window weights (%):\n" << format_series_table(p.window_series, assignment, labels);
  if (p.daily) out << "Daily weights: " << p.daily_series.cols() << " dates\n";
  bundle.console = out.str();
  return bundle;
}

std::string cmd_compare_rank1(const RunConfig& config) {
  config.validate();
  const auto r = compare_one_factor_nmf(config.n, config.m, config.seed);
  std::ostringstream out;
  out << "Seed: " << config.seed << '\n';
  out << "NMF error: " << format_r_number(r.nmf_error) << '\n';
  out << "SVD error: " << format_r_number(r.svd_error) << '\n';
  return out.str();
}

}  // namespace yf
