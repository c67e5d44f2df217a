#include "yieldfactors/factor_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "yieldfactors/error.hpp"
#include "yieldfactors/linalg.hpp"
#include "yieldfactors/parallel.hpp"
#include "yieldfactors/random.hpp"

namespace yf {

DenoiseMode parse_denoise_mode(std::string_view text) {
  if (text == "none" || text == "0") return DenoiseMode::none;
  if (text == "min" || text == "1") return DenoiseMode::min_level;
  if (text == "max" || text == "2") return DenoiseMode::max_level;
  throw ParameterError("unknown de-noising mode '" + std::string(text) + "' (expected none, min or max)");
}

std::string to_string(DenoiseMode mode) {
  switch (mode) {
    case DenoiseMode::none: return "none";
    case DenoiseMode::min_level: return "min";
    case DenoiseMode::max_level: return "max";
  }
  return "none";
}

DenoisedPanel denoise(const YieldPanel& panel, DenoiseMode mode) {
  DenoisedPanel out;
  out.mode = mode;
  switch (mode) {
    case DenoiseMode::none:
      out.values = panel.yields;
      break;
    case DenoiseMode::min_level: {
      Eigen::VectorXd level = panel.yields.colwise().minCoeff().transpose();
      out.values = panel.yields.rowwise() - level.transpose();
      out.level = std::move(level);
      break;
    }
    case DenoiseMode::max_level: {
      Eigen::VectorXd level = panel.yields.colwise().maxCoeff().transpose();
      out.values = (-panel.yields).rowwise() + level.transpose();
      out.level = std::move(level);
      break;
    }
  }
  return out;
}

// --- Ensemble NMF -----------------------------------------------------------

namespace {

double median_of(std::vector<double>& v) {
  const auto n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

struct Summary {
  double mean, sd, median, mad;
};

Summary summarize(std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double med = median_of(v);
  for (double& x : v) x = std::abs(x - med);
  return {mean, sd, med, 1.4826 * median_of(v)};
}

double center_of_mass(const Eigen::VectorXd& w) {
  const double total = w.sum();
  if (total <= 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) acc += static_cast<double>(i) * w(i);
  return acc / total;
}

// Reorders every per-group matrix by ascending center of mass.
void order_groups(EnsembleResult& r) {
  const int k = r.k_effective;
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return center_of_mass(r.weights_mean.col(a)) < center_of_mass(r.weights_mean.col(b));
  });
  auto permute_cols = [&](Eigen::MatrixXd& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int j = 0; j < k; ++j) out.col(j) = m.col(order[static_cast<std::size_t>(j)]);
    m = std::move(out);
  };
  auto permute_rows = [&](Eigen::MatrixXd& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (int j = 0; j < k; ++j) out.row(j) = m.row(order[static_cast<std::size_t>(j)]);
    m = std::move(out);
  };
  for (auto* m : {&r.weights_mean, &r.weights_sd, &r.weights_median, &r.weights_mad}) permute_cols(*m);
  for (auto* m : {&r.factors_mean, &r.factors_sd, &r.factors_median, &r.factors_mad}) permute_rows(*m);
  std::vector<int> sizes(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) sizes[static_cast<std::size_t>(j)] = r.batch_sizes[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
  r.batch_sizes = std::move(sizes);
}

}  // namespace

double mad(std::vector<double> values) {
  if (values.empty()) return 0.0;
  return summarize(values).mad;
}

EnsembleResult ensemble_nmf(const Eigen::MatrixXd& x, int k, int p_runs, std::uint64_t seed,
                            const EnsembleOptions& options) {
  const auto n = x.rows();
  const auto t = x.cols();
  if (p_runs < 1) throw ParameterError("ensemble_nmf: p_runs must be >= 1");
  if (k < 1 || k > std::min(n, t)) {
    throw ParameterError("ensemble_nmf: k = " + std::to_string(k) + " outside [1, " + std::to_string(std::min(n, t)) + "]");
  }

  EnsembleResult res;
  res.k_requested = k;
  res.runs = p_runs;
  res.use_median = options.use_median;

  while (true) {
    if (k < 1) throw DegenerateInputError("ensemble_nmf: number of factors reduced to 0");
    res.trace.push_back("Trying k = " + std::to_string(k));

    std::vector<NmfRun> runs(static_cast<std::size_t>(p_runs));
    parallel_for(runs.size(), [&](std::size_t r) {
      runs[r] = nmf_run(x, k, derive_seed(seed, {static_cast<std::uint64_t>(k), r}), options.nmf);
    });

    if (p_runs == 1) {
      res.k_effective = k;
      res.weights_mean = res.weights_median = runs[0].weights;
      res.factors_mean = res.factors_median = runs[0].factors;
      res.weights_sd = res.weights_mad = Eigen::MatrixXd::Zero(n, k);
      res.factors_sd = res.factors_mad = Eigen::MatrixXd::Zero(k, t);
      res.batch_sizes.assign(static_cast<std::size_t>(k), 1);
      break;
    }

    // Every run's weight columns as points in R^N.
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(p_runs) * k, n);
    for (std::size_t r = 0; r < runs.size(); ++r) {
      stacked.middleRows(static_cast<Eigen::Index>(r) * k, k) = runs[r].weights.transpose();
    }
    const KMeansResult km =
        kmeans_best_of(stacked, k, derive_seed(seed, {static_cast<std::uint64_t>(k)}), kAlignmentStarts);

    std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < stacked.rows(); ++c) groups[static_cast<std::size_t>(km.labels[static_cast<std::size_t>(c)])].push_back(c);

    bool reduce = false;
    for (int j = 0; j < k; ++j) {
      const auto size = groups[static_cast<std::size_t>(j)].size();
      res.trace.push_back("Number of elements in cluster " + std::to_string(j + 1) + " = " + std::to_string(size));
      if (static_cast<int>(size) <= options.reduce_threshold) {
        res.trace.push_back("Reducing k");
        reduce = true;
        break;
      }
    }
    if (reduce) {
      --k;
      continue;
    }

    res.k_effective = k;
    for (auto* m : {&res.weights_mean, &res.weights_sd, &res.weights_median, &res.weights_mad}) m->resize(n, k);
    for (auto* m : {&res.factors_mean, &res.factors_sd, &res.factors_median, &res.factors_mad}) m->resize(k, t);
    res.batch_sizes.clear();

    std::vector<double> buf;
    for (int j = 0; j < k; ++j) {
      const auto& members = groups[static_cast<std::size_t>(j)];
      res.batch_sizes.push_back(static_cast<int>(members.size()));
      // Member c is column (c mod k) of run (c / k); its factor row travels with it.
      auto weight = [&](Eigen::Index c, Eigen::Index i) { return runs[static_cast<std::size_t>(c / k)].weights(i, c % k); };
      auto factor = [&](Eigen::Index c, Eigen::Index s) { return runs[static_cast<std::size_t>(c / k)].factors(c % k, s); };
      for (Eigen::Index i = 0; i < n; ++i) {
        buf.clear();
        for (auto c : members) buf.push_back(weight(c, i));
        const Summary s = summarize(buf);
        res.weights_mean(i, j) = s.mean;
        res.weights_sd(i, j) = s.sd;
        res.weights_median(i, j) = s.median;
        res.weights_mad(i, j) = s.mad;
      }
      for (Eigen::Index d = 0; d < t; ++d) {
        buf.clear();
        for (auto c : members) buf.push_back(factor(c, d));
        const Summary s = summarize(buf);
        res.factors_mean(j, d) = s.mean;
        res.factors_sd(j, d) = s.sd;
        res.factors_median(j, d) = s.median;
        res.factors_mad(j, d) = s.mad;
      }
    }
    break;
  }
  order_groups(res);
  return res;
}

// --- Cluster factor model ---------------------------------------------------

ClusterFactorModel cluster_factor_model(const Eigen::MatrixXd& yields, const Clustering& clustering) {
  if (static_cast<std::size_t>(yields.rows()) != clustering.size()) {
    throw ParameterError("cluster_factor_model: clustering covers " + std::to_string(clustering.size()) +
                         " items, panel has " + std::to_string(yields.rows()));
  }
  const int k = clustering.k_effective();
  ClusterFactorModel model;
  model.clustering = clustering;
  model.weights = Eigen::MatrixXd::Zero(yields.rows(), k);
  model.factors = Eigen::MatrixXd::Zero(k, yields.cols());
  for (int a = 0; a < k; ++a) {
    const auto members = clustering.members(a);
    if (members.empty()) throw ParameterError("cluster_factor_model: empty cluster " + std::to_string(a + 1));
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(members.size()), yields.cols());
    for (std::size_t m = 0; m < members.size(); ++m) sub.row(static_cast<Eigen::Index>(m)) = yields.row(static_cast<Eigen::Index>(members[m]));
    const Rank1 r1 = rank1_truncate(sub);
    for (std::size_t m = 0; m < members.size(); ++m) model.weights(static_cast<Eigen::Index>(members[m]), a) = r1.col(static_cast<Eigen::Index>(m));
    model.factors.row(a) = r1.row.transpose();
  }
  normalize_weight_columns(model.weights, model.factors);
  return model;
}

ClusterFactorModel cluster_factor_model(const YieldPanel& panel, const Clustering& clustering) {
  return cluster_factor_model(panel.yields, clustering);
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& factors) {
  if (weights.cols() != factors.rows()) {
    throw ParameterError("reconstruct: weights have " + std::to_string(weights.cols()) + " columns, factors have " +
                         std::to_string(factors.rows()) + " rows");
  }
  return weights * factors;
}

namespace {

Eigen::MatrixXd scale_rows_to_unit_sd(const Eigen::MatrixXd& rows, const std::vector<std::string>& names) {
  Eigen::MatrixXd out = rows;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double sd = sample_sd(rows.row(i).transpose());
    if (!(sd > 0.0)) {
      const std::string name = static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)]
                                                                           : "row " + std::to_string(i + 1);
      throw DegenerateInputError("normalize_rows: " + name + " has zero variance");
    }
    out.row(i) /= sd;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& rows) { return scale_rows_to_unit_sd(rows, {}); }

Eigen::MatrixXd normalize_rows(const YieldPanel& panel) { return scale_rows_to_unit_sd(panel.yields, panel.labels()); }

std::vector<ClusterFactorModel> windowed_models(const YieldPanel& panel, const Clustering& clustering, int window) {
  if (window < 2) throw ParameterError("windowed_weights: window must be >= 2");
  if (window > panel.cols()) {
    throw ParameterError("windowed_weights: window " + std::to_string(window) + " exceeds " +
                         std::to_string(panel.cols()) + " dates");
  }
  const auto count = panel.cols() / window;
  std::vector<ClusterFactorModel> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index w = 0; w < count; ++w) {
    out.push_back(cluster_factor_model(Eigen::MatrixXd(panel.yields.middleCols(w * window, window)), clustering));
  }
  return out;
}

std::vector<Eigen::MatrixXd> windowed_weights(const YieldPanel& panel, const Clustering& clustering, int window) {
  std::vector<Eigen::MatrixXd> out;
  for (auto& m : windowed_models(panel, clustering, window)) out.push_back(std::move(m.weights));
  return out;
}

DailyWeights daily_weights(const YieldPanel& panel, const ClusterFactorModel& model) {
  const auto n = panel.rows();
  const auto t = panel.cols();
  const int k = model.clustering.k_effective();
  if (static_cast<std::size_t>(n) != model.clustering.size() || model.factors.cols() != t) {
    throw ParameterError("daily_weights: model does not match the panel's dimensions");
  }
  DailyWeights out;
  out.scale = Eigen::MatrixXd::Zero(k, t);
  out.weights.reserve(static_cast<std::size_t>(t));
  for (Eigen::Index s = 0; s < t; ++s) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = model.clustering[static_cast<std::size_t>(i)];
      const double f = model.factors(a, s);
      if (!(f > 0.0)) {
        const std::string date = static_cast<std::size_t>(s) < panel.dates.size()
                                     ? format_date(panel.dates[static_cast<std::size_t>(s)])
                                     : "column " + std::to_string(s + 1);
        throw DegenerateInputError("daily_weights: factor " + std::to_string(a + 1) + " is zero on " + date);
      }
      w(i, a) = panel.yields(i, s) / f;
    }
    for (int a = 0; a < k; ++a) {
      const double sum = w.col(a).sum();
      out.scale(a, s) = sum;
      if (sum > 0.0) w.col(a) /= sum;
    }
    out.weights.push_back(std::move(w));
  }
  return out;
}

}  // namespace yf
