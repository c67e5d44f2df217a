#include "yieldfactors/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "yieldfactors/error.hpp"
#include "yieldfactors/parallel.hpp"
#include "yieldfactors/random.hpp"

namespace yf {

// --- Clustering -------------------------------------------------------------

Clustering Clustering::from_labels(std::span<const int> labels) {
  Clustering c;
  if (labels.empty()) return c;
  std::vector<int> used(labels.begin(), labels.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  c.assignment_.reserve(labels.size());
  for (int l : labels) {
    c.assignment_.push_back(static_cast<int>(std::lower_bound(used.begin(), used.end(), l) - used.begin()));
  }
  c.k_ = static_cast<int>(used.size());
  return c;
}

Eigen::MatrixXd Clustering::indicator() const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(assignment_.size()), k_);
  for (std::size_t i = 0; i < assignment_.size(); ++i) h(static_cast<Eigen::Index>(i), assignment_[i]) = 1.0;
  return h;
}

std::vector<std::size_t> Clustering::members(int cluster) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment_.size(); ++i)
    if (assignment_[i] == cluster) out.push_back(i);
  return out;
}

std::vector<int> Clustering::canonical() const {
  std::vector<int> remap(static_cast<std::size_t>(k_), -1);
  std::vector<int> out;
  out.reserve(assignment_.size());
  int next = 0;
  for (int a : assignment_) {
    auto& slot = remap[static_cast<std::size_t>(a)];
    if (slot < 0) slot = next++;
    out.push_back(slot);
  }
  return out;
}

// --- Lloyd ------------------------------------------------------------------

namespace {

// Nearest center per row (ties to the lowest index); returns the WCSS.
double assign(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& labels,
              Eigen::VectorXd& dist) {
  double wcss = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist(i) = best_d;
    wcss += best_d;
  }
  return wcss;
}

}  // namespace

KMeansResult kmeans_run(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iter) {
  const auto n = points.rows();
  if (k < 1 || k > n) {
    throw ParameterError("kmeans_run: k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  if (!points.allFinite()) throw ParameterError("kmeans_run: non-finite points");
  if (max_iter < 1) throw ParameterError("kmeans_run: max_iter must be >= 1");

  // Forgy: k distinct rows, partial Fisher-Yates.
  Rng rng(seed);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (int c = 0; c < k; ++c) {
    const auto remaining = static_cast<std::uint64_t>(n - c);
    const auto pick = static_cast<std::size_t>(c) + static_cast<std::size_t>(rng() % remaining);
    std::swap(idx[static_cast<std::size_t>(c)], idx[pick]);
  }

  KMeansResult res;
  res.centers.resize(k, points.cols());
  for (int c = 0; c < k; ++c) res.centers.row(c) = points.row(idx[static_cast<std::size_t>(c)]);
  res.labels.assign(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd dist(n);
  res.wcss_trace.push_back(assign(points, res.centers, res.labels, dist));

  std::vector<int> next_labels(res.labels.size());
  for (int it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int l = res.labels[static_cast<std::size_t>(i)];
      sums.row(l) += points.row(i);
      ++sizes[static_cast<std::size_t>(l)];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) res.centers.row(c) = sums.row(c) / sizes[static_cast<std::size_t>(c)];
    }
    // Empty cluster: move its center onto the point farthest from its own center.
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = (points.row(i) - res.centers.row(res.labels[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;
      res.centers.row(c) = points.row(far);
      res.labels[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
    }

    res.wcss_trace.push_back(assign(points, res.centers, next_labels, dist));
    res.iterations = it + 1;
    if (next_labels == res.labels) break;
    res.labels.swap(next_labels);
  }
  return res;
}

KMeansResult kmeans_best_of(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int starts) {
  if (starts < 1) throw ParameterError("kmeans_best_of: starts must be >= 1");
  KMeansResult best = kmeans_run(points, k, derive_seed(seed, {0}));
  for (int s = 1; s < starts; ++s) {
    KMeansResult r = kmeans_run(points, k, derive_seed(seed, {static_cast<std::uint64_t>(s)}));
    if (r.wcss_trace.back() < best.wcss_trace.back()) best = std::move(r);
  }
  return best;
}

std::vector<int> align_centers(const Eigen::MatrixXd& center_stack, int k, std::uint64_t seed) {
  return kmeans_best_of(center_stack, k, seed, kAlignmentStarts).clustering().assignment();
}

// --- Aggregation ------------------------------------------------------------

CountsMatrix count_votes(std::span<const std::vector<int>> runs, int k) {
  if (runs.empty()) throw ParameterError("count_votes: no runs");
  const auto n = runs.front().size();
  CountsMatrix q;
  q.runs = static_cast<int>(runs.size());
  q.counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), k);
  for (const auto& run : runs) {
    if (run.size() != n) throw ParameterError("count_votes: runs disagree on item count");
    for (std::size_t i = 0; i < n; ++i) {
      if (run[i] < 0 || run[i] >= k) throw ParameterError("count_votes: label outside 0..k-1");
      ++q.counts(static_cast<Eigen::Index>(i), run[i]);
    }
  }
  return q;
}

Clustering aggregate_counts(const CountsMatrix& q) {
  const Eigen::VectorXi population = q.counts.colwise().sum().transpose();
  std::vector<int> labels(static_cast<std::size_t>(q.counts.rows()));
  for (Eigen::Index i = 0; i < q.counts.rows(); ++i) {
    int best = 0;
    for (Eigen::Index a = 1; a < q.counts.cols(); ++a) {
      const int ca = q.counts(i, a), cb = q.counts(i, best);
      if (ca > cb || (ca == cb && population(a) > population(best))) best = static_cast<int>(a);
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return Clustering::from_labels(labels);
}

Clustering aggregate_clusterings(std::span<const std::vector<int>> runs, int k) {
  return aggregate_counts(count_votes(runs, k));
}

Clustering stat_clustering(const Eigen::MatrixXd& points, int k, int p_runs, std::uint64_t seed) {
  if (p_runs < 1) throw ParameterError("stat_clustering: p_runs must be >= 1");
  std::vector<KMeansResult> runs(static_cast<std::size_t>(p_runs));
  parallel_for(runs.size(), [&](std::size_t r) {
    runs[r] = kmeans_run(points, k, derive_seed(seed, {0, r}));
  });
  if (p_runs == 1) return runs.front().clustering();

  Eigen::MatrixXd stack(static_cast<Eigen::Index>(p_runs) * k, points.cols());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    stack.middleRows(static_cast<Eigen::Index>(r) * k, k) = runs[r].centers;
  }
  const std::vector<int> aligned = align_centers(stack, k, derive_seed(seed, {1}));
  const int k_aligned = *std::max_element(aligned.begin(), aligned.end()) + 1;

  std::vector<std::vector<int>> mapped(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    mapped[r].reserve(runs[r].labels.size());
    for (int raw : runs[r].labels) mapped[r].push_back(aligned[r * static_cast<std::size_t>(k) + static_cast<std::size_t>(raw)]);
  }
  return aggregate_clusterings(mapped, k_aligned);
}

std::uint64_t clustering_set_seed(std::uint64_t base, int set) {
  return derive_seed(base, {2, static_cast<std::uint64_t>(set)});
}

ModalClustering star_kmeans(const Eigen::MatrixXd& points, int k, int p_runs, int m_sets, std::uint64_t seed) {
  if (m_sets < 1) throw ParameterError("star_kmeans: m_sets must be >= 1");
  std::vector<Clustering> sets(static_cast<std::size_t>(m_sets));
  for (int m = 0; m < m_sets; ++m) {
    sets[static_cast<std::size_t>(m)] = stat_clustering(points, k, p_runs, clustering_set_seed(seed, m));
  }
  // Count by partition; ties go to the earliest set.
  std::map<std::vector<int>, int> freq;
  for (const auto& c : sets) ++freq[c.canonical()];
  ModalClustering best;
  for (const auto& c : sets) {
    const int f = freq[c.canonical()];
    if (f > best.frequency) {
      best.frequency = f;
      best.clustering = c;
    }
  }
  return best;
}

Eigen::VectorXd cluster_residuals(const Eigen::MatrixXd& points, const Clustering& clustering) {
  if (static_cast<std::size_t>(points.rows()) != clustering.size()) {
    throw ParameterError("cluster_residuals: clustering size does not match points");
  }
  // The column space of [1, H] is spanned by H alone (rows of H sum to 1), so
  // the least-squares fit of each date's cross-section is its cluster mean.
  const Eigen::MatrixXd h = clustering.indicator();
  const Eigen::VectorXd sizes = h.colwise().sum().transpose();
  Eigen::MatrixXd means = h.transpose() * points;
  for (Eigen::Index a = 0; a < means.rows(); ++a) means.row(a) /= sizes(a);
  const Eigen::MatrixXd residual = points - h * means;
  return residual.rowwise().squaredNorm();
}

bool verify_stability(const Eigen::MatrixXd& points, int k, int p_runs, int repetitions, std::uint64_t seed) {
  if (repetitions < 2) throw ParameterError("verify_stability: repetitions must be >= 2");
  std::vector<Eigen::VectorXd> rss;
  rss.reserve(static_cast<std::size_t>(repetitions));
  for (int j = 0; j < repetitions; ++j) {
    rss.push_back(cluster_residuals(points, stat_clustering(points, k, p_runs, clustering_set_seed(seed, j))));
  }
  for (std::size_t j = 1; j < rss.size(); ++j) {
    for (Eigen::Index i = 0; i < rss[j].size(); ++i) {
      const double diff = rss[j](i) - rss[0](i);
      if (std::round(std::abs(diff) * 1e10) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace yf
