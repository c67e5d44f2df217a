#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace yf {

// Hard partition of N items into k_effective non-empty clusters. Labels are
// 0-based internally; reports print them 1-based.
class Clustering {
 public:
  Clustering() = default;

  // Compacts `labels` so the used values become 0..K'-1, preserving their
  // relative order.
  static Clustering from_labels(std::span<const int> labels);

  const std::vector<int>& assignment() const { return assignment_; }
  int k_effective() const { return k_; }
  std::size_t size() const { return assignment_.size(); }
  int operator[](std::size_t i) const { return assignment_[i]; }

  // N x K' binary matrix, exactly one 1 per row.
  Eigen::MatrixXd indicator() const;
  std::vector<std::size_t> members(int cluster) const;

  // Labels renumbered by first appearance; equal iff same partition.
  std::vector<int> canonical() const;
  bool same_partition(const Clustering& other) const { return canonical() == other.canonical(); }

  friend bool operator==(const Clustering&, const Clustering&) = default;

 private:
  std::vector<int> assignment_;
  int k_ = 0;
};

struct KMeansResult {
  std::vector<int> labels;  // raw, in 0..k-1 (clusters may be empty)
  Eigen::MatrixXd centers;  // k x D
  std::vector<double> wcss_trace;  // after every assignment step
  int iterations = 0;

  Clustering clustering() const { return Clustering::from_labels(labels); }
};

inline constexpr int kDefaultKMeansIterations = 100;

// Lloyd's algorithm on the rows of `points`, Forgy initialization.
KMeansResult kmeans_run(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        int max_iter = kDefaultKMeansIterations);

inline constexpr int kAlignmentStarts = 10;

// Lowest final WCSS over `starts` seeded kmeans_run calls (earliest wins ties).
KMeansResult kmeans_best_of(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int starts);

// Clusters a (P*k) x D stack of run centers into k aligned groups; the
// result is compacted to 0..K'-1.
std::vector<int> align_centers(const Eigen::MatrixXd& center_stack, int k, std::uint64_t seed);

// Q_iA: how many runs put item i in aligned cluster A.
struct CountsMatrix {
  Eigen::MatrixXi counts;  // N x K
  int runs = 0;
};

CountsMatrix count_votes(std::span<const std::vector<int>> runs, int k);

// argmax_A Q_iA per item; ties go to the candidate with the largest column
// total, then to the lowest index.
Clustering aggregate_counts(const CountsMatrix& counts);
Clustering aggregate_clusterings(std::span<const std::vector<int>> runs, int k);

// P aligned k-means runs aggregated into one clustering.
Clustering stat_clustering(const Eigen::MatrixXd& points, int k, int p_runs, std::uint64_t seed);

struct ModalClustering {
  Clustering clustering;
  int frequency = 0;
};

// Most frequent stat_clustering result over m_sets independent sets.
ModalClustering star_kmeans(const Eigen::MatrixXd& points, int k, int p_runs, int m_sets,
                            std::uint64_t seed);

// Per-item residual sum of squares of `points` regressed (with intercept) on
// the cluster indicators, date by date.
Eigen::VectorXd cluster_residuals(const Eigen::MatrixXd& points, const Clustering& clustering);

// True iff `repetitions` stat_clustering results give identical residual
// vectors after rounding to 10 decimals.
bool verify_stability(const Eigen::MatrixXd& points, int k, int p_runs, int repetitions,
                      std::uint64_t seed);

// Seed used by stat_clustering set m inside star_kmeans / verify_stability.
std::uint64_t clustering_set_seed(std::uint64_t base, int set);

}  // namespace yf
