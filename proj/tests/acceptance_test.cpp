// Acceptance checks, one PASS/FAIL/SKIP line per criterion.
//
//   acceptance [--only synthetic|dataset|all] [--data treasury.txt]
//
// Dataset criteria need the daily Treasury file for 10/16/2018-11/22/2019
// (276 complete dates); the path may also come from $TREASURY_DATA. Without
// it they are reported as SKIP and a dataset-only run exits with 77.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "yieldfactors/commands.hpp"
#include "yieldfactors/error.hpp"
#include "yieldfactors/nmf.hpp"

using namespace yf;

namespace {

struct Outcome {
  enum Status { pass, fail, skip } status = fail;
  std::string detail;
};

Outcome pass(std::string d = {}) { return {Outcome::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::fail, std::move(d)}; }

std::string num(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// Collects failed sub-checks; the criterion passes when there are none.
class Checks {
 public:
  void near(const std::string& what, double got, double want, double tol) {
    ++count_;
    if (!(std::abs(got - want) <= tol)) {
      add(what + " = " + num(got, 6) + " (want " + num(want, 6) + " +- " + num(tol, 3) + ")");
    }
  }
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok) add(what);
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_.empty()) return pass(summary.empty() ? std::to_string(count_) + " checks" : summary);
    std::string d = std::to_string(failures_.size()) + "/" + std::to_string(count_) + " checks failed: ";
    for (std::size_t i = 0; i < failures_.size() && i < 6; ++i) d += (i ? "; " : "") + failures_[i];
    if (failures_.size() > 6) d += "; ...";
    return fail(d);
  }

 private:
  void add(std::string s) { failures_.push_back(std::move(s)); }
  std::vector<std::string> failures_;
  int count_ = 0;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> tsv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    out.push_back(fields);
  }
  return out;
}

Eigen::MatrixXd random_positive(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double lo = 0.05,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

const std::filesystem::path kTestDir = YF_TEST_DIR;

// ---------------------------------------------------------------------------
// Reference values (percent)

const std::vector<std::string> kLabels = {"1 Mo", "2 Mo", "3 Mo", "6 Mo", "1 Yr", "2 Yr",
                                          "3 Yr", "5 Yr", "7 Yr", "10 Yr", "20 Yr", "30 Yr"};

// Cluster model, K = 2: weights, then correlation and error of the fit.
const double kClusterW2[12][2] = {{24.82, 0}, {24.93, 0}, {24.94, 0}, {25.3, 0},    {0, 11.9},   {0, 11.67},
                                  {0, 11.57}, {0, 11.67}, {0, 12.13}, {0, 12.63}, {0, 13.79}, {0, 14.64}};
const double kClusterFit2[12][2] = {{98.26, 0.82}, {99.55, 0.22}, {99.79, 0.1},  {98.04, 1.48},
                                    {96.91, 3.32}, {99.61, 0.88}, {99.64, 1.66}, {99.79, 1.78},
                                    {99.85, 1.06}, {99.87, 0.58}, {99.57, 1.5},  {99.18, 4.99}};
const double kClusterW3[12][3] = {{33.23, 0, 0}, {33.38, 0, 0}, {33.39, 0, 0}, {0, 31.03, 0},
                                  {0, 30.93, 0}, {0, 0, 15.89}, {0, 0, 15.76}, {0, 0, 15.89},
                                  {0, 0, 16.51}, {0, 0, 17.19}, {0, 0, 18.76}, {0, 38.04, 0}};
const double kClusterFit3[12][2] = {{99.33, 0.29}, {99.9, 0.04},  {99.42, 0.3},  {96.77, 2.12},
                                    {99.33, 1.31}, {99.59, 0.5},  {99.79, 0.63}, {99.94, 0.6},
                                    {99.97, 0.2},  {99.89, 0.15}, {99.53, 3.18}, {97.74, 2.22}};
// De-noised (minimum level) ensemble, K = 2.
const double kMinDenoisedW[12][2] = {{0, 12.17},    {0.8, 11.82},  {1.44, 11.09},  {3.95, 10.12},
                                     {6.32, 6.29},  {7.38, 1.43},  {7.16, 0.16},   {8.26, 0},
                                     {10.83, 2.86}, {13.42, 6.11}, {18.47, 15.54}, {21.98, 22.41}};
// De-noised (maximum level) ensemble, K = 2.
const double kMaxDenoisedW[12][2] = {{18.12, 0},    {16.8, 1.24},  {16.01, 2.2},  {13.25, 4.36},
                                     {9.87, 9.16},  {6.79, 15.13}, {5.96, 17.05}, {5.29, 17.2},
                                     {4.03, 15.16}, {2.82, 12.8},  {1.07, 5.56},  {0, 0.14}};

template <std::size_t K>
Eigen::MatrixXd reference(const double (&table)[12][K]) {
  Eigen::MatrixXd m(12, static_cast<Eigen::Index>(K));
  for (int i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < K; ++j) m(i, static_cast<Eigen::Index>(j)) = table[i][j];
  return m;
}

// Column permutation of `got` closest (max abs) to `want`.
std::vector<int> best_permutation(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  std::vector<int> perm(static_cast<std::size_t>(got.cols()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_err = INFINITY;
  do {
    double err = 0.0;
    for (Eigen::Index j = 0; j < got.cols(); ++j) {
      err = std::max(err, (got.col(perm[static_cast<std::size_t>(j)]) - want.col(j)).cwiseAbs().maxCoeff());
    }
    if (err < best_err) {
      best_err = err;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---------------------------------------------------------------------------
// Synthetic and fixture criteria

Outcome criterion_parsing() {
  const auto p = read_treasury_file((kTestDir / "data" / "table12.tsv").string());
  Checks c;
  c.expect(p.rows() == 12, "N = " + std::to_string(p.rows()));
  c.expect(p.cols() == 20, "T = " + std::to_string(p.cols()));
  c.expect(p.yields(p.find("1 Mo"), 0) == 1.73, "10/25/19 1 Mo");
  c.expect(p.yields(p.find("30 Yr"), 0) == 2.29, "10/25/19 30 Yr");
  c.expect(p.yields(p.find("1 Yr"), 7) == 1.62, "11/05/19 1 Yr");
  c.expect(p.yields(p.find("20 Yr"), 19) == 2.08, "11/22/19 20 Yr");
  c.expect(format_date(p.dates[5]) == "11/01/19", "sixth date");
  return c.outcome("N=12 T=20, spot values exact");
}

Outcome criterion_nmf_properties() {
  Checks c;
  std::mt19937_64 rng(20191122);
  std::uniform_int_distribution<int> dim(3, 15);
  int monotone_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng), t = dim(rng);
    const auto x = random_positive(n, t, rng, 0.0, 1.0);
    const int k = 1 + trial % std::min({4, n, t});
    const auto run = nmf_run(x, k, static_cast<std::uint64_t>(trial));
    // Slack covers round-off once the fit is exact (objective near 1e-30).
    const double floor = 1e-24 * x.squaredNorm();
    bool ok = true;
    for (std::size_t i = 1; i < run.objective_trace.size(); ++i) {
      if (run.objective_trace[i] > run.objective_trace[i - 1] * (1.0 + 1e-12) + floor) ok = false;
    }
    monotone_ok += ok;
  }
  c.expect(monotone_ok == 100, "monotone on " + std::to_string(monotone_ok) + "/100 problems");

  // Planted X = W F with strictly positive W and F. Multiplicative updates
  // need far more than the default 2000 iterations to reach 1e-6.
  NmfOptions tight;
  tight.max_iterations = 200000;
  tight.relative_tolerance = 1e-15;
  double worst_planted = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd x = random_positive(10, 2, rng, 0.2, 1.0) * random_positive(2, 25, rng, 0.2, 1.0);
    const auto run = nmf_run(x, 2, static_cast<std::uint64_t>(trial), tight);
    worst_planted = std::max(worst_planted, std::sqrt(run.objective) / x.norm());
  }
  c.expect(worst_planted <= 1e-6, "planted rank-2 relative error " + num(worst_planted));

  double worst_k1 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_positive(dim(rng), dim(rng), rng);
    const double svd = (x - rank1_truncate(x).product()).squaredNorm();
    const auto run = nmf_run(x, 1, static_cast<std::uint64_t>(trial));
    worst_k1 = std::max(worst_k1, std::abs(run.objective - svd) / svd);
  }
  c.expect(worst_k1 <= 1e-6, "k=1 vs rank-1 relative gap " + num(worst_k1));
  return c.outcome("monotone 100/100, planted rel err " + num(worst_planted) + ", k=1 rel gap " + num(worst_k1));
}

Outcome criterion_eckart_young() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(2, 12);
  std::normal_distribution<double> noise(0.0, 1.0);
  int beaten = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_positive(dim(rng), dim(rng), rng);
    const auto r1 = rank1_truncate(a);
    const double best = (a - r1.product()).squaredNorm();
    std::uniform_real_distribution<double> ux(0.0, 2.0 * r1.col.maxCoeff());
    std::uniform_real_distribution<double> uy(0.0, 2.0 * r1.row.maxCoeff());
    for (int s = 0; s < 10000; ++s) {
      Eigen::VectorXd x(a.rows()), y(a.cols());
      if (s % 2 == 0) {
        for (auto& v : x) v = ux(rng);
        for (auto& v : y) v = uy(rng);
      } else {
        // Small positive perturbations of the optimum.
        const double scale = std::pow(10.0, -1.0 - (s % 7));
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = r1.col(i) * std::exp(scale * noise(rng));
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = r1.row(i) * std::exp(scale * noise(rng));
      }
      if ((a - x * y.transpose()).squaredNorm() <= best) {
        return fail("candidate " + std::to_string(s) + " on matrix " + std::to_string(trial) + " is not worse");
      }
      ++beaten;
    }
  }
  return pass(std::to_string(beaten) + " candidates strictly worse");
}

Outcome criterion_clustering() {
  Checks c;
  std::mt19937_64 rng(12);

  // Order invariance of vote aggregation.
  std::uniform_int_distribution<int> lab(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<int>> runs(9, std::vector<int>(8));
    for (auto& r : runs)
      for (auto& v : r) v = lab(rng);
    const auto base = aggregate_clusterings(runs, 3);
    for (int s = 0; s < 10; ++s) {
      std::shuffle(runs.begin(), runs.end(), rng);
      c.expect(aggregate_clusterings(runs, 3) == base, "aggregation depends on run order");
    }
  }

  // Tie-breaks on hand-built counts.
  CountsMatrix q;
  q.runs = 4;
  q.counts.resize(3, 2);
  q.counts << 2, 2, 0, 4, 1, 3;  // column totals 3, 9: tied item 0 joins column 1
  c.expect(aggregate_counts(q).canonical() == std::vector<int>{0, 0, 0}, "tie to larger column");
  q.counts.resize(2, 3);
  q.runs = 2;
  q.counts << 1, 1, 0, 1, 1, 0;  // equal totals: lowest index
  c.expect(aggregate_counts(q).assignment() == std::vector<int>{0, 0}, "tie to lowest index");
  q.counts << 0, 1, 1, 0, 1, 1;
  c.expect(aggregate_counts(q).canonical() == std::vector<int>{0, 0}, "tie among later columns");
  for (int rep = 0; rep < 5; ++rep) c.expect(aggregate_counts(q) == aggregate_counts(q), "tie-break determinism");

  // Planted partitions: two clusters for the modal frequency, four for recovery.
  std::normal_distribution<double> n(0.0, 0.1);
  const auto planted = [&](int k, int count, std::vector<int>& truth) {
    const Eigen::MatrixXd centers = 10.0 * random_positive(k, 6, rng);
    Eigen::MatrixXd pts(count, 6);
    truth.clear();
    for (int i = 0; i < count; ++i) {
      truth.push_back((i * 3) % k);
      for (int d = 0; d < 6; ++d) pts(i, d) = centers(truth.back(), d) + n(rng);
    }
    return pts;
  };
  std::vector<int> truth2, truth4;
  const auto pts2 = planted(2, 30, truth2);
  const auto modal2 = star_kmeans(pts2, 2, 20, 10, 99);
  c.expect(modal2.clustering.same_partition(Clustering::from_labels(truth2)), "two-cluster partition not recovered");
  c.expect(modal2.frequency == 10, "two-cluster modal frequency " + std::to_string(modal2.frequency) + "/10");
  const auto pts4 = planted(4, 40, truth4);
  const auto agg4 = stat_clustering(pts4, 4, 100, 99);
  c.expect(agg4.same_partition(Clustering::from_labels(truth4)), "four-cluster partition not recovered");

  // Relabeling invariance of modal comparison.
  const std::vector<int> a = {0, 0, 1, 1, 2, 2}, b = {2, 2, 0, 0, 1, 1}, d = {1, 1, 2, 2, 0, 0};
  const std::vector<int> other = {0, 1, 1, 1, 2, 2};
  c.expect(Clustering::from_labels(a).same_partition(Clustering::from_labels(b)), "relabeled partition differs");
  c.expect(Clustering::from_labels(b).canonical() == Clustering::from_labels(d).canonical(), "canonical forms differ");
  c.expect(!Clustering::from_labels(a).same_partition(Clustering::from_labels(other)), "distinct partitions equal");
  return c.outcome("");
}

Outcome criterion_golden() {
  Checks c;
  const auto dir = std::filesystem::temp_directory_path() / "yf_acceptance_golden";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Stamper stamper([] { return std::chrono::system_clock::time_point(std::chrono::seconds(1574380800)); }, true);
  const OutputTarget target{dir, 2, 100, stamper.next()};

  const std::string wgold = slurp(kTestDir / "golden" / "table5_weights.txt");
  const auto wrows = tsv_rows(wgold);
  Eigen::MatrixXd mean(static_cast<Eigen::Index>(wrows.size()), 2), sd(static_cast<Eigen::Index>(wrows.size()), 2);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < wrows.size(); ++i) {
    labels.push_back(wrows[i][0]);
    for (int j = 0; j < 2; ++j) {
      mean(static_cast<Eigen::Index>(i), j) = std::stod(wrows[i][1 + j]) / 100.0;
      sd(static_cast<Eigen::Index>(i), j) = std::stod(wrows[i][3 + j]) / 100.0;
    }
  }
  const auto wpath = write_weights(mean, &sd, labels, target, true);
  c.expect(wpath.filename() == "w.2.100.2019-11-22.000000.txt", "weights file name " + wpath.filename().string());
  c.expect(slurp(wpath) == wgold, "weights file differs from golden");

  const std::string fgold = slurp(kTestDir / "golden" / "table14_fit.txt");
  FitReport report;
  labels.clear();
  for (const auto& r : tsv_rows(fgold)) {
    labels.push_back(r[0]);
    report.correlations.push_back(std::stod(r[1]));
    report.errors.push_back(std::stod(r[2]));
  }
  const auto fpath = write_fit(report, labels, target);
  c.expect(fpath.filename() == "rss.2.100.2019-11-22.000000.txt", "fit file name " + fpath.filename().string());
  c.expect(slurp(fpath) == fgold, "fit file differs from golden");
  std::filesystem::remove_all(dir);
  return c.outcome("weights and fit files byte-exact");
}

// ---------------------------------------------------------------------------
// Dataset criteria

struct Dataset {
  YieldPanel panel;
  std::optional<ClusterPipeline> cluster2, cluster3;

  RunConfig config(Command cmd, int k) const {
    RunConfig cfg;
    cfg.command = cmd;
    cfg.k = k;
    cfg.runs = 100;
    cfg.sets = 100;
    cfg.seed = 0;
    return cfg;
  }
  const ClusterPipeline& cluster(int k) {
    auto& slot = k == 2 ? cluster2 : cluster3;
    if (!slot) slot = run_cluster_pipeline(panel, config(Command::cluster, k));
    return *slot;
  }
};

Outcome criterion_correlation(Dataset& d) {
  const auto s = erank_summary(d.panel);
  Checks c;
  c.near("average correlation", s.average_correlation, 88.82, 0.05);
  c.near("eRank", s.erank, 1.43, 0.02);
  c.near("ModeRank", s.mode_rank, 2.34, 0.02);
  return c.outcome("avg " + num(s.average_correlation) + ", eRank " + num(s.erank, 3) + ", ModeRank " +
                   num(s.mode_rank, 3));
}

Outcome criterion_curve(Dataset& d) {
  const auto lsc = level_slope_curvature_correlations(curve_series(d.panel, LevelDefinition::ten_year));
  Checks c;
  c.near("Cor(S,C)", lsc.correlations(1, 2), 90.16, 0.1);
  c.near("Cor(L,S)", lsc.correlations(0, 1), 84.57, 0.1);
  c.near("Cor(L,C)", lsc.correlations(0, 2), 74.60, 0.1);
  c.near("eRank(L,S,C)", lsc.erank, 1.51, 0.02);
  return c.outcome("S-C " + num(lsc.correlations(1, 2)) + ", L-S " + num(lsc.correlations(0, 1)) + ", L-C " +
                   num(lsc.correlations(0, 2)) + ", eRank " + num(lsc.erank, 3));
}

Outcome criterion_determinism(Dataset& d) {
  Checks c;
  const std::vector<int> want2 = {0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  const std::vector<int> want3 = {0, 0, 0, 1, 1, 2, 2, 2, 2, 2, 2, 1};
  const auto& p2 = d.cluster(2);
  const auto& p3 = d.cluster(3);
  c.expect(p2.modal.frequency == 100, "K=2 frequency " + std::to_string(p2.modal.frequency) + "/100");
  c.expect(p3.modal.frequency == 100, "K=3 frequency " + std::to_string(p3.modal.frequency) + "/100");
  c.expect(p2.modal.clustering.canonical() == want2, "K=2 partition differs");
  c.expect(p3.modal.clustering.canonical() == want3, "K=3 partition differs");
  return c.outcome("K=2 and K=3 partitions 100/100");
}

void check_cluster_tables(Checks& c, const ClusterPipeline& p, const Eigen::MatrixXd& want_w,
                          const double (&want_fit)[12][2], const std::string& tag) {
  const Eigen::MatrixXd got = 100.0 * p.model.weights;
  if (got.rows() != 12 || got.cols() != want_w.cols()) {
    c.expect(false, tag + " weight shape");
    return;
  }
  const auto perm = best_permutation(got, want_w);
  for (int i = 0; i < 12; ++i) {
    for (Eigen::Index j = 0; j < want_w.cols(); ++j) {
      c.near(tag + " W[" + kLabels[static_cast<std::size_t>(i)] + "," + std::to_string(j + 1) + "]",
             got(i, perm[static_cast<std::size_t>(j)]), want_w(i, j), 0.05);
    }
    const auto& rho = p.fit.correlations[static_cast<std::size_t>(i)];
    c.near(tag + " rho[" + kLabels[static_cast<std::size_t>(i)] + "]", rho ? *rho : NAN, want_fit[i][0], 0.05);
    c.near(tag + " E[" + kLabels[static_cast<std::size_t>(i)] + "]", p.fit.errors[static_cast<std::size_t>(i)],
           want_fit[i][1], 0.05);
  }
}

Outcome criterion_cluster_tables(Dataset& d) {
  Checks c;
  check_cluster_tables(c, d.cluster(2), reference(kClusterW2), kClusterFit2, "K=2");
  check_cluster_tables(c, d.cluster(3), reference(kClusterW3), kClusterFit3, "K=3");
  return c.outcome("");
}

Outcome criterion_cluster_correlations(Dataset& d) {
  Checks c;
  const auto& p2 = d.cluster(2);
  const auto& p3 = d.cluster(3);
  c.near("K=2 phi12", p2.correlations.phi(0, 1), 80.69, 0.5);
  c.near("K=2 Cor(F2,L)", p2.correlations.theta(1), 99.87, 0.2);
  c.near("K=3 phi12", p3.correlations.phi(0, 1), 87.10, 0.5);
  c.near("K=3 phi13", p3.correlations.phi(0, 2), 73.77, 0.5);
  c.near("K=3 phi23", p3.correlations.phi(1, 2), 97.26, 0.5);
  return c.outcome("phi12 " + num(p2.correlations.phi(0, 1)) + ", Cor(F2,L) " + num(p2.correlations.theta(1)));
}

struct AlignedEnsemble {
  Eigen::MatrixXd weights;  // percent, columns in reference order
  Eigen::MatrixXd sd;
  Eigen::MatrixXd phi;
  Eigen::VectorXd theta;
  Eigen::MatrixXd interpretation;
  std::vector<int> batch_sizes;
};

AlignedEnsemble aligned(const NmfPipeline& p, const Eigen::MatrixXd& want) {
  const Eigen::MatrixXd got = 100.0 * p.ensemble.weights_mean;
  const auto perm = best_permutation(got, want);
  const auto k = got.cols();
  AlignedEnsemble a;
  a.weights.resize(got.rows(), k);
  a.sd.resize(got.rows(), k);
  a.phi.resize(k, k);
  a.theta.resize(k);
  a.interpretation.resize(k, 3);
  for (Eigen::Index j = 0; j < k; ++j) {
    const int pj = perm[static_cast<std::size_t>(j)];
    a.weights.col(j) = got.col(pj);
    a.sd.col(j) = 100.0 * p.ensemble.weights_sd.col(pj);
    a.theta(j) = p.correlations.theta(pj);
    a.interpretation.row(j) = p.interpretation.row(pj);
    a.batch_sizes.push_back(p.ensemble.batch_sizes[static_cast<std::size_t>(pj)]);
    for (Eigen::Index l = 0; l < k; ++l) a.phi(j, l) = p.correlations.phi(pj, perm[static_cast<std::size_t>(l)]);
  }
  return a;
}

Outcome criterion_denoised_k2(Dataset& d) {
  auto cfg = d.config(Command::nmf, 2);
  cfg.denoise = DenoiseMode::min_level;
  const Eigen::MatrixXd want = reference(kMinDenoisedW);
  const auto p = run_nmf_pipeline(d.panel, cfg);
  if (p.ensemble.k_effective != 2) return fail("k reduced to " + std::to_string(p.ensemble.k_effective));
  const auto a = aligned(p, want);

  Checks c;
  c.expect(a.batch_sizes == std::vector<int>{100, 100},
           "batch sizes " + std::to_string(a.batch_sizes[0]) + "," + std::to_string(a.batch_sizes[1]));
  c.expect(a.sd.maxCoeff() <= 0.01, "max weight SD " + num(a.sd.maxCoeff()) + " pp");
  const double mean_dev = (a.weights - want).cwiseAbs().maxCoeff();
  c.near("phi12", a.phi(0, 1), -70.82, 2.0);
  c.near("theta1", a.theta(0), 44.6, 2.0);
  c.near("theta2", a.theta(1), -67.77, 2.0);

  auto cfg2 = cfg;
  cfg2.seed = 1;
  const auto b = aligned(run_nmf_pipeline(d.panel, cfg2), want);
  const double drift = std::max({std::abs(a.phi(0, 1) - b.phi(0, 1)), (a.theta - b.theta).cwiseAbs().maxCoeff()});
  c.expect(drift <= 1.0, "second ensemble drifts by " + num(drift) + " pp");

  // Means within 1 pp; the 3 pp band is accepted when everything else holds.
  std::string note = "max mean deviation " + num(mean_dev, 3) + " pp";
  if (mean_dev > 3.0) c.expect(false, "weight means deviate by " + num(mean_dev) + " pp");
  if (mean_dev > 1.0 && mean_dev <= 3.0) note += " (inside the 3 pp fallback band)";
  return c.outcome(note + ", phi12 " + num(a.phi(0, 1)) + ", theta " + num(a.theta(0)) + "/" + num(a.theta(1)));
}

Outcome criterion_alt_denoised(Dataset& d) {
  auto cfg = d.config(Command::nmf, 2);
  cfg.denoise = DenoiseMode::max_level;
  const auto p = run_nmf_pipeline(d.panel, cfg);
  if (p.ensemble.k_effective != 2) return fail("k reduced to " + std::to_string(p.ensemble.k_effective));
  const auto a = aligned(p, reference(kMaxDenoisedW));
  Checks c;
  c.near("Cor(F1,S)", a.interpretation(0, 1), 98.15, 1.0);
  c.near("phi12", a.phi(0, 1), -87.53, 2.0);
  c.expect(round_to(a.weights(11, 0), 2) == 0.0, "30 Yr W1 = " + num(a.weights(11, 0)));
  const auto row = d.panel.find("30 Yr");
  const int nonzero = static_cast<int>((p.denoised.values.row(row).array() != 0.0).count());
  c.expect(nonzero == 12, std::to_string(nonzero) + " nonzero 30 Yr dates");
  return c.outcome("Cor(F1,S) " + num(a.interpretation(0, 1)) + ", phi12 " + num(a.phi(0, 1)) + ", 30 Yr nonzero on " +
                   std::to_string(nonzero) + " dates");
}

Outcome criterion_k3_instability(Dataset& d) {
  auto cfg = d.config(Command::nmf, 3);
  cfg.denoise = DenoiseMode::min_level;
  std::vector<Eigen::VectorXd> sets;
  for (int s = 0; s < 5; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto p = run_nmf_pipeline(d.panel, cfg);
    if (p.ensemble.k_effective != 3) return fail("set " + std::to_string(s) + " reduced k");
    Eigen::VectorXd v(6);
    v << p.correlations.theta(0), p.correlations.theta(1), p.correlations.theta(2), p.correlations.phi(0, 1),
        p.correlations.phi(0, 2), p.correlations.phi(1, 2);
    sets.push_back(v);
  }
  double spread = 0.0;
  for (Eigen::Index j = 0; j < 6; ++j) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : sets) {
      lo = std::min(lo, v(j));
      hi = std::max(hi, v(j));
    }
    spread = std::max(spread, hi - lo);
  }
  if (spread > 10.0) return pass("largest spread " + num(spread) + " pp");
  return fail("largest spread across 5 ensembles is " + num(spread) + " pp");
}

double variance(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

Outcome criterion_stability(Dataset& d) {
  auto cfg = d.config(Command::stability, 2);
  cfg.window = 21;
  cfg.daily = true;
  const auto p = run_stability_pipeline(d.panel, cfg);
  Checks c;
  c.expect(p.windowed.size() == 13, std::to_string(p.windowed.size()) + " windows");
  std::string detail;
  for (const char* label : {"1 Mo", "2 Mo", "3 Mo", "6 Mo"}) {
    const auto i = p.cluster.panel.find(label);
    const double vd = variance(p.daily_series.row(i).transpose());
    const double vw = variance(p.window_series.row(i).transpose());
    c.expect(vd > vw, std::string(label) + " daily variance " + num(vd) + " <= windowed " + num(vw));
    detail += std::string(detail.empty() ? "" : ", ") + label + " " + num(vd / vw, 3) + "x";
  }
  return c.outcome("13 windows; daily/window variance " + detail);
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  bool dataset;
  std::string name;
  std::function<Outcome(Dataset&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only = "all";
  std::string data;
  app.add_option("--only", only, "synthetic, dataset or all")->check(CLI::IsMember({"synthetic", "dataset", "all"}));
  app.add_option("--data", data, "Treasury yield file for the dataset criteria");
  CLI11_PARSE(app, argc, argv);
  if (data.empty()) {
    if (const char* env = std::getenv("TREASURY_DATA")) data = env;
  }

  const std::vector<Criterion> criteria = {
      {1, false, "fixture parsing", [](Dataset&) { return criterion_parsing(); }},
      {2, true, "correlation diagnostics", criterion_correlation},
      {3, true, "curve diagnostics", criterion_curve},
      {4, true, "clustering determinism", criterion_determinism},
      {5, true, "cluster weights and fit", criterion_cluster_tables},
      {6, true, "cluster factor correlations", criterion_cluster_correlations},
      {7, true, "de-noised K=2 ensemble", criterion_denoised_k2},
      {8, true, "alternative de-noising K=2", criterion_alt_denoised},
      {9, true, "K=3 de-noised instability", criterion_k3_instability},
      {10, false, "NMF correctness properties", [](Dataset&) { return criterion_nmf_properties(); }},
      {11, false, "rank-1 optimality oracle", [](Dataset&) { return criterion_eckart_young(); }},
      {12, false, "clustering properties", [](Dataset&) { return criterion_clustering(); }},
      {13, true, "stability analysis", criterion_stability},
      {14, false, "golden files", [](Dataset&) { return criterion_golden(); }},
  };

  Dataset dataset;
  std::string data_error;
  const bool want_dataset = only != "synthetic";
  bool have_data = false;
  if (want_dataset && !data.empty()) {
    try {
      dataset.panel = read_treasury_file(data);
      have_data = true;
    } catch (const Error& e) {
      data_error = e.what();
    }
  }

  int failed = 0, skipped = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only == "synthetic" && c.dataset) continue;
    if (only == "dataset" && !c.dataset) continue;
    Outcome o;
    if (c.dataset && !have_data) {
      o = {Outcome::skip, data.empty() ? "no dataset (set TREASURY_DATA)" : "dataset unreadable: " + data_error};
    } else {
      try {
        o = c.run(dataset);
      } catch (const std::exception& e) {
        o = fail(std::string("exception: ") + e.what());
      }
    }
    const char* status = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    std::cout << "criterion " << c.id << " [" << (c.dataset ? "dataset" : "synthetic") << "] " << c.name << ": "
              << status << (o.detail.empty() ? "" : " - " + o.detail) << std::endl;
    if (o.status == Outcome::fail) ++failed;
    if (o.status == Outcome::skip) ++skipped;
    ++ran;
  }
  if (failed > 0) return 1;
  if (ran > 0 && skipped == ran) return 77;
  return 0;
}
