#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "yieldfactors/commands.hpp"
#include "yieldfactors/error.hpp"

namespace {

struct Flags {
  std::string denoise = "none";
  std::string level;
  bool utc = false;
  bool no_plots = false;
  int sets = 0;
};

void add_common(CLI::App* sub, yf::RunConfig& config) {
  sub->add_option("--input,-i", config.input_path, "Tab-delimited Treasury yield file")->required();
  sub->add_option("--drop", config.drop, "Maturity to remove, e.g. \"30 Yr\" (repeatable)");
}

void add_model(CLI::App* sub, yf::RunConfig& config, Flags& flags) {
  sub->add_option("--k,-k", config.k, "Number of factors or clusters")->check(CLI::Range(1, 1 << 30));
  sub->add_option("--runs,-p", config.runs, "Independent runs per ensemble")->check(CLI::Range(1, 1 << 30));
  sub->add_option("--seed", config.seed, "Base random seed");
  sub->add_option("--out-dir,-o", config.out_dir, "Directory for output files");
  sub->add_option("--level", flags.level, "Level series for diagnostics: min, max or 10y");
  sub->add_flag("--utc", flags.utc, "Use UTC in output file stamps");
  sub->add_flag("--no-plots", flags.no_plots, "Skip SVG output");
}

void add_cluster(CLI::App* sub, Flags& flags) {
  sub->add_option("--sets,-m", flags.sets, "Sets of runs for the modal clustering (default: runs)")
      ->check(CLI::Range(1, 1 << 30));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yield curve factor models: ensemble NMF and clustering"};
  app.require_subcommand(1);

  yf::RunConfig config;
  Flags flags;

  auto* erank = app.add_subcommand("erank", "Correlation, eRank and ModeRank of the yield panel");
  add_common(erank, config);

  auto* nmf = app.add_subcommand("nmf", "Ensemble NMF factor model");
  add_common(nmf, config);
  add_model(nmf, config, flags);
  nmf->add_option("--denoise", flags.denoise, "none, min or max")->check(CLI::IsMember({"none", "min", "max"}));
  nmf->add_flag("--median", config.use_median, "Aggregate runs by median and MAD");

  auto* cluster = app.add_subcommand("cluster", "Clustering-based factor model");
  add_common(cluster, config);
  add_model(cluster, config, flags);
  add_cluster(cluster, flags);

  auto* stability = app.add_subcommand("stability", "Windowed and daily weights of the cluster model");
  add_common(stability, config);
  add_model(stability, config, flags);
  add_cluster(stability, flags);
  stability->add_option("--window", config.window, "Dates per window")->check(CLI::Range(2, 1 << 30));
  stability->add_flag("--daily", config.daily, "Also compute daily weights");

  auto* compare = app.add_subcommand("compare-rank1", "One-factor NMF vs rank-1 SVD on a random matrix");
  compare->add_option("--n", config.n, "Rows")->check(CLI::Range(1, 1 << 30));
  compare->add_option("--m", config.m, "Columns")->check(CLI::Range(1, 1 << 30));
  compare->add_option("--seed", config.seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    config.denoise = yf::parse_denoise_mode(flags.denoise);
    if (!flags.level.empty()) config.level = yf::parse_level_definition(flags.level);
    if (flags.sets > 0) config.sets = flags.sets;
    config.plots = !flags.no_plots;

    yf::Stamper stamper([] { return std::chrono::system_clock::now(); }, flags.utc);
    yf::ReportBundle bundle;
    if (erank->parsed()) {
      config.command = yf::Command::erank;
      bundle.console = yf::cmd_erank(config);
    } else if (nmf->parsed()) {
      config.command = yf::Command::nmf;
      bundle = yf::cmd_nmf(config, stamper);
    } else if (cluster->parsed()) {
      config.command = yf::Command::cluster;
      bundle = yf::cmd_cluster(config, stamper);
    } else if (stability->parsed()) {
      config.command = yf::Command::stability;
      bundle = yf::cmd_stability(config, stamper);
    } else {
      config.command = yf::Command::compare_rank1;
      bundle.console = yf::cmd_compare_rank1(config);
    }
    std::cout << bundle.console;
    for (const auto& f : bundle.files) std::cout << "Wrote " << f.string() << '\n';
  } catch (const yf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
