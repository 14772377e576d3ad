// hen: experiment runner. Each subcommand writes <name>.csv and <name>.json
// into --output-dir (or $HEN_OUTPUT_DIR, or the working directory).

#include "hen/config.hpp"
#include "hen/error.hpp"
#include "hen/experiment.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> dataset;
  std::optional<std::size_t> fixture_count;
  std::optional<std::string> shape;
  std::vector<std::string> codecs;
  std::vector<std::string> similarities;
  std::optional<double> beta;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::vector<double> betas;
  std::vector<std::size_t> sizes;
  std::vector<double> alphas;
  std::vector<double> rs;
  std::optional<double> pinv_tol;
  std::optional<double> rank_tol;
  std::optional<std::string> occlusion;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> bins;
  std::optional<unsigned> threads;
  std::optional<int> block_side;
  bool no_normalize = false;
  bool clamp_text = false;
  std::optional<std::string> text_embeddings;
  std::optional<double> recovery_threshold;
  std::optional<double> recall_tolerance;
};

hen::ImageShape parse_shape(const std::string& text) {
  hen::ImageShape s;
  char x1 = 0;
  char x2 = 0;
  std::istringstream in(text);
  if (!(in >> s.height >> x1 >> s.width >> x2 >> s.channels) || x1 != 'x' || x2 != 'x' || !in.eof()) {
    throw hen::Error(hen::ErrorCode::InvalidConfig, "shape must look like HxWxC, got '" + text + "'");
  }
  return s;
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON config; flags given here override it");
  app->add_option("--dataset", f.dataset, "PPM/HENB directory or file, or fixture:separable|fixture:correlated");
  app->add_option("--fixture-count", f.fixture_count, "items generated for fixture datasets");
  app->add_option("--shape", f.shape, "image shape HxWxC (default 16x16x1)");
  app->add_option("--codec", f.codecs,
                  "identity | spherical | projection[:latent[:seed[:tile]]] | precomputed:<table>[:<query table>]");
  app->add_option("--similarity", f.similarities, "dot | l2");
  app->add_option("--beta", f.beta, "inverse temperature");
  app->add_option("--max-iters", f.max_iters, "iteration cap");
  app->add_option("--tol", f.tol, "step-norm convergence tolerance (0 runs every iteration)");
  app->add_option("--rank-tol", f.rank_tol, "relative singular value cutoff for relative rank");
  app->add_option("--occlusion", f.occlusion, "left-half | top-half | none");
  app->add_option("--seed", f.seed, "fixture and projection seed");
  app->add_option("--output-dir", f.output_dir, "where CSV/JSON results go");
  app->add_option("--threads", f.threads, "worker threads, 0 = hardware concurrency");
}

void add_hetero(CLI::App* app, Flags& f) {
  app->add_option("--block-side", f.block_side, "pixelized text block side");
  app->add_flag("--no-normalize", f.no_normalize, "store segments without per-segment normalization");
  app->add_flag("--clamp-text", f.clamp_text, "re-impose the text key after each step");
  app->add_option("--text-embeddings", f.text_embeddings, "HENB table of text latents keyed by item id");
  app->add_option("--recall-tolerance", f.recall_tolerance, "distance counted as exact recall");
}

hen::ExperimentConfig build_config(hen::ExperimentKind kind, const Flags& f) {
  hen::ExperimentConfig c;
  c.experiment = kind;
  if (kind == hen::ExperimentKind::RankTrace) c.beta_grid = {2, 20, 50, 80, 150, 500};
  if (!f.config_path.empty()) {
    c = hen::load_config(f.config_path, c);
    c.experiment = kind;
  }
  if (f.dataset) c.dataset = *f.dataset;
  if (f.fixture_count) c.fixture_count = *f.fixture_count;
  if (f.shape) c.image_shape = parse_shape(*f.shape);
  if (!f.codecs.empty()) {
    c.codecs.clear();
    for (const auto& s : f.codecs) c.codecs.push_back(hen::parse_codec_spec(s));
  }
  if (!f.similarities.empty()) {
    c.similarities.clear();
    for (const auto& s : f.similarities) c.similarities.push_back(hen::parse_similarity(s));
  }
  if (f.beta) c.energy.beta = *f.beta;
  if (f.max_iters) c.energy.max_iters = *f.max_iters;
  if (f.tol) c.energy.convergence_tol = *f.tol;
  if (!f.betas.empty()) c.beta_grid = f.betas;
  if (!f.sizes.empty()) c.sizes = f.sizes;
  if (!f.alphas.empty()) c.kmn_alphas = f.alphas;
  if (!f.rs.empty()) c.kmn_rs = f.rs;
  if (f.pinv_tol) c.pinv_tol_factor = *f.pinv_tol;
  if (f.rank_tol) c.rank_tol_factor = *f.rank_tol;
  if (f.occlusion) c.occlusion = hen::parse_occlusion(*f.occlusion);
  if (f.seed) c.seed = *f.seed;
  if (f.output_dir) c.output_dir = *f.output_dir;
  if (f.bins) c.histogram_bins = *f.bins;
  if (f.threads) c.threads = *f.threads;
  if (f.block_side) c.block_side = *f.block_side;
  if (f.no_normalize) c.normalize_segments = false;
  if (f.clamp_text) c.clamp_text = true;
  if (f.text_embeddings) c.text_embeddings = *f.text_embeddings;
  if (f.recovery_threshold) c.recovery_threshold = *f.recovery_threshold;
  if (f.recall_tolerance) c.recall_tolerance = *f.recall_tolerance;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hopfield encoding network experiments"};
  app.require_subcommand(1);
  Flags flags;

  struct Command {
    hen::ExperimentKind kind;
    const char* help;
  };
  const std::vector<Command> commands{
      {hen::ExperimentKind::Retrieve, "retrieve every item from its occluded query"},
      {hen::ExperimentKind::SweepBeta, "metrics over a beta grid"},
      {hen::ExperimentKind::ScaleOut, "metrics as the bank grows"},
      {hen::ExperimentKind::Separability, "cosine self/cross histograms per codec"},
      {hen::ExperimentKind::RankTrace, "relative rank per iteration for each beta"},
      {hen::ExperimentKind::Hetero, "text-key to image recall"},
      {hen::ExperimentKind::UniquenessViolation, "recall when two records share a text key"},
      {hen::ExperimentKind::KmnCompare, "kernel memory over an (alpha, r) grid against the Hopfield baseline"},
  };

  std::optional<hen::ExperimentKind> chosen;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(std::string(hen::to_string(cmd.kind)), cmd.help);
    add_common(sub, flags);
    switch (cmd.kind) {
      case hen::ExperimentKind::SweepBeta:
      case hen::ExperimentKind::RankTrace:
        sub->add_option("--betas", flags.betas, "beta grid");
        break;
      case hen::ExperimentKind::ScaleOut:
        sub->add_option("--sizes", flags.sizes, "ascending bank sizes");
        break;
      case hen::ExperimentKind::Separability:
        sub->add_option("--bins", flags.bins, "histogram bins over [-1, 1]");
        break;
      case hen::ExperimentKind::Hetero:
        add_hetero(sub, flags);
        break;
      case hen::ExperimentKind::UniquenessViolation:
        add_hetero(sub, flags);
        sub->add_option("--recovery-threshold", flags.recovery_threshold,
                        "relative distance above which an image counts as not recovered");
        break;
      case hen::ExperimentKind::KmnCompare:
        sub->add_option("--alphas", flags.alphas, "kernel exponents");
        sub->add_option("--rs", flags.rs, "kernel scales");
        sub->add_option("--pinv-tol", flags.pinv_tol, "relative pseudoinverse cutoff");
        break;
      default:
        break;
    }
    sub->callback([&chosen, kind = cmd.kind] { chosen = kind; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const hen::ExperimentConfig config = build_config(*chosen, flags);
    const hen::RunOutput run = hen::run_experiment(config);
    const auto csv = hen::write_run(run, hen::resolve_output_dir(config));
    std::cout << csv.string() << '\n';
  } catch (const hen::Error& e) {
    std::cerr << "hen: " << hen::to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hen: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
