#pragma once

#include "hen/codec.hpp"
#include "hen/csv.hpp"
#include "hen/dataset.hpp"
#include "hen/hopfield.hpp"
#include "hen/image.hpp"
#include "hen/kernel_memory.hpp"
#include "hen/metrics.hpp"
#include "hen/report.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hen {

enum class ExperimentKind {
  Retrieve,
  SweepBeta,
  ScaleOut,
  Separability,
  RankTrace,
  Hetero,
  UniquenessViolation,
  KmnCompare,
};

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment(std::string_view name);
std::string_view to_string(Similarity kind) noexcept;
Similarity parse_similarity(std::string_view name);

/// How to build an image codec for a run.
struct CodecSpec {
  CodecKind kind = CodecKind::RandomProjection;
  /// RandomProjection latent size; 0 picks the largest size the tile
  /// constraint allows.
  std::size_t latent_dim = 0;
  /// RandomProjection seed; unset uses the experiment seed.
  std::optional<std::uint64_t> seed;
  /// RandomProjection tile side; -1 picks gcd(H, W) / 2 (0 when that is
  /// not an integer), 0 disables the tile constraint.
  int tile = -1;
  /// Precomputed: HENB table of stored patterns, and optionally a second
  /// table holding the encoded queries under the same IDs.
  std::string table_path;
  std::string query_table_path;
};

CodecSpec parse_codec_spec(std::string_view text);
std::string describe(const CodecSpec& spec);

inline std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int b = 20; b <= 500; b += 20) grid.push_back(b);
  return grid;
}

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Retrieve;
  /// Directory / file path, or "fixture:separable" / "fixture:correlated".
  std::string dataset = "fixture:separable";
  /// Fixture size; 0 means max(sizes) for ScaleOut and 256 otherwise.
  std::size_t fixture_count = 0;
  ImageShape image_shape{16, 16, 1};
  std::vector<CodecSpec> codecs{CodecSpec{}};
  std::vector<Similarity> similarities{Similarity::DotProduct};
  EnergyParams energy;
  std::vector<double> beta_grid = default_beta_grid();
  std::vector<std::size_t> sizes{200, 400, 800, 1600};
  std::vector<double> kmn_alphas{1.0, 2.0};
  std::vector<double> kmn_rs{0.5, 1.0, 2.0, 4.0, 8.0};
  std::optional<double> pinv_tol_factor;
  std::optional<double> rank_tol_factor;
  Occlusion occlusion = Occlusion::LeftHalf;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  SsimParams ssim;
  int histogram_bins = kDefaultHistogramBins;
  unsigned threads = 0;
  // Hetero-association.
  int block_side = kDefaultBlockSide;
  bool normalize_segments = true;
  bool clamp_text = false;
  /// HENB table of native text latents keyed by item ID; when empty, text
  /// keys are pixelised captions passed through the image codec.
  std::string text_embeddings;
  /// Relative distance above which a recovered image latent counts as
  /// not matching a stored one.
  double recovery_threshold = 0.1;
  /// Distance at or below which a recovered latent counts as exact recall.
  double recall_tolerance = 1e-6;

  void validate() const;
};

/// Dataset named by the config (fixture or on-disk).
Dataset resolve_dataset(const ExperimentConfig& config);
Codec build_codec(const CodecSpec& spec, ImageShape shape, std::uint64_t fallback_seed);

/// Outcome of querying every stored item once.
struct Evaluation {
  std::string codec;
  Similarity similarity = Similarity::DotProduct;
  double beta = 0.0;
  Matrix bank;    // encoded memories, N x latent
  Matrix states;  // final states, N x latent
  std::vector<PairRow> pairs;
  double mean_mse = 0.0;
  std::optional<double> mean_one_minus_ssim;
  double identity_accuracy = 0.0;
  std::optional<double> relative_rank;
  /// Largest E(t+1) - E(t) over every recorded trajectory (DotProduct only).
  double max_energy_increase = -std::numeric_limits<double>::infinity();
  int max_iterations = 0;
};

/// Encodes the dataset with `codec`, queries with occluded items and runs
/// Hopfield retrieval at `beta`.
Evaluation evaluate_mhn(const Dataset& data, const Codec& codec, Similarity similarity, double beta,
                        const ExperimentConfig& config);

struct RunOutput {
  std::string name;
  CsvTable table;
  std::string summary_json;
};

RunOutput run_retrieve(const ExperimentConfig& config);
RunOutput run_sweep_beta(const ExperimentConfig& config);
RunOutput run_scale_out(const ExperimentConfig& config);
RunOutput run_separability(const ExperimentConfig& config);
RunOutput run_rank_trace(const ExperimentConfig& config);
RunOutput run_hetero(const ExperimentConfig& config);
RunOutput run_uniqueness_violation(const ExperimentConfig& config);
RunOutput run_kmn_compare(const ExperimentConfig& config);

RunOutput run_experiment(const ExperimentConfig& config);

/// config.output_dir, else $HEN_OUTPUT_DIR, else the working directory.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

/// Writes <dir>/<name>.csv and <dir>/<name>.json; returns the CSV path.
std::filesystem::path write_run(const RunOutput& run, const std::filesystem::path& dir);

}  // namespace hen
