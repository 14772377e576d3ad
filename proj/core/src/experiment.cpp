#include "hen/experiment.hpp"

#include "hen/error.hpp"
#include "hen/fixtures.hpp"
#include "hen/hetero.hpp"
#include "hen/linalg.hpp"
#include "hen/pixel_text.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace hen {

namespace {

constexpr double kRangeSlack = 1e-9;

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

ojson json_number(double v) { return std::isfinite(v) ? ojson(v) : ojson(format_number(v)); }

ojson json_optional(const std::optional<double>& v) { return v ? json_number(*v) : ojson(nullptr); }

std::optional<double> mean_optional(const std::vector<std::optional<double>>& values) {
  std::vector<double> present;
  for (const auto& v : values) {
    if (!v) return std::nullopt;
    present.push_back(*v);
  }
  return mean_of(present);
}

bool ssim_applicable(const ExperimentConfig& config) {
  return config.image_shape.height >= config.ssim.window_side &&
         config.image_shape.width >= config.ssim.window_side;
}

// 1-SSIM between decode(stored) and decode(state) in image shape. Decoded
// values that leave [0, L] (projection decode) are jointly rescaled to [0, L].
std::optional<double> pair_one_minus_ssim(const Vector& stored_latent, const Vector& state,
                                          const Codec& codec, const ExperimentConfig& config) {
  if (!ssim_applicable(config)) return std::nullopt;
  Vector a = codec.decode(stored_latent);
  Vector b = codec.decode(state);
  if (!a.allFinite() || !b.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  const double range = config.ssim.dynamic_range;
  const double lo = std::min(a.minCoeff(), b.minCoeff());
  const double hi = std::max(a.maxCoeff(), b.maxCoeff());
  if (lo >= -kRangeSlack && hi <= range + kRangeSlack) {
    a = a.cwiseMax(0.0).cwiseMin(range);
    b = b.cwiseMax(0.0).cwiseMin(range);
  } else if (hi > lo) {
    a = ((a.array() - lo) * (range / (hi - lo))).matrix().cwiseMax(0.0).cwiseMin(range);
    b = ((b.array() - lo) * (range / (hi - lo))).matrix().cwiseMax(0.0).cwiseMin(range);
  } else {
    a.setZero();
    b.setZero();
  }
  return one_minus_ssim(Image::from_vector(a, config.image_shape),
                        Image::from_vector(b, config.image_shape), config.ssim);
}

struct Encoded {
  Matrix bank;
  Matrix queries;
};

std::optional<std::uint32_t> table_id_of(const EmbeddingTable& table, const Vector& original) {
  for (const auto& [id, entry] : table.entries()) {
    if (entry.original == original) return id;
  }
  return std::nullopt;
}

Encoded encode_dataset(const Dataset& data, const Codec& codec, const CodecSpec& spec,
                       const ExperimentConfig& config) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto k = static_cast<Eigen::Index>(codec.latent_dim());
  Encoded enc{Matrix(n, k), Matrix(n, k)};
  std::optional<EmbeddingTable> query_table;
  if (codec.kind() == CodecKind::Precomputed && config.occlusion != Occlusion::None) {
    if (spec.query_table_path.empty()) {
      throw Error(ErrorCode::InvalidConfig,
                  "precomputed codec with occluded queries needs a query table (query_table_path)");
    }
    query_table = load_embedding_table(spec.query_table_path, ExpectedDims{codec.latent_dim(), std::nullopt});
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Image& img = data.items[static_cast<std::size_t>(i)].image;
    const Vector flat = img.flatten();
    enc.bank.row(i) = codec.encode(flat).transpose();
    if (query_table) {
      const auto id = table_id_of(codec.table(), flat);
      if (!id) throw Error(ErrorCode::LookupMiss, "item " + std::to_string(i) + " not in the embedding table");
      enc.queries.row(i) = query_table->at(*id).latent.transpose();
    } else if (codec.kind() == CodecKind::Precomputed) {
      enc.queries.row(i) = enc.bank.row(i);
    } else {
      enc.queries.row(i) = codec.encode(occlude(img, config.occlusion).flatten()).transpose();
    }
  }
  return enc;
}

// Fills pairs, means and accuracy for final states against the stored bank.
void score(Evaluation& ev, const std::vector<Eigen::Index>& matched, const Codec& codec,
           const ExperimentConfig& config) {
  const auto n = ev.bank.rows();
  ev.pairs.resize(static_cast<std::size_t>(n));
  std::vector<std::optional<double>> ssims(static_cast<std::size_t>(n));
  detail::parallel_for(static_cast<std::size_t>(n), config.threads, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Vector stored = ev.bank.row(r).transpose();
    const Vector state = ev.states.row(r).transpose();
    PairRow& row = ev.pairs[i];
    row.id = static_cast<std::uint32_t>(i);
    row.mse = mse(state, stored);
    row.one_minus_ssim = pair_one_minus_ssim(stored, state, codec, config);
    row.matched_index = matched[i];
    row.correct_identity = state.allFinite() && matched[i] == r;
    ssims[i] = row.one_minus_ssim;
  });
  std::vector<double> mses;
  std::size_t correct = 0;
  for (const auto& row : ev.pairs) {
    mses.push_back(row.mse);
    correct += row.correct_identity ? 1 : 0;
  }
  ev.mean_mse = mean_of(mses);
  ev.mean_one_minus_ssim = mean_optional(ssims);
  ev.identity_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  if (ev.states.allFinite()) ev.relative_rank = relative_rank(ev.states, ev.bank, config.rank_tol_factor);
}

ojson evaluation_json(const Evaluation& ev) {
  ojson j;
  j["codec"] = ev.codec;
  j["similarity"] = to_string(ev.similarity);
  j["beta"] = ev.beta;
  j["queries"] = ev.pairs.size();
  j["identity_accuracy"] = ev.identity_accuracy;
  j["mean_mse"] = json_number(ev.mean_mse);
  j["mean_one_minus_ssim"] = json_optional(ev.mean_one_minus_ssim);
  j["relative_rank"] = json_optional(ev.relative_rank);
  j["max_iterations"] = ev.max_iterations;
  if (ev.similarity == Similarity::DotProduct) {
    j["max_energy_increase"] = json_number(ev.max_energy_increase);
  }
  return j;
}

ojson config_json(const ExperimentConfig& c) {
  ojson j;
  j["experiment"] = to_string(c.experiment);
  j["dataset"] = c.dataset;
  j["fixture_count"] = c.fixture_count;
  j["image_shape"] = {c.image_shape.height, c.image_shape.width, c.image_shape.channels};
  auto& codecs = j["codecs"] = ojson::array();
  for (const auto& s : c.codecs) codecs.push_back(describe(s));
  auto& sims = j["similarities"] = ojson::array();
  for (auto s : c.similarities) sims.push_back(to_string(s));
  j["beta"] = c.energy.beta;
  j["max_iters"] = c.energy.max_iters;
  j["convergence_tol"] = c.energy.convergence_tol;
  j["occlusion"] = to_string(c.occlusion);
  j["seed"] = c.seed;
  return j;
}

std::string summary(const ExperimentConfig& config, ojson results) {
  ojson j;
  j["config"] = config_json(config);
  j["results"] = std::move(results);
  return j.dump(2) + "\n";
}

EnergyParams energy_at(const ExperimentConfig& config, Similarity sim, double beta) {
  EnergyParams p = config.energy;
  p.similarity = sim;
  p.beta = beta;
  return p;
}

Evaluation evaluate_encoded(const Encoded& enc, const Codec& codec, Similarity sim, double beta,
                            const ExperimentConfig& config) {
  const EnergyParams params = energy_at(config, sim, beta);
  const MemoryBank bank(enc.bank);
  const auto results = retrieve_batch(enc.queries, bank, params, config.threads);

  Evaluation ev;
  ev.codec = codec.name();
  ev.similarity = sim;
  ev.beta = beta;
  ev.bank = enc.bank;
  ev.states.resize(enc.bank.rows(), enc.bank.cols());
  std::vector<Eigen::Index> matched;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    ev.states.row(static_cast<Eigen::Index>(i)) = r.final_state.transpose();
    matched.push_back(*r.matched_index);
    ev.max_iterations = std::max(ev.max_iterations, r.iterations_run);
    for (std::size_t t = 1; t < r.energy_trajectory.size(); ++t) {
      ev.max_energy_increase = std::max(ev.max_energy_increase, r.energy_trajectory[t] - r.energy_trajectory[t - 1]);
    }
  }
  score(ev, matched, codec, config);
  return ev;
}

std::size_t fixture_count_for(const ExperimentConfig& config) {
  if (config.fixture_count > 0) return config.fixture_count;
  if (config.experiment == ExperimentKind::ScaleOut && !config.sizes.empty()) {
    return *std::max_element(config.sizes.begin(), config.sizes.end());
  }
  return 256;
}

// ---- hetero-association helpers -------------------------------------------

struct HeteroSetup {
  Codec image_codec;
  HeteroLayout layout;
  std::vector<HeteroRecord> records;
};

Vector pixel_key(std::string_view text, const Codec& image_codec, const ExperimentConfig& config) {
  const BinaryBlock block = pixelize_text(text, config.block_side);
  const auto& s = config.image_shape;
  if (block.side > s.height || block.side > s.width) {
    throw Error(ErrorCode::BlockTooSmall, "image shape cannot hold a " + std::to_string(block.side) +
                                              "-pixel text block");
  }
  Image canvas(s);
  for (int y = 0; y < block.side; ++y)
    for (int x = 0; x < block.side; ++x)
      for (int c = 0; c < s.channels; ++c) canvas.at(y, x, c) = block.at(y, x);
  return image_codec.encode(canvas.flatten());
}

HeteroSetup hetero_setup(const Dataset& data, const ExperimentConfig& config) {
  Codec image_codec = build_codec(config.codecs.front(), config.image_shape, config.seed);
  std::optional<EmbeddingTable> text_table;
  if (!config.text_embeddings.empty()) text_table = load_embedding_table(config.text_embeddings);

  HeteroLayout layout{image_codec.latent_dim(), text_table ? text_table->latent_dim() : image_codec.latent_dim()};
  std::vector<HeteroRecord> records;
  for (const auto& item : data.items) {
    HeteroRecord rec;
    rec.id = item.id;
    rec.image_latent = image_codec.encode(item.image.flatten());
    if (text_table) {
      rec.text_latent = text_table->at(item.id).latent;
    } else {
      rec.text_latent = pixel_key(item.caption.value_or("item-" + std::to_string(item.id)), image_codec, config);
    }
    records.push_back(std::move(rec));
  }
  return HeteroSetup{std::move(image_codec), layout, std::move(records)};
}

// Text segment as stored in the bank (normalised when the bank is).
Vector stored_text(const MemoryBank& bank, const HeteroLayout& layout, Eigen::Index row) {
  return bank.row(row).tail(static_cast<Eigen::Index>(layout.text_dim)).transpose();
}

Vector stored_image(const MemoryBank& bank, const HeteroLayout& layout, Eigen::Index row) {
  return bank.row(row).head(static_cast<Eigen::Index>(layout.image_dim)).transpose();
}

double relative_distance(const Vector& v, const Vector& reference) {
  const double scale = reference.norm();
  return (v - reference).norm() / (scale > 0.0 ? scale : 1.0);
}

}  // namespace

// ---- names -----------------------------------------------------------------

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Retrieve: return "retrieve";
    case ExperimentKind::SweepBeta: return "sweep-beta";
    case ExperimentKind::ScaleOut: return "scale-out";
    case ExperimentKind::Separability: return "separability";
    case ExperimentKind::RankTrace: return "rank-trace";
    case ExperimentKind::Hetero: return "hetero";
    case ExperimentKind::UniquenessViolation: return "uniqueness";
    case ExperimentKind::KmnCompare: return "kmn-compare";
  }
  return "retrieve";
}

ExperimentKind parse_experiment(std::string_view name) {
  for (auto k : {ExperimentKind::Retrieve, ExperimentKind::SweepBeta, ExperimentKind::ScaleOut,
                 ExperimentKind::Separability, ExperimentKind::RankTrace, ExperimentKind::Hetero,
                 ExperimentKind::UniquenessViolation, ExperimentKind::KmnCompare}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(Similarity kind) noexcept {
  return kind == Similarity::DotProduct ? "dot" : "l2";
}

Similarity parse_similarity(std::string_view name) {
  if (name == "dot" || name == "DotProduct") return Similarity::DotProduct;
  if (name == "l2" || name == "NegSquaredL2") return Similarity::NegSquaredL2;
  throw Error(ErrorCode::InvalidConfig, "unknown similarity '" + std::string(name) + "'");
}

// ---- configuration -----------------------------------------------------------

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (image_shape.height < 1 || image_shape.width < 1 || image_shape.channels < 1) {
    fail("image shape must be positive");
  }
  if (codecs.empty()) fail("at least one codec is required");
  if (similarities.empty()) fail("at least one similarity is required");
  try {
    energy.validate();
    ssim.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  const bool needs_grid = experiment == ExperimentKind::SweepBeta || experiment == ExperimentKind::RankTrace;
  if (needs_grid && beta_grid.empty()) fail("beta grid must not be empty");
  for (double b : beta_grid) {
    if (!(b > 0.0) || !std::isfinite(b)) fail("beta grid values must be positive");
  }
  if (experiment == ExperimentKind::ScaleOut) {
    if (sizes.empty()) fail("sizes must not be empty");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (sizes[i] == 0) fail("sizes must be >= 1");
      if (i > 0 && sizes[i] <= sizes[i - 1]) fail("sizes must be strictly ascending");
    }
  }
  if (experiment == ExperimentKind::KmnCompare) {
    if (kmn_alphas.empty() || kmn_rs.empty()) fail("kernel grid must not be empty");
    for (double a : kmn_alphas)
      if (!(a > 0.0)) fail("kernel alpha values must be positive");
    for (double r : kmn_rs)
      if (!(r > 0.0)) fail("kernel r values must be positive");
  }
  if (histogram_bins < 1) fail("histogram needs at least one bin");
  if (!(recovery_threshold > 0.0)) fail("recovery threshold must be positive");
  if (!(recall_tolerance >= 0.0)) fail("recall tolerance must be >= 0");
}

CodecSpec parse_codec_spec(std::string_view text) {
  // kind[:latent_dim[:seed[:tile]]], or precomputed:<table>[:<query table>]
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  CodecSpec spec;
  spec.kind = parse_codec_kind(parts[0]);
  const auto number = [&](std::size_t i) -> long long {
    try {
      return std::stoll(parts[i]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "bad codec field '" + parts[i] + "'");
    }
  };
  if (spec.kind == CodecKind::Precomputed) {
    if (parts.size() < 2 || parts[1].empty()) throw Error(ErrorCode::InvalidConfig, "precomputed codec needs a table path");
    spec.table_path = parts[1];
    if (parts.size() > 2) spec.query_table_path = parts[2];
    return spec;
  }
  if (parts.size() > 1 && !parts[1].empty()) spec.latent_dim = static_cast<std::size_t>(number(1));
  if (parts.size() > 2 && !parts[2].empty()) spec.seed = static_cast<std::uint64_t>(number(2));
  if (parts.size() > 3 && !parts[3].empty()) spec.tile = static_cast<int>(number(3));
  return spec;
}

std::string describe(const CodecSpec& spec) {
  std::string s(to_string(spec.kind));
  if (spec.kind == CodecKind::Precomputed) return s + ":" + spec.table_path;
  if (spec.kind == CodecKind::RandomProjection) {
    s += ":" + std::to_string(spec.latent_dim);
    s += ":" + (spec.seed ? std::to_string(*spec.seed) : std::string());
    s += ":" + std::to_string(spec.tile);
  }
  return s;
}

Dataset resolve_dataset(const ExperimentConfig& config) {
  constexpr std::string_view prefix = "fixture:";
  if (std::string_view(config.dataset).starts_with(prefix)) {
    const std::string_view kind = std::string_view(config.dataset).substr(prefix.size());
    FixtureKind fk;
    if (kind == "separable") {
      fk = FixtureKind::Separable;
    } else if (kind == "correlated") {
      fk = FixtureKind::Correlated;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown fixture '" + std::string(kind) + "'");
    }
    return make_fixture(fk, fixture_count_for(config), config.seed, config.image_shape);
  }
  return load_dataset(config.dataset, config.image_shape);
}

Codec build_codec(const CodecSpec& spec, ImageShape shape, std::uint64_t fallback_seed) {
  const std::size_t dim = shape.size();
  switch (spec.kind) {
    case CodecKind::Identity:
      return Codec::identity(dim);
    case CodecKind::SphericalNorm:
      return Codec::spherical_norm(dim);
    case CodecKind::RandomProjection: {
      int tile = spec.tile;
      if (tile < 0) {
        const int g = std::gcd(shape.height, shape.width);
        tile = g % 2 == 0 ? g / 2 : 0;
      }
      std::optional<TileGrid> grid;
      std::size_t free_dim = dim;
      if (tile > 0) {
        grid = TileGrid{shape, tile};
        if (shape.height % tile == 0 && shape.width % tile == 0) {
          free_dim -= static_cast<std::size_t>(shape.height / tile) * static_cast<std::size_t>(shape.width / tile) *
                      static_cast<std::size_t>(shape.channels);
        }
      }
      const std::size_t latent = spec.latent_dim > 0 ? spec.latent_dim : free_dim;
      return Codec::random_projection(dim, latent, spec.seed.value_or(fallback_seed), grid);
    }
    case CodecKind::Precomputed: {
      EmbeddingTable table = load_embedding_table(spec.table_path, ExpectedDims{std::nullopt, dim});
      return Codec::precomputed(std::move(table));
    }
    case CodecKind::PixelText:
      break;
  }
  throw Error(ErrorCode::InvalidConfig, "pixel-text is a text codec, not an image codec");
}

Evaluation evaluate_mhn(const Dataset& data, const Codec& codec, Similarity similarity, double beta,
                        const ExperimentConfig& config) {
  const CodecSpec spec = config.codecs.empty() ? CodecSpec{} : config.codecs.front();
  return evaluate_encoded(encode_dataset(data, codec, spec, config), codec, similarity, beta, config);
}

// ---- runners ---------------------------------------------------------------

RunOutput run_retrieve(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  const Codec codec = build_codec(config.codecs.front(), config.image_shape, config.seed);
  const Evaluation ev =
      evaluate_encoded(encode_dataset(data, codec, config.codecs.front(), config), codec,
                       config.similarities.front(), config.energy.beta, config);
  return {"retrieve", pair_table(ev.pairs), summary(config, evaluation_json(ev))};
}

RunOutput run_sweep_beta(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  struct Prepared {
    Codec codec;
    Encoded enc;
  };
  std::vector<Prepared> prepared;
  for (const auto& spec : config.codecs) {
    Codec codec = build_codec(spec, config.image_shape, config.seed);
    Encoded enc = encode_dataset(data, codec, spec, config);
    prepared.push_back({std::move(codec), std::move(enc)});
  }
  CsvTable table({"beta", "codec", "similarity", "mean_mse", "mean_one_minus_ssim", "relative_rank",
                  "identity_accuracy"});
  ojson results = ojson::array();
  for (double beta : config.beta_grid) {
    for (const auto& p : prepared) {
      for (Similarity sim : config.similarities) {
        const Evaluation ev = evaluate_encoded(p.enc, p.codec, sim, beta, config);
        table.add_row({cell(beta), ev.codec, std::string(to_string(sim)), cell(ev.mean_mse),
                       cell(ev.mean_one_minus_ssim), cell(ev.relative_rank), cell(ev.identity_accuracy)});
        results.push_back(evaluation_json(ev));
      }
    }
  }
  return {"sweep-beta", std::move(table), summary(config, std::move(results))};
}

RunOutput run_scale_out(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  if (config.sizes.back() > data.size()) {
    throw Error(ErrorCode::InvalidConfig, "size " + std::to_string(config.sizes.back()) +
                                              " exceeds dataset of " + std::to_string(data.size()));
  }
  CsvTable table({"size", "codec", "similarity", "mean_mse", "mean_one_minus_ssim", "identity_accuracy"});
  ojson results = ojson::array();
  for (const auto& spec : config.codecs) {
    const Codec codec = build_codec(spec, config.image_shape, config.seed);
    const Encoded full = encode_dataset(data, codec, spec, config);
    for (std::size_t size : config.sizes) {
      const auto n = static_cast<Eigen::Index>(size);
      const Encoded enc{full.bank.topRows(n), full.queries.topRows(n)};
      for (Similarity sim : config.similarities) {
        const Evaluation ev = evaluate_encoded(enc, codec, sim, config.energy.beta, config);
        table.add_row({cell(size), ev.codec, std::string(to_string(sim)), cell(ev.mean_mse),
                       cell(ev.mean_one_minus_ssim), cell(ev.identity_accuracy)});
        ojson j = evaluation_json(ev);
        j["size"] = size;
        results.push_back(std::move(j));
      }
    }
  }
  return {"scale-out", std::move(table), summary(config, std::move(results))};
}

RunOutput run_separability(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  CsvTable table = histogram_table();
  ojson results = ojson::array();
  for (const auto& spec : config.codecs) {
    const Codec codec = build_codec(spec, config.image_shape, config.seed);
    const Encoded enc = encode_dataset(data, codec, spec, config);
    const SeparabilityReport rep = cosine_report(enc.queries, enc.bank, config.histogram_bins);
    append_histogram_rows(table, codec.name(), rep);
    results.push_back(ojson::parse(separability_json(rep, codec.name())));
  }
  return {"separability", std::move(table), summary(config, std::move(results))};
}

RunOutput run_rank_trace(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  const Codec codec = build_codec(config.codecs.front(), config.image_shape, config.seed);
  const Encoded enc = encode_dataset(data, codec, config.codecs.front(), config);
  const MemoryBank bank(enc.bank);
  const Similarity sim = config.similarities.front();

  CsvTable table({"beta", "iteration", "rr"});
  ojson results = ojson::array();
  for (double beta : config.beta_grid) {
    const EnergyParams params = energy_at(config, sim, beta);
    Matrix states = enc.queries;
    std::vector<char> active(static_cast<std::size_t>(states.rows()), 1);
    std::vector<double> trace{relative_rank(states, enc.bank, config.rank_tol_factor)};
    for (int t = 0; t < params.max_iters; ++t) {
      if (std::none_of(active.begin(), active.end(), [](char a) { return a != 0; })) break;
      detail::parallel_for(active.size(), config.threads, [&](std::size_t i) {
        if (!active[i]) return;
        const auto r = static_cast<Eigen::Index>(i);
        const StateVector current = states.row(r).transpose();
        const StateVector next = update_step(current, bank, params);
        const double step = (next - current).norm();
        states.row(r) = next.transpose();
        if (params.convergence_tol > 0.0 && step <= params.convergence_tol) active[i] = 0;
      });
      trace.push_back(relative_rank(states, enc.bank, config.rank_tol_factor));
    }
    for (std::size_t t = 0; t < trace.size(); ++t) table.add_row({cell(beta), cell(t), cell(trace[t])});
    results.push_back({{"beta", beta}, {"iterations", trace.size() - 1}, {"final_rr", trace.back()}});
  }
  return {"rank-trace", std::move(table), summary(config, std::move(results))};
}

RunOutput run_hetero(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  const HeteroSetup setup = hetero_setup(data, config);
  const MemoryBank bank = build_hetero_bank(setup.records, setup.layout, config.normalize_segments);
  const EnergyParams params = energy_at(config, config.similarities.front(), config.energy.beta);
  const HeteroOptions options{config.clamp_text};

  std::vector<PairRow> rows(setup.records.size());
  std::vector<double> errors(setup.records.size());
  detail::parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const StateVector query = make_text_query(stored_text(bank, setup.layout, r), setup.layout);
    const HeteroRetrieval out = hetero_retrieve(query, bank, setup.layout, params, setup.image_codec, options);
    const Vector stored = stored_image(bank, setup.layout, r);
    rows[i].id = setup.records[i].id;
    rows[i].mse = mse(out.image_latent, stored);
    rows[i].one_minus_ssim = pair_one_minus_ssim(stored, out.image_latent, setup.image_codec, config);
    rows[i].matched_index = *out.result.matched_index;
    rows[i].correct_identity = *out.result.matched_index == r;
    errors[i] = (out.image_latent - stored).norm();
  });
  std::size_t correct = 0;
  std::size_t recalled = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    correct += rows[i].correct_identity ? 1 : 0;
    recalled += errors[i] <= config.recall_tolerance ? 1 : 0;
  }
  ojson j;
  j["records"] = rows.size();
  j["image_dim"] = setup.layout.image_dim;
  j["text_dim"] = setup.layout.text_dim;
  j["text_keys"] = config.text_embeddings.empty() ? "pixelized" : "embedding-table";
  j["identity_accuracy"] = static_cast<double>(correct) / static_cast<double>(rows.size());
  j["exact_recall_fraction"] = static_cast<double>(recalled) / static_cast<double>(rows.size());
  j["max_image_latent_error"] = json_number(*std::max_element(errors.begin(), errors.end()));
  return {"hetero", pair_table(rows), summary(config, std::move(j))};
}

RunOutput run_uniqueness_violation(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  if (data.size() < 2) throw Error(ErrorCode::InvalidConfig, "uniqueness run needs at least 2 items");
  const HeteroSetup setup = hetero_setup(data, config);

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_a(0, data.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_b(0, data.size() - 2);
  const std::size_t a = pick_a(rng);
  std::size_t b = pick_b(rng);
  if (b >= a) ++b;

  std::vector<HeteroRecord> violated = setup.records;
  violated[b].text_latent = violated[a].text_latent;
  const MemoryBank control_bank = build_hetero_bank(setup.records, setup.layout, config.normalize_segments);
  const MemoryBank violated_bank = build_hetero_bank(violated, setup.layout, config.normalize_segments);
  const EnergyParams params = energy_at(config, config.similarities.front(), config.energy.beta);
  const HeteroOptions options{config.clamp_text};

  const auto ea = static_cast<Eigen::Index>(a);
  const auto eb = static_cast<Eigen::Index>(b);
  const Vector image_a = stored_image(control_bank, setup.layout, ea);
  const Vector image_b = stored_image(control_bank, setup.layout, eb);

  CsvTable table({"case", "query_id", "id_a", "id_b", "dist_a", "dist_b", "threshold", "mixed_state", "recovered"});
  ojson results;
  const auto run_case = [&](const char* name, const MemoryBank& bank, Eigen::Index query_row, Eigen::Index own) {
    const StateVector q = make_text_query(stored_text(bank, setup.layout, query_row), setup.layout);
    const HeteroRetrieval out = hetero_retrieve(q, bank, setup.layout, params, setup.image_codec, options);
    const double da = relative_distance(out.image_latent, image_a);
    const double db = relative_distance(out.image_latent, image_b);
    const bool mixed = da > config.recovery_threshold && db > config.recovery_threshold;
    const Vector own_image = stored_image(bank, setup.layout, own);
    const bool recovered = (out.image_latent - own_image).norm() <= config.recall_tolerance;
    table.add_row({name, cell(setup.records[static_cast<std::size_t>(query_row)].id), cell(setup.records[a].id),
                   cell(setup.records[b].id), cell(da), cell(db), cell(config.recovery_threshold), cell(mixed),
                   cell(recovered)});
    results[name].push_back({{"query_id", setup.records[static_cast<std::size_t>(query_row)].id},
                             {"dist_a", json_number(da)},
                             {"dist_b", json_number(db)},
                             {"iterations", out.result.iterations_run},
                             {"mixed_state", mixed},
                             {"recovered", recovered}});
    return std::pair{mixed, recovered};
  };
  const bool mixed_state = run_case("duplicated", violated_bank, ea, ea).first;
  const bool control_a = run_case("control", control_bank, ea, ea).second;
  const bool control_b = run_case("control", control_bank, eb, eb).second;
  results["mixed_state"] = mixed_state;
  results["control_recovered"] = control_a && control_b;
  return {"uniqueness", std::move(table), summary(config, std::move(results))};
}

RunOutput run_kmn_compare(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = resolve_dataset(config);
  const CodecSpec& spec = config.codecs.front();
  const Codec codec = build_codec(spec, config.image_shape, config.seed);
  const Encoded enc = encode_dataset(data, codec, spec, config);
  const Similarity sim = config.similarities.front();

  CsvTable table({"method", "alpha", "r", "mean_mse", "mean_one_minus_ssim", "identity_accuracy"});
  ojson results = ojson::array();
  const Evaluation mhn = evaluate_encoded(enc, codec, sim, config.energy.beta, config);
  table.add_row({"mhn", "NA", "NA", cell(mhn.mean_mse), cell(mhn.mean_one_minus_ssim), cell(mhn.identity_accuracy)});
  ojson mj = evaluation_json(mhn);
  mj["method"] = "mhn";
  results.push_back(std::move(mj));

  for (double alpha : config.kmn_alphas) {
    for (double r : config.kmn_rs) {
      KernelParams kp{alpha, r, config.pinv_tol_factor};
      const KernelMemory memory(MemoryBank(enc.bank), kp);
      Evaluation ev;
      ev.codec = codec.name();
      ev.similarity = sim;
      ev.bank = enc.bank;
      ev.states.resize(enc.bank.rows(), enc.bank.cols());
      std::vector<Eigen::Index> matched(static_cast<std::size_t>(enc.bank.rows()));
      std::vector<int> iters(matched.size());
      detail::parallel_for(matched.size(), config.threads, [&](std::size_t i) {
        const auto row = static_cast<Eigen::Index>(i);
        const RetrievalResult res = memory.retrieve(enc.queries.row(row).transpose(), config.energy.max_iters,
                                                    config.energy.convergence_tol, sim);
        ev.states.row(row) = res.final_state.transpose();
        matched[i] = *res.matched_index;
        iters[i] = res.iterations_run;
      });
      ev.max_iterations = *std::max_element(iters.begin(), iters.end());
      score(ev, matched, codec, config);
      table.add_row({"kmn", cell(alpha), cell(r), cell(ev.mean_mse), cell(ev.mean_one_minus_ssim),
                     cell(ev.identity_accuracy)});
      ojson j = evaluation_json(ev);
      j["method"] = "kmn";
      j["alpha"] = alpha;
      j["r"] = r;
      results.push_back(std::move(j));
    }
  }
  return {"kmn-compare", std::move(table), summary(config, std::move(results))};
}

RunOutput run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::Retrieve: return run_retrieve(config);
    case ExperimentKind::SweepBeta: return run_sweep_beta(config);
    case ExperimentKind::ScaleOut: return run_scale_out(config);
    case ExperimentKind::Separability: return run_separability(config);
    case ExperimentKind::RankTrace: return run_rank_trace(config);
    case ExperimentKind::Hetero: return run_hetero(config);
    case ExperimentKind::UniquenessViolation: return run_uniqueness_violation(config);
    case ExperimentKind::KmnCompare: return run_kmn_compare(config);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown experiment");
}

fs::path resolve_output_dir(const ExperimentConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("HEN_OUTPUT_DIR"); env && *env) return fs::path(env);
  return fs::current_path();
}

fs::path write_run(const RunOutput& run, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path csv = dir / (run.name + ".csv");
  const fs::path json = dir / (run.name + ".json");
  {
    std::ofstream out(csv, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + csv.string());
    run.table.write(out);
  }
  {
    std::ofstream out(json, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + json.string());
    out << run.summary_json;
  }
  return csv;
}

}  // namespace hen
