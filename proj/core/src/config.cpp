#include "hen/config.hpp"

#include "hen/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace hen {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, "config key '" + key + "': " + what);
}

template <typename T>
T get(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    bad(key, e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(std::string_view json_text, ExperimentConfig c) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");

  for (const auto& [key, v] : root.items()) {
    if (key == "experiment") {
      c.experiment = parse_experiment(get<std::string>(v, key));
    } else if (key == "dataset") {
      c.dataset = get<std::string>(v, key);
    } else if (key == "fixture_count") {
      c.fixture_count = get<std::size_t>(v, key);
    } else if (key == "image_shape") {
      const auto dims = get<std::vector<int>>(v, key);
      if (dims.size() != 3) bad(key, "expected [height, width, channels]");
      c.image_shape = ImageShape{dims[0], dims[1], dims[2]};
    } else if (key == "codecs") {
      c.codecs.clear();
      for (const auto& s : get<std::vector<std::string>>(v, key)) c.codecs.push_back(parse_codec_spec(s));
    } else if (key == "similarities") {
      c.similarities.clear();
      for (const auto& s : get<std::vector<std::string>>(v, key)) c.similarities.push_back(parse_similarity(s));
    } else if (key == "beta") {
      c.energy.beta = get<double>(v, key);
    } else if (key == "max_iters") {
      c.energy.max_iters = get<int>(v, key);
    } else if (key == "convergence_tol") {
      c.energy.convergence_tol = get<double>(v, key);
    } else if (key == "beta_grid") {
      c.beta_grid = get<std::vector<double>>(v, key);
    } else if (key == "sizes") {
      c.sizes = get<std::vector<std::size_t>>(v, key);
    } else if (key == "kmn_alphas") {
      c.kmn_alphas = get<std::vector<double>>(v, key);
    } else if (key == "kmn_rs") {
      c.kmn_rs = get<std::vector<double>>(v, key);
    } else if (key == "pinv_tol_factor") {
      c.pinv_tol_factor = get<double>(v, key);
    } else if (key == "rank_tol_factor") {
      c.rank_tol_factor = get<double>(v, key);
    } else if (key == "occlusion") {
      c.occlusion = parse_occlusion(get<std::string>(v, key));
    } else if (key == "seed") {
      c.seed = get<std::uint64_t>(v, key);
    } else if (key == "output_dir") {
      c.output_dir = get<std::string>(v, key);
    } else if (key == "histogram_bins") {
      c.histogram_bins = get<int>(v, key);
    } else if (key == "threads") {
      c.threads = get<unsigned>(v, key);
    } else if (key == "block_side") {
      c.block_side = get<int>(v, key);
    } else if (key == "normalize_segments") {
      c.normalize_segments = get<bool>(v, key);
    } else if (key == "clamp_text") {
      c.clamp_text = get<bool>(v, key);
    } else if (key == "text_embeddings") {
      c.text_embeddings = get<std::string>(v, key);
    } else if (key == "recovery_threshold") {
      c.recovery_threshold = get<double>(v, key);
    } else if (key == "recall_tolerance") {
      c.recall_tolerance = get<double>(v, key);
    } else if (key == "ssim") {
      if (!v.is_object()) bad(key, "expected an object");
      for (const auto& [k, sv] : v.items()) {
        if (k == "window_side") c.ssim.window_side = get<int>(sv, k);
        else if (k == "sigma") c.ssim.gaussian_sigma = get<double>(sv, k);
        else if (k == "k1") c.ssim.k1 = get<double>(sv, k);
        else if (k == "k2") c.ssim.k2 = get<double>(sv, k);
        else if (k == "dynamic_range") c.ssim.dynamic_range = get<double>(sv, k);
        else bad("ssim." + k, "unknown key");
      }
    } else {
      bad(key, "unknown key");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str(), std::move(base));
}

}  // namespace hen
