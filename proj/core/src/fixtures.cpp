#include "hen/fixtures.hpp"

#include "hen/error.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace hen {

std::string_view to_string(FixtureKind kind) noexcept {
  return kind == FixtureKind::Separable ? "separable" : "correlated";
}

Dataset make_fixture(FixtureKind kind, std::size_t count, std::uint64_t seed, ImageShape shape,
                     double noise_sigma) {
  if (count == 0) throw Error(ErrorCode::InvalidConfig, "fixture needs at least one item");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  Dataset ds{shape, {}};
  ds.items.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Image img(shape);
    for (double& v : img.data) {
      v = kind == FixtureKind::Separable ? uniform(rng)
                                         : std::clamp(kCorrelatedBaseLevel + noise(rng), 0.0, 1.0);
    }
    const auto id = static_cast<std::uint32_t>(i);
    ds.items.push_back({id, std::move(img), "caption " + std::to_string(id)});
  }
  return ds;
}

Matrix random_unit_rows(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = normal(rng);
    m.row(i).normalize();
  }
  return m;
}

}  // namespace hen
