#pragma once

#include "hen/dataset.hpp"

#include <cstdint>
#include <string_view>

namespace hen {

/// Synthetic datasets used by the experiments and acceptance tests.
///  - Separable: i.i.d. uniform [0, 1] pixels.
///  - Correlated: one shared constant base (0.5) plus per-item Gaussian
///    noise, clamped to [0, 1]. Items overlap heavily in raw pixel space.
enum class FixtureKind { Separable, Correlated };

inline constexpr ImageShape kFixtureShape{16, 16, 1};
inline constexpr double kCorrelatedNoiseSigma = 0.05;
inline constexpr double kCorrelatedBaseLevel = 0.5;

std::string_view to_string(FixtureKind kind) noexcept;

/// Items carry captions "caption <id>" so hetero runs have text keys.
Dataset make_fixture(FixtureKind kind, std::size_t count, std::uint64_t seed,
                     ImageShape shape = kFixtureShape, double noise_sigma = kCorrelatedNoiseSigma);

/// n x k matrix whose rows are seeded Gaussian directions scaled to unit norm.
Matrix random_unit_rows(Eigen::Index n, Eigen::Index k, std::uint64_t seed);

}  // namespace hen
