#pragma once

#include <cstdint>
#include <random>

#include "surfns/fields.hpp"

namespace surfns {

/// Uniform double in [-1, 1) built from the top 53 bits of the engine output;
/// mt19937_64 is fully specified, so sequences are identical across platforms.
double uniform_pm1(std::mt19937_64& eng);

/// Smooth global scalar field: a low-frequency trigonometric polynomial in
/// the ambient coordinates, so chart overlaps agree exactly. Deterministic in
/// the seed.
ScalarField random_scalar_field(const SurfaceAtlas& atlas, std::uint64_t seed);

/// Tangential projection of a random smooth ambient vector field.
TangentField random_tangent_field(const SurfaceAtlas& atlas, std::uint64_t seed);

} // namespace surfns
