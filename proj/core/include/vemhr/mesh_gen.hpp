#pragma once

#include "vemhr/geometry.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vemhr {

enum class MeshKind {
    tri_structured,
    quad_structured,
    hex_structured,
    tri_unstructured,
    quad_unstructured,
    poly_voronoi_random,
    poly_voronoi_cvt,
};

std::string_view to_string(MeshKind kind);

/// Accepts the canonical names plus the short aliases quad, cvor and rvor.
/// Throws ValidationError for unknown names.
MeshKind parse_mesh_kind(std::string_view name);

struct GeneratorOptions {
    std::uint64_t seed = 20170601;
    int lloyd_iterations = 50;
    /// Jitter amplitude of the unstructured tri/quad generators, in units of
    /// the grid spacing.
    double jitter = 0.2;
    /// Voronoi edges shorter than this fraction of the mean seed spacing are
    /// collapsed after clipping. Zero disables the collapse.
    double collapse_ratio = 0.05;
    /// Lloyd is reported as converged when the last sweep moved no seed by
    /// more than this fraction of the seed spacing.
    double lloyd_tolerance = 1e-2;
};

/// Builds a mesh of `domain` at the given resolution (cells per direction for
/// grids and honeycombs, sqrt of the seed count for Voronoi kinds).
PolyMesh generate_mesh(MeshKind kind, int resolution, const Domain& domain, const GeneratorOptions& options = {});

/// Voronoi regions of `seeds` clipped to the convex domain, one counterclockwise
/// polygon per seed.
std::vector<std::vector<Vec2>> clipped_voronoi(std::span<const Vec2> seeds, const Domain& domain);

} // namespace vemhr
