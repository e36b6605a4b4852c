#pragma once

#include "vemhr/geometry.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace vemhr {

/// Text mesh format, first line `vemhr-mesh v1`, then the vertex count and one
/// `x y` line per vertex, then the cell count and one `k id_1 ... id_k` line
/// per cell. Coordinates are written with 17 significant digits so a
/// write/read cycle reproduces them bit for bit.
void write_mesh(std::ostream& out, const PolyMesh& mesh);
void write_mesh(const std::filesystem::path& path, const PolyMesh& mesh);

PolyMesh read_mesh(std::istream& in);
PolyMesh read_mesh(const std::filesystem::path& path);

/// Shortest-exact rendering used by every text writer in the project.
std::string format_double(double value);

} // namespace vemhr
