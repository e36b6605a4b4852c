#include "vemhr/mesh_io.hpp"

#include "vemhr/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vemhr {

namespace {

constexpr const char* kMeshHeader = "vemhr-mesh v1";

template <typename T>
T read_value(std::istream& in, const char* what)
{
    T value{};
    if (!(in >> value))
        throw MeshError(std::string("mesh file: failed to read ") + what);
    return value;
}

} // namespace

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

void write_mesh(std::ostream& out, const PolyMesh& mesh)
{
    out << kMeshHeader << '\n' << mesh.num_vertices() << '\n';
    for (const Vec2& v : mesh.vertices())
        out << format_double(v.x()) << ' ' << format_double(v.y()) << '\n';
    out << mesh.num_cells() << '\n';
    for (const auto& loop : mesh.cells()) {
        out << loop.size();
        for (int id : loop)
            out << ' ' << id;
        out << '\n';
    }
}

void write_mesh(const std::filesystem::path& path, const PolyMesh& mesh)
{
    std::ofstream out(path);
    if (!out)
        throw MeshError("cannot open '" + path.string() + "' for writing");
    write_mesh(out, mesh);
}

PolyMesh read_mesh(std::istream& in)
{
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r')
        header.pop_back();
    if (header != kMeshHeader)
        throw MeshError("mesh file: expected header '" + std::string(kMeshHeader) + "'");

    const auto nv = read_value<long long>(in, "vertex count");
    if (nv < 0)
        throw MeshError("mesh file: negative vertex count");
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        // strtod-based parsing; operator>> on double is not guaranteed exact.
        const auto xs = read_value<std::string>(in, "x coordinate");
        const auto ys = read_value<std::string>(in, "y coordinate");
        double xy[2]{};
        const std::string* src[2] = {&xs, &ys};
        for (int k = 0; k < 2; ++k) {
            const auto& s = *src[k];
            const auto res = std::from_chars(s.data(), s.data() + s.size(), xy[k]);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw MeshError("mesh file: malformed coordinate '" + s + "'");
        }
        vertices.emplace_back(xy[0], xy[1]);
    }

    const auto nc = read_value<long long>(in, "cell count");
    if (nc < 0)
        throw MeshError("mesh file: negative cell count");
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(nc));
    for (auto& loop : cells) {
        const auto k = read_value<long long>(in, "cell size");
        if (k < 3)
            throw MeshError("mesh file: cell with fewer than 3 vertices");
        loop.resize(static_cast<std::size_t>(k));
        for (int& id : loop)
            id = read_value<int>(in, "vertex id");
    }
    return PolyMesh::build(std::move(vertices), std::move(cells));
}

PolyMesh read_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError("cannot open mesh file '" + path.string() + "'");
    return read_mesh(in);
}

} // namespace vemhr
