#include "vemhr/error.hpp"
#include "vemhr/mesh_gen.hpp"
#include "vemhr/mesh_io.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

using namespace vemhr;

TEST(MeshIo, RoundTripIsBitExact)
{
    for (MeshKind k : {MeshKind::poly_voronoi_cvt, MeshKind::tri_unstructured, MeshKind::hex_structured}) {
        const PolyMesh m = generate_mesh(k, 7, cook_domain());
        std::stringstream ss;
        write_mesh(ss, m);
        const PolyMesh r = read_mesh(ss);
        ASSERT_EQ(r.num_vertices(), m.num_vertices());
        ASSERT_EQ(r.num_cells(), m.num_cells());
        EXPECT_EQ(std::memcmp(r.vertices().data(), m.vertices().data(), sizeof(Vec2) * m.vertices().size()), 0);
        EXPECT_EQ(r.cells(), m.cells());
        EXPECT_EQ(r.num_edges(), m.num_edges());
        EXPECT_EQ(r.checksum(), m.checksum());
    }
}

TEST(MeshIo, HeaderAndLayout)
{
    const PolyMesh m = generate_mesh(MeshKind::quad_structured, 1, unit_square());
    std::stringstream ss;
    write_mesh(ss, m);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "vemhr-mesh v1");
    std::getline(ss, line);
    EXPECT_EQ(line, "4");
}

TEST(MeshIo, FormatDoubleRoundTrips)
{
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 48.0}) {
        const std::string s = format_double(x);
        EXPECT_EQ(std::stod(s), x) << s;
    }
}

TEST(MeshIo, RejectsMalformedInput)
{
    const char* bad[] = {
        "not-a-mesh\n",
        "vemhr-mesh v2\n3\n0 0\n1 0\n0 1\n1\n3 0 1 2\n",
        "vemhr-mesh v1\n3\n0 0\n1 0\n",
        "vemhr-mesh v1\n3\n0 0\n1 0\n0 1\n1\n3 0 1 9\n",
        "vemhr-mesh v1\n3\n0 0\n1 x\n0 1\n1\n3 0 1 2\n",
        "vemhr-mesh v1\n3\n0 0\n0 1\n1 0\n1\n3 0 1 2\n",
    };
    for (const char* text : bad) {
        std::stringstream ss(text);
        EXPECT_THROW(read_mesh(ss), Error) << text;
    }
}

TEST(MeshIo, MissingFileThrows)
{
    EXPECT_THROW(read_mesh(std::filesystem::path("/nonexistent/mesh.txt")), Error);
}
