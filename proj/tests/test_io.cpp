#include <gtest/gtest.h>

#include <filesystem>
#include <regex>

#include "circlepat/circlepat.hpp"

using namespace circlepat;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("circlepat_test_" + name)).string();
}

struct Circle {
  int face;
  double cx, cy, r;
};

// Circles per tile name, read back from the SVG text.
std::map<std::string, std::vector<Circle>> parse_circles(const std::string& svg) {
  std::map<std::string, std::vector<Circle>> out;
  const std::regex group("<g id=\"(tile_[0-9]+_[0-9]+)\">([\\s\\S]*?)</g>");
  const std::regex circle("<circle class=\"circ\" data-face=\"([0-9]+)\" cx=\"([^\"]+)\" cy=\"([^\"]+)\" r=\"([^\"]+)\"/>");
  for (std::sregex_iterator g(svg.begin(), svg.end(), group), end; g != end; ++g) {
    const std::string body = (*g)[2];
    for (std::sregex_iterator c(body.begin(), body.end(), circle); c != end; ++c)
      out[(*g)[1]].push_back({std::stoi((*c)[1]), std::stod((*c)[2]), std::stod((*c)[3]), std::stod((*c)[4])});
  }
  return out;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(MeshJson, RoundTripIsByteIdentical) {
  for (auto [p, q] : {std::pair{4, 4}, {3, 5}, {2, 3}}) {
    const auto mesh = build_lattice_torus(p, q);
    const std::string first = dump_document(mesh_to_json(mesh));
    const auto loaded = mesh_from_json(Json::parse(first));
    EXPECT_EQ(dump_document(mesh_to_json(loaded)), first);
    EXPECT_EQ(loaded.twin, mesh.twin);
    EXPECT_EQ(loaded.edge_of, mesh.edge_of);
    EXPECT_EQ(loaded.crossing, mesh.crossing);
  }
}

TEST(MeshJson, FileRoundTrip) {
  const auto mesh = build_lattice_torus(4, 4);
  const auto path = temp_path("mesh.json");
  save_mesh(mesh, path);
  const std::string text = read_text(path);
  save_mesh(load_mesh(path), path);
  EXPECT_EQ(read_text(path), text);
  std::filesystem::remove(path);
}

TEST(MeshJson, RejectsBrokenDocuments) {
  const auto good = mesh_to_json(build_lattice_torus(4, 4));
  auto expect_invalid = [](const Json& doc) {
    try {
      mesh_from_json(doc);
      FAIL() << "accepted " << doc.dump().substr(0, 80);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidMesh);
    }
  };
  auto d = good;
  d.erase("faces");
  expect_invalid(d);
  d = good;
  d["crossing"][0] = Json::array({5, 0});
  expect_invalid(d);
  d = good;
  d["face_edges"][0][0] = d["face_edges"][0][1];
  expect_invalid(d);
  d = good;
  d["format"] = "other";
  expect_invalid(d);
  EXPECT_THROW(load_mesh(temp_path("does_not_exist.json")), Error);
  try {
    parse_document("{not json", ErrorCode::InvalidMesh);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidMesh);
  }
}

TEST(AngleJson, PerEdgeAndClasswise) {
  const auto mesh = build_lattice_torus(4, 4);
  const auto theta = uniform_angle_structure(mesh, kPi / 2, kPi / 4, kPi / 4);
  const auto back = angles_from_json(mesh, Json::parse(angles_to_json(theta).dump()));
  EXPECT_EQ(back.theta, theta.theta);
  const auto cls = angles_from_json(mesh, Json{{"theta_classes", {kPi / 2, kPi / 4, kPi / 4}}});
  EXPECT_EQ(cls.theta, theta.theta);
  EXPECT_THROW(angles_from_json(mesh, Json{{"theta", {1.0, 2.0}}}), Error);
}

TEST(PatternJson, FieldsAndExactNumbers) {
  const auto mesh = build_lattice_torus(4, 4);
  const auto pat = make_pattern(mesh, uniform_angle_structure(mesh, kPi / 3, kPi / 3, kPi / 3), 0.5, 0.2);
  const std::string text = dump_document(pattern_to_json(pat));
  const auto doc = Json::parse(text);
  for (const char* key : {"A", "B", "u", "z", "X", "c", "tau", "residuals"}) EXPECT_TRUE(doc.contains(key)) << key;
  EXPECT_EQ(doc["u"].size(), static_cast<std::size_t>(mesh.n_faces()));
  EXPECT_EQ(doc["z"].size(), static_cast<std::size_t>(mesh.n_vertices));
  EXPECT_EQ(doc["X"].size(), static_cast<std::size_t>(mesh.n_edges()));
  EXPECT_LE(doc["residuals"]["radii"].get<double>(), 1e-12);
  // Doubles survive the text round trip bit for bit.
  for (int f = 0; f < mesh.n_faces(); ++f) EXPECT_EQ(doc["u"][f].get<double>(), pat.u()[f]);
  EXPECT_EQ(doc["tau"][0].get<double>(), pat.tau().real());
  EXPECT_EQ(doc["B"][1].get<double>(), pat.B2());
  EXPECT_EQ(dump_document(pattern_to_json(pat)), text);
}

TEST(OneFormJson, EdgeValues) {
  const auto mesh = build_lattice_torus(4, 4);
  const auto pat = make_pattern(mesh, uniform_angle_structure(mesh, kPi / 3, kPi / 3, kPi / 3), 0.5, 0.2);
  const auto w = cotangent_weights(pat);
  const auto eta = harmonic_oneform(mesh, w, {1, 0});
  const auto doc = oneform_to_json(mesh, eta, {1, 0});
  ASSERT_EQ(doc["eta"].size(), static_cast<std::size_t>(mesh.n_edges()));
  for (int e = 0; e < mesh.n_edges(); ++e) EXPECT_EQ(doc["eta"][e].get<double>(), eta.on_edge(mesh, e));
  const auto hx = period_matrix_to_json(period_map(mesh, w));
  EXPECT_EQ(hx["kind"], "discrete");
  EXPECT_EQ(hx["matrix"].size(), 2u);
}

TEST(Svg, EquilateralTiles) {
  const auto mesh = build_lattice_torus(4, 4);
  const auto pat = make_pattern(mesh, uniform_angle_structure(mesh, kPi / 3, kPi / 3, kPi / 3), 0.0, 0.0);
  const std::string svg = export_svg(pat, 2);
  EXPECT_EQ(count(svg, "<polygon class=\"tri\""), 4u * mesh.n_faces());
  EXPECT_EQ(count(svg, "<line "), 4u * mesh.n_edges());
  const auto circles = parse_circles(svg);
  ASSERT_EQ(circles.size(), 4u);
  const double r0 = circles.begin()->second.front().r;
  for (const auto& [name, list] : circles) {
    ASSERT_EQ(list.size(), static_cast<std::size_t>(mesh.n_faces()));
    for (const auto& c : list) EXPECT_NEAR(c.r, r0, 1e-12 * r0);
  }
  for (int cls = 1; cls <= 3; ++cls) EXPECT_GT(count(svg, "class=\"e" + std::to_string(cls) + "\""), 0u);
}

TEST(Svg, HolonomyScalingBetweenTiles) {
  const auto mesh = build_lattice_torus(4, 4);
  const auto pat = make_pattern(mesh, uniform_angle_structure(mesh, kPi / 3, kPi / 3, kPi / 3), 0.5, 0.2);
  const auto circles = parse_circles(export_svg(pat, 2));
  const auto& base = circles.at("tile_0_0");
  const auto& right = circles.at("tile_1_0");
  const auto& up = circles.at("tile_0_1");
  for (int f = 0; f < mesh.n_faces(); ++f) {
    EXPECT_NEAR(right[f].r / base[f].r, std::exp(0.5), 1e-6);
    EXPECT_NEAR(up[f].r / base[f].r, std::exp(0.2), 1e-6);
  }
}

TEST(Svg, ZeroAnglesDashedAndDeterministic) {
  const auto mesh = build_lattice_torus(3, 5);
  const auto pat = make_pattern(mesh, uniform_angle_structure(mesh, kPi / 2, kPi / 2, 0.0), 0.3, -0.2);
  const std::string a = export_svg(pat, 3);
  const auto again = make_pattern(mesh, uniform_angle_structure(mesh, kPi / 2, kPi / 2, 0.0), 0.3, -0.2);
  EXPECT_EQ(export_svg(again, 3), a);
  EXPECT_EQ(count(a, "e3 zero"), 9u * mesh.n_faces() / 2);
  EXPECT_THROW(export_svg(pat, 0), Error);
}
