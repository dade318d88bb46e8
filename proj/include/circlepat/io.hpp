#pragma once

// JSON documents for meshes, angle structures, patterns, 1-forms and reports.
// Field names are listed in docs/formats.md. Documents are written with one
// top-level key per line and compact values, so diffs stay readable.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "circlepat/hodge.hpp"
#include "circlepat/pattern.hpp"

namespace circlepat {

using Json = nlohmann::ordered_json;

inline std::string dump_document(const Json& doc) {
  if (!doc.is_object()) return doc.dump() + "\n";
  std::string out = "{\n";
  std::size_t i = 0;
  for (const auto& [key, value] : doc.items()) {
    out += "  " + Json(key).dump() + ": " + value.dump();
    out += ++i < doc.size() ? ",\n" : "\n";
  }
  return out + "}\n";
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

inline Json parse_document(const std::string& text, ErrorCode on_error) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(on_error, std::string("malformed JSON: ") + e.what());
  }
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------------------
// Mesh

inline Json mesh_to_json(const TorusTriangulation& mesh) {
  Json doc;
  doc["format"] = "circlepat-mesh";
  doc["version"] = 1;
  doc["n_vertices"] = mesh.n_vertices;
  Json faces = Json::array(), face_edges = Json::array();
  for (int f = 0; f < mesh.n_faces(); ++f) {
    faces.push_back(Json::array({mesh.faces[f][0], mesh.faces[f][1], mesh.faces[f][2]}));
    face_edges.push_back(Json::array({mesh.edge_of[3 * f], mesh.edge_of[3 * f + 1], mesh.edge_of[3 * f + 2]}));
  }
  doc["faces"] = faces;
  doc["face_edges"] = face_edges;
  doc["edges"] = mesh.edge_halfedge;
  Json crossing = Json::array();
  for (int h : mesh.edge_halfedge) crossing.push_back(Json::array({mesh.crossing[h].m, mesh.crossing[h].n}));
  doc["crossing"] = crossing;
  if (mesh.has_edge_classes()) doc["edge_class"] = mesh.edge_class;
  doc["gamma1_primal"] = mesh.gamma1_primal;
  doc["gamma2_primal"] = mesh.gamma2_primal;
  doc["gamma1_dual"] = mesh.gamma1_dual;
  doc["gamma2_dual"] = mesh.gamma2_dual;
  return doc;
}

inline TorusTriangulation mesh_from_json(const Json& doc) {
  auto fail = [](const std::string& msg) { return Error(ErrorCode::InvalidMesh, msg); };
  TorusTriangulation mesh;
  try {
    if (!doc.is_object()) throw fail("mesh document must be an object");
    if (doc.value("format", std::string()) != "circlepat-mesh") throw fail("format must be \"circlepat-mesh\"");
    mesh.n_vertices = doc.at("n_vertices").get<int>();
    for (const auto& t : doc.at("faces")) {
      if (t.size() != 3) throw fail("every face needs three vertices");
      mesh.faces.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
    const int nf = mesh.n_faces(), nh = 3 * nf;
    mesh.edge_halfedge = doc.at("edges").get<std::vector<int>>();
    const int ne = mesh.n_edges();
    const auto& fe = doc.at("face_edges");
    const auto& cr = doc.at("crossing");
    if (static_cast<int>(fe.size()) != nf) throw fail("face_edges must have one row per face");
    if (static_cast<int>(cr.size()) != ne) throw fail("crossing must have one entry per edge");
    for (int h : mesh.edge_halfedge)
      if (h < 0 || h >= nh) throw fail("edge reference halfedge out of range");

    mesh.edge_of.assign(nh, -1);
    for (int f = 0; f < nf; ++f) {
      if (fe[f].size() != 3) throw fail("every face_edges row needs three edges");
      for (int k = 0; k < 3; ++k) {
        const int e = fe[f][k].get<int>();
        if (e < 0 || e >= ne) throw fail("face_edges entry out of range");
        mesh.edge_of[3 * f + k] = e;
      }
    }
    std::vector<std::vector<int>> members(ne);
    for (int h = 0; h < nh; ++h) members[mesh.edge_of[h]].push_back(h);
    mesh.twin.assign(nh, -1);
    mesh.crossing.assign(nh, Shift{});
    for (int e = 0; e < ne; ++e) {
      if (members[e].size() != 2) throw fail("edge " + std::to_string(e) + " must border exactly two face sides");
      const int ref = mesh.edge_halfedge[e];
      const int other = members[e][0] == ref ? members[e][1] : members[e][0];
      if (members[e][0] != ref && members[e][1] != ref)
        throw fail("edge " + std::to_string(e) + ": reference halfedge is not one of its sides");
      mesh.twin[ref] = other;
      mesh.twin[other] = ref;
      if (cr[e].size() != 2) throw fail("crossing entries are [m, n] pairs");
      const Shift s{cr[e][0].get<int>(), cr[e][1].get<int>()};
      mesh.crossing[ref] = s;
      mesh.crossing[other] = -s;
    }
    if (doc.contains("edge_class")) mesh.edge_class = doc.at("edge_class").get<std::vector<int>>();
    mesh.gamma1_primal = doc.at("gamma1_primal").get<std::vector<int>>();
    mesh.gamma2_primal = doc.at("gamma2_primal").get<std::vector<int>>();
    mesh.gamma1_dual = doc.value("gamma1_dual", std::vector<int>{});
    mesh.gamma2_dual = doc.value("gamma2_dual", std::vector<int>{});
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("mesh document: ") + e.what());
  }
  if (mesh.gamma1_dual.empty()) mesh.gamma1_dual = find_dual_loop(mesh, 0, {1, 0});
  if (mesh.gamma2_dual.empty()) mesh.gamma2_dual = find_dual_loop(mesh, 0, {0, 1});
  require_valid(mesh);
  return mesh;
}

inline void save_mesh(const TorusTriangulation& mesh, const std::string& path) {
  write_text(path, dump_document(mesh_to_json(mesh)));
}

inline TorusTriangulation load_mesh(const std::string& path) {
  return mesh_from_json(parse_document(read_text(path), ErrorCode::InvalidMesh));
}

// ---------------------------------------------------------------------------
// Angle structure: either {"theta": [per edge]} or {"theta_classes": [t1, t2, t3]}

inline Json angles_to_json(const AngleStructure& theta) {
  Json doc;
  doc["format"] = "circlepat-angles";
  doc["theta"] = theta.theta;
  return doc;
}

inline AngleStructure angles_from_json(const TorusTriangulation& mesh, const Json& doc) {
  try {
    if (doc.contains("theta_classes")) {
      const auto t = doc.at("theta_classes").get<std::vector<double>>();
      if (t.size() != 3) throw Error(ErrorCode::InvalidAngles, "theta_classes needs three values");
      return uniform_angle_structure(mesh, t[0], t[1], t[2]);
    }
    AngleStructure out;
    out.theta = doc.at("theta").get<std::vector<double>>();
    if (static_cast<int>(out.theta.size()) != mesh.n_edges())
      throw Error(ErrorCode::InvalidAngles, "theta must have one value per edge");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidAngles, std::string("angle document: ") + e.what());
  }
}

inline AngleStructure load_angles(const TorusTriangulation& mesh, const std::string& path) {
  return angles_from_json(mesh, parse_document(read_text(path), ErrorCode::InvalidAngles));
}

// ---------------------------------------------------------------------------
// Pattern

inline Json pattern_to_json(const CirclePattern& pat) {
  const auto& mesh = pat.mesh;
  Json doc;
  doc["format"] = "circlepat-pattern";
  doc["A"] = Json::array({pat.A[0], pat.A[1]});
  doc["B"] = Json::array({pat.B1(), pat.B2()});
  doc["euclidean"] = pat.euclidean();
  doc["theta"] = pat.theta.theta;
  doc["u"] = pat.u();
  Json z = Json::array(), X = Json::array();
  for (const auto& v : pat.z()) z.push_back(complex_json(v));
  for (const auto& x : pat.X) X.push_back(complex_json(x));
  doc["z"] = z;
  doc["X"] = X;
  doc["rho1"] = Json::array({complex_json(pat.dev.rho1.a), complex_json(pat.dev.rho1.b)});
  doc["rho2"] = Json::array({complex_json(pat.dev.rho2.a), complex_json(pat.dev.rho2.b)});
  doc["c"] = complex_json(pat.c());
  doc["tau"] = complex_json(pat.tau());
  const auto r = cross_ratio_residuals(mesh, pat.X, &pat.theta);
  doc["residuals"] = Json{{"radii", pat.radii.residual},
                          {"iterations", pat.radii.iterations},
                          {"product", r.product},
                          {"sum", r.sum},
                          {"angle", r.angle}};
  return doc;
}

// ---------------------------------------------------------------------------
// 1-forms and period matrices

inline Json oneform_to_json(const TorusTriangulation& mesh, const DualOneForm& form, const Period& periods) {
  Json doc;
  doc["format"] = "circlepat-oneform";
  doc["periods"] = Json::array({periods[0], periods[1]});
  Json eta = Json::array();
  for (int e = 0; e < mesh.n_edges(); ++e) eta.push_back(form.on_edge(mesh, e));
  doc["eta"] = eta;
  Json kept = Json::array();
  for (char k : form.kept) kept.push_back(k != 0);
  doc["kept"] = kept;
  return doc;
}

inline Json matrix_json(const Matrix2& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

inline Json period_matrix_to_json(const PeriodMatrix& h) {
  Json doc;
  doc["kind"] = h.kind == PeriodMatrix::Kind::Discrete ? "discrete" : "smooth";
  doc["matrix"] = matrix_json(h.m);
  doc["trace"] = h.trace();
  doc["det"] = h.det();
  return doc;
}

}  // namespace circlepat
