#pragma once

// Triangulated tori stored as quotients of a periodic planar triangulation.
//
// Halfedge h = 3*f + k runs from faces[f][k] to faces[f][(k+1)%3]; faces are
// counterclockwise, so face(h) is the face on the left of h. Each halfedge
// carries a crossing index: if the tail of h is lifted into the fundamental
// domain D(0,0), the head lands in D(m,n). The universal cover is never built;
// everything periodic is shifted through these indices.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "circlepat/error.hpp"
#include "circlepat/types.hpp"

namespace circlepat {

struct TorusTriangulation {
  int n_vertices = 0;
  std::vector<std::array<int, 3>> faces;

  // Per halfedge.
  std::vector<int> twin;
  std::vector<Shift> crossing;
  std::vector<int> edge_of;

  // Per undirected edge: the halfedge giving its reference orientation.
  std::vector<int> edge_halfedge;
  // Parallel class 1, 2, 3 for lattice tori; empty when untagged.
  std::vector<int> edge_class;

  // Homology generators. Primal loops are halfedge sequences; dual loops are
  // the halfedges crossed, each from face(twin(h)) into face(h).
  std::vector<int> gamma1_primal, gamma2_primal;
  std::vector<int> gamma1_dual, gamma2_dual;

  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_halfedges() const { return 3 * n_faces(); }
  int n_edges() const { return static_cast<int>(edge_halfedge.size()); }
  bool has_edge_classes() const { return !edge_class.empty(); }

  static int face(int h) { return h / 3; }
  static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  int tail(int h) const { return faces[h / 3][h % 3]; }
  int head(int h) const { return faces[h / 3][(h % 3 + 1) % 3]; }

  /// Sign of h relative to the reference orientation of its edge.
  int orientation(int h) const { return edge_halfedge[edge_of[h]] == h ? 1 : -1; }

  /// Translation of tail(h) inside the lift of face(h) whose first vertex sits in D(0,0).
  Shift offset(int h) const {
    Shift s;
    for (int k = 3 * (h / 3); k < h; ++k) s += crossing[k];
    return s;
  }

  /// Translation between the reference lifts of face(h) and face(twin(h)) when
  /// stepping from face(twin(h)) across h into face(h).
  Shift dual_crossing(int h) const { return offset(twin[h]) - crossing[h] - offset(h); }

  /// Outgoing halfedges of every vertex, ordered clockwise.
  std::vector<std::vector<int>> vertex_rings() const {
    std::vector<int> first(n_vertices, -1);
    for (int h = 0; h < n_halfedges(); ++h)
      if (first[tail(h)] < 0) first[tail(h)] = h;
    std::vector<std::vector<int>> rings(n_vertices);
    for (int v = 0; v < n_vertices; ++v) {
      if (first[v] < 0) continue;
      int h = first[v];
      int guard = 0;
      do {
        rings[v].push_back(h);
        h = next(twin[h]);
      } while (h != first[v] && ++guard <= n_halfedges());
    }
    return rings;
  }
};

/// Sum of crossing indices along a halfedge path.
inline Shift path_crossing(const TorusTriangulation& mesh, const std::vector<int>& halfedges) {
  Shift s;
  for (int h : halfedges) s += mesh.crossing[h];
  return s;
}

/// Sum of dual crossings along a dual path.
inline Shift dual_path_crossing(const TorusTriangulation& mesh, const std::vector<int>& halfedges) {
  Shift s;
  for (int h : halfedges) s += mesh.dual_crossing(h);
  return s;
}

/// Fills twin, edge_of and edge_halfedge by pairing halfedges i->j (m,n) with j->i (-m,-n).
inline void link_halfedges(TorusTriangulation& mesh) {
  const int nh = mesh.n_halfedges();
  mesh.twin.assign(nh, -1);
  mesh.edge_of.assign(nh, -1);
  mesh.edge_halfedge.clear();
  std::map<std::tuple<int, int, int, int>, int> open;
  for (int h = 0; h < nh; ++h) {
    const Shift c = mesh.crossing[h];
    auto key = std::make_tuple(mesh.head(h), mesh.tail(h), -c.m, -c.n);
    if (auto it = open.find(key); it != open.end()) {
      const int t = it->second;
      open.erase(it);
      mesh.twin[h] = t;
      mesh.twin[t] = h;
      mesh.edge_of[h] = mesh.edge_of[t];
      continue;
    }
    auto own = std::make_tuple(mesh.tail(h), mesh.head(h), c.m, c.n);
    if (!open.emplace(own, h).second)
      throw Error(ErrorCode::InvalidMesh, "duplicate halfedge " + std::to_string(h));
    mesh.edge_of[h] = static_cast<int>(mesh.edge_halfedge.size());
    mesh.edge_halfedge.push_back(h);
  }
  if (!open.empty())
    throw Error(ErrorCode::InvalidMesh,
                "halfedge " + std::to_string(open.begin()->second) + " has no twin");
}

/// p x q quotient of the triangular lattice; vertex (a,b) has index a + p*b.
/// Square (a,b) is split along its lower-left to upper-right diagonal into
/// faces 2s and 2s+1 (s = a + p*b). Classes: 1 horizontal, 2 vertical, 3 diagonal.
inline TorusTriangulation build_lattice_torus(int p, int q) {
  if (p < 2 || q < 2)
    throw Error(ErrorCode::InvalidArgument, "lattice torus needs p >= 2 and q >= 2");
  TorusTriangulation mesh;
  mesh.n_vertices = p * q;
  auto vid = [p, q](int a, int b) { return (a % p) + p * (b % q); };

  for (int b = 0; b < q; ++b) {
    for (int a = 0; a < p; ++a) {
      const int v00 = vid(a, b), v10 = vid(a + 1, b), v11 = vid(a + 1, b + 1), v01 = vid(a, b + 1);
      const Shift o00{0, 0};
      const Shift o10{a + 1 == p ? 1 : 0, 0};
      const Shift o11{a + 1 == p ? 1 : 0, b + 1 == q ? 1 : 0};
      const Shift o01{0, b + 1 == q ? 1 : 0};
      mesh.faces.push_back({v00, v10, v11});
      mesh.crossing.insert(mesh.crossing.end(), {o10 - o00, o11 - o10, o00 - o11});
      mesh.faces.push_back({v00, v11, v01});
      mesh.crossing.insert(mesh.crossing.end(), {o11 - o00, o01 - o11, o00 - o01});
    }
  }
  link_halfedges(mesh);

  // Reference orientation and class per edge: the forward lattice direction.
  auto lower = [p](int a, int b) { return 2 * (a + p * b); };
  auto upper = [p](int a, int b) { return 2 * (a + p * b) + 1; };
  mesh.edge_class.assign(mesh.n_edges(), 0);
  for (int b = 0; b < q; ++b) {
    for (int a = 0; a < p; ++a) {
      const int horizontal = 3 * lower(a, b) + 0;
      const int vertical = 3 * lower((a + p - 1) % p, b) + 1;
      const int diagonal = 3 * upper(a, b) + 0;
      for (auto [h, cls] : {std::pair{horizontal, 1}, {vertical, 2}, {diagonal, 3}}) {
        mesh.edge_halfedge[mesh.edge_of[h]] = h;
        mesh.edge_class[mesh.edge_of[h]] = cls;
      }
    }
  }

  for (int a = 0; a < p; ++a) {
    mesh.gamma1_primal.push_back(3 * lower(a, 0) + 0);
    mesh.gamma1_dual.push_back(3 * upper((a + 1) % p, 0) + 2);
    mesh.gamma1_dual.push_back(3 * lower((a + 1) % p, 0) + 2);
  }
  for (int b = 0; b < q; ++b) {
    mesh.gamma2_primal.push_back(3 * lower(p - 1, b) + 1);
    mesh.gamma2_dual.push_back(3 * upper(0, b) + 0);
    mesh.gamma2_dual.push_back(3 * lower(0, (b + 1) % q) + 0);
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// Validation reports

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const CheckResult* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
  void add(std::string name, bool passed, std::string detail = {}) {
    checks.push_back({std::move(name), passed, std::move(detail)});
  }
};

namespace detail {

inline std::string shift_str(Shift s) {
  return "(" + std::to_string(s.m) + "," + std::to_string(s.n) + ")";
}

inline std::optional<std::string> check_primal_loop(const TorusTriangulation& mesh,
                                                    const std::vector<int>& loop, Shift expected) {
  if (loop.empty()) return "loop is empty";
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const int h = loop[i];
    if (h < 0 || h >= mesh.n_halfedges()) return "halfedge " + std::to_string(h) + " out of range";
    const int nxt = loop[(i + 1) % loop.size()];
    if (nxt < 0 || nxt >= mesh.n_halfedges()) return "halfedge " + std::to_string(nxt) + " out of range";
    if (mesh.head(h) != mesh.tail(nxt))
      return "halfedge " + std::to_string(h) + " is not followed by a halfedge leaving its head";
  }
  const Shift total = path_crossing(mesh, loop);
  if (!(total == expected))
    return "total crossing " + shift_str(total) + ", expected " + shift_str(expected);
  return std::nullopt;
}

inline std::optional<std::string> check_dual_loop(const TorusTriangulation& mesh,
                                                  const std::vector<int>& loop, Shift expected) {
  if (loop.empty()) return "loop is empty";
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const int h = loop[i];
    const int nxt = loop[(i + 1) % loop.size()];
    if (h < 0 || h >= mesh.n_halfedges() || nxt < 0 || nxt >= mesh.n_halfedges())
      return "halfedge out of range at position " + std::to_string(i);
    if (TorusTriangulation::face(h) != TorusTriangulation::face(mesh.twin[nxt]))
      return "dual step across halfedge " + std::to_string(nxt) + " does not start in face " +
             std::to_string(TorusTriangulation::face(h));
  }
  const Shift total = dual_path_crossing(mesh, loop);
  if (!(total == expected))
    return "total dual crossing " + shift_str(total) + ", expected " + shift_str(expected);
  return std::nullopt;
}

}  // namespace detail

/// Checks every structural invariant; each failing check names the first offending element.
inline ValidationReport validate_triangulation(const TorusTriangulation& mesh) {
  ValidationReport report;
  const int nh = mesh.n_halfedges();

  {
    std::string bad;
    for (int f = 0; f < mesh.n_faces() && bad.empty(); ++f) {
      const auto& t = mesh.faces[f];
      for (int v : t)
        if (v < 0 || v >= mesh.n_vertices) bad = "face " + std::to_string(f) + " has vertex out of range";
    }
    report.add("face_indices", bad.empty(), bad);
    if (!bad.empty()) return report;
  }

  const bool sizes_ok = static_cast<int>(mesh.twin.size()) == nh &&
                        static_cast<int>(mesh.crossing.size()) == nh &&
                        static_cast<int>(mesh.edge_of.size()) == nh;
  report.add("array_sizes", sizes_ok, sizes_ok ? "" : "per-halfedge arrays do not match 3|F|");
  if (!sizes_ok) return report;

  {
    const long chi = static_cast<long>(mesh.n_vertices) - mesh.n_edges() + mesh.n_faces();
    report.add("euler_characteristic", chi == 0 && 2 * mesh.n_edges() == nh,
               "V - E + F = " + std::to_string(chi));
  }

  {
    std::string bad;
    for (int h = 0; h < nh && bad.empty(); ++h) {
      const int t = mesh.twin[h];
      const std::string name = "halfedge " + std::to_string(h);
      if (t < 0 || t >= nh || t == h)
        bad = name + ": twin out of range or self";
      else if (mesh.twin[t] != h)
        bad = name + ": twin(twin(h)) != h";
      else if (mesh.tail(t) != mesh.head(h) || mesh.head(t) != mesh.tail(h))
        bad = name + ": twin endpoints do not match";
      else if (mesh.edge_of[t] != mesh.edge_of[h])
        bad = name + ": twin lies on a different edge";
    }
    report.add("twin_involution", bad.empty(), bad);
  }

  {
    std::string bad;
    for (int h = 0; h < nh && bad.empty(); ++h) {
      int g = h;
      for (int k = 0; k < 3; ++k) g = TorusTriangulation::next(g);
      if (g != h) bad = "halfedge " + std::to_string(h) + ": next^3 != id";
    }
    report.add("next_cycle", bad.empty(), bad);
  }

  {
    std::string bad;
    for (int h = 0; h < nh && bad.empty(); ++h) {
      const int t = mesh.twin[h];
      if (t >= 0 && t < nh && !(mesh.crossing[t] == -mesh.crossing[h]))
        bad = "halfedge " + std::to_string(h) + ": crossing(twin) != -crossing";
    }
    report.add("crossing_antisymmetry", bad.empty(), bad);
  }

  {
    std::string bad;
    for (int f = 0; f < mesh.n_faces() && bad.empty(); ++f) {
      const Shift s = mesh.crossing[3 * f] + mesh.crossing[3 * f + 1] + mesh.crossing[3 * f + 2];
      if (!s.is_zero()) bad = "face " + std::to_string(f) + ": crossing sum " + detail::shift_str(s);
    }
    report.add("face_crossing_closure", bad.empty(), bad);
  }

  {
    std::string bad;
    for (int e = 0; e < mesh.n_edges() && bad.empty(); ++e) {
      const int h = mesh.edge_halfedge[e];
      if (h < 0 || h >= nh || mesh.edge_of[h] != e) bad = "edge " + std::to_string(e) + ": bad reference halfedge";
    }
    if (mesh.has_edge_classes() && bad.empty()) {
      if (static_cast<int>(mesh.edge_class.size()) != mesh.n_edges()) bad = "edge_class size mismatch";
      for (int e = 0; e < mesh.n_edges() && bad.empty(); ++e)
        if (mesh.edge_class[e] < 1 || mesh.edge_class[e] > 3) bad = "edge " + std::to_string(e) + ": class not in {1,2,3}";
    }
    report.add("edge_table", bad.empty(), bad);
  }

  if (!report.ok()) return report;

  {
    // Vertex links must be single cycles (closed surface).
    auto rings = mesh.vertex_rings();
    std::vector<int> seen(nh, 0);
    std::string bad;
    for (int v = 0; v < mesh.n_vertices && bad.empty(); ++v) {
      if (rings[v].empty()) bad = "vertex " + std::to_string(v) + ": isolated";
      for (int h : rings[v]) seen[h]++;
    }
    for (int h = 0; h < nh && bad.empty(); ++h)
      if (seen[h] != 1) bad = "vertex " + std::to_string(mesh.tail(h)) + ": link is not a single cycle";
    report.add("vertex_links", bad.empty(), bad);
  }

  auto loop_check = [&](const char* name, std::optional<std::string> err) {
    report.add(name, !err.has_value(), err.value_or(""));
  };
  loop_check("gamma1_primal", detail::check_primal_loop(mesh, mesh.gamma1_primal, {1, 0}));
  loop_check("gamma2_primal", detail::check_primal_loop(mesh, mesh.gamma2_primal, {0, 1}));
  loop_check("gamma1_dual", detail::check_dual_loop(mesh, mesh.gamma1_dual, {1, 0}));
  loop_check("gamma2_dual", detail::check_dual_loop(mesh, mesh.gamma2_dual, {0, 1}));
  return report;
}

inline void require_valid(const TorusTriangulation& mesh) {
  auto report = validate_triangulation(mesh);
  if (auto* f = report.first_failure())
    throw Error(ErrorCode::InvalidMesh, f->name + ": " + f->detail);
}

// ---------------------------------------------------------------------------
// Loops on the quotient with prescribed homology

/// Shortest closed halfedge path from `start` with total crossing `target`,
/// using only edges accepted by `allowed`. Empty if none exists within the search window.
template <class EdgePredicate>
std::vector<int> find_primal_loop(const TorusTriangulation& mesh, int start, Shift target,
                                  EdgePredicate allowed, int window = 3) {
  const int side = 2 * window + 1;
  auto state = [&](int v, Shift s) { return (v * side + (s.m + window)) * side + (s.n + window); };
  const int n_states = mesh.n_vertices * side * side;
  std::vector<int> via(n_states, -1), parent(n_states, -1);
  auto rings = mesh.vertex_rings();
  std::queue<std::pair<int, Shift>> frontier;
  const int origin = state(start, {});
  frontier.push({start, {}});
  parent[origin] = origin;
  while (!frontier.empty()) {
    auto [v, s] = frontier.front();
    frontier.pop();
    const int from = state(v, s);
    for (int h : rings[v]) {
      if (!allowed(mesh.edge_of[h])) continue;
      const Shift t = s + mesh.crossing[h];
      if (std::abs(t.m) > window || std::abs(t.n) > window) continue;
      const int id = state(mesh.head(h), t);
      if (parent[id] >= 0) continue;
      parent[id] = from;
      via[id] = h;
      if (mesh.head(h) == start && t == target) {
        std::vector<int> path;
        for (int cur = id; cur != origin; cur = parent[cur]) path.push_back(via[cur]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push({mesh.head(h), t});
    }
  }
  return {};
}

inline std::vector<int> find_primal_loop(const TorusTriangulation& mesh, int start, Shift target) {
  return find_primal_loop(mesh, start, target, [](int) { return true; });
}

/// Shortest closed dual path from face `start` with total dual crossing `target`.
inline std::vector<int> find_dual_loop(const TorusTriangulation& mesh, int start, Shift target,
                                       int window = 3) {
  const int side = 2 * window + 1;
  auto state = [&](int f, Shift s) { return (f * side + (s.m + window)) * side + (s.n + window); };
  const int n_states = mesh.n_faces() * side * side;
  std::vector<int> via(n_states, -1), parent(n_states, -1);
  std::queue<std::pair<int, Shift>> frontier;
  const int origin = state(start, {});
  frontier.push({start, {}});
  parent[origin] = origin;
  while (!frontier.empty()) {
    auto [f, s] = frontier.front();
    frontier.pop();
    const int from = state(f, s);
    for (int k = 0; k < 3; ++k) {
      // Leaving f across side k means crossing its twin.
      const int h = mesh.twin[3 * f + k];
      const int g = TorusTriangulation::face(h);
      const Shift t = s + mesh.dual_crossing(h);
      if (std::abs(t.m) > window || std::abs(t.n) > window) continue;
      const int id = state(g, t);
      if (parent[id] >= 0) continue;
      parent[id] = from;
      via[id] = h;
      if (g == start && t == target) {
        std::vector<int> path;
        for (int cur = id; cur != origin; cur = parent[cur]) path.push_back(via[cur]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push({g, t});
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Angle structures

struct AngleStructure {
  std::vector<double> theta;  // per edge, radians in [0, pi)

  double at_halfedge(const TorusTriangulation& mesh, int h) const { return theta[mesh.edge_of[h]]; }
};

/// Assigns theta_c to the edges of lattice class c.
inline AngleStructure uniform_angle_structure(const TorusTriangulation& mesh, double theta1,
                                              double theta2, double theta3) {
  if (!mesh.has_edge_classes())
    throw Error(ErrorCode::MissingEdgeClasses, "mesh carries no edge class tags");
  const std::array<double, 3> t{theta1, theta2, theta3};
  for (double x : t)
    if (!(x >= 0.0 && x < kPi)) throw Error(ErrorCode::InvalidAngles, "angle outside [0, pi)");
  if (std::abs(theta1 + theta2 + theta3 - kPi) > 1e-12)
    throw Error(ErrorCode::InvalidAngles, "class angles must sum to pi");
  AngleStructure out;
  out.theta.resize(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) out.theta[e] = t[mesh.edge_class[e] - 1];
  return out;
}

struct AngleValidation {
  ValidationReport report;
  int max_cycle_len = 0;
  int cycles_checked = 0;
  int cycles_exempt = 0;  // links of a single vertex
  bool partial = true;    // condition (ii) is only checked up to max_cycle_len
};

namespace detail {

/// Simple contractible dual cycles up to max_len, as lists of crossed halfedges.
template <class Visitor>
void for_each_contractible_dual_cycle(const TorusTriangulation& mesh, int max_len, Visitor&& visit) {
  std::set<std::vector<int>> emitted;
  std::vector<int> path;
  std::vector<char> on_path(mesh.n_faces(), 0);

  auto dfs = [&](auto&& self, int start, int f, Shift s) -> void {
    for (int k = 0; k < 3; ++k) {
      const int h = mesh.twin[3 * f + k];
      const int g = TorusTriangulation::face(h);
      const Shift t = s + mesh.dual_crossing(h);
      if (g == start) {
        if (!t.is_zero() || path.empty()) continue;
        if (path.size() == 1 && mesh.edge_of[path[0]] == mesh.edge_of[h]) continue;
        path.push_back(h);
        std::vector<int> key;
        for (int x : path) key.push_back(mesh.edge_of[x]);
        std::sort(key.begin(), key.end());
        if (emitted.insert(key).second) visit(path);
        path.pop_back();
        continue;
      }
      if (g < start || on_path[g] || static_cast<int>(path.size()) + 1 >= max_len) continue;
      on_path[g] = 1;
      path.push_back(h);
      self(self, start, g, t);
      path.pop_back();
      on_path[g] = 0;
    }
  };
  for (int f = 0; f < mesh.n_faces(); ++f) {
    on_path[f] = 1;
    dfs(dfs, f, f, {});
    on_path[f] = 0;
  }
}

/// True when all crossed edges share one lifted endpoint, i.e. the cycle is a vertex link.
inline bool encloses_single_vertex(const TorusTriangulation& mesh, const std::vector<int>& cycle) {
  using Lift = std::tuple<int, int, int>;
  std::set<Lift> common;
  Shift face_lift;  // lift of the face we are in, relative to the start
  bool first = true;
  for (int h : cycle) {
    face_lift += mesh.dual_crossing(h);
    const Shift tail = face_lift + mesh.offset(h);
    const Shift head = tail + mesh.crossing[h];
    std::set<Lift> ends{{mesh.tail(h), tail.m, tail.n}, {mesh.head(h), head.m, head.n}};
    if (first) {
      common = ends;
      first = false;
    } else {
      std::set<Lift> keep;
      for (const auto& x : common)
        if (ends.count(x)) keep.insert(x);
      common.swap(keep);
    }
    if (common.empty()) return false;
  }
  return true;
}

}  // namespace detail

/// Condition (i) exactly (1e-12) and condition (ii) on all simple contractible
/// dual cycles with at most max_cycle_len edges.
inline AngleValidation validate_angle_structure(const TorusTriangulation& mesh, const AngleStructure& theta,
                                                int max_cycle_len = 10) {
  AngleValidation out;
  out.max_cycle_len = max_cycle_len;

  {
    std::string bad;
    if (static_cast<int>(theta.theta.size()) != mesh.n_edges()) bad = "angle count does not match edge count";
    for (int e = 0; e < static_cast<int>(theta.theta.size()) && bad.empty(); ++e)
      if (!(theta.theta[e] >= 0.0 && theta.theta[e] < kPi))
        bad = "edge " + std::to_string(e) + ": angle outside [0, pi)";
    out.report.add("angle_range", bad.empty(), bad);
    if (!bad.empty()) return out;
  }

  {
    std::vector<double> sum(mesh.n_vertices, 0.0);
    for (int h = 0; h < mesh.n_halfedges(); ++h) sum[mesh.tail(h)] += theta.at_halfedge(mesh, h);
    std::string bad;
    for (int v = 0; v < mesh.n_vertices && bad.empty(); ++v) {
      if (std::abs(sum[v] - 2.0 * kPi) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "vertex " << v << ": angle sum " << sum[v];
        bad = os.str();
      }
    }
    out.report.add("vertex_sums", bad.empty(), bad);
  }

  {
    std::string bad;
    detail::for_each_contractible_dual_cycle(mesh, max_cycle_len, [&](const std::vector<int>& cycle) {
      ++out.cycles_checked;
      if (detail::encloses_single_vertex(mesh, cycle)) {
        ++out.cycles_exempt;
        return;
      }
      double s = 0.0;
      for (int h : cycle) s += theta.at_halfedge(mesh, h);
      if (!(s > 2.0 * kPi + 1e-12) && bad.empty()) {
        std::ostringstream os;
        os.precision(17);
        os << "dual cycle through edges";
        for (int h : cycle) os << ' ' << mesh.edge_of[h];
        os << " has angle sum " << s;
        bad = os.str();
      }
    });
    out.report.add("contractible_cycles", bad.empty(),
                   bad.empty() ? "checked " + std::to_string(out.cycles_checked) + " cycles up to length " +
                                     std::to_string(max_cycle_len) + " (partial check)"
                               : bad);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cell decomposition obtained by deleting zero-angle edges

struct CellDecomposition {
  std::vector<char> kept;          // per edge
  std::vector<int> cell_of_face;
  std::vector<Shift> face_shift;   // chosen lift of each face, relative to its reference lift
  std::vector<std::vector<int>> cell_faces;

  int n_cells() const { return static_cast<int>(cell_faces.size()); }

  /// Dual crossing between chosen lifts; zero across deleted edges.
  Shift dual_crossing(const TorusTriangulation& mesh, int h) const {
    return mesh.dual_crossing(h) + face_shift[TorusTriangulation::face(mesh.twin[h])] -
           face_shift[TorusTriangulation::face(h)];
  }
};

/// Merges faces across edges with theta == 0. A merged cell whose lift does not
/// close up (it wraps around the torus) cannot carry a single circle.
inline CellDecomposition build_cells(const TorusTriangulation& mesh, const AngleStructure& theta) {
  CellDecomposition cells;
  cells.kept.resize(mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) cells.kept[e] = theta.theta[e] != 0.0;
  cells.cell_of_face.assign(mesh.n_faces(), -1);
  cells.face_shift.assign(mesh.n_faces(), {});
  for (int root = 0; root < mesh.n_faces(); ++root) {
    if (cells.cell_of_face[root] >= 0) continue;
    const int id = cells.n_cells();
    cells.cell_faces.emplace_back();
    std::queue<int> frontier;
    frontier.push(root);
    cells.cell_of_face[root] = id;
    while (!frontier.empty()) {
      const int g = frontier.front();
      frontier.pop();
      cells.cell_faces[id].push_back(g);
      for (int k = 0; k < 3; ++k) {
        const int h = mesh.twin[3 * g + k];  // crossing from g into face(h)
        if (cells.kept[mesh.edge_of[h]]) continue;
        const int f = TorusTriangulation::face(h);
        const Shift s = cells.face_shift[g] + mesh.dual_crossing(h);
        if (cells.cell_of_face[f] < 0) {
          cells.cell_of_face[f] = id;
          cells.face_shift[f] = s;
          frontier.push(f);
        } else if (!(cells.face_shift[f] == s) || cells.cell_of_face[f] != id) {
          throw Error(ErrorCode::InconsistentZeroAngle,
                      "zero-angle edges around face " + std::to_string(f) + " form a non-contractible cell");
        }
      }
    }
    std::sort(cells.cell_faces[id].begin(), cells.cell_faces[id].end());
  }
  return cells;
}

}  // namespace circlepat
