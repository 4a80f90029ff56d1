#include "hand_geometry/mesh.hpp"

#include "common/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace hoi {

Eigen::AlignedBox3d TriMesh::bounds() const {
  Eigen::AlignedBox3d box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

double TriMesh::area() const {
  double a = 0.0;
  for (const auto& f : faces) {
    a += 0.5 * (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]).norm();
  }
  return a;
}

void validate_mesh(const TriMesh& mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const auto& f = mesh.faces[i];
    for (auto idx : f) {
      if (idx >= n) {
        fail(ErrorCode::Schema, "face " + std::to_string(i) + " references vertex " +
                                    std::to_string(idx) + " but mesh has " +
                                    std::to_string(n) + " vertices");
      }
    }
    const Vec3 c = (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                       .cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    if (!(c.squaredNorm() > 0.0)) {
      fail(ErrorCode::Schema, "face " + std::to_string(i) + " is degenerate (zero area)");
    }
  }
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) fail(ErrorCode::Schema, "mesh has non-finite vertex");
  }
}

namespace {

long parse_index_token(const std::string& token, const std::string& source, int line_no) {
  // "7", "7/1", "7//3", "7/1/3": the vertex index is the leading integer.
  const auto slash = token.find('/');
  const std::string head = token.substr(0, slash);
  try {
    std::size_t used = 0;
    const long v = std::stol(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::Schema, source + ":" + std::to_string(line_no) + ": bad face index '" + token + "'");
  }
}

}  // namespace

TriMesh parse_obj(std::istream& in, int instance_id, const std::string& source) {
  TriMesh mesh;
  mesh.instance_id = instance_id;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        fail(ErrorCode::Schema, source + ":" + std::to_string(line_no) + ": malformed vertex");
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string tok;
      while (ls >> tok) {
        long idx = parse_index_token(tok, source, line_no);
        const long count = static_cast<long>(mesh.vertices.size());
        if (idx < 0) idx = count + idx + 1;
        if (idx < 1 || idx > count) {
          fail(ErrorCode::Schema, source + ":" + std::to_string(line_no) +
                                      ": face index out of range '" + tok + "'");
        }
        poly.push_back(static_cast<std::uint32_t>(idx - 1));
      }
      if (poly.size() < 3) {
        fail(ErrorCode::Schema, source + ":" + std::to_string(line_no) + ": face with fewer than 3 vertices");
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
  }
  validate_mesh(mesh);
  return mesh;
}

TriMesh load_obj(const std::string& path, int instance_id) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open mesh '" + path + "'");
  return parse_obj(in, instance_id, path);
}

void save_obj(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& g) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = g.apply(v);
  return out;
}

TriMesh apply_object_pose(const TriMesh& mesh, const ObjectPose& pose) {
  return apply_transform(mesh, pose.transform());
}

TriMesh make_box(const Vec3& h, int instance_id) {
  TriMesh m;
  m.instance_id = instance_id;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  // Counter-clockwise seen from outside.
  m.faces = {{0, 2, 3}, {0, 3, 1},   // -z
             {4, 5, 7}, {4, 7, 6},   // +z
             {0, 1, 5}, {0, 5, 4},   // -y
             {2, 6, 7}, {2, 7, 3},   // +y
             {0, 4, 6}, {0, 6, 2},   // -x
             {1, 3, 7}, {1, 7, 5}};  // +x
  return m;
}

}  // namespace hoi
