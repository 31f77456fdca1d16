#pragma once

#include <array>
#include <iosfwd>
#include <optional>

#include "bhs/geometry.hpp"

namespace bhs {

// Vertex marker bits for box-shaped cells; curved boundaries use kFaceXMin
// as a plain "on boundary" flag.
inline constexpr int kMarkerInterior = 0;
inline constexpr int kFaceXMin = 1;
inline constexpr int kFaceXMax = 2;
inline constexpr int kFaceYMin = 4;
inline constexpr int kFaceYMax = 8;

// Interface-conforming P1 triangulation of a reference cell (or of the
// macroscopic domain). Triangles are positively oriented and never straddle
// a phase interface; `tri_region` holds the phase id per element.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> tri_region;
  std::vector<int> vertex_marker;
  double target_h = 0.0;
  bool interface_conforming = true;
  // > 0 for the uniform union-jack unit-square mesh with n cells per axis;
  // enables the structured fast solver path.
  int structured_n = 0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double triangle_area(int t) const;
  double total_area() const;
  double max_element_diameter() const;
  bool vertex_on_boundary(int v) const { return vertex_marker[v] != 0; }

  // Ordered (counterclockwise) closed loop of boundary vertices. Requires a
  // single boundary component.
  std::vector<int> boundary_loop() const;
};

// Conforming mesh of the reference cell; max element diameter <= 1.5 h.
Mesh generate_cell_mesh(const CellGeometry& geom, double h);

// Structured union-jack mesh of a box given tick coordinates on both axes.
Mesh structured_box_mesh(const std::vector<double>& xticks,
                         const std::vector<double>& yticks);

// Uniform n x n union-jack mesh of the unit square (macroscopic domain).
Mesh unit_square_mesh(int n);

// Minimal text format: "nv nt", then "x y marker" per vertex and
// "i j k region" per triangle.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

// Locates points in a mesh through a uniform bin grid; evaluates P1 fields.
class P1Evaluator {
 public:
  explicit P1Evaluator(const Mesh& mesh);

  struct Location {
    int triangle;
    std::array<double, 3> bary;
  };
  std::optional<Location> locate(const Vec2& p) const;

  double evaluate(const Eigen::VectorXd& dof, const Vec2& p) const;
  Complex evaluate(const Eigen::VectorXcd& dof, const Vec2& p) const;
  double evaluate(const Eigen::VectorXd& dof, const Location& loc) const;
  Complex evaluate(const Eigen::VectorXcd& dof, const Location& loc) const;

 private:
  const Mesh& mesh_;
  Vec2 lo_, hi_;
  int nx_ = 0, ny_ = 0;
  double cell_ = 0.0;
  std::vector<std::vector<int>> bins_;
};

// Nearest mesh vertex to p within tol; -1 if none. Test helper for building
// mirror maps on symmetric meshes.
int find_vertex(const Mesh& mesh, const Vec2& p, double tol);

}  // namespace bhs
