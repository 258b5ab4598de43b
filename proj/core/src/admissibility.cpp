#include "nearlattice/admissibility.hpp"

#include <algorithm>
#include <array>

#include "nearlattice/error.hpp"
#include "nearlattice/geometry.hpp"

namespace nearlattice {

LocalChecker::LocalChecker(const Configuration& c) {
  const Lattice& lat = c.lattice();
  sites_.resize(static_cast<std::size_t>(lat.site_count()));
  for (int i = 0; i < lat.site_count(); ++i) {
    SiteData& data = sites_[static_cast<std::size_t>(i)];
    for (int e : lat.edges_of_site(i)) {
      const Edge& edge = lat.edges()[static_cast<std::size_t>(e)];
      if (edge.i != edge.j) data.edges.push_back(e);  // self-bonds have constant length
    }
    for (int s : lat.simplices_of_site(i)) {
      const auto corners = lat.triangulation()[static_cast<std::size_t>(s)].corners();
      const auto hits = std::count_if(corners.begin(), corners.end(), [i](const LatticeRef& r) { return r.site == i; });
      if (hits > 1) data.needs_full = true;
      data.simplices.push_back(s);
    }
    for (int k : lat.cells_of_site(i)) {
      const Cell& cell = lat.cells()[static_cast<std::size_t>(k)];
      if (cell.kind != CellKind::Octa) continue;
      const auto corners = cell.corners();
      const auto hits = std::count_if(corners.begin(), corners.end(), [i](const LatticeRef& r) { return r.site == i; });
      if (hits > 1) data.needs_full = true;
      data.octahedra.push_back(k);
    }
  }
}

MoveVerdict LocalChecker::check_move(const Configuration& c, int site, const Point& proposal) const {
  const SiteData& data = sites_[static_cast<std::size_t>(site)];
  if (data.needs_full) {
    Configuration trial = c;
    trial.set_position(site, proposal);
    const auto report = check_admissibility(trial);
    if (!report.omega1.pass) return MoveVerdict::Omega1;
    if (!report.omega3.pass) return MoveVerdict::Omega3;
    if (!report.omega4.pass) return MoveVerdict::Omega4;
    if (!report.omega2.pass) return MoveVerdict::Omega2;
    return MoveVerdict::Accept;
  }

  const Lattice& lat = c.lattice();
  auto image = [&](const LatticeRef& ref) -> Point {
    const Point& base = ref.site == site ? proposal : c.position(ref.site);
    return base + c.image_shift(ref.wrap);
  };

  const double alpha = c.alpha();
  for (int e : data.edges) {
    const Edge& edge = lat.edges()[static_cast<std::size_t>(e)];
    const double length = (image(LatticeRef{edge.j, edge.wrap}) - image(LatticeRef{edge.i, Offset::Zero()})).norm();
    if (!edge_length_ok(length, alpha)) return MoveVerdict::Omega1;
  }

  const int dim = lat.dim();
  for (int s : data.simplices) {
    const Simplex& sx = lat.triangulation()[static_cast<std::size_t>(s)];
    double vol;
    if (dim == 2) {
      vol = signed_area(image(sx.vertices[0]), image(sx.vertices[1]), image(sx.vertices[2]));
    } else {
      vol = signed_tetra_volume(image(sx.vertices[0]), image(sx.vertices[1]), image(sx.vertices[2]),
                                image(sx.vertices[3]));
    }
    if (!(vol > kStrictGuard)) return MoveVerdict::Omega3;
  }

  for (int k : data.octahedra) {
    const Cell& cell = lat.cells()[static_cast<std::size_t>(k)];
    std::array<Point, 6> octa;
    for (std::size_t v = 0; v < 6; ++v) octa[v] = image(cell.vertices[v]);
    try {
      if (!convex_image_check(octa)) return MoveVerdict::Omega4;
    } catch (const Error&) {
      return MoveVerdict::Omega4;
    }
  }
  return MoveVerdict::Accept;
}

}  // namespace nearlattice
