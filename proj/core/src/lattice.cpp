#include "nearlattice/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include <Eigen/LU>

#include "nearlattice/error.hpp"
#include "nearlattice/geometry.hpp"

namespace nearlattice {

std::string_view to_string(LatticeKind kind) noexcept {
  switch (kind) {
    case LatticeKind::Triangular2D: return "TRIANGULAR2D";
    case LatticeKind::FCC: return "FCC";
    case LatticeKind::HCP: return "HCP";
  }
  return "UNKNOWN";
}

LatticeKind parse_lattice_kind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "TRIANGULAR2D" || upper == "TRIANGULAR") return LatticeKind::Triangular2D;
  if (upper == "FCC") return LatticeKind::FCC;
  if (upper == "HCP") return LatticeKind::HCP;
  throw Error(ErrorCode::InvalidArgument, "unknown lattice kind '" + std::string(text) + "'");
}

int dimension_of(LatticeKind kind) noexcept { return kind == LatticeKind::Triangular2D ? 2 : 3; }

namespace {

constexpr double kUnitTol = 1e-9;

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

// Lattice point of the infinite lattice: integer cell coordinates plus basis index.
struct LatticePoint {
  Offset coord = Offset::Zero();
  int basis = 0;
  Point position = Point::Zero();
};

bool lex_less(const LatticePoint& a, const LatticePoint& b) {
  return std::tie(a.coord[0], a.coord[1], a.coord[2], a.basis) <
         std::tie(b.coord[0], b.coord[1], b.coord[2], b.basis);
}

bool lex_positive(const Offset& w) {
  for (int k = 0; k < 3; ++k) {
    if (w[k] != 0) return w[k] > 0;
  }
  return false;
}

bool unit_apart(const Point& a, const Point& b) { return std::abs((a - b).norm() - 1.0) < kUnitTol; }

// Reference cell expressed in unit-cell-relative lattice points.
struct CellTemplate {
  CellKind kind = CellKind::Triangle;
  std::vector<LatticePoint> vertices;
};

std::vector<CellTemplate> find_cell_templates(const std::vector<LatticePoint>& cloud, int dim) {
  std::vector<CellTemplate> out;
  const int count = static_cast<int>(cloud.size());
  auto unit = [&](int a, int b) { return unit_apart(cloud[a].position, cloud[b].position); };

  for (int p = 0; p < count; ++p) {
    if (!cloud[p].coord.isZero()) continue;  // anchors live in unit cell 0
    std::vector<int> up;                     // unit neighbours lexicographically above p
    for (int q = 0; q < count; ++q) {
      if (q != p && unit(p, q) && lex_less(cloud[p], cloud[q])) up.push_back(q);
    }
    if (dim == 2) {
      for (std::size_t a = 0; a < up.size(); ++a) {
        for (std::size_t b = a + 1; b < up.size(); ++b) {
          if (!unit(up[a], up[b])) continue;
          CellTemplate t{CellKind::Triangle, {cloud[p], cloud[up[a]], cloud[up[b]]}};
          if (signed_area(t.vertices[0].position, t.vertices[1].position, t.vertices[2].position) < 0) {
            std::swap(t.vertices[1], t.vertices[2]);
          }
          out.push_back(std::move(t));
        }
      }
      continue;
    }

    for (std::size_t a = 0; a < up.size(); ++a) {
      for (std::size_t b = a + 1; b < up.size(); ++b) {
        if (!unit(up[a], up[b])) continue;
        for (std::size_t c = b + 1; c < up.size(); ++c) {
          if (!unit(up[a], up[c]) || !unit(up[b], up[c])) continue;
          CellTemplate t{CellKind::Tetra, {cloud[p], cloud[up[a]], cloud[up[b]], cloud[up[c]]}};
          if (signed_tetra_volume(t.vertices[0].position, t.vertices[1].position, t.vertices[2].position,
                                  t.vertices[3].position) < 0) {
            std::swap(t.vertices[2], t.vertices[3]);
          }
          out.push_back(std::move(t));
        }
      }
    }

    // Octahedra: p and its antipode q at distance sqrt(2) share a square ring of 4 unit neighbours.
    for (int q = 0; q < count; ++q) {
      if (std::abs((cloud[q].position - cloud[p].position).norm() - std::numbers::sqrt2) > kUnitTol) continue;
      std::vector<int> ring;
      for (int r = 0; r < count; ++r) {
        if (r != p && r != q && unit(p, r) && unit(q, r)) ring.push_back(r);
      }
      if (ring.size() != 4) continue;
      bool smallest = lex_less(cloud[p], cloud[q]);
      for (int r : ring) smallest = smallest && lex_less(cloud[p], cloud[r]);
      if (!smallest) continue;

      std::sort(ring.begin(), ring.end(), [&](int a, int b) { return lex_less(cloud[a], cloud[b]); });
      const int r1 = ring[0];
      int r2 = -1, r4 = -1, r5 = -1;
      for (int k = 1; k < 4; ++k) {
        if (!unit(r1, ring[k])) r4 = ring[k];
      }
      for (int k = 1; k < 4; ++k) {
        if (ring[k] == r4) continue;
        if (r2 < 0) r2 = ring[k]; else r5 = ring[k];
      }
      if (r4 < 0 || r5 < 0) throw Error(ErrorCode::ConstructionFailure, "octahedron ring is not a square");

      CellTemplate t{CellKind::Octa, {cloud[p], cloud[r1], cloud[r2], cloud[q], cloud[r4], cloud[r5]}};
      const auto& v = t.vertices;
      const double orient = (v[1].position - v[0].position)
                                .dot((v[2].position - v[0].position).cross(v[3].position - v[0].position));
      if (orient > 0) {
        std::swap(t.vertices[1], t.vertices[2]);
        std::swap(t.vertices[4], t.vertices[5]);
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace

Lattice Lattice::build(LatticeKind kind, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "period count n must be >= 1");

  Lattice lat;
  lat.kind_ = kind;
  lat.dim_ = dimension_of(kind);
  lat.n_ = n;
  const double s3 = std::sqrt(3.0);
  switch (kind) {
    case LatticeKind::Triangular2D:
      lat.periods_ << 1.0, 0.5, 0.0,
                      0.0, s3 / 2, 0.0,
                      0.0, 0.0, 1.0;
      lat.basis_ = {Point::Zero()};
      break;
    case LatticeKind::FCC: {
      const double h = 1.0 / std::numbers::sqrt2;
      lat.periods_ << 0.0, h, h,
                      h, 0.0, h,
                      h, h, 0.0;
      lat.basis_ = {Point::Zero()};
      break;
    }
    case LatticeKind::HCP: {
      const double c = std::sqrt(8.0 / 3.0);
      lat.periods_ << 1.0, 0.5, 0.0,
                      0.0, s3 / 2, 0.0,
                      0.0, 0.0, c;
      lat.basis_ = {Point::Zero(), Point(0.5, s3 / 6, c / 2)};
      break;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "unknown lattice kind");
  }
  const int dim = lat.dim_;
  const int nb = lat.basis_size();
  const Eigen::Matrix3d& T = lat.periods_;

  // Local cloud of lattice points around unit cell 0.
  std::vector<LatticePoint> cloud;
  const int reach = 2;
  for (int a = -reach; a <= reach; ++a) {
    for (int b = -reach; b <= reach; ++b) {
      for (int c = (dim == 3 ? -reach : 0); c <= (dim == 3 ? reach : 0); ++c) {
        for (int k = 0; k < nb; ++k) {
          LatticePoint lp;
          lp.coord = Offset(a, b, c);
          lp.basis = k;
          lp.position = T * lp.coord.cast<double>() + lat.basis_[static_cast<std::size_t>(k)];
          cloud.push_back(lp);
        }
      }
    }
  }

  lat.shell_.assign(static_cast<std::size_t>(nb), {});
  for (int k = 0; k < nb; ++k) {
    const Point origin = lat.basis_[static_cast<std::size_t>(k)];
    std::vector<std::pair<double, std::pair<Offset, int>>> shell;
    for (const auto& lp : cloud) {
      if (!unit_apart(lp.position, origin)) continue;
      const Point d = lp.position - origin;
      double angle = std::atan2(d.y(), d.x());
      if (angle < -1e-12) angle += 2 * std::numbers::pi;
      shell.push_back({dim == 2 ? angle : 0.0, {lp.coord, lp.basis}});
    }
    if (dim == 2) {
      std::stable_sort(shell.begin(), shell.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    }
    for (const auto& entry : shell) lat.shell_[static_cast<std::size_t>(k)].push_back(entry.second);
  }

  // Sites in lexicographic order of (coord, basis).
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < (dim == 3 ? n : 1); ++c) {
        for (int k = 0; k < nb; ++k) {
          Site s;
          s.coord = Offset(a, b, c);
          s.basis = k;
          s.position = T * s.coord.cast<double>() + lat.basis_[static_cast<std::size_t>(k)];
          lat.sites_.push_back(s);
        }
      }
    }
  }

  for (int i = 0; i < lat.site_count(); ++i) {
    const Site& s = lat.sites_[static_cast<std::size_t>(i)];
    for (const auto& [delta, target] : lat.shell_[static_cast<std::size_t>(s.basis)]) {
      const LatticeRef ref = lat.reduce(s.coord + delta, target);
      if (i < ref.site || (i == ref.site && lex_positive(ref.wrap))) {
        lat.edges_.push_back(Edge{i, ref.site, ref.wrap});
      }
    }
  }

  // Replicate the anchored templates over the n^d unit cells.
  const auto templates = find_cell_templates(cloud, dim);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < (dim == 3 ? n : 1); ++c) {
        const Offset cellpos(a, b, c);
        for (const auto& t : templates) {
          Cell cell;
          cell.kind = t.kind;
          cell.vertex_count = static_cast<int>(t.vertices.size());
          std::vector<Point> ref_pos;
          for (int v = 0; v < cell.vertex_count; ++v) {
            const auto& lp = t.vertices[static_cast<std::size_t>(v)];
            cell.vertices[static_cast<std::size_t>(v)] = lat.reduce(lp.coord + cellpos, lp.basis);
            ref_pos.push_back(lp.position);
          }
          const int cell_index = static_cast<int>(lat.cells_.size());

          auto add_simplex = [&](std::initializer_list<int> corners) {
            Simplex sx;
            sx.cell = cell_index;
            std::vector<Point> pos;
            for (int v : corners) {
              sx.vertices[static_cast<std::size_t>(sx.vertex_count++)] = cell.vertices[static_cast<std::size_t>(v)];
              pos.push_back(ref_pos[static_cast<std::size_t>(v)]);
            }
            sx.reference_volume = simplex_volume(pos, dim);
            if (sx.reference_volume < 0) {
              std::swap(sx.vertices[0], sx.vertices[1]);
              sx.reference_volume = -sx.reference_volume;
            }
            lat.simplices_.push_back(sx);
            return sx.reference_volume;
          };

          if (t.kind == CellKind::Octa) {
            cell.diagonal = {0, 3};
            double volume = 0.0;
            volume += add_simplex({0, 3, 1, 2});
            volume += add_simplex({0, 3, 2, 4});
            volume += add_simplex({0, 3, 4, 5});
            volume += add_simplex({0, 3, 5, 1});
            cell.reference_volume = volume;
          } else if (t.kind == CellKind::Tetra) {
            cell.reference_volume = add_simplex({0, 1, 2, 3});
          } else {
            cell.reference_volume = add_simplex({0, 1, 2});
          }
          lat.cells_.push_back(cell);
        }
      }
    }
  }

  lat.cell_volume_ = std::abs(T.topLeftCorner(dim, dim).determinant()) * std::pow(double(n), dim);

  auto build_incidence = [&](Incidence& inc, std::size_t count, auto&& sites_of) {
    std::vector<std::vector<int>> lists(static_cast<std::size_t>(lat.site_count()));
    for (std::size_t item = 0; item < count; ++item) {
      std::vector<int> touched = sites_of(item);
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (int s : touched) lists[static_cast<std::size_t>(s)].push_back(static_cast<int>(item));
    }
    inc.offsets.assign(1, 0);
    for (const auto& l : lists) {
      inc.items.insert(inc.items.end(), l.begin(), l.end());
      inc.offsets.push_back(static_cast<std::int32_t>(inc.items.size()));
    }
  };
  build_incidence(lat.site_edges_, lat.edges_.size(), [&](std::size_t e) {
    return std::vector<int>{lat.edges_[e].i, lat.edges_[e].j};
  });
  build_incidence(lat.site_cells_, lat.cells_.size(), [&](std::size_t c) {
    std::vector<int> v;
    for (const auto& r : lat.cells_[c].corners()) v.push_back(r.site);
    return v;
  });
  build_incidence(lat.site_simplices_, lat.simplices_.size(), [&](std::size_t s) {
    std::vector<int> v;
    for (const auto& r : lat.simplices_[s].corners()) v.push_back(r.site);
    return v;
  });
  return lat;
}

int Lattice::site_id(const Offset& canonical_coord, int basis) const {
  const int nb = basis_size();
  const int n = n_;
  int id = canonical_coord[0] * n + canonical_coord[1];
  if (dim_ == 3) id = id * n + canonical_coord[2];
  return id * nb + basis;
}

LatticeRef Lattice::reduce(const Offset& coord, int basis) const {
  LatticeRef ref;
  Offset canonical = coord;
  for (int k = 0; k < dim_; ++k) {
    ref.wrap[k] = floor_div(coord[k], n_);
    canonical[k] = coord[k] - n_ * ref.wrap[k];
  }
  ref.site = site_id(canonical, basis);
  return ref;
}

std::vector<LatticeRef> Lattice::neighbor_shell(int site) const {
  if (site < 0 || site >= site_count()) throw Error(ErrorCode::InvalidArgument, "site id out of range");
  const Site& s = sites_[static_cast<std::size_t>(site)];
  std::vector<LatticeRef> out;
  for (const auto& [delta, target] : shell_[static_cast<std::size_t>(s.basis)]) {
    out.push_back(reduce(s.coord + delta, target));
  }
  return out;
}

CellCounts Lattice::cell_counts() const {
  CellCounts counts;
  for (const auto& c : cells_) {
    switch (c.kind) {
      case CellKind::Triangle: ++counts.triangles; break;
      case CellKind::Tetra: ++counts.tetrahedra; break;
      case CellKind::Octa: ++counts.octahedra; break;
    }
  }
  return counts;
}

std::span<const int> Lattice::Incidence::of(int site) const {
  const auto begin = static_cast<std::size_t>(offsets[static_cast<std::size_t>(site)]);
  const auto end = static_cast<std::size_t>(offsets[static_cast<std::size_t>(site) + 1]);
  return {items.data() + begin, end - begin};
}

std::span<const int> Lattice::edges_of_site(int site) const { return site_edges_.of(site); }
std::span<const int> Lattice::cells_of_site(int site) const { return site_cells_.of(site); }
std::span<const int> Lattice::simplices_of_site(int site) const { return site_simplices_.of(site); }

}  // namespace nearlattice
