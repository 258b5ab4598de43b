#pragma once

#include <vector>

#include "nearlattice/configuration.hpp"

namespace nearlattice {

enum class MoveVerdict { Accept, Omega1, Omega2, Omega3, Omega4 };

/// Incremental admissibility test for single-site moves of an admissible
/// configuration. Only bonds, simplices and octahedra incident to the moved
/// site are re-evaluated. Injectivity is decided by orientation of the
/// incident simplices (degree argument along the straight move path); sites
/// occurring twice in one simplex fall back to the full checker.
class LocalChecker {
 public:
  explicit LocalChecker(const Configuration& c);

  MoveVerdict check_move(const Configuration& c, int site, const Point& proposal) const;

 private:
  struct SiteData {
    std::vector<int> edges;
    std::vector<int> simplices;
    std::vector<int> octahedra;
    bool needs_full = false;
  };
  std::vector<SiteData> sites_;
};

}  // namespace nearlattice
