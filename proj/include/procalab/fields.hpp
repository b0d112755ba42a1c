#pragma once

#include <memory>
#include <vector>

#include "procalab/lie.hpp"
#include "procalab/topology.hpp"

namespace procalab {

// Group element on every stored edge of a complex (boundary edges included).
struct GaugeConfig {
  std::shared_ptr<const LatticeComplex> lat;
  GroupSpec group;
  std::vector<GroupElement> U;

  static GaugeConfig identity(std::shared_ptr<const LatticeComplex> lat,
                              const GroupSpec& spec);
};

// Lie-algebra element on every stored edge.
struct AlgebraEdgeField {
  std::shared_ptr<const LatticeComplex> lat;
  GroupSpec group;
  std::vector<AlgebraElement> X;

  static AlgebraEdgeField zero(std::shared_ptr<const LatticeComplex> lat,
                               const GroupSpec& spec);

  // Scalar slice <X_e, V_i> over all edges.
  Eigen::VectorXd component(int i) const;
  void set_from_components(const std::vector<Eigen::VectorXd>& comps);

  double max_norm() const;
};

}  // namespace procalab
