#pragma once

#include "mpdo/matrix.hpp"

namespace mpdo {

/// Dense density matrix annotated with its subsystem layout (A, B1..Bl, C for open chains).
struct ChainState {
  Matrix rho;
  SubsystemShape shape;

  double trace() const { return rho.trace().real(); }
  Matrix marginal(const std::vector<std::string>& labels) const { return partial_trace(rho, shape, labels); }
};

} // namespace mpdo
