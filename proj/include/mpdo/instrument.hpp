#pragma once

#include "mpdo/channels.hpp"

#include <vector>

namespace mpdo {

/// Family of CP self-maps {M_s} on a common dimension D, indexed by outcome.
struct Instrument {
  std::vector<int> outcomes;          ///< labels 1..n in order
  std::vector<KrausChannel> maps;     ///< maps[k] belongs to outcomes[k]
  bool tp_sum = false;                ///< sum_s M_s is trace preserving

  int dim() const { return maps.empty() ? 0 : maps.front().d_in(); }
  std::size_t size() const { return maps.size(); }
};

/// Validates shapes, labels outcomes 1..n and sets tp_sum (tolerance 1e-10).
Instrument make_instrument(std::vector<KrausChannel> maps);

} // namespace mpdo
