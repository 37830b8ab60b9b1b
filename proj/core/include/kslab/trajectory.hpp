#pragma once

#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

// Time-indexed sequence of spectral fields on one grid, times strictly
// increasing. Values between nodes are linear interpolants.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> fields;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const GridSpec& grid() const { return fields.front().grid; }

  void push_back(double t, SpectralField f);
  SpectralField at(double t) const;

  // Throws PreconditionViolation on unsorted times or mixed grids.
  void validate() const;
};

// Zero-valued trajectory on the given time nodes.
Trajectory zero_trajectory(const GridSpec& g, const std::vector<double>& times);

}  // namespace kslab
