#include "kslab/trajectory.hpp"

#include <algorithm>

#include "kslab/error.hpp"

namespace kslab {

void Trajectory::push_back(double t, SpectralField f) {
  require(times.empty() || t > times.back(), ErrorKind::PreconditionViolation,
          "trajectory times must be strictly increasing");
  if (!fields.empty()) require_same_grid(fields.front().grid, f.grid);
  f.time_tag = t;
  times.push_back(t);
  fields.push_back(std::move(f));
}

SpectralField Trajectory::at(double t) const {
  require(!times.empty(), ErrorKind::PreconditionViolation, "empty trajectory");
  if (t <= times.front()) return fields.front();
  if (t >= times.back()) return fields.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  SpectralField out(fields[lo].grid, t);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (1.0 - w) * fields[lo][i] + w * fields[hi][i];
  }
  return out;
}

void Trajectory::validate() const {
  require(times.size() == fields.size(), ErrorKind::PreconditionViolation,
          "trajectory times and fields differ in length");
  for (std::size_t i = 1; i < times.size(); ++i) {
    require(times[i] > times[i - 1], ErrorKind::PreconditionViolation,
            "trajectory times must be strictly increasing");
    require_same_grid(fields.front().grid, fields[i].grid);
  }
}

Trajectory zero_trajectory(const GridSpec& g, const std::vector<double>& times) {
  Trajectory tr;
  for (double t : times) tr.push_back(t, SpectralField(g, t));
  return tr;
}

}  // namespace kslab
