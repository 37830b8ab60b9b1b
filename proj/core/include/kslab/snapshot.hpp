#pragma once

// KSF1 binary snapshots of a SpectralField:
//   "KSF1" | u32 d | u32 n | f64 L | f64 time_tag | n^d x (f64 re, f64 im)
// All numbers little-endian; coefficients in row-major wavenumber-index
// order (the in-memory order of SpectralField::coeffs).

#include <filesystem>
#include <iosfwd>

#include "kslab/grid.hpp"

namespace kslab {

void write_ksf1(std::ostream& os, const SpectralField& F);
void write_ksf1(const std::filesystem::path& path, const SpectralField& F);

// The dealias fraction is not stored; the returned grid carries the default.
SpectralField read_ksf1(std::istream& is);
SpectralField read_ksf1(const std::filesystem::path& path);

}  // namespace kslab
