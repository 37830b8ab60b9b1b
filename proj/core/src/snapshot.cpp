#include "kslab/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "kslab/error.hpp"

namespace kslab {
namespace {

constexpr std::array<char, 4> kMagic{'K', 'S', 'F', '1'};

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<unsigned char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<unsigned char>(v & 0xFFu);
    v >>= 8;
  }
  os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) fail(ErrorKind::IoError, "KSF1 stream truncated");
  U v = 0;
  for (std::size_t i = sizeof(U); i-- > 0;) v = (v << 8) | bytes[i];
  return v;
}

void put_f64(std::ostream& os, double x) { put_le(os, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

}  // namespace

void write_ksf1(std::ostream& os, const SpectralField& F) {
  os.write(kMagic.data(), kMagic.size());
  put_le(os, static_cast<std::uint32_t>(F.grid.d));
  put_le(os, static_cast<std::uint32_t>(F.grid.n));
  put_f64(os, F.grid.box_length);
  put_f64(os, F.time_tag);
  for (const cplx& c : F.coeffs) {
    put_f64(os, c.real());
    put_f64(os, c.imag());
  }
  if (!os) fail(ErrorKind::IoError, "KSF1 write failed");
}

void write_ksf1(const std::filesystem::path& path, const SpectralField& F) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::IoError, "cannot open " + path.string());
  write_ksf1(os, F);
}

SpectralField read_ksf1(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) fail(ErrorKind::IoError, "not a KSF1 stream");
  GridSpec g;
  g.d = static_cast<int>(get_le<std::uint32_t>(is));
  g.n = static_cast<int>(get_le<std::uint32_t>(is));
  g.box_length = get_f64(is);
  g.validate();
  SpectralField F(g, get_f64(is));
  for (cplx& c : F.coeffs) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    c = {re, im};
  }
  return F;
}

SpectralField read_ksf1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::IoError, "cannot open " + path.string());
  return read_ksf1(is);
}

}  // namespace kslab
