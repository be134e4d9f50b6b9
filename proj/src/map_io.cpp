#include "heis/map_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace heis::construction {

namespace {

constexpr char kMagic[8] = {'H', 'E', 'I', 'S', 'M', 'A', 'P', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw MapFormatError("map file truncated");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_map(std::ostream& out, const RandomMap& map) {
  const auto& P = map.params();
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kMapFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(P.target_N));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(map.depth()));
  put<std::uint32_t>(out, 0);
  put<double>(out, P.p);
  put<double>(out, P.alpha);
  put<double>(out, P.beta_c);
  put<double>(out, P.sigma);
  put<std::uint64_t>(out, map.seed());
  for (int m = 1; m <= map.depth(); ++m) {
    const auto& balls = map.level(m);
    put<std::uint64_t>(out, balls.size());
    for (const auto& B : balls) {
      for (double c : B.center.coords()) put<double>(out, c);
      put<double>(out, B.radius);
      for (double c : B.xi) put<double>(out, c);
    }
  }
}

RandomMap read_map(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw MapFormatError("not a map file (bad magic)");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kMapFormatVersion) {
    throw MapFormatError("unsupported map format version " + std::to_string(version));
  }
  IFSParams P;
  P.target_N = static_cast<int>(get<std::uint32_t>(in));
  P.depth = static_cast<int>(get<std::uint32_t>(in));
  (void)get<std::uint32_t>(in);
  P.p = get<double>(in);
  P.alpha = get<double>(in);
  P.beta_c = get<double>(in);
  P.sigma = get<double>(in);
  const auto seed = get<std::uint64_t>(in);
  if (P.target_N < 1 || P.depth < 1) throw MapFormatError("map header has empty dimensions");

  std::vector<std::vector<BumpBall>> levels;
  for (int m = 1; m <= P.depth; ++m) {
    const auto count = get<std::uint64_t>(in);
    std::vector<BumpBall> balls;
    balls.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t b = 0; b < count; ++b) {
      const double x = get<double>(in);
      const double y = get<double>(in);
      const double t = get<double>(in);
      const double radius = get<double>(in);
      std::vector<double> xi(static_cast<std::size_t>(P.target_N));
      for (double& c : xi) c = get<double>(in);
      balls.push_back({HPoint(x, y, t), radius, m, std::move(xi)});
    }
    levels.push_back(std::move(balls));
  }
  return RandomMap(P, seed, std::move(levels));
}

void save_map(const std::string& path, const RandomMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_map(out, map);
  if (!out) throw std::runtime_error("write failed: " + path);
}

RandomMap load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_map(in);
}

}  // namespace heis::construction
