#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace starsec {

using cxd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// The two STAR-RIS coverage regions. Every user-side quantity (channels,
/// noise, TaRC vectors, beamformers) comes in a transmit/reflect pair.
enum class Region { transmit = 0, reflect = 1 };

constexpr std::array<Region, 2> both_regions{Region::transmit, Region::reflect};

constexpr int region_index(Region k) { return k == Region::transmit ? 0 : 1; }

/// The complementary region (k-prime in the two-user model).
constexpr Region other(Region k)
{
  return k == Region::transmit ? Region::reflect : Region::transmit;
}

constexpr const char* region_name(Region k)
{
  return k == Region::transmit ? "t" : "r";
}

template <typename T>
struct PerRegion {
  T t{};
  T r{};
  T& operator[](Region k) { return k == Region::transmit ? t : r; }
  const T& operator[](Region k) const { return k == Region::transmit ? t : r; }
};

}  // namespace starsec
