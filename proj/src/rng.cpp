#include "rng.hpp"

#include <cmath>
#include <numbers>

namespace starsec {

std::uint64_t Rng::next_u64()
{
  // splitmix64 (Steele, Lea, Flood 2014); full period, passes BigCrush.
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform()
{
  // 53-bit mantissa, shifted into (0,1] so log() below is always finite.
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

std::complex<double> Rng::cnormal()
{
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  return {normal() * inv_sqrt2, normal() * inv_sqrt2};
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag)
{
  Rng mix(master ^ (tag * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  return mix.next_u64();
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag_a, std::uint64_t tag_b)
{
  return sub_seed(sub_seed(master, tag_a), tag_b);
}

}  // namespace starsec
