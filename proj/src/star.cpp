#include "star.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace starsec {

StarCoefficients StarCoefficients::from_polar(const RVec& amp_t, const RVec& phase_t,
                                              const RVec& amp_r, const RVec& phase_r, Protocol p)
{
  const auto m = amp_t.size();
  if (phase_t.size() != m || amp_r.size() != m || phase_r.size() != m)
    throw std::invalid_argument("from_polar: mismatched vector lengths");
  CVec t(m), r(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t[i] = std::polar(std::sqrt(amp_t[i]), phase_t[i]);
    r[i] = std::polar(std::sqrt(amp_r[i]), phase_r[i]);
  }
  return {std::move(t), std::move(r), p};
}

StarCoefficients StarCoefficients::equal_split(int m, Protocol p)
{
  const double a = std::sqrt(0.5);
  return {CVec::Constant(m, cxd(a, 0.0)), CVec::Constant(m, cxd(a, 0.0)), p};
}

RVec StarCoefficients::amplitudes(Region k) const
{
  return theta(k).cwiseAbs2();
}

RVec StarCoefficients::phases(Region k) const
{
  const CVec& th = theta(k);
  RVec out(th.size());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index i = 0; i < th.size(); ++i) {
    double a = std::arg(th[i]);
    if (a < 0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    out[i] = a;
  }
  return out;
}

double StarCoefficients::energy_conservation_residual() const
{
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta_t.size(); ++i) {
    worst = std::max(worst, std::abs(std::norm(theta_t[i]) + std::norm(theta_r[i]) - 1.0));
  }
  return worst;
}

double StarCoefficients::binarity_residual() const
{
  double worst = 0.0;
  for (Region k : both_regions) {
    for (Eigen::Index i = 0; i < theta_t.size(); ++i) {
      const double a = std::norm(theta(k)[i]);
      worst = std::max(worst, std::min(std::abs(a), std::abs(a - 1.0)));
    }
  }
  return worst;
}

}  // namespace starsec
