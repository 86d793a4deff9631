#include "builders.hpp"

#include <cmath>
#include <stdexcept>

namespace starsec {

namespace {

constexpr double kTieBreak = 1e-10;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

// |q^H u|^2 of the packed complex variable q against a constant vector u,
// as a 2-row real factor (rows are Re and Im of q^H u).
RMat factor_abs_inner(const CVec& u)
{
  const auto n = u.size();
  RMat a = RMat::Zero(2, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(0, 2 * i) = u[i].real();
    a(0, 2 * i + 1) = u[i].imag();
    a(1, 2 * i) = u[i].imag();
    a(1, 2 * i + 1) = -u[i].real();
  }
  return a;
}

// |Mc q|^2 for a constant complex matrix, as a (2 rows per matrix row)
// real factor on the packed variable q.
RMat factor_abs_matvec(const CMat& mc)
{
  const auto r = mc.rows();
  const auto n = mc.cols();
  RMat a = RMat::Zero(2 * r, 2 * n);
  for (Eigen::Index m = 0; m < r; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const cxd v = mc(m, i);
      a(2 * m, 2 * i) = v.real();
      a(2 * m, 2 * i + 1) = -v.imag();
      a(2 * m + 1, 2 * i) = v.imag();
      a(2 * m + 1, 2 * i + 1) = v.real();
    }
  }
  return a;
}

// scale * Re{q^H b} over the packed variable q at `offset`.
void add_re_vh_b(SparseLin& lin, const CVec& b, int offset, double scale)
{
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    lin.add(offset + 2 * static_cast<int>(i), scale * b[i].real());
    lin.add(offset + 2 * static_cast<int>(i) + 1, scale * b[i].imag());
  }
}

// scale * Re{q^T c} (no conjugation on the variable).
void add_re_qt_c(SparseLin& lin, const CVec& c, int offset, double scale)
{
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    lin.add(offset + 2 * static_cast<int>(i), scale * c[i].real());
    lin.add(offset + 2 * static_cast<int>(i) + 1, -scale * c[i].imag());
  }
}

void add_tie_break(ConvexSubproblem& p)
{
  QuadTerm reg;
  reg.f.offset = 0;
  reg.f.dw = RVec::Ones(p.n);
  reg.scale = kTieBreak;
  p.quad.push_back(std::move(reg));
}

// Coefficients assembled from several physical contributions can hit the
// same coordinate twice; projections need one entry per coordinate.
void compress_constraints(ConvexSubproblem& p)
{
  for (auto& c : p.lin_ineq) c.a.compress();
  for (auto& c : p.quad_ineq) c.lin.compress();
  for (auto& c : p.lin_eq) c.a.compress();
  for (auto& t : p.qol) t.den.compress();
}

// Scaled BS->RIS matrix whose products give the Eve signature vectors:
// psi = diag(conj(theta_k)) * G * w with G = sqrt(eve_gain) H.
CMat eve_matrix(const ChannelSet& ch, Region k)
{
  return std::sqrt(ch.eve_gain(k)) * ch.H;
}

}  // namespace

void pack_cvec(const CVec& v, int offset, RVec& z)
{
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    z[offset + 2 * i] = v[i].real();
    z[offset + 2 * i + 1] = v[i].imag();
  }
}

CVec unpack_cvec(const RVec& z, int offset, int n)
{
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cxd(z[offset + 2 * i], z[offset + 2 * i + 1]);
  return v;
}

BeamformerPair BuiltP1::unpack(const RVec& z) const
{
  return {unpack_cvec(z, layout.w_off(Region::transmit), layout.nt),
          unpack_cvec(z, layout.w_off(Region::reflect), layout.nt)};
}

StarCoefficients BuiltP2::unpack_theta(const RVec& z, Protocol proto) const
{
  return {unpack_cvec(z, layout.theta_off(Region::transmit), layout.m),
          unpack_cvec(z, layout.theta_off(Region::reflect), layout.m), proto};
}

RVec BuiltP2::unpack_kappa(const RVec& z, Region k) const
{
  if (!layout.has_kappa) {
    return k == Region::transmit ? frozen_kappa_t
                                 : RVec(RVec::Ones(layout.m) - frozen_kappa_t);
  }
  return z.segment(layout.kappa_off(k), layout.m);
}

double BuiltP2::slack_sum(const RVec& z) const
{
  double acc = 0.0;
  for (Region k : both_regions) acc += z.segment(layout.sigma_off(k), 2 * layout.m).sum();
  return acc;
}

BuiltP1 build_p1(const BuildContext& bc, const StarCoefficients& theta_cur)
{
  const ChannelSet& ch = bc.ch;
  const SystemConfig& cfg = bc.cfg;
  if (bc.eve_model == EveModel::instantaneous && bc.pcsi == nullptr)
    throw std::invalid_argument("build_p1: instantaneous Eve model needs pcsi constants");

  BuiltP1 out;
  out.layout.nt = ch.antennas();
  ConvexSubproblem& p = out.prob;
  p.n = out.layout.size();

  p.balls.push_back({0, p.n, cfg.p_max});

  for (Region k : both_regions) {
    const SurrogateConstants& c = bc.consts[k];
    const int off_k = out.layout.w_off(k);
    const int off_o = out.layout.w_off(other(k));
    const CVec f = ch.F(k).adjoint() * theta_cur.theta(k);  // theta^H F w = f^H w

    SparseLin bob_lin;
    add_re_vh_b(bob_lin, CVec(c.x_tilde * f), off_k, -2.0 * c.a1);
    p.linear.push_back(std::move(bob_lin));

    for (int which = 0; which < 2; ++which) {
      QuadTerm qt;
      qt.f.offset = which == 0 ? off_k : off_o;
      qt.f.A = factor_abs_inner(f);
      qt.scale = c.a2;
      p.quad.push_back(std::move(qt));
    }

    if (bc.eve_model == EveModel::statistical) {
      const CMat mk = theta_cur.theta(k).conjugate().asDiagonal() * eve_matrix(ch, k);
      QuadOverLinTerm term;
      term.num.offset = off_k;
      term.num.A = factor_abs_matvec(mk);
      term.scale = c.log_delta_inv / (1.0 + c.a3);
      term.den.b = c.a4;
      add_re_vh_b(term.den, CVec(mk.adjoint() * c.psi_tilde_p), off_o, 2.0);
      p.qol.push_back(std::move(term));
    } else {
      const PcsiEveConstants& pc = (*bc.pcsi)[k];
      const CVec vtheta = ch.V(k).adjoint() * theta_cur.theta(k);  // theta^H V w = vtheta^H w
      QuadOverLinTerm term;
      term.num.offset = off_k;
      term.num.A = factor_abs_inner(vtheta);
      term.scale = 1.0 / (1.0 + pc.b3);
      term.den.b = pc.b4;
      add_re_vh_b(term.den, CVec(pc.itf_tilde * vtheta), off_o, 2.0);
      p.qol.push_back(std::move(term));
    }

    // Convexified harvested-energy restriction (vacuous when e_min = 0).
    if (cfg.e_min > 0.0) {
      const CMat mk = theta_cur.theta(k).conjugate().asDiagonal() * eve_matrix(ch, k);
      LinIneq energy;
      energy.a.b = cfg.eta * (c.p_tilde + c.p_tilde_p) + energy_requirement(c.e_tilde, cfg.e_min);
      add_re_vh_b(energy.a, CVec(mk.adjoint() * c.psi_tilde), off_k, -2.0 * cfg.eta);
      add_re_vh_b(energy.a, CVec(mk.adjoint() * c.psi_tilde_p), off_o, -2.0 * cfg.eta);
      p.lin_ineq.push_back(std::move(energy));
    }
  }

  add_tie_break(p);
  compress_constraints(p);

  out.start = RVec::Zero(p.n);
  pack_cvec(bc.w_exp.w_t, out.layout.w_off(Region::transmit), out.start);
  pack_cvec(bc.w_exp.w_r, out.layout.w_off(Region::reflect), out.start);

  for (const auto& term : p.qol) {
    if (term.den.eval(out.start) <= 0.0)
      throw TrustRegionViolation(term.den.eval(out.start));
  }
  return out;
}

BuiltP2 build_p2(const BuildContext& bc, double lambda, const MsPenalty* ms,
                 const RVec* frozen_kappa_t)
{
  const ChannelSet& ch = bc.ch;
  const SystemConfig& cfg = bc.cfg;
  if (bc.eve_model == EveModel::instantaneous && bc.pcsi == nullptr)
    throw std::invalid_argument("build_p2: instantaneous Eve model needs pcsi constants");

  BuiltP2 out;
  const int m = ch.elements();
  out.layout.m = m;
  out.layout.has_kappa = frozen_kappa_t == nullptr;
  if (frozen_kappa_t) out.frozen_kappa_t = *frozen_kappa_t;

  ConvexSubproblem& p = out.prob;
  p.n = out.layout.size();
  const P2Layout& L = out.layout;

  for (Region k : both_regions) {
    const SurrogateConstants& c = bc.consts[k];
    const int off_th = L.theta_off(k);
    const CVec u = ch.F(k) * bc.w_exp.w(k);        // theta^H u = theta^H F w~_k
    const CVec u_p = ch.F(k) * bc.w_exp.w(other(k));

    SparseLin bob_lin;
    add_re_qt_c(bob_lin, CVec(c.x_tilde * u.conjugate()), off_th, -2.0 * c.a1);
    p.linear.push_back(std::move(bob_lin));

    for (const CVec* uu : {&u, &u_p}) {
      QuadTerm qt;
      qt.f.offset = off_th;
      qt.f.A = factor_abs_inner(*uu);
      qt.scale = c.a2;
      p.quad.push_back(std::move(qt));
    }

    const CMat g = eve_matrix(ch, k);
    const CVec gw = g * bc.w_exp.w(k);       // psi_k(theta) entries conj(theta_m) gw_m
    const CVec gw_p = g * bc.w_exp.w(other(k));

    if (bc.eve_model == EveModel::statistical) {
      QuadOverLinTerm term;
      term.num.offset = off_th;
      RVec dw(2 * m);
      for (int i = 0; i < m; ++i) dw[2 * i] = dw[2 * i + 1] = std::norm(gw[i]);
      term.num.dw = std::move(dw);
      term.scale = c.log_delta_inv / (1.0 + c.a3);
      term.den.b = c.a4;
      add_re_qt_c(term.den, CVec(gw_p.conjugate().cwiseProduct(c.psi_tilde_p)), off_th, 2.0);
      p.qol.push_back(std::move(term));
    } else {
      const PcsiEveConstants& pc = (*bc.pcsi)[k];
      const CVec vu = ch.V(k) * bc.w_exp.w(k);
      const CVec vu_p = ch.V(k) * bc.w_exp.w(other(k));
      QuadOverLinTerm term;
      term.num.offset = off_th;
      term.num.A = factor_abs_inner(vu);
      term.scale = 1.0 / (1.0 + pc.b3);
      term.den.b = pc.b4;
      add_re_qt_c(term.den, CVec(vu_p.conjugate() * pc.itf_tilde), off_th, 2.0);
      p.qol.push_back(std::move(term));
    }

    if (cfg.e_min > 0.0) {
      LinIneq energy;
      energy.a.b = cfg.eta * (c.p_tilde + c.p_tilde_p) + energy_requirement(c.e_tilde, cfg.e_min);
      add_re_qt_c(energy.a, CVec(gw.conjugate().cwiseProduct(c.psi_tilde)), off_th,
                  -2.0 * cfg.eta);
      add_re_qt_c(energy.a, CVec(gw_p.conjugate().cwiseProduct(c.psi_tilde_p)), off_th,
                  -2.0 * cfg.eta);
      p.lin_ineq.push_back(std::move(energy));
    }
  }

  // Modulus relaxation pairs and the slack penalty.
  SparseLin slack_pen;
  for (Region k : both_regions) {
    const CVec& theta_t = bc.theta_exp.theta(k);
    const int off_th = L.theta_off(k);
    const int off_sg = L.sigma_off(k);
    for (int i = 0; i < m; ++i) {
      const int ire = off_th + 2 * i;
      const int iim = off_th + 2 * i + 1;

      QuadIneq modsq;  // |theta_m|^2 - kappa_m - sigma_m <= 0
      modsq.sq.push_back({ire, 1.0});
      modsq.sq.push_back({iim, 1.0});
      if (L.has_kappa) {
        modsq.lin.add(L.kappa_off(k) + i, -1.0);
      } else {
        const double kf = (k == Region::transmit) ? (*frozen_kappa_t)[i]
                                                  : 1.0 - (*frozen_kappa_t)[i];
        modsq.lin.b = -kf;
      }
      modsq.lin.add(off_sg + i, -1.0);
      p.quad_ineq.push_back(std::move(modsq));

      // kappa_m - 2 Re{theta_m^* theta~_m} + |theta~_m|^2 - sigma_{m+M} <= 0
      LinIneq modlin;
      modlin.a.b = std::norm(theta_t[i]);
      modlin.a.add(ire, -2.0 * theta_t[i].real());
      modlin.a.add(iim, -2.0 * theta_t[i].imag());
      if (L.has_kappa) {
        modlin.a.add(L.kappa_off(k) + i, 1.0);
      } else {
        const double kf = (k == Region::transmit) ? (*frozen_kappa_t)[i]
                                                  : 1.0 - (*frozen_kappa_t)[i];
        modlin.a.b += kf;
      }
      modlin.a.add(off_sg + m + i, -1.0);
      p.lin_ineq.push_back(std::move(modlin));
    }
    for (int i = 0; i < 2 * m; ++i) slack_pen.add(off_sg + i, lambda);
  }
  p.linear.push_back(std::move(slack_pen));

  if (L.has_kappa) {
    for (int i = 0; i < m; ++i) {
      LinEq couple;
      couple.a.b = -1.0;
      couple.a.add(L.kappa_off(Region::transmit) + i, 1.0);
      couple.a.add(L.kappa_off(Region::reflect) + i, 1.0);
      p.lin_eq.push_back(std::move(couple));
    }
    p.boxes.push_back({L.kappa_off(Region::transmit), 2 * m, 0.0, 1.0});
  }
  p.boxes.push_back({L.sigma_off(Region::transmit), 4 * m, 0.0, kInfinity});

  if (ms != nullptr && L.has_kappa) {
    // kappa_pen * sum_m [(q - kappa)^2 + q^2 (1 - kappa)^2], quadratic in kappa
    for (Region k : both_regions) {
      const RVec& q = ms->q[k];
      QuadTerm qt;
      qt.f.offset = L.kappa_off(k);
      qt.f.dw = RVec(m);
      SparseLin lin;
      for (int i = 0; i < m; ++i) {
        const double qi = q[i];
        qt.f.dw[i] = ms->weight * (1.0 + qi * qi);
        lin.add(L.kappa_off(k) + i, -2.0 * ms->weight * qi * (1.0 + qi));
        p.constant += ms->weight * 2.0 * qi * qi;
      }
      p.quad.push_back(std::move(qt));
      p.linear.push_back(std::move(lin));
    }
  }

  add_tie_break(p);
  compress_constraints(p);

  // Feasible start: expansion TaRCs, kappa from their moduli (respecting the
  // coupling), minimal slacks.
  out.start = RVec::Zero(p.n);
  pack_cvec(bc.theta_exp.theta_t, L.theta_off(Region::transmit), out.start);
  pack_cvec(bc.theta_exp.theta_r, L.theta_off(Region::reflect), out.start);
  RVec kt(m);
  for (int i = 0; i < m; ++i)
    kt[i] = std::clamp(std::norm(bc.theta_exp.theta_t[i]), 0.0, 1.0);
  if (frozen_kappa_t) kt = *frozen_kappa_t;
  if (L.has_kappa) {
    out.start.segment(L.kappa_off(Region::transmit), m) = kt;
    out.start.segment(L.kappa_off(Region::reflect), m) = RVec::Ones(m) - kt;
  }
  for (Region k : both_regions) {
    const CVec& th = bc.theta_exp.theta(k);
    const int off_sg = L.sigma_off(k);
    for (int i = 0; i < m; ++i) {
      const double kap = (k == Region::transmit) ? kt[i] : 1.0 - kt[i];
      const double a = std::norm(th[i]);
      out.start[off_sg + i] = std::max(0.0, a - kap);
      out.start[off_sg + m + i] = std::max(0.0, kap - a);
    }
  }
  return out;
}

}  // namespace starsec
