#include "netloc/spectral.hpp"

#include <cmath>

#include "netloc/link_model.hpp"

namespace netloc {

NeighborStencil lattice_stencil(const RadioParams& radio, double spacing_m) {
  radio.validate();
  if (spacing_m <= 0) throw std::invalid_argument("lattice_stencil: spacing must be positive");
  NeighborStencil st;
  st.spacing = spacing_m;
  const double steps = radio.max_range() / spacing_m;
  const int kmax = static_cast<int>(std::floor(steps));
  if (kmax < 1)
    throw std::invalid_argument("lattice_stencil: communication range below one lattice step");

  std::vector<Mat2> raw;
  for (int k = -kmax; k <= kmax; ++k)
    for (int l = -kmax; l <= kmax; ++l) {
      if (k == 0 && l == 0) continue;
      const Eigen::Vector2i x(k, l);
      if (x.cast<double>().norm() > steps + 1e-12) continue;
      const LinkInformation li = link_information(radio, spacing_m * x.cast<double>());
      st.offsets.push_back(x);
      raw.push_back(li.matrix);
      st.npi += li.matrix;
    }
  const Mat2 dinv = st.npi.inverse();
  st.blocks.reserve(raw.size());
  for (const auto& j : raw) st.blocks.emplace_back(dinv * j);
  return st;
}

SpectralSample pseudo_characteristic(const NeighborStencil& stencil, const Vec2& theta) {
  SpectralSample s;
  s.theta = theta;
  s.phi.setZero();
  s.sigma2.setZero();
  const double norm = theta.norm();
  const Vec2 dir = norm > 0 ? Vec2(theta / norm) : Vec2(1.0, 0.0);
  for (std::size_t k = 0; k < stencil.offsets.size(); ++k) {
    const Vec2 x = stencil.offsets[k].cast<double>();
    const double xt = x.dot(theta);
    s.phi += stencil.blocks[k].cast<std::complex<double>>() *
             std::complex<double>(std::cos(xt), std::sin(xt));
    const double xd = x.dot(dir);
    s.sigma2 += xd * xd * stencil.blocks[k];
  }
  return s;
}

Mat2 potential_infinite(const NeighborStencil& stencil, const Eigen::Vector2i& displacement,
                        const QuadratureSpec& quad) {
  if (displacement.isZero()) return Mat2::Zero();
  const Vec2 delta = displacement.cast<double>();

  // Real form of the stencil transform; the paired +-x offsets make the
  // sine terms cancel identically.
  auto phi_real = [&](const Vec2& theta) {
    Mat2 p = Mat2::Zero();
    for (std::size_t k = 0; k < stencil.offsets.size(); ++k)
      p += stencil.blocks[k] * std::cos(stencil.offsets[k].cast<double>().dot(theta));
    return p;
  };

  // Polar rays with geometric shells in radius resolve the integrable
  // ||theta||^-2 singularity at the origin. Each ray extends to the edge
  // of the full square zone [-pi, pi]^2: truncating at the inscribed disk
  // drops a corner contribution of roughly ten percent of the block,
  // which the finite-network comparison rules out.
  const int na = quad.n_angular;
  const int nr = quad.n_radial;
  const double r0 = quad.r_min_frac * M_PI;
  const double dphi = 2.0 * M_PI / na;

  Mat2 acc = Mat2::Zero();
  std::vector<double> radii(nr);
  for (int a = 0; a < na; ++a) {
    const double ang = dphi * (a + 0.5);  // midpoints keep off the diagonal kinks
    const Vec2 dir = unit_vec(ang);
    const double extent = M_PI / std::max(std::abs(dir.x()), std::abs(dir.y()));
    const double ratio = std::pow(extent / r0, 1.0 / (nr - 1));
    for (int s = 0; s < nr; ++s) radii[s] = r0 * std::pow(ratio, s);
    Mat2 ray = Mat2::Zero();
    for (int s = 0; s < nr; ++s) {
      const double r = radii[s];
      const double lo = s == 0 ? 0.0 : radii[s - 1];
      const double hi = s == nr - 1 ? extent : radii[s + 1];
      const Vec2 theta = r * dir;
      const Mat2 iphi = Mat2::Identity() - phi_real(theta);
      ray += iphi.inverse() * ((1.0 - std::cos(delta.dot(theta))) * r * 0.5 * (hi - lo));
    }
    acc += ray * dphi;
  }
  return acc / (4.0 * M_PI * M_PI);
}

FitResult asymptote_fit(std::span<const double> distance, std::span<const double> value,
                        FitModel model) {
  if (distance.size() != value.size())
    throw std::invalid_argument("asymptote_fit: length mismatch");
  if (distance.size() < 8)
    throw std::invalid_argument("asymptote_fit: need at least 8 points");
  for (std::size_t k = 0; k < distance.size(); ++k) {
    if (distance[k] <= 0) throw std::invalid_argument("asymptote_fit: distances must be positive");
    if (k > 0 && distance[k] <= distance[k - 1])
      throw std::invalid_argument("asymptote_fit: distances must be increasing");
  }
  const std::size_t n = distance.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double x = distance[k];
    switch (model) {
      case FitModel::Log: x = std::log(x); break;
      case FitModel::Quadratic: x = x * x; break;
      case FitModel::Sqrt: x = std::sqrt(x); break;
      case FitModel::Linear: break;
    }
    const double y = value[k];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double nn = static_cast<double>(n);
  const double det = nn * sxx - sx * sx;
  if (std::abs(det) < 1e-30) throw std::invalid_argument("asymptote_fit: degenerate abscissa");
  FitResult f;
  f.slope = (nn * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / nn;
  const double ss_tot = syy - sy * sy / nn;
  double ss_res = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double x = distance[k];
    switch (model) {
      case FitModel::Log: x = std::log(x); break;
      case FitModel::Quadratic: x = x * x; break;
      case FitModel::Sqrt: x = std::sqrt(x); break;
      case FitModel::Linear: break;
    }
    const double e = value[k] - (f.slope * x + f.intercept);
    ss_res += e * e;
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace netloc
