#include "tnls/state.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tnls/spectral.hpp"

namespace tnls {

double ModelParams::wave_op_threshold() {
  return 0.5 * (3.0 + std::sqrt(17.0));
}

void ModelParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("ModelParams: lambda must be > 0");
  if (!(p > 1.0)) throw std::invalid_argument("ModelParams: p must be > 1");
}

WaveFunction make_wavefunction(std::shared_ptr<const Grid> grid, double time) {
  WaveFunction psi;
  psi.values.assign(grid->size(), Complex(0.0, 0.0));
  psi.grid = std::move(grid);
  psi.time = time;
  return psi;
}

WaveFunction gaussian_packet(std::shared_ptr<const Grid> grid, double center,
                             double width, double momentum, double amplitude,
                             double time) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_packet: width must be > 0");
  WaveFunction psi = make_wavefunction(std::move(grid), time);
  const auto rs = psi.grid->r_star();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double s = (rs[i] - center) / width;
    psi.values[i] = amplitude * std::exp(-0.5 * s * s) *
                    std::exp(Complex(0.0, momentum * rs[i]));
  }
  return psi;
}

double l2_norm(const WaveFunction& psi) {
  double sum = 0.0;
  for (const auto& v : psi.values) sum += std::norm(v);
  return std::sqrt(sum * psi.grid->spacing());
}

double sup_norm(const WaveFunction& psi) {
  double m = 0.0;
  for (const auto& v : psi.values) m = std::max(m, std::abs(v));
  return m;
}

double lq_norm(const WaveFunction& psi, double q) {
  if (std::isinf(q)) return sup_norm(psi);
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1");
  double sum = 0.0;
  for (const auto& v : psi.values) sum += std::pow(std::abs(v), q);
  return std::pow(sum * psi.grid->spacing(), 1.0 / q);
}

EnergyParts energy(const WaveFunction& psi, const ModelParams& model) {
  const Grid& g = *psi.grid;
  const double h = g.spacing();
  SpectralWorkspace ws(g.size(), g.length());
  const auto dpsi = ws.derivative(psi.values);

  EnergyParts e;
  const auto V = g.V();
  const auto r = g.r();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double density = std::norm(psi.values[i]);
    e.kinetic += std::norm(dpsi[i]);
    e.potential += V[i] * density;
    e.nonlinear += std::pow(r[i], 1.0 - model.p) *
                   std::pow(std::abs(psi.values[i]), model.p + 1.0);
  }
  e.kinetic *= h;
  e.potential *= h;
  e.nonlinear *= h * 2.0 * model.lambda / (model.p + 1.0);
  return e;
}

std::vector<Complex> to_radial(const WaveFunction& psi) {
  std::vector<Complex> u(psi.size());
  const auto r = psi.grid->r();
  for (std::size_t i = 0; i < psi.size(); ++i) u[i] = psi.values[i] / r[i];
  return u;
}

WaveFunction from_radial(std::shared_ptr<const Grid> grid,
                         const std::vector<Complex>& u, double time) {
  if (u.size() != grid->size())
    throw std::invalid_argument("from_radial: size mismatch");
  WaveFunction psi = make_wavefunction(std::move(grid), time);
  const auto r = psi.grid->r();
  for (std::size_t i = 0; i < psi.size(); ++i) psi.values[i] = u[i] * r[i];
  return psi;
}

double weighted_radial_norm(const Grid& grid, const std::vector<Complex>& u) {
  double sum = 0.0;
  const auto r = grid.r();
  for (std::size_t i = 0; i < u.size(); ++i) sum += r[i] * r[i] * std::norm(u[i]);
  return std::sqrt(sum * grid.spacing());
}

void save_wavefunction(std::ostream& os, const WaveFunction& psi) {
  os << std::setprecision(17);
  os << "t=" << psi.time << " n=" << psi.size()
     << " M=" << psi.grid->params().mass << "\n";
  const auto rs = psi.grid->r_star();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    os << rs[i] << " " << psi.values[i].real() << " " << psi.values[i].imag()
       << "\n";
  }
}

void save_wavefunction(const std::string& path, const WaveFunction& psi) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_wavefunction: cannot open " + path);
  save_wavefunction(os, psi);
}

WaveFunction load_wavefunction(std::istream& is) {
  std::string header;
  if (!std::getline(is, header))
    throw std::runtime_error("load_wavefunction: empty stream");

  double t = 0.0, mass = 0.0;
  std::size_t n = 0;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("t=", 0) == 0) t = std::stod(tok.substr(2));
      else if (tok.rfind("n=", 0) == 0) n = std::stoul(tok.substr(2));
      else if (tok.rfind("M=", 0) == 0) mass = std::stod(tok.substr(2));
    }
  }
  if (n == 0 || !(mass > 0.0))
    throw std::runtime_error("load_wavefunction: malformed header: " + header);

  std::vector<double> rs(n);
  std::vector<Complex> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    double re, im;
    if (!(is >> rs[i] >> re >> im))
      throw std::runtime_error("load_wavefunction: truncated data");
    vals[i] = Complex(re, im);
  }
  const double h = n > 1 ? rs[1] - rs[0] : 1.0;
  auto grid = std::make_shared<Grid>(n, rs.front(),
                                     rs.front() + h * static_cast<double>(n),
                                     SchwarzschildParams{mass});
  WaveFunction psi;
  psi.grid = grid;
  psi.values = std::move(vals);
  psi.time = t;
  return psi;
}

WaveFunction load_wavefunction(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_wavefunction: cannot open " + path);
  return load_wavefunction(is);
}

}  // namespace tnls
