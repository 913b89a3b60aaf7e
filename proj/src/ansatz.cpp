#include "modscat/ansatz.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace modscat {

double ProfilePreset::operator()(double y) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Gaussian: {
      const double z = (y - center) / width;
      return amplitude * std::exp(-0.5 * z * z);
    }
    case Kind::Sech:
      return amplitude / std::cosh(y / width);
    case Kind::Poly:
      return amplitude * std::pow(1.0 + y * y, -0.5 * width);
  }
  return 0.0;
}

RealField ProfilePreset::sample(const Grid1D& grid) const {
  return RealField::sample(grid, [this](double y) { return (*this)(y); });
}

std::string ProfilePreset::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Gaussian:
      os << "gaussian(" << amplitude << ", " << width << ", " << center << ")";
      break;
    case Kind::Sech:
      os << "sech(" << amplitude << ", " << width << ")";
      break;
    case Kind::Poly:
      os << "poly(" << amplitude << ", " << width << ")";
      break;
  }
  return os.str();
}

ProfilePreset parse_preset(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  }
  auto fail = [&](const std::string& why) {
    return std::invalid_argument("bad profile preset '" + text + "': " + why);
  };
  if (t == "zero" || t == "zero()") return {};

  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') throw fail("expected name(args)");
  const std::string name = t.substr(0, open);
  std::vector<double> args;
  std::stringstream ss(t.substr(open + 1, t.size() - open - 2));
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw fail("non-numeric argument '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw fail("non-numeric argument '" + item + "'");
    args.push_back(v);
  }

  ProfilePreset p;
  if (name == "gaussian") {
    if (args.size() != 3) throw fail("gaussian takes (amplitude, width, center)");
    p = {ProfilePreset::Kind::Gaussian, args[0], args[1], args[2]};
  } else if (name == "sech") {
    if (args.size() != 2) throw fail("sech takes (amplitude, width)");
    p = {ProfilePreset::Kind::Sech, args[0], args[1], 0.0};
  } else if (name == "poly") {
    if (args.size() != 2) throw fail("poly takes (amplitude, power)");
    if (!(args[1] > 0.0)) throw fail("poly power must be positive");
    p = {ProfilePreset::Kind::Poly, args[0], args[1], 0.0};
  } else {
    throw fail("unknown preset name '" + name + "'");
  }
  if (p.kind != ProfilePreset::Kind::Poly && !(p.width > 0.0)) throw fail("width must be positive");
  return p;
}

void ScatteringData::validate() const {
  if (!(a.grid == b.grid)) throw std::invalid_argument("scattering data: a and b on different grids");
  if (!std::isfinite(beta) || !std::isfinite(gamma)) {
    throw std::invalid_argument("scattering data: non-finite coupling");
  }
  if (!a.all_finite() || !b.all_finite()) throw std::invalid_argument("scattering data: non-finite values");
  const std::size_t n = a.size();
  const std::size_t edge = n / 10;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < 0.0) throw std::invalid_argument("scattering data: a must be nonnegative");
    if (i < edge || i >= n - edge) {
      if (std::abs(a[i]) > 1e-10 || std::abs(b[i]) > 1e-10) {
        throw std::invalid_argument(
            "scattering data: a, b must decay below 1e-10 on the outer 10% of the grid "
            "(enlarge half_length)");
      }
    }
  }
}

ScatteringData make_scattering_data(RealField a, RealField b, double beta, double gamma) {
  ScatteringData d{std::move(a), std::move(b), beta, gamma};
  d.validate();
  return d;
}

namespace {
void require_positive(double s, const char* what) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}
}  // namespace

RealField phase_phi(const ScatteringData& data, double s, PhaseConvention conv) {
  require_positive(s, "s");
  const double L = std::log(s);
  RealField phi(data.grid());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a2 = data.a[i] * data.a[i];
    phi[i] = -data.beta * a2 * L + data.b[i];
    if (conv.include_quintic_phase) phi[i] += data.gamma * a2 * a2 / s;
  }
  return phi;
}

ComplexField build_V0(const ScatteringData& data, double s, PhaseConvention conv) {
  const RealField phi = phase_phi(data, s, conv);
  ComplexField V(data.grid());
  for (std::size_t i = 0; i < V.size(); ++i) V[i] = std::polar(data.a[i], phi[i]);
  return V;
}

cplx interpolate_cubic(const ComplexField& f, double y) {
  const Grid1D& g = f.grid;
  const double L = g.half_length();
  if (!(y >= -L) || !(y < L)) return 0.0;
  const double u = (y + L) / g.dx();
  const double fl = std::floor(u);
  const double r = u - fl;
  const auto n = static_cast<long long>(g.size());
  const auto i0 = static_cast<long long>(fl);
  auto at = [&](long long i) { return f[static_cast<std::size_t>(((i % n) + n) % n)]; };
  // Lagrange weights on nodes -1, 0, 1, 2.
  const double wm = -r * (r - 1.0) * (r - 2.0) / 6.0;
  const double w0 = (r + 1.0) * (r - 1.0) * (r - 2.0) / 2.0;
  const double w1 = -(r + 1.0) * r * (r - 2.0) / 2.0;
  const double w2 = (r + 1.0) * r * (r - 1.0) / 6.0;
  return wm * at(i0 - 1) + w0 * at(i0) + w1 * at(i0 + 1) + w2 * at(i0 + 2);
}

ComplexField profile_to_physical(const ComplexField& V, double t, const Grid1D& x_grid) {
  require_positive(t, "t");
  ComplexField v(x_grid);
  const double scale = 1.0 / std::sqrt(t);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = x_grid.point(i);
    const cplx val = interpolate_cubic(V, x / t);
    if (val != 0.0) v[i] = scale * std::polar(1.0, x * x / (4.0 * t)) * val;
  }
  return v;
}

ComplexField physical_to_profile(const ComplexField& v, double t, const Grid1D& y_grid) {
  require_positive(t, "t");
  ComplexField u(v.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = v.grid.point(i);
    u[i] = std::polar(1.0, -x * x / (4.0 * t)) * v[i];
  }
  ComplexField V(y_grid);
  const double scale = std::sqrt(t);
  for (std::size_t i = 0; i < V.size(); ++i) V[i] = scale * interpolate_cubic(u, t * y_grid.point(i));
  return V;
}

ComplexField residual_F0_profile(const ScatteringData& data, double s) {
  require_positive(s, "s");
  const ComplexField V0 = build_V0(data, s);
  ComplexField out = spectral_deriv(V0, 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m2 = std::norm(V0[i]);
    out[i] = (out[i] - data.gamma * m2 * m2 * V0[i]) / (s * s);
  }
  return out;
}

}  // namespace modscat
