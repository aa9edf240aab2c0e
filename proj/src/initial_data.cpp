#include "fwlab/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace fwlab {

struct InitialDatum::Impl {
  Kind kind = Kind::custom;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  DatumSummary summary;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::string description;
};

InitialDatum::InitialDatum(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

namespace {

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("initial datum: lambda must be > 0");
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

InitialDatum InitialDatum::gaussian(double lambda) {
  require_positive_lambda(lambda);
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::gaussian;
  impl->lambda = lambda;
  impl->value = [lambda](double x) { return std::exp(-lambda * x * x); };
  impl->derivative = [lambda](double x) { return -2.0 * lambda * x * std::exp(-lambda * x * x); };
  const double pi = std::numbers::pi;
  auto& s = impl->summary;
  s.closed_form = true;
  s.l2_norm = std::pow(2.0, -0.25) * std::pow(pi, 0.25) * std::pow(lambda, -0.25);
  s.linf_norm = 1.0;
  s.argmin_deriv = 1.0 / std::sqrt(2.0 * lambda);
  s.inf_deriv = -std::sqrt(2.0 * lambda) * std::exp(-0.5);
  s.argsup_deriv = -s.argmin_deriv;
  s.sup_deriv = -s.inf_deriv;
  impl->description = "gaussian(" + number(lambda) + ")";
  return InitialDatum(std::move(impl));
}

InitialDatum InitialDatum::odd_gaussian(double lambda) {
  require_positive_lambda(lambda);
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::odd_gaussian;
  impl->lambda = lambda;
  impl->value = [lambda](double x) { return -x * std::exp(-lambda * x * x); };
  impl->derivative = [lambda](double x) {
    return -(1.0 - 2.0 * lambda * x * x) * std::exp(-lambda * x * x);
  };
  const double pi = std::numbers::pi;
  auto& s = impl->summary;
  s.closed_form = true;
  s.l2_norm = std::pow(2.0, -1.25) * std::pow(pi, 0.25) * std::pow(lambda, -0.75);
  s.linf_norm = std::exp(-0.5) / std::sqrt(2.0 * lambda);
  s.argmin_deriv = 0.0;
  s.inf_deriv = -1.0;
  // u0'' = 2 lambda x (3 - 2 lambda x^2) exp(-lambda x^2) vanishes at x^2 = 3/(2 lambda).
  s.argsup_deriv = std::sqrt(1.5 / lambda);
  s.sup_deriv = 2.0 * std::exp(-1.5);
  impl->description = "odd_gaussian(" + number(lambda) + ")";
  return InitialDatum(std::move(impl));
}

InitialDatum InitialDatum::scaled(const InitialDatum& base, int n) {
  if (n < 1) throw DomainError("scaled: n must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::scaled;
  impl->lambda = base.lambda();
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd);
  auto value = base.impl_->value;
  auto deriv = base.impl_->derivative;
  impl->value = [value, nd, root](double x) { return value(nd * x) / root; };
  impl->derivative = [deriv, nd, root](double x) { return root * deriv(nd * x); };
  const auto& b = base.summary();
  auto& s = impl->summary;
  s.closed_form = b.closed_form;
  s.l2_norm = b.l2_norm / nd;
  s.linf_norm = b.linf_norm / root;
  s.inf_deriv = root * b.inf_deriv;
  s.argmin_deriv = b.argmin_deriv / nd;
  s.sup_deriv = root * b.sup_deriv;
  s.argsup_deriv = b.argsup_deriv / nd;
  impl->description = "scaled(" + base.describe() + ", " + std::to_string(n) + ")";
  return InitialDatum(std::move(impl));
}

InitialDatum InitialDatum::amplified(const InitialDatum& base, double a) {
  if (!std::isfinite(a)) throw DomainError("amplified: factor must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::amplified;
  impl->lambda = base.lambda();
  auto value = base.impl_->value;
  auto deriv = base.impl_->derivative;
  impl->value = [value, a](double x) { return a * value(x); };
  impl->derivative = [deriv, a](double x) { return a * deriv(x); };
  const auto& b = base.summary();
  auto& s = impl->summary;
  s.closed_form = b.closed_form;
  s.l2_norm = std::abs(a) * b.l2_norm;
  s.linf_norm = std::abs(a) * b.linf_norm;
  if (a >= 0.0) {
    s.inf_deriv = a * b.inf_deriv;
    s.argmin_deriv = b.argmin_deriv;
    s.sup_deriv = a * b.sup_deriv;
    s.argsup_deriv = b.argsup_deriv;
  } else {
    s.inf_deriv = a * b.sup_deriv;
    s.argmin_deriv = b.argsup_deriv;
    s.sup_deriv = a * b.inf_deriv;
    s.argsup_deriv = b.argmin_deriv;
  }
  impl->description = number(a) + " * " + base.describe();
  return InitialDatum(std::move(impl));
}

InitialDatum InitialDatum::zero() { return amplified(gaussian(1.0), 0.0); }

InitialDatum InitialDatum::custom(const Field& samples, std::function<double(double)> derivative) {
  samples.require_finite("custom datum");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::custom;
  const Grid g = samples.grid();
  const double half = g.half_width();
  auto coeffs = std::make_shared<SpectralCoeffs>(forward(samples));
  const cplx i{0.0, 1.0};
  auto dcoeffs = std::make_shared<SpectralCoeffs>(
      apply_multiplier(*coeffs, [i](double xi) { return i * xi; }));
  // Exact on the sample nodes; spectral interpolation in between; zero outside the box.
  auto field = std::make_shared<Field>(samples);
  impl->value = [coeffs, field, half, g](double x) {
    if (x < -half || x >= half) return 0.0;
    const double pos = (x + half) / g.dx();
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < 1e-12) return (*field)[static_cast<std::size_t>(nearest) % g.size()];
    return evaluate(*coeffs, x);
  };
  if (derivative) {
    impl->derivative = std::move(derivative);
  } else {
    impl->derivative = [dcoeffs, half](double x) {
      if (x < -half || x >= half) return 0.0;
      return evaluate(*dcoeffs, x);
    };
  }
  auto& s = impl->summary;
  s.closed_form = false;
  s.l2_norm = l2_norm(samples);
  const Field fine = refine(samples, 4);
  s.linf_norm = linf_norm(fine);
  std::vector<double> dfine;
  if (derivative) {
    dfine.resize(fine.size());
    for (std::size_t j = 0; j < fine.size(); ++j) dfine[j] = impl->derivative(fine.grid().node(j));
  } else {
    const Field d = refine(inverse(*dcoeffs), 4);
    dfine.assign(d.values().begin(), d.values().end());
  }
  const auto [lo, hi] = std::minmax_element(dfine.begin(), dfine.end());
  s.inf_deriv = *lo;
  s.sup_deriv = *hi;
  s.argmin_deriv = fine.grid().node(static_cast<std::size_t>(lo - dfine.begin()));
  s.argsup_deriv = fine.grid().node(static_cast<std::size_t>(hi - dfine.begin()));
  impl->description = "custom(" + std::to_string(g.size()) + " samples, L=" + number(half) + ")";
  return InitialDatum(std::move(impl));
}

InitialDatum InitialDatum::from_functions(std::function<double(double)> value,
                                          std::function<double(double)> derivative,
                                          DatumSummary summary, std::string description) {
  if (!value || !derivative) throw DomainError("from_functions: value and derivative are required");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::custom;
  impl->value = std::move(value);
  impl->derivative = std::move(derivative);
  impl->summary = summary;
  impl->description = std::move(description);
  return InitialDatum(std::move(impl));
}

InitialDatum::Kind InitialDatum::kind() const { return impl_->kind; }
double InitialDatum::value(double x) const { return impl_->value(x); }
double InitialDatum::derivative(double x) const { return impl_->derivative(x); }
const DatumSummary& InitialDatum::summary() const { return impl_->summary; }
double InitialDatum::lambda() const { return impl_->lambda; }
std::string InitialDatum::describe() const { return impl_->description; }

bool InitialDatum::outside_remark_range() const {
  return std::isfinite(impl_->lambda) && impl_->lambda < 1.0;
}

Field sample(const InitialDatum& d, const Grid& g, double tail_tol) {
  std::vector<double> values(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) values[j] = d.value(g.node(j));
  Field f(g, std::move(values));
  f.require_finite("sample");
  const double tail = tail_indicator(f);
  if (tail > tail_tol)
    throw TailViolation("sample: " + d.describe() + " is not localized in the box (tail " +
                        number(tail) + ")");
  return f;
}

InitialDatum load_custom(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_custom: cannot open " + path.string());
  std::vector<double> xs;
  std::vector<double> us;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x = 0.0;
    double u = 0.0;
    if (!(row >> x)) continue;
    if (!(row >> u)) throw Error("load_custom: row without a value column");
    xs.push_back(x);
    us.push_back(u);
  }
  if (xs.size() < 16) throw Error("load_custom: need at least 16 samples");
  const double dx = xs[1] - xs[0];
  if (!(dx > 0.0)) throw Error("load_custom: x must be strictly increasing");
  for (std::size_t j = 1; j < xs.size(); ++j) {
    const double step = xs[j] - xs[j - 1];
    if (!(step > 0.0)) throw Error("load_custom: x must be strictly increasing");
    if (std::abs(step - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
      throw Error("load_custom: x must be equispaced");
  }
  const double half = 0.5 * dx * static_cast<double>(xs.size());
  if (std::abs(xs.front() + half) > 1e-9 * std::max(1.0, half))
    throw Error("load_custom: samples must start at -L for the box [-L, L)");
  Grid g(half, xs.size());
  return InitialDatum::custom(Field(g, std::move(us)));
}

}  // namespace fwlab
