#pragma once

// Two independent real solutions phi1, phi2 of the stationary Klein-Gordon
// equation  -(hbar c)^2 phi'' + [m0^2c^4 - (E - V)^2] phi = 0,
// either in closed form (constant potential) or integrated on a grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rqt/errors.hpp"
#include "rqt/numerics/roots.hpp"
#include "rqt/numerics/steppers.hpp"
#include "rqt/scenario.hpp"

namespace rqt {

using numerics::StepMethod;

struct BasisPoint {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double dphi1 = 0.0;
  double dphi2 = 0.0;

  double wronskian() const { return dphi1 * phi2 - phi1 * dphi2; }
};

struct Domain {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

enum class BasisSource { ClosedForm, Numeric };
enum class ClosedFormKind { Trigonometric, Hyperbolic };

struct KgSolveOptions {
  StepMethod method = StepMethod::RK4;
  double step = 1e-3;            // fm
  double sample_spacing = 1e-2;  // fm between stored samples; rounded to a whole number of steps
};

/// phi'' = q(x) phi with q = [m0^2c^4 - (E-V)^2] / (hbar c)^2, in fm^-2.
inline double kg_coefficient(const Scenario& s, double x) {
  const double q = s.available(x);
  const double hc = s.hbar_c();
  return (s.mass_sq() - q * q) / (hc * hc);
}

/// Local oscillation wavenumber sqrt(max(-q, 0)).
inline double local_wavenumber(const Scenario& s, double x) { return std::sqrt(std::max(-kg_coefficient(s, x), 0.0)); }

namespace detail {

struct NumericGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  double step = 0.0;
  std::size_t n_steps = 0;
  std::size_t stride = 1;
  StepMethod method = StepMethod::RK4;
  std::vector<numerics::State<4>> states;  // at step indices min(j * stride, n_steps)
};

inline numerics::State<4> kg_rhs(const Scenario& s, double x, const numerics::State<4>& y) {
  const double q = kg_coefficient(s, x);
  return {y[1], q * y[0], y[3], q * y[2]};
}

}  // namespace detail

class KgBasis;
KgBasis kg_closed_constant(const Scenario& s, std::optional<Domain> domain = std::nullopt);
KgBasis kg_solve_numeric(const Scenario& s, double x_min, double x_max, const KgSolveOptions& options = {});

/// Immutable Klein-Gordon basis. Copies share the sampled grid.
class KgBasis {
 public:
  const Scenario& scenario() const { return scenario_; }
  BasisSource source() const { return source_; }
  const Domain& domain() const { return domain_; }

  /// Basis values at x. Numeric bases re-integrate from the nearest stored
  /// sample with their own stepper, so this is the ODE solution itself.
  BasisPoint evaluate(double x) const {
    check_domain(x);
    if (source_ == BasisSource::ClosedForm) return closed_at(x);
    return numeric_at(x);
  }

  /// Linear interpolation between stored samples (exact for closed forms).
  BasisPoint interpolate(double x) const {
    check_domain(x);
    if (source_ == BasisSource::ClosedForm) return closed_at(x);
    const auto& g = *grid_;
    const std::size_t n = g.states.size();
    std::size_t j = 0;
    // Stored samples are uniform except possibly the last interval.
    const double block = g.step * static_cast<double>(g.stride);
    j = static_cast<std::size_t>(std::clamp((x - g.x_min) / block, 0.0, static_cast<double>(n - 2)));
    while (j + 2 < n && sample_position(j + 1) < x) ++j;
    const double x0 = sample_position(j), x1 = sample_position(j + 1);
    const double w = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
    const auto& a = g.states[j];
    const auto& b = g.states[j + 1];
    auto lerp = [w](double u, double v) { return u + w * (v - u); };
    return {lerp(a[0], b[0]), lerp(a[2], b[2]), lerp(a[1], b[1]), lerp(a[3], b[3])};
  }

  /// Wronskian at the lower domain edge.
  double reference_wronskian() const { return sample(0).wronskian(); }

  /// Sorted zeros of phi2 in the domain, refined on the ODE solution.
  const std::vector<double>& phi2_zeros() const { return zeros_; }
  double phi2_max_abs() const { return phi2_max_; }

  std::size_t sample_count() const {
    if (source_ == BasisSource::Numeric) return grid_->states.size();
    return closed_samples_;
  }
  double sample_position(std::size_t i) const {
    if (source_ == BasisSource::Numeric) {
      const auto& g = *grid_;
      if (i + 1 == g.states.size()) return g.x_max;
      return g.x_min + static_cast<double>(i * g.stride) * g.step;
    }
    if (i + 1 == closed_samples_) return domain_.hi;
    return domain_.lo + static_cast<double>(i) * closed_spacing_;
  }
  BasisPoint sample(std::size_t i) const {
    if (source_ == BasisSource::Numeric) {
      const auto& y = grid_->states[i];
      return {y[0], y[2], y[1], y[3]};
    }
    return closed_at(sample_position(i));
  }
  /// Spacing of the uniform part of the sample grid.
  double sample_spacing() const {
    if (source_ == BasisSource::Numeric) return grid_->step * static_cast<double>(grid_->stride);
    return closed_spacing_;
  }

  std::optional<StepMethod> method() const {
    if (source_ == BasisSource::Numeric) return grid_->method;
    return std::nullopt;
  }
  std::optional<double> step() const {
    if (source_ == BasisSource::Numeric) return grid_->step;
    return std::nullopt;
  }
  std::optional<ClosedFormKind> closed_kind() const {
    if (source_ == BasisSource::ClosedForm) return closed_kind_;
    return std::nullopt;
  }
  /// k (trigonometric) or kappa (hyperbolic) for closed forms, in fm^-1.
  double closed_wavenumber() const { return wavenumber_; }

  std::string description() const {
    if (source_ == BasisSource::ClosedForm)
      return closed_kind_ == ClosedFormKind::Trigonometric ? "closed-form sin/cos" : "closed-form sinh/cosh";
    return "numeric " + numerics::to_string(grid_->method) + " step " + std::to_string(grid_->step) + " fm";
  }

 private:
  friend KgBasis kg_closed_constant(const Scenario& s, std::optional<Domain> domain);
  friend KgBasis kg_solve_numeric(const Scenario& s, double x_min, double x_max, const KgSolveOptions& options);

  KgBasis(Scenario s, Domain d) : scenario_(std::move(s)), domain_(d) {}

  void check_domain(double x) const {
    const double slack = 1e-12 * std::max({1.0, std::abs(domain_.lo), std::abs(domain_.hi)});
    if (!domain_.contains(x, slack))
      throw DomainError("x = " + std::to_string(x) + " fm outside basis domain [" + std::to_string(domain_.lo) +
                        ", " + std::to_string(domain_.hi) + "]");
  }

  BasisPoint closed_at(double x) const {
    const double k = wavenumber_;
    if (closed_kind_ == ClosedFormKind::Trigonometric) {
      const double sn = std::sin(k * x), cs = std::cos(k * x);
      return {sn, cs, k * cs, -k * sn};
    }
    const double sh = std::sinh(k * x), ch = std::cosh(k * x);
    return {sh, ch, k * ch, k * sh};
  }

  BasisPoint numeric_at(double x) const {
    const auto& g = *grid_;
    const double h = g.step;
    const double pos = std::clamp((x - g.x_min) / h, 0.0, static_cast<double>(g.n_steps));
    auto target = static_cast<std::size_t>(std::floor(pos));
    target = std::min(target, g.n_steps);
    std::size_t block = std::min(target / g.stride, g.states.size() - 1);
    std::size_t idx = std::min(block * g.stride, g.n_steps);
    numerics::State<4> y = g.states[block];
    auto rhs = [this](double xx, const numerics::State<4>& yy) { return detail::kg_rhs(scenario_, xx, yy); };
    while (idx < target) {
      y = numerics::step<4>(g.method, rhs, g.x_min + static_cast<double>(idx) * h, y, h);
      ++idx;
    }
    const double x_idx = g.x_min + static_cast<double>(idx) * h;
    const double rest = x - x_idx;
    if (rest != 0.0) y = numerics::step<4>(g.method, rhs, x_idx, y, rest);
    return {y[0], y[2], y[1], y[3]};
  }

  void locate_zeros();

  Scenario scenario_;
  Domain domain_;
  BasisSource source_ = BasisSource::ClosedForm;
  ClosedFormKind closed_kind_ = ClosedFormKind::Trigonometric;
  double wavenumber_ = 0.0;
  double closed_spacing_ = 0.0;
  std::size_t closed_samples_ = 0;
  std::shared_ptr<const detail::NumericGrid> grid_;
  std::vector<double> zeros_;
  double phi2_max_ = 0.0;
};

inline void KgBasis::locate_zeros() {
  const std::size_t n = sample_count();
  phi2_max_ = 0.0;
  double k_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phi2_max_ = std::max(phi2_max_, std::abs(sample(i).phi2));
    k_max = std::max(k_max, local_wavenumber(scenario_, sample_position(i)));
  }
  // Scan finely enough that one scan interval never brackets two zeros.
  const double scan_limit = k_max > 0.0 ? std::numbers::pi / (20.0 * k_max) : domain_.length();
  zeros_.clear();
  auto phi2 = [this](double x) { return evaluate(x).phi2; };
  double x_prev = sample_position(0);
  double f_prev = sample(0).phi2;
  if (f_prev == 0.0) zeros_.push_back(x_prev);
  for (std::size_t i = 1; i < n; ++i) {
    const double x_end = sample_position(i);
    const double f_end = sample(i).phi2;
    const double x_begin = x_prev;
    const auto sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((x_end - x_begin) / scan_limit)));
    for (std::size_t j = 1; j <= sub; ++j) {
      const bool last = j == sub;
      const double x = last ? x_end : x_begin + (x_end - x_begin) * static_cast<double>(j) / static_cast<double>(sub);
      const double f = last ? f_end : phi2(x);
      if (f == 0.0) {
        zeros_.push_back(x);
      } else if (f_prev != 0.0 && (f > 0.0) != (f_prev > 0.0)) {
        zeros_.push_back(numerics::bisect_then_secant(phi2, x_prev, x, f_prev, f, 1e-3 * (x - x_prev)));
      }
      x_prev = x;
      f_prev = f;
    }
  }
}

/// Closed-form basis for a constant potential: sin/cos(kx) in allowed regions
/// (and for photons, with k = |E-U0|/hbar c), sinh/cosh(kappa x) in forbidden ones.
/// The default domain spans ten node spacings (or four 1/kappa) either side of 0.
inline KgBasis kg_closed_constant(const Scenario& s, std::optional<Domain> domain) {
  s.validate();
  if (!s.potential.is_constant()) throw PreconditionError("kg_closed_constant requires a constant potential");
  const double q = s.available(0.0);
  const double gap = q * q - s.mass_sq();
  if (std::abs(gap) <= turning_tolerance(s))
    throw DegenerateBasisError("turning energy: (E-U0)^2 = m0^2c^4, sin/cos and sinh/cosh bases degenerate");
  const bool trig = gap > 0.0;
  const double k = std::sqrt(std::abs(gap)) / s.hbar_c();
  const double scale = trig ? std::numbers::pi / k : 1.0 / k;
  // Past a few 1/kappa the Wronskian of cosh/sinh is lost to cancellation (about e^(2 kappa x) ulp).
  const double reach = trig ? 10.0 : 4.0;
  const Domain d = domain.value_or(Domain{-reach * scale, reach * scale});
  if (!(d.hi > d.lo)) throw PreconditionError("basis domain must have hi > lo");

  KgBasis b(s, d);
  b.source_ = BasisSource::ClosedForm;
  b.closed_kind_ = trig ? ClosedFormKind::Trigonometric : ClosedFormKind::Hyperbolic;
  b.wavenumber_ = k;
  const double target = std::min(scale / 40.0, d.length() / 64.0);
  const auto intervals = static_cast<std::size_t>(std::ceil(d.length() / target));
  b.closed_spacing_ = d.length() / static_cast<double>(intervals);
  b.closed_samples_ = intervals + 1;
  b.locate_zeros();
  return b;
}

/// Integrates phi'' = q(x) phi from x_min: phi1 = 0, phi1' = k0 and phi2 = 1, phi2' = 0,
/// where k0 = max(|local k or kappa at x_min|, 1/(x_max - x_min)). The step is
/// shrunk, if needed, so a whole number of steps lands on x_max.
inline KgBasis kg_solve_numeric(const Scenario& s, double x_min, double x_max, const KgSolveOptions& options) {
  s.validate();
  if (!(options.step > 0.0)) throw PreconditionError("integration step must be positive");
  if (!(x_max > x_min)) throw PreconditionError("x_max must exceed x_min");
  const double length = x_max - x_min;
  const auto n_steps = static_cast<std::size_t>(std::ceil(length / options.step - 1e-9));
  auto grid = std::make_shared<detail::NumericGrid>();
  grid->x_min = x_min;
  grid->x_max = x_max;
  grid->n_steps = std::max<std::size_t>(n_steps, 1);
  grid->step = length / static_cast<double>(grid->n_steps);
  grid->method = options.method;
  grid->stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.sample_spacing / grid->step)));
  grid->stride = std::min(grid->stride, grid->n_steps);

  const double k0 = std::max(std::sqrt(std::abs(kg_coefficient(s, x_min))), 1.0 / length);
  numerics::State<4> y{0.0, k0, 1.0, 0.0};
  auto rhs = [&s](double x, const numerics::State<4>& yy) { return detail::kg_rhs(s, x, yy); };
  grid->states.reserve(grid->n_steps / grid->stride + 2);
  grid->states.push_back(y);
  for (std::size_t i = 0; i < grid->n_steps; ++i) {
    const double x = x_min + static_cast<double>(i) * grid->step;
    y = numerics::step<4>(options.method, rhs, x, y, grid->step);
    if (!(std::isfinite(y[0]) && std::isfinite(y[1]) && std::isfinite(y[2]) && std::isfinite(y[3])))
      throw OverflowError("Klein-Gordon integration overflowed at x = " + std::to_string(x + grid->step) + " fm");
    if ((i + 1) % grid->stride == 0 || i + 1 == grid->n_steps) grid->states.push_back(y);
  }

  KgBasis b(s, Domain{x_min, x_max});
  b.source_ = BasisSource::Numeric;
  b.grid_ = std::move(grid);
  b.locate_zeros();
  return b;
}

/// max_x |W(x) - W(x_ref)| / |W(x_ref)| over the sample grid.
inline double wronskian_drift(const KgBasis& b) {
  if (b.sample_count() < 2) throw PreconditionError("wronskian_drift needs at least two samples");
  const double w_ref = b.reference_wronskian();
  double worst = 0.0;
  for (std::size_t i = 1; i < b.sample_count(); ++i)
    worst = std::max(worst, std::abs(b.sample(i).wronskian() - w_ref) / std::abs(w_ref));
  return worst;
}

/// Klein-Gordon residual of the sampled basis: phi'' from 5-point central
/// differences of the stored samples against q(x) phi. Each sample is scaled by
/// |q| times the local amplitude sqrt(phi^2 + phi'^2/|q|), with |q| floored at
/// 1/L^2, so the measure stays meaningful near zeros of phi.
inline double klein_gordon_residual(const KgBasis& b) {
  const std::size_t n = b.sample_count();
  if (n < 8) throw PreconditionError("klein_gordon_residual needs at least 8 samples");
  const double h = b.sample_spacing();
  const double q_floor = 1.0 / (b.domain().length() * b.domain().length());
  double worst = 0.0;
  // The last interval may be shorter than h; stay clear of it.
  for (std::size_t i = 2; i + 4 < n; ++i) {
    const BasisPoint p[5] = {b.sample(i - 2), b.sample(i - 1), b.sample(i), b.sample(i + 1), b.sample(i + 2)};
    const double x = b.sample_position(i);
    const double q = kg_coefficient(b.scenario(), x);
    const double qa = std::max(std::abs(q), q_floor);
    auto check = [&](double f0, double fd, double fm2, double fm1, double fp1, double fp2) {
      const double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
      const double amp = std::sqrt(f0 * f0 + fd * fd / qa);
      worst = std::max(worst, std::abs(d2 - q * f0) / (qa * amp));
    };
    check(p[2].phi1, p[2].dphi1, p[0].phi1, p[1].phi1, p[3].phi1, p[4].phi1);
    check(p[2].phi2, p[2].dphi2, p[0].phi2, p[1].phi2, p[3].phi2, p[4].phi2);
  }
  return worst;
}

}  // namespace rqt
