#include "nlslab/born.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

struct GaussRule {
  std::array<double, kGaussNodes> x{};
  std::array<double, kGaussNodes> w{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, kGaussNodes>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    const std::size_t half = a.size();  // positive abscissas, ascending
    for (std::size_t i = 0; i < half; ++i) {
      r.x[half - 1 - i] = -a[i];
      r.w[half - 1 - i] = w[i];
      r.x[half + i] = a[i];
      r.w[half + i] = w[i];
    }
    return r;
  }();
  return rule;
}

struct Layout {
  std::vector<std::vector<QuadratureNode>> panels;
  std::vector<double> breakpoints;  // graded part only, ascending, ending at T
};

Layout make_layout(double T, int panels, double a, double grading) {
  if (!(T > 0.0) || panels < 4 || !(a > -1.0) || !(grading > 0.0)) {
    throw std::invalid_argument("born: quadrature needs T > 0, panels >= 4, a > -1, grading > 0");
  }
  const GaussRule& g = gauss_rule();
  Layout out;
  double t1 = 0.0;
  int graded = panels;
  if (a != 0.0) {
    t1 = std::min(1.0, T);
    const int ps = std::max(2, panels / 4);
    graded = panels - ps;
    const double S = std::pow(t1, 1.0 + a);
    for (int j = 0; j < ps; ++j) {
      const double lo = j == 0 ? 0.0 : S * std::ldexp(1.0, j - ps);
      const double hi = S * std::ldexp(1.0, j + 1 - ps);
      std::vector<QuadratureNode> nodes;
      for (int i = 0; i < kGaussNodes; ++i) {
        const double s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.x[i];
        nodes.push_back({std::pow(s, 1.0 / (1.0 + a)), 0.5 * (hi - lo) * g.w[i] / (1.0 + a)});
      }
      out.panels.push_back(std::move(nodes));
    }
    if (t1 == T) return out;
  }
  const double span = T - t1;
  out.breakpoints.push_back(t1);
  for (int k = 1; k <= graded; ++k) {
    const double b = k == graded ? T
                                 : t1 + grading * (std::pow(1.0 + span / grading,
                                                            static_cast<double>(k) / graded) -
                                                   1.0);
    const double lo = out.breakpoints.back();
    std::vector<QuadratureNode> nodes;
    for (int i = 0; i < kGaussNodes; ++i) {
      const double t = 0.5 * (lo + b) + 0.5 * (b - lo) * g.x[i];
      nodes.push_back({t, 0.5 * (b - lo) * g.w[i] * (a == 0.0 ? 1.0 : std::pow(t, a))});
    }
    out.panels.push_back(std::move(nodes));
    out.breakpoints.push_back(b);
  }
  return out;
}

void apply_power(ComplexField& f, double sigma) {
  for (cplx& z : f.values()) z *= std::pow(std::norm(z), sigma);
}

ComplexField power_of(ComplexField f, double sigma) {
  apply_power(f, sigma);
  return f;
}

double decay_factor(const ComplexField& f, double t, double sigma) {
  return std::pow(std::abs(t), -f.grid().dim() * sigma);
}

// Throws unless U₀(±switch)f and M_{±switch} f are resolved on f's grid.
void require_resolved(const ComplexField& f, double switch_time, const char* what) {
  for (double tau : {switch_time, -switch_time}) {
    for (const ComplexField& probe : {free_propagate(f, tau), chirp(f, 1.0 / tau)}) {
      const FieldDiagnostics d = diagnostics(probe);
      if (d.boundary_mass_fraction > 1e-10 || d.spectral_tail_fraction > 1e-10) {
        std::ostringstream msg;
        msg << what << ": grid does not resolve the data up to |t| = " << switch_time
            << " (boundary " << d.boundary_mass_fraction << ", spectral tail "
            << d.spectral_tail_fraction << ")";
        throw NumericalError("born", msg.str());
      }
    }
  }
}

struct RunResult {
  ComplexField field;
  ComplexField tail;
  std::size_t evaluations = 0;
};

RunResult run_quadrature(const std::function<ComplexField(double)>& f, const QuadratureSpec& q,
                         int panels, double p) {
  const Layout layout = make_layout(q.T_max, panels, q.singular_exponent, q.grading);
  const std::size_t np = layout.panels.size();
  std::vector<ComplexField> partial(np);
  auto do_panel = [&](std::size_t k) {
    const auto& nodes = layout.panels[k];
    ComplexField acc = f(nodes[0].t);
    acc *= nodes[0].weight;
    for (std::size_t i = 1; i < nodes.size(); ++i) acc.axpy(nodes[i].weight, f(nodes[i].t));
    partial[k] = std::move(acc);
  };
  if (q.parallel) {
    const unsigned n = q.threads ? q.threads : std::max(2u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(np);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < np; k = next++) {
          try {
            do_panel(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t k = 0; k < np; ++k) do_panel(k);
  }
  RunResult r;
  r.evaluations = np * kGaussNodes;
  r.field = std::move(partial[0]);
  for (std::size_t k = 1; k < np; ++k) r.field += partial[k];
  r.tail = ComplexField(r.field.grid(), r.field.space());
  if (!q.tail) return r;

  const int K = q.tail_terms;
  const auto& bp = layout.breakpoints;
  if (K < 1 || static_cast<int>(bp.size()) < K + 1) {
    throw std::invalid_argument("born: not enough graded breakpoints for the tail fit");
  }
  if (!(p > 1.0)) throw std::invalid_argument("born: tail exponent must exceed 1");
  // g(t) = t^p · t^a f(t) = Σ_j C_j t^{-j}, matched at the last K breakpoints.
  std::vector<double> ts(bp.end() - K, bp.end());
  std::vector<ComplexField> gs;
  for (double t : ts) {
    ComplexField v = f(t);
    v *= std::pow(t, p + q.singular_exponent);
    gs.push_back(std::move(v));
  }
  r.evaluations += K;
  // Solve the K×K Vandermonde system in u = 1/t once, by Gauss–Jordan on its
  // inverse; the same coefficients apply at every grid point.
  std::vector<std::vector<double>> m(K, std::vector<double>(2 * K, 0.0));
  for (int j = 0; j < K; ++j) {
    for (int i = 0; i < K; ++i) m[j][i] = std::pow(1.0 / ts[j], i);
    m[j][K + j] = 1.0;
  }
  for (int c = 0; c < K; ++c) {
    int piv = c;
    for (int r2 = c + 1; r2 < K; ++r2) {
      if (std::abs(m[r2][c]) > std::abs(m[piv][c])) piv = r2;
    }
    std::swap(m[c], m[piv]);
    const double d = m[c][c];
    for (double& v : m[c]) v /= d;
    for (int r2 = 0; r2 < K; ++r2) {
      if (r2 == c) continue;
      const double fct = m[r2][c];
      for (int i = 0; i < 2 * K; ++i) m[r2][i] -= fct * m[c][i];
    }
  }
  const double T = q.T_max;
  for (int i = 0; i < K; ++i) {
    // C_i = Σ_j inv[i][j] g_j; ∫_T^∞ C_i t^{-p-i} dt = C_i T^{1-p-i}/(p+i-1).
    const double scale = std::pow(T, 1.0 - p - i) / (p + i - 1.0);
    for (int j = 0; j < K; ++j) r.tail.axpy(scale * m[i][K + j], gs[j]);
  }
  r.field += r.tail;
  return r;
}

}  // namespace

std::vector<std::vector<QuadratureNode>> quadrature_panels(double T, int panels, double a,
                                                           double grading) {
  return make_layout(T, panels, a, grading).panels;
}

double integrate_scalar(const std::function<double(double)>& f, double T, int panels, double a,
                        double grading) {
  const Layout layout = make_layout(T, panels, a, grading);
  double total = 0.0;
  for (const auto& nodes : layout.panels) {
    double acc = 0.0;
    for (const QuadratureNode& n : nodes) acc += n.weight * f(n.t);
    total += acc;
  }
  return total;
}

QuadratureResult integrate_field(const std::function<ComplexField(double)>& f,
                                 const QuadratureSpec& q, double tail_exponent) {
  const double p = std::isnan(q.tail_exponent_hint) ? tail_exponent : q.tail_exponent_hint;
  RunResult coarse = run_quadrature(f, q, q.panels, p);
  QuadratureResult out;
  if (!q.refine) {
    out.field = std::move(coarse.field);
    out.tail_bound = l2_norm(coarse.tail);
    out.evaluations = coarse.evaluations;
    return out;
  }
  RunResult fine = run_quadrature(f, q, 2 * q.panels, p);
  out.refinement_delta = l2_distance(fine.field, coarse.field);
  out.tail_bound = l2_norm(fine.tail);
  out.evaluations = coarse.evaluations + fine.evaluations;
  const double size = l2_norm(fine.field);
  if (size > 0.0 && out.refinement_delta > q.max_refinement * size) {
    std::ostringstream msg;
    msg << "quadrature not converged under panel doubling (relative change "
        << out.refinement_delta / size << ")";
    throw NumericalError("born", msg.str());
  }
  out.field = std::move(fine.field);
  return out;
}

ComplexField nonlinear_flow(const ComplexField& phi, double t, double sigma) {
  return power_of(free_propagate(phi, t), sigma);
}

ComplexField born_integrand(const ComplexField& phi, double t, double sigma, double switch_time) {
  if (std::abs(t) <= switch_time) return free_propagate(nonlinear_flow(phi, t, sigma), -t);
  // |t|^{-nσ} M_{-t} F⁻¹ G(F M_t φ)
  ComplexField out =
      chirp(inverse_fourier(power_of(forward_fourier(chirp(phi, 1.0 / t)), sigma)), -1.0 / t);
  out *= decay_factor(phi, t, sigma);
  return out;
}

ComplexField fourier_side_integrand(const ComplexField& phi, double t, double sigma,
                                    double switch_time) {
  if (std::abs(t) <= switch_time) {
    return chirp(as_position(forward_fourier(nonlinear_flow(phi, t, sigma))), t);
  }
  // The chirp e^{it|ξ|²/2} cancels the free phase of F U₀(t):
  // |t|^{-nσ} F M_{-t} F⁻¹ G(F M_t φ).
  const ComplexField inner = power_of(forward_fourier(chirp(phi, 1.0 / t)), sigma);
  ComplexField out = as_position(forward_fourier(chirp(inverse_fourier(inner), -1.0 / t)));
  out *= decay_factor(phi, t, sigma);
  return out;
}

ComplexField free_side_integrand(const ComplexField& psi, double t, double sigma,
                                 double switch_time) {
  if (std::abs(t) <= switch_time) {
    return free_propagate(power_of(free_propagate(psi, -t), sigma), t);
  }
  // |t|^{-nσ} M_t F⁻¹ G(F M_{-t} ψ)
  ComplexField out =
      chirp(inverse_fourier(power_of(forward_fourier(chirp(psi, -1.0 / t)), sigma)), 1.0 / t);
  out *= decay_factor(psi, t, sigma);
  return out;
}

QuadratureResult born_integral(const ComplexField& phi, Sign sign, double sigma,
                               const QuadratureSpec& q) {
  const int n = phi.grid().dim();
  if (!(n * sigma > 1.0)) throw std::invalid_argument("born: tail diverges unless n*sigma > 1");
  if (phi.space() != Space::position) {
    throw std::invalid_argument("born: born_integral expects a position field");
  }
  require_resolved(phi, q.switch_time, "born_integral");
  const double s = value(sign);
  const double sw = q.switch_time;
  auto f = [&](double t) {
    ComplexField v = born_integrand(phi, s * t, sigma, sw);
    v *= s;
    return v;
  };
  return integrate_field(f, q, n * sigma - q.singular_exponent);
}

namespace {

SidePair sides(const ComplexField& phi, Sign sign, double sigma, const QuadratureSpec& base,
               double lhs_weight, double rhs_weight) {
  if (phi.space() != Space::position) {
    throw std::invalid_argument("born: side integrals expect a position field");
  }
  const int n = phi.grid().dim();
  const ComplexField psi = as_position(forward_fourier(phi));
  require_resolved(phi, base.switch_time, "side integrals");
  require_resolved(psi, base.switch_time, "side integrals");
  const double s = value(sign);
  const double sw = base.switch_time;
  SidePair out;
  QuadratureSpec q = base;
  q.singular_exponent = lhs_weight;
  out.lhs = integrate_field(
      [&](double t) {
        ComplexField v = fourier_side_integrand(phi, s * t, sigma, sw);
        v *= s;
        return v;
      },
      q, n * sigma - lhs_weight);
  q.singular_exponent = rhs_weight;
  out.rhs = integrate_field(
      [&](double t) {
        ComplexField v = free_side_integrand(psi, s * t, sigma, sw);
        v *= s;
        return v;
      },
      q, n * sigma - rhs_weight);
  return out;
}

}  // namespace

SidePair corollary2_sides(const ComplexField& phi, Sign sign, const QuadratureSpec& q) {
  return sides(phi, sign, 2.0 / phi.grid().dim(), q, 0.0, 0.0);
}

SubcriticalSides subcritical_sides(const ComplexField& phi, Sign sign, int n, double sigma,
                                   const QuadratureSpec& q) {
  if (n != phi.grid().dim() || n > 2) {
    throw std::invalid_argument("born: subcritical identities need n = grid dimension <= 2");
  }
  if (!(sigma > 1.0 / n && sigma < 2.0 / n)) {
    throw std::invalid_argument("born: subcritical identities need 1/n < sigma < 2/n");
  }
  const double a = n * sigma - 2.0;
  return {sides(phi, sign, sigma, q, 0.0, a), sides(phi, sign, sigma, q, a, 0.0)};
}

namespace {

json quadrature_params(const QuadratureSpec& q) {
  return {{"T_max", q.T_max},
          {"panels", q.panels},
          {"nodes_per_panel", kGaussNodes},
          {"grading", q.grading},
          {"tail_terms", q.tail_terms},
          {"tail", q.tail},
          {"refine", q.refine},
          {"max_refinement", q.max_refinement},
          {"switch_time", q.switch_time},
          {"parallel", q.parallel}};
}

double rel(const ComplexField& a, const ComplexField& b) {
  return l2_distance(a, b) / l2_norm(b);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void add_pair_checks(VerificationReport& rep, const std::string& tag, const SidePair& sp,
                     double tolerance, double refinement_tol) {
  rep.add(tag + "relative_side_difference", rel(sp.lhs.field, sp.rhs.field), tolerance);
  rep.add(tag + "lhs_refinement_delta", sp.lhs.refinement_delta / l2_norm(sp.lhs.field),
          refinement_tol);
  rep.add(tag + "rhs_refinement_delta", sp.rhs.refinement_delta / l2_norm(sp.rhs.field),
          refinement_tol);
  rep.notes[tag + "lhs_tail_bound"] = sp.lhs.tail_bound;
  rep.notes[tag + "rhs_tail_bound"] = sp.rhs.tail_bound;
  rep.notes[tag + "evaluations"] = sp.lhs.evaluations + sp.rhs.evaluations;
}

}  // namespace

VerificationReport verify_corollary2(const ComplexField& phi, const QuadratureSpec& q,
                                     double tolerance, double refinement_tol) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.identity = "int e^{it|x|^2/2} F G(U0(t)phi) = int U0(t) G(U0(-t) F phi)";
  rep.params = quadrature_params(q);
  rep.grid = to_json(phi.grid());
  rep.horizons = {q.T_max, 2 * q.T_max};
  QuadratureSpec longer = q;
  longer.T_max *= 2;
  const double sigma = 2.0 / phi.grid().dim();
  for (Sign s : {Sign::plus, Sign::minus}) {
    const std::string tag = std::string(to_string(s)) + ".";
    const SidePair sp = corollary2_sides(phi, s, q);
    add_pair_checks(rep, tag, sp, tolerance, refinement_tol);
    // Tail certification: doubling T_max moves each side by less than its tail bound.
    const SidePair sp2 = corollary2_sides(phi, s, longer);
    rep.add(tag + "lhs_doubling_change_over_tail_bound",
            l2_distance(sp2.lhs.field, sp.lhs.field) / sp.lhs.tail_bound, 1.0);
    rep.add(tag + "rhs_doubling_change_over_tail_bound",
            l2_distance(sp2.rhs.field, sp.rhs.field) / sp.rhs.tail_bound, 1.0);
    // First-order consistency with the wave-operator expansion: F I± is the left side.
    const QuadratureResult born = born_integral(phi, s, sigma, q);
    rep.add(tag + "fourier_of_born_vs_lhs",
            rel(as_position(forward_fourier(born.field)), sp.lhs.field), tolerance);
  }
  rep.wall_seconds = seconds_since(start);
  return rep;
}

VerificationReport verify_singular_rule(const std::vector<double>& exponents, double tolerance) {
  VerificationReport rep;
  rep.identity = "singular-weight quadrature oracles";
  for (double a : exponents) {
    std::ostringstream tag;
    tag << "a=" << a << ".";
    const double unit = integrate_scalar([](double) { return 1.0; }, 1.0, 8, a);
    rep.add(tag.str() + "power_integral_error", std::abs(unit * (1.0 + a) - 1.0), tolerance);
    const double gamma =
        integrate_scalar([](double t) { return std::exp(-t); }, 60.0, 32, a);
    rep.add(tag.str() + "gamma_integral_error", std::abs(gamma / std::tgamma(1.0 + a) - 1.0),
            tolerance);
  }
  return rep;
}

VerificationReport verify_subcritical(const ComplexField& phi, double sigma,
                                      const QuadratureSpec& q, double tolerance,
                                      double refinement_tol) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport rep;
  const int n = phi.grid().dim();
  rep.identity = "subcritical weighted identities, weight |t|^{n sigma - 2}";
  rep.params = quadrature_params(q);
  rep.params["sigma"] = sigma;
  rep.params["weight_exponent"] = n * sigma - 2.0;
  rep.grid = to_json(phi.grid());
  rep.horizons = {q.T_max};
  for (Sign s : {Sign::plus, Sign::minus}) {
    const std::string tag = std::string(to_string(s)) + ".";
    const SubcriticalSides ss = subcritical_sides(phi, s, n, sigma, q);
    add_pair_checks(rep, tag + "first.", ss.first, tolerance, refinement_tol);
    add_pair_checks(rep, tag + "second.", ss.second, tolerance, refinement_tol);
  }
  rep.wall_seconds = seconds_since(start);
  return rep;
}

VerificationReport verify_proposition(const ComplexField& phi, const std::vector<double>& deltas,
                                      const NLSParams& p, const ScatteringConfig& cfg,
                                      const QuadratureSpec& q) {
  const auto start = std::chrono::steady_clock::now();
  if (deltas.size() < 3) {
    throw std::invalid_argument("born: verify_proposition needs at least 3 deltas");
  }
  const int n = phi.grid().dim();
  const double order = 1.0 + 2.0 * p.sigma;  // δ^{1+4/n} at σ = 2/n
  VerificationReport rep;
  rep.identity = "first-order expansion of W_pm and W_pm^-1 near 0";
  rep.params = {{"mu", p.mu},
                {"sigma", p.sigma},
                {"dim", n},
                {"deltas", deltas},
                {"first_order_exponent", order},
                {"scattering_horizon", cfg.horizon},
                {"scattering_tol", cfg.tol},
                {"quadrature", quadrature_params(q)}};
  rep.grid = to_json(phi.grid());
  rep.notes["candidate_exponent_eps_2_plus_4_over_n"] = (4.0 / n) * (2.0 + 4.0 / n);
  rep.notes["candidate_exponent_eps_2_plus_n_over_4"] = 8.0 / n + 1.0;
  for (Sign s : {Sign::plus, Sign::minus}) {
    const QuadratureResult I = born_integral(phi, s, p.sigma, q);
    const double normI = l2_norm(I.field);
    rep.notes[std::string(to_string(s)) + ".born_integral_norm"] = normI;
    rep.notes[std::string(to_string(s)) + ".born_refinement_delta"] = I.refinement_delta;
    for (bool inverse : {false, true}) {
      const std::string tag =
          std::string(inverse ? "W^-1" : "W") + to_string(s) + ".";
      // Duhamel: W± u = u + iμ∫_0^{±∞}…, W±⁻¹ u = u − iμ∫_0^{±∞}… to first order.
      const cplx coef = cplx(0.0, p.mu) * (inverse ? -1.0 : 1.0);
      // The opposite pattern (∓ for W±, ± for W±⁻¹), tabulated for comparison.
      const cplx literal = cplx(0.0, p.mu) * (inverse ? value(s) : -value(s));
      Table t{tag + "sweep", {"delta", "remainder", "coefficient_error", "literal_sign_error"}, {}};
      std::vector<double> rho, coeff;
      for (double d : deltas) {
        ComplexField u = phi;
        u *= d;
        const ComplexField w = inverse ? inverse_wave_operator(u, s, p, cfg).field
                                       : wave_operator(u, s, p, cfg).field;
        ComplexField diff = w - u;
        const double scale = std::pow(d, order);
        ComplexField rem = diff;
        rem.axpy(-scale * coef, I.field);
        rho.push_back(l2_norm(rem));
        coeff.push_back(rho.back() / (scale * normI));
        ComplexField lit = diff;
        lit.axpy(-scale * literal, I.field);
        t.rows.push_back({d, rho.back(), coeff.back(), l2_norm(lit) / (scale * normI)});
      }
      double worst = 0.0;
      for (std::size_t k = 1; k < coeff.size(); ++k) worst = std::max(worst, coeff[k] / coeff[k - 1]);
      rep.add(tag + "coefficient_error_max_ratio", worst, 1.0, Check::Kind::below);
      const double slope = loglog_slope(deltas, rho);
      rep.fitted_rates.emplace_back(tag + "remainder_exponent", slope);
      rep.add(tag + "remainder_exponent", slope, order + 0.5, Check::Kind::at_least);
      rep.tables.push_back(std::move(t));
    }
  }
  rep.wall_seconds = seconds_since(start);
  return rep;
}

}  // namespace nlslab
