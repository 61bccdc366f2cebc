#include "nvsr/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace nvsr::cumulant {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double factorial(int k) {
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

void poly_accumulate(Polynomial& into, const Monomial& m, Complex c) {
  if (c == Complex(0.0, 0.0)) return;
  auto [it, inserted] = into.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0, 0.0)) into.erase(it);
  }
}

Monomial photon_monomial(int n_create, int n_annihilate) {
  Monomial m;
  m.n_create = n_create;
  m.n_annihilate = n_annihilate;
  return m;
}

Monomial sigma_monomial(int tag, int a, int b) {
  Monomial m;
  m.sigmas.push_back({tag, a, b});
  return m;
}

Polynomial single(const Monomial& m, Complex c = 1.0) {
  Polynomial p;
  poly_accumulate(p, m, c);
  return p;
}

}  // namespace

Polynomial mono_mul(const Monomial& x, const Monomial& y) {
  // contract emitter factors per tag (x's factor stands left of y's)
  std::map<int, SigmaFactor> merged;
  for (const auto& s : x.sigmas) merged.emplace(s.tag, s);
  for (const auto& s : y.sigmas) {
    auto it = merged.find(s.tag);
    if (it == merged.end()) {
      merged.emplace(s.tag, s);
    } else {
      if (it->second.b != s.a) return {};  // delta_{bc} = 0
      it->second.b = s.b;
    }
  }
  std::vector<SigmaFactor> sigmas;
  sigmas.reserve(merged.size());
  for (const auto& [tag, s] : merged) sigmas.push_back(s);

  // boson part: a^{p} adag^{q} reordering
  const int p = x.n_annihilate, q = y.n_create;
  Polynomial out;
  for (int k = 0; k <= std::min(p, q); ++k) {
    Monomial m;
    m.n_create = x.n_create + (q - k);
    m.n_annihilate = (p - k) + y.n_annihilate;
    m.sigmas = sigmas;
    poly_accumulate(out, m, factorial(k) * binom(p, k) * binom(q, k));
  }
  return out;
}

Polynomial poly_mul(const Polynomial& x, const Polynomial& y) {
  Polynomial out;
  for (const auto& [mx, cx] : x)
    for (const auto& [my, cy] : y)
      for (const auto& [m, c] : mono_mul(mx, my))
        poly_accumulate(out, m, cx * cy * c);
  return out;
}

Polynomial poly_add(Polynomial x, const Polynomial& y, Complex scale) {
  for (const auto& [m, c] : y) poly_accumulate(x, m, scale * c);
  return x;
}

Monomial canonicalize(Monomial m) {
  if (m.sigmas.empty()) return m;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(m.sigmas.size());
  for (const auto& s : m.sigmas) pairs.emplace_back(s.a, s.b);
  std::sort(pairs.begin(), pairs.end());
  m.sigmas.clear();
  int tag = 1;
  for (const auto& [a, b] : pairs) m.sigmas.push_back({tag++, a, b});
  return m;
}

Monomial adjoint(const Monomial& m) {
  Monomial out;
  out.n_create = m.n_annihilate;
  out.n_annihilate = m.n_create;
  for (const auto& s : m.sigmas) out.sigmas.push_back({s.tag, s.b, s.a});
  return out;
}

namespace {

Polynomial poly_adjoint(const Polynomial& p) {
  Polynomial out;
  for (const auto& [m, c] : p) poly_accumulate(out, adjoint(m), std::conj(c));
  return out;
}

// i [h, x] contribution of a Hermitian piece h to d<x>/dt.
Polynomial ham_adjoint(const Polynomial& h, const Polynomial& x) {
  Polynomial out = poly_mul(h, x);
  out = poly_add(std::move(out), poly_mul(x, h), -1.0);
  Polynomial scaled;
  for (const auto& [m, c] : out) poly_accumulate(scaled, m, kI * c);
  return scaled;
}

// rate * (o^dag x o - 1/2 o^dag o x - 1/2 x o^dag o)
Polynomial channel_adjoint(double rate, const Polynomial& o, const Polynomial& x) {
  if (rate == 0.0) return {};
  const Polynomial od = poly_adjoint(o);
  const Polynomial odo = poly_mul(od, o);
  Polynomial out = poly_mul(od, poly_mul(x, o));
  out = poly_add(std::move(out), poly_mul(odo, x), -0.5);
  out = poly_add(std::move(out), poly_mul(x, odo), -0.5);
  Polynomial scaled;
  for (const auto& [m, c] : out) poly_accumulate(scaled, m, rate * c);
  return scaled;
}

struct LevelIds {
  int g1 = -1, g2 = -1, e1 = -1, e2 = -1, m = -1;
};

LevelIds level_ids(const ModelSpec& spec) {
  LevelIds ids;
  ids.g1 = level_index(spec.scheme, Level::G1);
  ids.e1 = level_index(spec.scheme, Level::E1);
  if (spec.scheme == LevelScheme::FiveLevel) {
    ids.g2 = level_index(spec.scheme, Level::G2);
    ids.e2 = level_index(spec.scheme, Level::E2);
  }
  if (spec.scheme != LevelScheme::TwoLevel)
    ids.m = level_index(spec.scheme, Level::M);
  return ids;
}

Polynomial emitter_hamiltonian(const ModelSpec& spec, int tag) {
  const LevelIds ids = level_ids(spec);
  Polynomial h;
  h = poly_add(std::move(h), single(sigma_monomial(tag, ids.e1, ids.e1)),
               0.5 * spec.omega_e1g1);
  h = poly_add(std::move(h), single(sigma_monomial(tag, ids.g1, ids.g1)),
               -0.5 * spec.omega_e1g1);
  if (spec.scheme == LevelScheme::FiveLevel) {
    h = poly_add(std::move(h), single(sigma_monomial(tag, ids.e2, ids.e2)),
                 0.5 * spec.omega_e2g2);
    h = poly_add(std::move(h), single(sigma_monomial(tag, ids.g2, ids.g2)),
                 -0.5 * spec.omega_e2g2);
  }
  // interaction g [(sigma^{e1g1} + sigma^{e2g2}) a + h.c.]
  if (spec.g != 0.0) {
    Polynomial raise = single(sigma_monomial(tag, ids.e1, ids.g1));
    if (spec.scheme == LevelScheme::FiveLevel)
      raise = poly_add(std::move(raise), single(sigma_monomial(tag, ids.e2, ids.g2)));
    const Polynomial lower = poly_adjoint(raise);
    h = poly_add(std::move(h), poly_mul(raise, single(photon_monomial(0, 1))),
                 spec.g);
    h = poly_add(std::move(h), poly_mul(single(photon_monomial(1, 0)), lower),
                 spec.g);
  }
  return h;
}

std::vector<std::pair<double, Polynomial>> emitter_channels(const ModelSpec& spec,
                                                            int tag) {
  const LevelIds ids = level_ids(spec);
  std::vector<std::pair<double, Polynomial>> channels;
  auto sig = [&](int a, int b) { return single(sigma_monomial(tag, a, b)); };
  channels.emplace_back(spec.gamma_e1g1, sig(ids.g1, ids.e1));
  channels.emplace_back(spec.gamma_g1e1, sig(ids.e1, ids.g1));
  channels.emplace_back(
      spec.chi_e1g1 / 2.0,
      poly_add(sig(ids.e1, ids.e1), sig(ids.g1, ids.g1), -1.0));
  if (spec.scheme == LevelScheme::FiveLevel) {
    channels.emplace_back(spec.gamma_e2g2, sig(ids.g2, ids.e2));
    channels.emplace_back(spec.gamma_g2e2, sig(ids.e2, ids.g2));
    channels.emplace_back(
        spec.chi_e2g2 / 2.0,
        poly_add(sig(ids.e2, ids.e2), sig(ids.g2, ids.g2), -1.0));
  }
  if (spec.scheme != LevelScheme::TwoLevel) {
    channels.emplace_back(spec.gamma_e1m, sig(ids.m, ids.e1));
    channels.emplace_back(spec.gamma_mg1, sig(ids.g1, ids.m));
    if (spec.scheme == LevelScheme::FiveLevel) {
      channels.emplace_back(spec.gamma_e2m, sig(ids.m, ids.e2));
      channels.emplace_back(spec.gamma_mg2, sig(ids.g2, ids.m));
    }
  }
  return channels;
}

std::vector<int> tags_of(const Monomial& m) {
  std::vector<int> tags;
  for (const auto& s : m.sigmas) tags.push_back(s.tag);
  return tags;
}

// Exact adjoint right-hand side of d<x>/dt with the identical-emitter
// reduction: per-emitter pieces are evaluated on the tags present in x and
// once on a fresh tag with multiplicity (N - #tags).
Polynomial adjoint_rhs(const ModelSpec& spec, const Monomial& x) {
  const Polynomial xp = single(x);
  Polynomial out;

  // cavity: H_c and kappa D[a]
  if (spec.omega_c != 0.0)
    out = poly_add(std::move(out),
                   ham_adjoint(single(photon_monomial(1, 1), spec.omega_c), xp));
  out = poly_add(std::move(out),
                 channel_adjoint(spec.kappa, single(photon_monomial(0, 1)), xp));

  const std::vector<int> tags = tags_of(x);
  const int fresh = tags.empty() ? 1 : tags.back() + 1;
  const double fresh_mult =
      std::max(0, spec.n_emitters - static_cast<int>(tags.size()));

  auto add_emitter_piece = [&](int tag, double mult) {
    if (mult == 0.0) return;
    Polynomial piece = ham_adjoint(emitter_hamiltonian(spec, tag), xp);
    for (const auto& [rate, op] : emitter_channels(spec, tag))
      piece = poly_add(std::move(piece), channel_adjoint(rate, op, xp));
    out = poly_add(std::move(out), piece, mult);
  };
  for (int tag : tags) add_emitter_piece(tag, 1.0);
  add_emitter_piece(fresh, fresh_mult);

  // canonical tag relabeling, term folding
  Polynomial canonical;
  for (const auto& [m, c] : out) poly_accumulate(canonical, canonicalize(m), c);
  return canonical;
}

std::vector<Monomial> enumerate_variables(int levels) {
  std::vector<Monomial> vars;
  vars.push_back(photon_monomial(0, 1));  // a
  vars.push_back(photon_monomial(1, 0));  // adag
  vars.push_back(photon_monomial(1, 1));  // adag a
  vars.push_back(photon_monomial(0, 2));  // aa
  vars.push_back(photon_monomial(2, 0));  // adag adag
  for (int a = 0; a < levels; ++a)
    for (int b = 0; b < levels; ++b) vars.push_back(sigma_monomial(1, a, b));
  for (int a = 0; a < levels; ++a)
    for (int b = 0; b < levels; ++b) {
      Monomial m = sigma_monomial(1, a, b);
      m.n_annihilate = 1;
      vars.push_back(m);  // a sigma1
      m.n_annihilate = 0;
      m.n_create = 1;
      vars.push_back(m);  // adag sigma1
    }
  for (int a = 0; a < levels; ++a)
    for (int b = 0; b < levels; ++b)
      for (int c = 0; c < levels; ++c)
        for (int d = 0; d < levels; ++d) {
          if (std::make_pair(a, b) > std::make_pair(c, d)) continue;
          Monomial m;
          m.sigmas.push_back({1, a, b});
          m.sigmas.push_back({2, c, d});
          vars.push_back(m);
        }
  return vars;
}

std::string level_label(const ModelSpec& spec, int index) {
  for (Level l : {Level::G1, Level::G2, Level::E1, Level::E2, Level::M})
    if (level_present(spec.scheme, l) && level_index(spec.scheme, l) == index)
      return level_name(l);
  return "l" + std::to_string(index);
}

std::string monomial_label(const ModelSpec& spec, const Monomial& m) {
  std::ostringstream os;
  os << "<";
  bool first = true;
  auto sep = [&]() {
    if (!first) os << " ";
    first = false;
  };
  for (int k = 0; k < m.n_create; ++k) {
    sep();
    os << "ad";
  }
  for (const auto& s : m.sigmas) {
    sep();
    os << "s" << s.tag << "(" << level_label(spec, s.a) << ","
       << level_label(spec, s.b) << ")";
  }
  for (int k = 0; k < m.n_annihilate; ++k) {
    sep();
    os << "a";
  }
  if (first) os << "1";
  os << ">";
  return os.str();
}

}  // namespace

int ExactHierarchy::index_of(const Monomial& m) const {
  const Monomial c = canonicalize(m);
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == c) return static_cast<int>(i);
  return -1;
}

ExactHierarchy derive_eom(const ModelSpec& raw) {
  const ModelSpec spec = validate(raw);
  ExactHierarchy h;
  h.spec = spec;
  h.variables = enumerate_variables(spec.levels());
  h.rhs.reserve(h.variables.size());
  for (const auto& v : h.variables) h.rhs.push_back(adjoint_rhs(spec, v));
  return h;
}

MomentExpr cumulant_close(const Monomial& m) {
  if (m.order() != 3)
    throw ValidationError("cumulant_close expects a third-order product");
  // elementary factors in normal order
  std::vector<Monomial> f;
  for (int k = 0; k < m.n_create; ++k) f.push_back(photon_monomial(1, 0));
  for (const auto& s : m.sigmas) f.push_back(sigma_monomial(s.tag, s.a, s.b));
  for (int k = 0; k < m.n_annihilate; ++k) f.push_back(photon_monomial(0, 1));

  auto pair_of = [](const Monomial& x, const Monomial& y) {
    const Polynomial p = mono_mul(x, y);
    if (p.size() != 1 || p.begin()->second != Complex(1.0, 0.0))
      throw ValidationError("cumulant_close: unexpected pair reordering");
    return canonicalize(p.begin()->first);
  };

  MomentExpr out;
  auto add = [&](std::vector<Monomial> factors, Complex c) {
    for (auto& x : factors) x = canonicalize(x);
    std::sort(factors.begin(), factors.end());
    MomentProduct key{std::move(factors)};
    auto [it, inserted] = out.emplace(std::move(key), c);
    if (!inserted) it->second += c;
  };
  add({f[0], pair_of(f[1], f[2])}, 1.0);
  add({f[1], pair_of(f[0], f[2])}, 1.0);
  add({f[2], pair_of(f[0], f[1])}, 1.0);
  add({f[0], f[1], f[2]}, -2.0);
  return out;
}

int MeanFieldSystem::index_of(const Monomial& m) const {
  const Monomial c = canonicalize(m);
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), c,
                                   [&](int i, const Monomial& key) {
                                     return variables[static_cast<size_t>(i)] < key;
                                   });
  if (it != sorted_.end() && variables[static_cast<size_t>(*it)] == c)
    return *it;
  return -1;
}

MeanFieldSystem close_system(const ExactHierarchy& hierarchy) {
  MeanFieldSystem sys;
  sys.spec = hierarchy.spec;
  sys.variables = hierarchy.variables;
  sys.build_index();

  sys.rhs.resize(sys.variables.size());
  for (size_t i = 0; i < sys.variables.size(); ++i) {
    std::map<std::vector<int>, Complex> folded;
    auto add_term = [&](std::vector<int> vars, Complex c) {
      std::sort(vars.begin(), vars.end());
      auto [it, inserted] = folded.emplace(std::move(vars), c);
      if (!inserted) it->second += c;
    };
    for (const auto& [m, c] : hierarchy.rhs[i]) {
      const int order = m.order();
      if (order <= 2) {
        if (order == 0) {
          add_term({}, c);
        } else {
          const int idx = sys.index_of(m);
          if (idx < 0)
            throw ValidationError("close_system: moment outside variable set");
          add_term({idx}, c);
        }
      } else if (order == 3) {
        for (const auto& [product, c2] : cumulant_close(m)) {
          std::vector<int> vars;
          for (const auto& f : product.factors) {
            const int idx = sys.index_of(f);
            if (idx < 0)
              throw ValidationError("close_system: closure factor missing");
            vars.push_back(idx);
          }
          add_term(std::move(vars), c * c2);
        }
      } else {
        throw ValidationError("close_system: moment of order > 3 on a rhs");
      }
    }
    for (auto& [vars, c] : folded)
      if (c != Complex(0.0, 0.0)) sys.rhs[i].push_back({c, vars});
  }
  return sys;
}

MeanFieldSystem build_mean_field(const ModelSpec& spec) {
  return close_system(derive_eom(spec));
}

double MeanFieldSystem::rate_scale() const {
  double scale = 0.0;
  for (const auto& eq : rhs)
    for (const auto& term : eq) scale = std::max(scale, std::abs(term.coeff));
  return std::max(scale, 1.0);
}

void MeanFieldSystem::build_index() {
  sorted_.resize(variables.size());
  for (size_t i = 0; i < variables.size(); ++i) sorted_[i] = static_cast<int>(i);
  std::sort(sorted_.begin(), sorted_.end(), [&](int a, int b) {
    return variables[static_cast<size_t>(a)] < variables[static_cast<size_t>(b)];
  });
}

void MeanFieldSystem::eval(const VecC& y, VecC& out) const {
  out.setZero(dim());
  for (long i = 0; i < dim(); ++i) {
    Complex acc = 0.0;
    for (const auto& term : rhs[static_cast<size_t>(i)]) {
      Complex v = term.coeff;
      for (int k : term.vars) v *= y(k);
      acc += v;
    }
    out(i) = acc;
  }
}

void MeanFieldSystem::jacobian(const VecC& y, MatC& out) const {
  out.setZero(dim(), dim());
  for (long i = 0; i < dim(); ++i) {
    for (const auto& term : rhs[static_cast<size_t>(i)]) {
      const size_t n = term.vars.size();
      for (size_t p = 0; p < n; ++p) {
        Complex v = term.coeff;
        for (size_t q = 0; q < n; ++q)
          if (q != p) v *= y(term.vars[q]);
        out(i, term.vars[p]) += v;
      }
    }
  }
}

std::string MeanFieldSystem::to_text() const {
  std::ostringstream os;
  os.precision(12);
  os << "# mean-field equations, " << dim() << " variables, scheme "
     << scheme_name(spec.scheme) << ", N = " << spec.n_emitters << "\n";
  for (long i = 0; i < dim(); ++i) {
    os << "d" << monomial_label(spec, variables[static_cast<size_t>(i)])
       << "/dt =";
    if (rhs[static_cast<size_t>(i)].empty()) os << " 0";
    bool first = true;
    for (const auto& term : rhs[static_cast<size_t>(i)]) {
      os << (first ? " " : " + ");
      first = false;
      os << "(" << term.coeff.real() << (term.coeff.imag() < 0 ? "-" : "+")
         << std::abs(term.coeff.imag()) << "i)";
      for (int k : term.vars)
        os << "*" << monomial_label(spec, variables[static_cast<size_t>(k)]);
    }
    os << "\n";
  }
  return os.str();
}

VecC uncorrelated_assignment(const MeanFieldSystem& system,
                             const std::vector<double>& pops) {
  const int levels = system.spec.levels();
  if (static_cast<int>(pops.size()) != levels)
    throw ValidationError("uncorrelated_assignment: one population per level");
  double sum = 0.0;
  for (double p : pops) {
    if (p < 0.0 || p > 1.0)
      throw ValidationError("populations must lie in [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("populations must sum to 1");

  VecC y = VecC::Zero(system.dim());
  for (long i = 0; i < system.dim(); ++i) {
    const Monomial& m = system.variables[static_cast<size_t>(i)];
    if (m.n_create != 0 || m.n_annihilate != 0) continue;  // photon vacuum
    double v = 1.0;
    bool diagonal = true;
    for (const auto& s : m.sigmas) {
      if (s.a != s.b) diagonal = false;
      else v *= pops[static_cast<size_t>(s.a)];
    }
    if (diagonal && !m.sigmas.empty()) y(i) = v;
  }
  return y;
}

VecC ground_assignment(const MeanFieldSystem& system) {
  std::vector<double> pops(static_cast<size_t>(system.spec.levels()), 0.0);
  pops[static_cast<size_t>(level_index(system.spec.scheme, Level::G1))] = 1.0;
  return uncorrelated_assignment(system, pops);
}

void validate_assignment(const MeanFieldSystem& system, const VecC& y,
                         double tol) {
  if (y.size() != system.dim())
    throw ValidationError("assignment dimension mismatch");
  // conjugation consistency
  for (long i = 0; i < system.dim(); ++i) {
    const Monomial conj_m = adjoint(system.variables[static_cast<size_t>(i)]);
    const int j = system.index_of(conj_m);
    if (j < 0) throw ValidationError("variable set is not conjugation-closed");
    if (std::abs(y(j) - std::conj(y(i))) > tol * std::max(1.0, std::abs(y(i))))
      throw ValidationError("assignment violates conjugation consistency");
  }
  // populations
  double sum = 0.0;
  for (int l = 0; l < system.spec.levels(); ++l) {
    const int idx = system.index_of(sigma_monomial(1, l, l));
    const Complex v = y(idx);
    if (v.real() < -tol || v.real() > 1.0 + tol || std::abs(v.imag()) > tol)
      throw ValidationError("level population outside [0, 1]");
    sum += v.real();
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError("level populations do not sum to 1");
}

namespace {

OdeSystem as_ode(const MeanFieldSystem& system) {
  OdeSystem ode;
  ode.dim = system.dim();
  ode.rhs = [&system](const VecC& y, VecC& out) { system.eval(y, out); };
  ode.jacobian = [&system](const VecC& y, MatC& out) { system.jacobian(y, out); };
  return ode;
}

}  // namespace

IntegrateResult integrate(const MeanFieldSystem& system, const VecC& init,
                          double t_end, const OdeOptions& options) {
  return integrate_sampled(system, init, t_end, {}, {}, options);
}

IntegrateResult integrate_sampled(
    const MeanFieldSystem& system, const VecC& init, double t_end,
    std::span<const double> sample_times,
    const std::function<void(size_t, double, const VecC&)>& on_sample,
    const OdeOptions& options) {
  validate_assignment(system, init);
  OdeOptions opts = options;
  // trajectory sampling wants the full span; plain integrate stops early
  opts.stop_at_steady = sample_times.empty();
  // the steady threshold is measured against the system's rate scale
  const double scale = system.rate_scale();
  opts.steady_rtol = options.steady_rtol * scale;
  const OdeSystem ode = as_ode(system);
  OdeResult r = integrate_trbdf2(ode, init, t_end, opts, sample_times, on_sample);
  IntegrateResult out;
  out.state = std::move(r.y);
  out.t = r.t;
  out.steady = r.reached_steady;
  out.residual = r.residual;
  out.converged =
      r.reached_steady ||
      r.residual <=
          opts.steady_rtol * std::max(1.0, out.state.cwiseAbs().maxCoeff());
  return out;
}

Complex value_of(const MeanFieldSystem& system, const VecC& y, const Monomial& m) {
  const int idx = system.index_of(m);
  if (idx < 0) throw ValidationError("value_of: moment not in the variable set");
  return y(idx);
}

double photon_number(const MeanFieldSystem& system, const VecC& y) {
  return value_of(system, y, photon_monomial(1, 1)).real();
}

double level_population(const MeanFieldSystem& system, const VecC& y, Level level) {
  const int l = level_index(system.spec.scheme, level);
  return value_of(system, y, sigma_monomial(1, l, l)).real();
}

DickeNumbers dicke_numbers(const ModelSpec& spec,
                           const std::function<Complex(const Monomial&)>& lookup) {
  const int l1 = level_index(spec.scheme, Level::G1);  // paper label 1
  const int l2 = level_index(spec.scheme, Level::E1);  // paper label 2
  const double n = spec.n_emitters;

  auto s = [&](int a, int b) { return lookup(sigma_monomial(1, a, b)); };
  auto ss = [&](int a, int b, int c, int d) {
    Monomial m;
    m.sigmas.push_back({1, a, b});
    m.sigmas.push_back({2, c, d});
    return lookup(canonicalize(m));
  };

  const double s11 = s(l1, l1).real();
  const double s22 = s(l2, l2).real();
  const double singles = s11 + s22;

  const Complex c_1221 = ss(l1, l2, l2, l1);
  const Complex c_2112 = ss(l2, l1, l1, l2);
  const Complex c_2121 = ss(l2, l1, l2, l1);
  const Complex c_1212 = ss(l1, l2, l1, l2);

  const double jx2 =
      0.25 * n * (singles + (n - 1) * (c_1221 + c_2112 + c_2121 + c_1212).real());
  const double jy2 =
      0.25 * n * (singles + (n - 1) * (c_1221 + c_2112 - c_2121 - c_1212).real());
  const double jz2 =
      0.25 * n *
      (singles + (n - 1) * (ss(l2, l2, l2, l2) - 2.0 * ss(l1, l1, l2, l2) +
                            ss(l1, l1, l1, l1))
                               .real());

  const double j2 = jx2 + jy2 + jz2;
  const double arg = 1.0 + 4.0 * j2;
  if (arg < 0.0)
    throw NumericalError("dicke_numbers: negative argument under the square root");

  DickeNumbers out;
  out.jbar = 0.5 * (std::sqrt(arg) - 1.0);
  out.mbar = 0.5 * n * (s22 - s11);
  return out;
}

DickeNumbers dicke_numbers(const MeanFieldSystem& system, const VecC& y) {
  return dicke_numbers(system.spec, [&](const Monomial& m) {
    return value_of(system, y, m);
  });
}

MfSpectrum mf_spectrum(const MeanFieldSystem& system, const VecC& steady,
                       std::span<const double> taus,
                       std::span<const double> omegas) {
  if (taus.size() < 4) throw ValidationError("mf_spectrum: tau grid too short");
  const double dt = taus[1] - taus[0];
  for (size_t k = 1; k < taus.size(); ++k)
    if (std::abs((taus[k] - taus[k - 1]) - dt) > 1e-9 * dt)
      throw ValidationError("mf_spectrum: tau grid must be uniform");

  const ModelSpec& spec = system.spec;
  const int levels = spec.levels();

  // first-order symbols: a, adag, sigma1^{ab}
  std::vector<Monomial> firsts;
  firsts.push_back(photon_monomial(0, 1));
  firsts.push_back(photon_monomial(1, 0));
  for (int a = 0; a < levels; ++a)
    for (int b = 0; b < levels; ++b) firsts.push_back(sigma_monomial(1, a, b));
  const long v1 = static_cast<long>(firsts.size());
  auto first_index = [&](const Monomial& m) {
    for (long i = 0; i < v1; ++i)
      if (firsts[static_cast<size_t>(i)] == m) return i;
    return -1L;
  };

  auto ss_value = [&](const Monomial& m) { return value_of(system, steady, m); };
  const Complex a_ss = ss_value(photon_monomial(0, 1));

  // linearized regression generator: d w_X / dtau = A w + b
  MatC a_mat = MatC::Zero(v1, v1);
  VecC b = VecC::Zero(v1);
  for (long i = 0; i < v1; ++i) {
    const Polynomial rhs = adjoint_rhs(spec, firsts[static_cast<size_t>(i)]);
    for (const auto& [m, c] : rhs) {
      const int order = m.order();
      if (order == 0) {
        b(i) += c * a_ss;
      } else if (order == 1) {
        const long j = first_index(canonicalize(m));
        if (j < 0) throw ValidationError("mf_spectrum: unexpected symbol");
        a_mat(i, j) += c;
      } else if (order == 2) {
        // split the pair and close the triple <f0 f1 a> with steady values
        std::vector<Monomial> f;
        for (int k = 0; k < m.n_create; ++k) f.push_back(photon_monomial(1, 0));
        for (const auto& sf : m.sigmas)
          f.push_back(sigma_monomial(sf.tag, sf.a, sf.b));
        for (int k = 0; k < m.n_annihilate; ++k)
          f.push_back(photon_monomial(0, 1));
        const Monomial f0 = canonicalize(f[0]);
        const Monomial f1 = canonicalize(f[1]);
        a_mat(i, first_index(f1)) += c * ss_value(f0);
        a_mat(i, first_index(f0)) += c * ss_value(f1);
        b(i) += c * (a_ss * ss_value(canonicalize(m)) -
                     2.0 * ss_value(f0) * ss_value(f1) * a_ss);
      } else {
        throw ValidationError("mf_spectrum: first-order rhs with order > 2");
      }
    }
  }

  // initial condition w_X(0) = <X a>_ss
  VecC w(v1);
  const Monomial a_mono = photon_monomial(0, 1);
  for (long i = 0; i < v1; ++i) {
    const Polynomial p = mono_mul(firsts[static_cast<size_t>(i)], a_mono);
    Complex v = 0.0;
    for (const auto& [m, c] : p) v += c * ss_value(canonicalize(m));
    w(i) = v;
  }

  // affine propagation over the uniform grid via the augmented exponential
  MatC aug = MatC::Zero(v1 + 1, v1 + 1);
  aug.topLeftCorner(v1, v1) = a_mat;
  aug.topRightCorner(v1, 1) = b;
  const MatC e = (aug * dt).exp();

  MfSpectrum out;
  out.taus.assign(taus.begin(), taus.end());
  out.correlator.resize(taus.size());
  const long adag_idx = first_index(photon_monomial(1, 0));
  VecC state(v1 + 1);
  state.head(v1) = w;
  state(v1) = 1.0;
  // walk from tau=0, assuming taus[0] == 0 or an offset start
  if (taus[0] != 0.0) {
    MatC e0 = (aug * taus[0]).exp();
    state = e0 * state;
  }
  for (size_t k = 0; k < taus.size(); ++k) {
    if (k > 0) state = e * state;
    out.correlator[k] = state(adag_idx);
  }

  out.window_warning = std::abs(out.correlator.back()) >
                       1e-4 * std::max(1e-300, std::abs(out.correlator.front()));

  out.omegas.assign(omegas.begin(), omegas.end());
  out.samples.resize(omegas.size());
  for (size_t j = 0; j < omegas.size(); ++j) {
    Complex acc = 0.0;
    for (size_t k = 0; k < taus.size(); ++k) {
      const double wt = (k == 0 || k + 1 == taus.size()) ? 0.5 : 1.0;
      acc += wt * std::exp(Complex(0.0, -omegas[j] * taus[k])) * out.correlator[k];
    }
    out.samples[j] = 2.0 * spec.kappa * (acc * dt).real();
  }
  return out;
}

}  // namespace nvsr::cumulant
