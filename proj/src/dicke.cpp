#include "nvsr/dicke.hpp"

#include <cmath>

namespace nvsr {

namespace {

std::uint64_t pack(int jmk, int jmb, int nk, int nb) {
  return (static_cast<std::uint64_t>(jmk) << 48) |
         (static_cast<std::uint64_t>(jmb) << 32) |
         (static_cast<std::uint64_t>(nk) << 16) | static_cast<std::uint64_t>(nb);
}

// binom(n, k) as a double via a multiplicative loop (no cancellation).
double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Degeneracy of the J block for n spins, d = (2J+1)/(n/2+J+1) * binom(n, n/2-J),
// evaluated in the cancellation-free form.
double block_d(int n, int twoJ) {
  const int k = (n - twoJ) / 2;
  if (k < 0 || twoJ > n || ((n - twoJ) % 2) != 0) return 0.0;
  return (twoJ + 1.0) / (0.5 * (n + twoJ) + 1.0) * binomial(n, k);
}

// Clebsch-Gordan coefficient C^{J,M}_{J1, M-s; 1/2, s} for coupling a spin
// one-half (s = +-1/2, passed doubled) to J1 = J -+ 1/2. Condon-Shortley.
double half_spin_cg(int twoJ, int twoM, int twoJ1, int s2) {
  if (std::abs(twoM) > twoJ) return 0.0;
  const int twoM1 = twoM - s2;
  if (std::abs(twoM1) > twoJ1) return 0.0;
  const double denom = 2.0 * (twoJ1 + 1);
  if (twoJ == twoJ1 + 1) {
    if (s2 > 0) return std::sqrt(std::max(0.0, (twoJ1 + twoM + 1) / denom));
    return std::sqrt(std::max(0.0, (twoJ1 - twoM + 1) / denom));
  }
  if (twoJ == twoJ1 - 1) {
    if (s2 > 0) return -std::sqrt(std::max(0.0, (twoJ1 - twoM + 1) / denom));
    return std::sqrt(std::max(0.0, (twoJ1 + twoM + 1) / denom));
  }
  return 0.0;
}

// Per-side amplitude of the symmetrized local jump J -> J' through the
// (N-1)-spin intermediate J1. The channels move one spin down/up/flip-phase.
double side_amplitude(DickeChannel channel, int twoJ, int twoJp, int twoM,
                      int twoJ1) {
  switch (channel) {
    case DickeChannel::Emission:
      return half_spin_cg(twoJ, twoM, twoJ1, +1) *
             half_spin_cg(twoJp, twoM - 2, twoJ1, -1);
    case DickeChannel::Pump:
      return half_spin_cg(twoJ, twoM, twoJ1, -1) *
             half_spin_cg(twoJp, twoM + 2, twoJ1, +1);
    case DickeChannel::Dephasing:
      return half_spin_cg(twoJ, twoM, twoJ1, +1) *
                 half_spin_cg(twoJp, twoM, twoJ1, +1) -
             half_spin_cg(twoJ, twoM, twoJ1, -1) *
                 half_spin_cg(twoJp, twoM, twoJ1, -1);
    case DickeChannel::CavityCoupling:
      break;
  }
  return 0.0;
}

// Weight-transfer coefficient of a local channel between matrix elements:
// (J, M, M') -> (J', M+dM, M'+dM) with the channel's dM. N/d_J times the
// degeneracy-weighted product of the two side amplitudes.
double local_transfer(DickeChannel channel, int n, int twoJ, int twoJp, int twoM,
                      int twoMp) {
  const double dj = block_d(n, twoJ);
  if (dj <= 0.0) return 0.0;
  double sum = 0.0;
  for (int twoJ1 : {twoJ - 1, twoJ + 1}) {
    if (twoJ1 < 0 || twoJ1 > n - 1) continue;
    if (std::abs(twoJp - twoJ1) != 1) continue;
    const double d1 = block_d(n - 1, twoJ1);
    if (d1 <= 0.0) continue;
    sum += d1 * side_amplitude(channel, twoJ, twoJp, twoM, twoJ1) *
           side_amplitude(channel, twoJ, twoJp, twoMp, twoJ1);
  }
  return n * sum / dj;
}

// Collective ladder matrix elements J^-+ within a J block.
double a_minus(int twoJ, int twoM) {
  return 0.5 * std::sqrt(std::max<double>(
                   0.0, double(twoJ) * (twoJ + 2) - double(twoM) * (twoM - 2)));
}
double a_plus(int twoJ, int twoM) {
  return 0.5 * std::sqrt(std::max<double>(
                   0.0, double(twoJ) * (twoJ + 2) - double(twoM) * (twoM + 2)));
}

}  // namespace

int dicke_dimension(int n) {
  if (n < 1) throw DimensionError("dicke_dimension: n must be >= 1");
  if (n % 2 == 0) {
    const int half = n / 2;
    return (half + 1) * (half + 1);
  }
  return (n + 1) * (n + 3) / 4;
}

DickeBasis DickeBasis::build(int n) {
  if (n < 1) throw DimensionError("DickeBasis: n must be >= 1");
  DickeBasis basis;
  basis.n = n;
  for (int twoJ = n; twoJ >= 0; twoJ -= 2) {
    basis.jm_index_of_block.push_back(static_cast<int>(basis.jm.size()));
    basis.degeneracy.push_back(block_d(n, twoJ));
    for (int twoM = -twoJ; twoM <= twoJ; twoM += 2)
      basis.jm.emplace_back(twoJ, twoM);
  }
  return basis;
}

int DickeBasis::find(int twoJ, int twoM) const {
  if (twoJ < 0 || twoJ > n || ((n - twoJ) % 2) != 0) return -1;
  if (std::abs(twoM) > twoJ || ((twoJ - twoM) % 2) != 0) return -1;
  const int block = (n - twoJ) / 2;
  return jm_index_of_block[static_cast<size_t>(block)] + (twoM + twoJ) / 2;
}

double DickeBasis::block_degeneracy(int twoJ) const {
  if (twoJ < 0 || twoJ > n || ((n - twoJ) % 2) != 0)
    throw DimensionError("block_degeneracy: invalid 2J");
  return degeneracy[static_cast<size_t>((n - twoJ) / 2)];
}

std::vector<DickeTransition> collective_jump_rates(int n, int twoJ, int twoM,
                                                   DickeChannel channel) {
  const DickeBasis basis = DickeBasis::build(n);
  if (basis.find(twoJ, twoM) < 0)
    throw DimensionError("collective_jump_rates: (J, M) outside the triangle");

  std::vector<DickeTransition> out;
  if (channel == DickeChannel::CavityCoupling) {
    if (basis.find(twoJ, twoM - 2) >= 0)
      out.push_back({twoJ, twoM - 2, a_minus(twoJ, twoM)});
    if (basis.find(twoJ, twoM + 2) >= 0)
      out.push_back({twoJ, twoM + 2, a_plus(twoJ, twoM)});
    return out;
  }

  int dM = 0;
  if (channel == DickeChannel::Emission) dM = -2;
  if (channel == DickeChannel::Pump) dM = +2;
  for (int twoJp : {twoJ - 2, twoJ, twoJ + 2}) {
    if (basis.find(twoJp, twoM + dM) < 0) continue;
    const double c = local_transfer(channel, n, twoJ, twoJp, twoM, twoM);
    if (c != 0.0) out.push_back({twoJp, twoM + dM, c});
  }
  return out;
}

DickeSpace DickeSpace::build(int n, int n_max, int sector) {
  if (n_max < 1) throw DimensionError("DickeSpace: n_max must be >= 1");
  DickeSpace space;
  space.basis = DickeBasis::build(n);
  space.n_max = n_max;
  space.sector = sector;
  for (int k = 0; k < space.basis.dim(); ++k) {
    const auto [twoJ, twoM] = space.basis.jm[static_cast<size_t>(k)];
    for (int twoMp = -twoJ; twoMp <= twoJ; twoMp += 2) {
      const int b = space.basis.find(twoJ, twoMp);
      const int dm = (twoM - twoMp) / 2;
      for (int nk = 0; nk < n_max; ++nk) {
        const int nb = nk + dm - sector;
        if (nb < 0 || nb >= n_max) continue;
        space.index.emplace(pack(k, b, nk, nb),
                            static_cast<int>(space.elems.size()));
        space.elems.push_back({k, b, nk, nb});
      }
    }
  }
  return space;
}

int DickeSpace::find(int jmk, int jmb, int nk, int nb) const {
  const auto it = index.find(pack(jmk, jmb, nk, nb));
  return it == index.end() ? -1 : it->second;
}

long DickeSpace::first_diagonal() const {
  for (size_t i = 0; i < elems.size(); ++i) {
    const auto& e = elems[i];
    if (e[0] == e[1] && e[2] == e[3]) return static_cast<long>(i);
  }
  throw DimensionError("DickeSpace: no diagonal element in this sector");
}

DickeLiouvillian build_dicke_liouvillian(const ModelSpec& raw, int sector) {
  const ModelSpec spec = validate(raw);
  if (spec.scheme != LevelScheme::TwoLevel)
    throw ValidationError(
        "dicke backend requires the two-level scheme; use build_qme (exact) "
        "or the cumulant backend for multi-level models");
  if (!spec.detuning_overrides.empty())
    throw ValidationError(
        "dicke backend assumes identical emitters; per-emitter detunings "
        "need the exact backend");

  DickeSpace space = DickeSpace::build(spec.n_emitters, spec.n_max, sector);
  const int n = spec.n_emitters;
  const double gamma_down = spec.gamma_e1g1;
  const double gamma_up = spec.gamma_g1e1;
  const double chi_half = spec.chi_e1g1 / 2.0;

  std::vector<Triplet> triplets;
  triplets.reserve(space.elems.size() * 12);

  auto push = [&](int row, int col, Complex value) {
    if (row >= 0 && value != Complex(0.0, 0.0)) triplets.emplace_back(row, col, value);
  };

  for (int col = 0; col < space.dim(); ++col) {
    const auto& e = space.elems[static_cast<size_t>(col)];
    const int jmk = e[0], jmb = e[1], nk = e[2], nb = e[3];
    const auto [twoJ, twoM] = space.basis.jm[static_cast<size_t>(jmk)];
    const int twoMp = space.basis.jm[static_cast<size_t>(jmb)].second;
    const double m_ket = 0.5 * twoM, m_bra = 0.5 * twoMp;

    // Diagonal: Hamiltonian phases and all anticommutator losses.
    Complex diag = -kI * (spec.omega_e1g1 * (m_ket - m_bra) +
                          spec.omega_c * (nk - nb));
    diag -= 0.5 * spec.kappa * (nk + nb);
    diag -= gamma_down * (0.5 * n + 0.5 * (m_ket + m_bra));
    diag -= gamma_up * (0.5 * n - 0.5 * (m_ket + m_bra));
    diag -= chi_half * n;
    push(col, col, diag);

    // Collective coupling g (J+ a + a^dag J-), ket side.
    if (spec.g != 0.0) {
      if (nk >= 1) {
        const int row = space.find(space.basis.find(twoJ, twoM + 2), jmb, nk - 1, nb);
        push(row, col, -kI * spec.g * a_plus(twoJ, twoM) * std::sqrt(double(nk)));
      }
      if (nk + 1 < space.n_max) {
        const int row = space.find(space.basis.find(twoJ, twoM - 2), jmb, nk + 1, nb);
        push(row, col, -kI * spec.g * a_minus(twoJ, twoM) * std::sqrt(double(nk + 1)));
      }
      // bra side
      if (nb >= 1) {
        const int row = space.find(jmk, space.basis.find(twoJ, twoMp + 2), nk, nb - 1);
        push(row, col, kI * spec.g * a_plus(twoJ, twoMp) * std::sqrt(double(nb)));
      }
      if (nb + 1 < space.n_max) {
        const int row = space.find(jmk, space.basis.find(twoJ, twoMp - 2), nk, nb + 1);
        push(row, col, kI * spec.g * a_minus(twoJ, twoMp) * std::sqrt(double(nb + 1)));
      }
    }

    // Photon loss gain a rho a^dag.
    if (nk >= 1 && nb >= 1) {
      const int row = space.find(jmk, jmb, nk - 1, nb - 1);
      push(row, col, spec.kappa * std::sqrt(double(nk) * double(nb)));
    }

    // Local channel gains mix neighboring J blocks.
    struct ChannelSpec {
      DickeChannel channel;
      double rate;
      int dM;
    };
    const ChannelSpec channels[] = {
        {DickeChannel::Emission, gamma_down, -2},
        {DickeChannel::Pump, gamma_up, +2},
        {DickeChannel::Dephasing, chi_half, 0},
    };
    for (const auto& ch : channels) {
      if (ch.rate == 0.0) continue;
      for (int twoJp : {twoJ - 2, twoJ, twoJ + 2}) {
        const int jmk_to = space.basis.find(twoJp, twoM + ch.dM);
        const int jmb_to = space.basis.find(twoJp, twoMp + ch.dM);
        if (jmk_to < 0 || jmb_to < 0) continue;
        const double t =
            local_transfer(ch.channel, n, twoJ, twoJp, twoM, twoMp);
        if (t == 0.0) continue;
        const int row = space.find(jmk_to, jmb_to, nk, nb);
        push(row, col, ch.rate * t);
      }
    }
  }

  SpMat l(space.dim(), space.dim());
  l.setFromTriplets(triplets.begin(), triplets.end());
  l.makeCompressed();
  return DickeLiouvillian{std::move(space), std::move(l), spec};
}

DickePopulations dicke_populations(const DickeSpace& space, const VecC& state) {
  if (state.size() != space.dim())
    throw SignatureError("dicke_populations: state dimension mismatch");
  DickePopulations out;
  std::vector<double> acc(static_cast<size_t>(space.basis.dim()), 0.0);
  for (int i = 0; i < space.dim(); ++i) {
    const auto& e = space.elems[static_cast<size_t>(i)];
    if (e[0] == e[1] && e[2] == e[3])
      acc[static_cast<size_t>(e[0])] += state(i).real();
  }
  for (int k = 0; k < space.basis.dim(); ++k) {
    const auto [twoJ, twoM] = space.basis.jm[static_cast<size_t>(k)];
    out.entries.emplace_back(twoJ, twoM, acc[static_cast<size_t>(k)]);
  }
  return out;
}

double DickePopulations::sum() const {
  double s = 0.0;
  for (const auto& [j, m, p] : entries) s += p;
  return s;
}

VecC dicke_ground_state(const DickeSpace& space) {
  if (space.sector != 0)
    throw ValidationError("state builders need the sector-0 space");
  VecC v = VecC::Zero(space.dim());
  const int jm = space.basis.find(space.basis.n, -space.basis.n);
  v(space.find(jm, jm, 0, 0)) = 1.0;
  return v;
}

VecC dicke_inverted_state(const DickeSpace& space) {
  if (space.sector != 0)
    throw ValidationError("state builders need the sector-0 space");
  VecC v = VecC::Zero(space.dim());
  const int jm = space.basis.find(space.basis.n, space.basis.n);
  v(space.find(jm, jm, 0, 0)) = 1.0;
  return v;
}

VecC dicke_trace_row(const DickeSpace& space) {
  VecC row = VecC::Zero(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const auto& e = space.elems[static_cast<size_t>(i)];
    if (e[0] == e[1] && e[2] == e[3]) row(i) = 1.0;
  }
  return row;
}

double dicke_photon_number(const DickeSpace& space, const VecC& state) {
  double out = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    const auto& e = space.elems[static_cast<size_t>(i)];
    if (e[0] == e[1] && e[2] == e[3]) out += e[2] * state(i).real();
  }
  return out;
}

double dicke_jz(const DickeSpace& space, const VecC& state) {
  double out = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    const auto& e = space.elems[static_cast<size_t>(i)];
    if (e[0] == e[1] && e[2] == e[3])
      out += 0.5 * space.basis.jm[static_cast<size_t>(e[0])].second *
             state(i).real();
  }
  return out;
}

double dicke_excited_population(const DickeSpace& space, const VecC& state) {
  return (0.5 * space.basis.n + dicke_jz(space, state)) / space.basis.n;
}

VecC dicke_g2_seed(const DickeSpace& space, const VecC& state) {
  VecC seed = VecC::Zero(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const auto& e = space.elems[static_cast<size_t>(i)];
    if (e[2] + 1 < space.n_max && e[3] + 1 < space.n_max) {
      const int src = space.find(e[0], e[1], e[2] + 1, e[3] + 1);
      if (src >= 0)
        seed(i) = std::sqrt(double(e[2] + 1) * double(e[3] + 1)) * state(src);
    }
  }
  return seed;
}

Complex dicke_number_expectation(const DickeSpace& space, const VecC& state) {
  Complex out = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    const auto& e = space.elems[static_cast<size_t>(i)];
    if (e[0] == e[1] && e[2] == e[3]) out += double(e[2]) * state(i);
  }
  return out;
}

VecC dicke_steady_state(const DickeLiouvillian& l, const SteadyOptions& options) {
  SteadyOptions opts = options;
  if (opts.fallback_horizon == 0.0) {
    double min_rate = l.spec.kappa;
    for (double r : {l.spec.gamma_e1g1, l.spec.gamma_g1e1})
      if (r > 0.0) min_rate = std::min(min_rate, r);
    opts.fallback_horizon = 50.0 / min_rate;
  }
  const VecC trace = dicke_trace_row(l.space);
  SteadyResult r =
      steady_state_vec(l.matrix, trace, l.space.first_diagonal(), opts);
  return r.state;
}

}  // namespace nvsr
