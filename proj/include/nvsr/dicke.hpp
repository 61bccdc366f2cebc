#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nvsr/models.hpp"
#include "nvsr/solvers.hpp"
#include "nvsr/types.hpp"

namespace nvsr {

/// Number of (J, M) pairs for N two-level emitters:
/// (N/2+1)^2 for even N, (N+1)(N+3)/4 for odd N.
int dicke_dimension(int n);

/// Enumeration of the |J, M> ladder, J = N/2, N/2-1, ..., 0 or 1/2.
/// Angular momenta are stored doubled (2J, 2M) to keep integer keys.
struct DickeBasis {
  int n = 0;
  std::vector<std::pair<int, int>> jm;  // (2J, 2M), J descending, M ascending
  std::vector<int> jm_index_of_block;   // first jm index per J block
  std::vector<double> degeneracy;       // d(J, N) per J block (J descending)

  static DickeBasis build(int n);
  int dim() const { return static_cast<int>(jm.size()); }
  int find(int twoJ, int twoM) const;  // -1 when outside the triangle
  double block_degeneracy(int twoJ) const;
};

enum class DickeChannel { Emission, Pump, Dephasing, CavityCoupling };

struct DickeTransition {
  int twoJ_to = 0;
  int twoM_to = 0;
  /// Population-transfer weight for the local channels; collective ladder
  /// matrix element sqrt(J(J+1)-M(M-+1)) for CavityCoupling.
  double coefficient = 0.0;
};

/// Jump structure out of |J, M>: local channels couple J' in {J-1, J, J+1}
/// with M shifts -1 (emission), +1 (pump), 0 (dephasing); the collective
/// cavity coupling stays within the J block.
std::vector<DickeTransition> collective_jump_rates(int n, int twoJ, int twoM,
                                                   DickeChannel channel);

/// Basis of the permutation-invariant density sector: elements
/// (jm_ket, jm_bra, n_ket, n_bra) with J_ket = J_bra and fixed
/// "excitation offset" (M - M') + (n - n'); all master-equation channels
/// conserve the offset, and every population-type observable lives in
/// sector 0.
struct DickeSpace {
  DickeBasis basis;
  int n_max = 0;
  int sector = 0;
  std::vector<std::array<int, 4>> elems;  // jm_ket, jm_bra, n_ket, n_bra
  std::unordered_map<std::uint64_t, int> index;

  static DickeSpace build(int n, int n_max, int sector = 0);
  int dim() const { return static_cast<int>(elems.size()); }
  int find(int jmk, int jmb, int nk, int nb) const;
  long first_diagonal() const;  // index of the first (M=M', n=n') element
};

struct DickeLiouvillian {
  DickeSpace space;
  SpMat matrix;
  ModelSpec spec;
};

/// Permutation-invariant Liouvillian of the two-level master equation on
/// (DickeBasis x Fock); other schemes are directed to build_qme / cumulant.
DickeLiouvillian build_dicke_liouvillian(const ModelSpec& spec, int sector = 0);

/// map (J, M) -> occupation probability (photon space traced out).
struct DickePopulations {
  std::vector<std::tuple<int, int, double>> entries;  // (2J, 2M, p)
  double sum() const;
};

DickePopulations dicke_populations(const DickeSpace& space, const VecC& state);

// Sector-0 state builders (weights representation, trace 1).
VecC dicke_ground_state(const DickeSpace& space);
VecC dicke_inverted_state(const DickeSpace& space);

// Observable functionals and expectation helpers.
VecC dicke_trace_row(const DickeSpace& space);
double dicke_photon_number(const DickeSpace& space, const VecC& state);
double dicke_jz(const DickeSpace& space, const VecC& state);
/// Per-emitter excited population (N/2 + <Jz>)/N.
double dicke_excited_population(const DickeSpace& space, const VecC& state);

/// g2 kernel seed a rho a^dag (stays within the same sector).
VecC dicke_g2_seed(const DickeSpace& space, const VecC& state);
/// tr(a^dag a x) functional.
Complex dicke_number_expectation(const DickeSpace& space, const VecC& state);

/// Steady state of a Dicke-space generator (sector 0).
VecC dicke_steady_state(const DickeLiouvillian& l, const SteadyOptions& options = {});

}  // namespace nvsr
