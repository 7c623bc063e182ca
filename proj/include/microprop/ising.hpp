#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "microprop/image.hpp"
#include "microprop/rng.hpp"

namespace microprop::ising {

/// Critical (Curie) temperature of the square-lattice model, 2/ln(1+sqrt 2).
double critical_temperature();

struct Site {
  int row = 0;
  int col = 0;
};

/// N x N lattice of +/-1 spins with periodic neighbours.
class SpinLattice {
 public:
  static SpinLattice uniform(int n, int spin);
  static SpinLattice random(int n, Rng& rng);
  static SpinLattice checkerboard(int n);
  /// Throws InvalidArgument unless `spins` holds n*n entries each +/-1.
  static SpinLattice from_spins(int n, std::vector<std::int8_t> spins);

  int size() const { return n_; }
  int at(int row, int col) const { return spins_[index(row, col)]; }
  void flip(Site s) { spins_[index(s.row, s.col)] = static_cast<std::int8_t>(-spins_[index(s.row, s.col)]); }
  /// Sum of the four periodic nearest neighbours of a site.
  int neighbour_sum(Site s) const;
  const std::vector<std::int8_t>& spins() const { return spins_; }

  bool operator==(const SpinLattice&) const = default;

 private:
  SpinLattice(int n, std::vector<std::int8_t> spins) : n_(n), spins_(std::move(spins)) {}
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * n_ + col; }

  int n_ = 0;
  std::vector<std::int8_t> spins_;
};

/// Model parameters. Coupling, field, moment and Boltzmann constant are fixed
/// (J = 1, h = 0, kB = 1); only temperature, lattice size, seed and the
/// number of attempts vary.
struct IsingParams {
  static constexpr double coupling = 1.0;
  static constexpr double field = 0.0;
  static constexpr double moment = 0.0;
  static constexpr double boltzmann = 1.0;

  int size = 64;
  double temperature = 1.0;  ///< T >= 0; +inf means beta = 0
  std::uint64_t seed = 0;
  /// Single-site attempts; 0 selects the default N^3.
  std::int64_t attempts = 0;

  std::int64_t attempt_count() const;
  double beta() const;
  /// Throws InvalidArgument on negative/NaN temperature or non-positive size.
  void validate() const;
};

struct IsingLabel {
  double temperature = 0.0;
  /// T mapped linearly from [0, 2 Tc] to [0, 255].
  double encoded() const;
  static IsingLabel from_encoded(double encoded);
};

double hamiltonian_energy(const SpinLattice& lattice);
double magnetization(const SpinLattice& lattice);

/// Energy change of flipping one site, from its four bonds only.
int flip_energy_delta(const SpinLattice& lattice, Site site);

/// Metropolis acceptance test with a caller-supplied uniform draw in [0,1).
/// Returns true and flips the site when accepted. At T = 0 any move with
/// dE > 0 is rejected.
bool metropolis_attempt(SpinLattice& lattice, Site site, const IsingParams& params, double uniform_draw);

struct IsingRun {
  SpinLattice lattice;
  IsingLabel label;
};

/// Random start, then attempt_count() random-site Metropolis attempts.
IsingRun run_ising(const IsingParams& params);

Image8 lattice_to_image(const SpinLattice& lattice);
/// Inverse of lattice_to_image; pixels must be 0 or 255.
SpinLattice image_to_lattice(const Image8& image);

}  // namespace microprop::ising
