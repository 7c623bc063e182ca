#include "microprop/ising.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "microprop/error.hpp"

namespace microprop::ising {

double critical_temperature() {
  static const double tc = 2.0 * IsingParams::coupling / (IsingParams::boltzmann * std::log(1.0 + std::sqrt(2.0)));
  return tc;
}

SpinLattice SpinLattice::uniform(int n, int spin) {
  if (n <= 0) throw Error(Errc::InvalidArgument, "lattice size must be positive");
  if (spin != 1 && spin != -1) throw Error(Errc::InvalidArgument, "spin must be +1 or -1");
  return SpinLattice(n, std::vector<std::int8_t>(static_cast<std::size_t>(n) * n, static_cast<std::int8_t>(spin)));
}

SpinLattice SpinLattice::random(int n, Rng& rng) {
  if (n <= 0) throw Error(Errc::InvalidArgument, "lattice size must be positive");
  std::vector<std::int8_t> spins(static_cast<std::size_t>(n) * n);
  for (auto& s : spins) s = (rng.next() >> 63) ? 1 : -1;
  return SpinLattice(n, std::move(spins));
}

SpinLattice SpinLattice::checkerboard(int n) {
  if (n <= 0) throw Error(Errc::InvalidArgument, "lattice size must be positive");
  std::vector<std::int8_t> spins(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) spins[static_cast<std::size_t>(r) * n + c] = ((r + c) % 2 == 0) ? 1 : -1;
  return SpinLattice(n, std::move(spins));
}

SpinLattice SpinLattice::from_spins(int n, std::vector<std::int8_t> spins) {
  if (n <= 0 || spins.size() != static_cast<std::size_t>(n) * n)
    throw Error(Errc::InvalidArgument, "spin array does not match lattice size");
  for (auto s : spins)
    if (s != 1 && s != -1) throw Error(Errc::InvalidArgument, "spins must be +1 or -1");
  return SpinLattice(n, std::move(spins));
}

int SpinLattice::neighbour_sum(Site s) const {
  const int up = s.row == 0 ? n_ - 1 : s.row - 1;
  const int down = s.row == n_ - 1 ? 0 : s.row + 1;
  const int left = s.col == 0 ? n_ - 1 : s.col - 1;
  const int right = s.col == n_ - 1 ? 0 : s.col + 1;
  return at(up, s.col) + at(down, s.col) + at(s.row, left) + at(s.row, right);
}

std::int64_t IsingParams::attempt_count() const {
  if (attempts > 0) return attempts;
  const auto n = static_cast<std::int64_t>(size);
  return n * n * n;
}

double IsingParams::beta() const {
  if (std::isinf(temperature)) return 0.0;
  if (temperature == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (boltzmann * temperature);
}

void IsingParams::validate() const {
  if (size <= 0) throw Error(Errc::InvalidArgument, "lattice size must be positive");
  if (!(temperature >= 0.0)) throw Error(Errc::InvalidArgument, "temperature must be >= 0");
  if (attempts < 0) throw Error(Errc::InvalidArgument, "attempt count must be non-negative");
}

double IsingLabel::encoded() const { return temperature / (2.0 * critical_temperature()) * 255.0; }

IsingLabel IsingLabel::from_encoded(double encoded) {
  return IsingLabel{encoded / 255.0 * 2.0 * critical_temperature()};
}

double hamiltonian_energy(const SpinLattice& lattice) {
  // Each unordered bond counted once: right and down neighbour of every site.
  const int n = lattice.size();
  long long bonds = 0;
  for (int r = 0; r < n; ++r) {
    const int down = r == n - 1 ? 0 : r + 1;
    for (int c = 0; c < n; ++c) {
      const int right = c == n - 1 ? 0 : c + 1;
      bonds += lattice.at(r, c) * (lattice.at(r, right) + lattice.at(down, c));
    }
  }
  return -IsingParams::coupling * static_cast<double>(bonds);
}

double magnetization(const SpinLattice& lattice) {
  long long total = 0;
  for (auto s : lattice.spins()) total += s;
  return static_cast<double>(total) / static_cast<double>(lattice.spins().size());
}

int flip_energy_delta(const SpinLattice& lattice, Site site) {
  return 2 * static_cast<int>(IsingParams::coupling) * lattice.at(site.row, site.col) * lattice.neighbour_sum(site);
}

namespace {

// exp(-beta * dE) for the only positive energy changes on a square lattice.
struct AcceptanceTable {
  explicit AcceptanceTable(double beta) {
    for (int k = 0; k < 2; ++k) {
      const double de = 4.0 * (k + 1);
      prob[k] = std::isinf(beta) ? 0.0 : std::exp(-beta * de);
    }
  }
  double operator()(int de) const { return prob[de / 4 - 1]; }
  std::array<double, 2> prob{};
};

bool accept(int de, const AcceptanceTable& table, double draw) {
  return de <= 0 || draw < table(de);
}

}  // namespace

bool metropolis_attempt(SpinLattice& lattice, Site site, const IsingParams& params, double uniform_draw) {
  const int de = flip_energy_delta(lattice, site);
  if (!accept(de, AcceptanceTable(params.beta()), uniform_draw)) return false;
  lattice.flip(site);
  return true;
}

IsingRun run_ising(const IsingParams& params) {
  params.validate();
  Rng rng(params.seed);
  auto lattice = SpinLattice::random(params.size, rng);
  const AcceptanceTable table(params.beta());
  const auto n = static_cast<std::uint64_t>(params.size);
  const std::int64_t attempts = params.attempt_count();
  for (std::int64_t a = 0; a < attempts; ++a) {
    const Site site{static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n))};
    const int de = flip_energy_delta(lattice, site);
    // A uniform draw is consumed only for uphill moves.
    if (de <= 0 || accept(de, table, rng.uniform())) lattice.flip(site);
  }
  return IsingRun{std::move(lattice), IsingLabel{params.temperature}};
}

Image8 lattice_to_image(const SpinLattice& lattice) {
  const int n = lattice.size();
  Image8 image(n, n);
  for (std::size_t i = 0; i < lattice.spins().size(); ++i) image.pixels[i] = lattice.spins()[i] > 0 ? 255 : 0;
  return image;
}

SpinLattice image_to_lattice(const Image8& image) {
  if (image.rows != image.cols) throw Error(Errc::InvalidArgument, "spin image must be square");
  std::vector<std::int8_t> spins(image.pixels.size());
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const auto p = image.pixels[i];
    if (p != 0 && p != 255) throw Error(Errc::InvalidArgument, "spin image pixels must be 0 or 255");
    spins[i] = p == 255 ? 1 : -1;
  }
  return SpinLattice::from_spins(image.rows, std::move(spins));
}

}  // namespace microprop::ising
