#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "nhqm/matrixcore.hpp"

namespace nhqm {

// ---- run configuration ----
//
// Shared parameter set for all subcommands.  Defaults follow the driven-
// oscillator experiment (hbar = m = 1, omega = 0.5, tau = 10); the example1
// subcommand overrides omega to 1.0 when the flag is not given, because its
// truncation-convergence gate needs the stiffer oscillator (see README).
struct RunConfig {
  Eigen::Index N = 64;
  double hbar = 1.0;
  double m = 1.0;
  double omega = 0.5;
  double eps = 0.1;
  double eta = 0.3;
  double tau = 10.0;
  double dt = 1e-3;
  double t_end = 10.0;
  double tol = 1e-10;
  std::string out;
  std::uint64_t seed = 12345;
};

// Throws ConfigInvalid on out-of-range parameters (dt >= t_end, N < 2, ...).
void validate(const RunConfig& cfg);

// ---- example 1: cubic PT-symmetric oscillator ----
struct Example1Report {
  std::vector<double> h_levels;          // convergence-gated levels of H
  std::vector<double> hermitized_levels; // levels of hermitize(H): equal to
                                         // h_levels by similarity invariance
  std::vector<double> k_levels;          // gated levels of the perturbative K
  bool reality = false;                  // lowest levels real within 1e-8 hbar omega
  double dist = 0.0;                     // max level gap |E_H - E_K| at eps
  double dist_half = 0.0;                // same at eps / 2
  double ratio = 0.0;                    // dist / dist_half
  double exponent = 0.0;                 // log2(ratio)
};
Example1Report run_example1(const RunConfig& cfg);

// ---- example 2: imaginary gauge field ----
struct Example2Report {
  double bch_block_residual = 0.0;         // max|BCH2 - exact| on lowest N/4 block
  double dehermitize_block_residual = 0.0; // max|dehermitize(K) - H| same block
  double isospectral_residual = 0.0;       // max|E_H - E_K| lowest N/4 levels
  double pseudo_herm_block_residual = 0.0; // H^dag g - g H, lowest block
  double pseudo_herm_full_residual = 0.0;  // full matrix (corner-dominated)
  double max_imag_lowlying = 0.0;          // |Im E| over the lowest N/4 levels of H
};
Example2Report run_example2(const RunConfig& cfg);

// ---- example 3: accelerating frame (trajectory experiment) ----
struct Example3Result {
  std::vector<double> times;
  std::vector<double> x_herm, x_force, x_naive;
  std::vector<double> norm_herm, norm_nonherm;
  double herm_vs_closed = 0.0;     // max |x_herm - alpha cos(omega t)|
  double frame_gap = 0.0;          // max |x_force - x_herm|
  double naive_gap = 0.0;          // max |x_naive - x_herm|
  double force_norm_drift = 0.0;   // max |<psi|Lambda psi> - 1|, force run
  double naive_norm_drift_end = 0.0;  // |norm_nonherm(t_end) - 1|
};
Example3Result run_example3(const RunConfig& cfg);

// ---- measurement demonstration ----
struct MeasureReport {
  RealMatrix identity_residuals;  // biorthogonal repeatability table
  RealMatrix naive_residuals;     // contrast table with <psi_m|psi_n>
  RealMatrix herm_identity;       // hermitian control, repeatability table
  RealMatrix herm_naive;          // hermitian control, naive table
  double norm_residual = 0.0;     // composite-metric unitarity of the map
};
MeasureReport run_measure(const RunConfig& cfg);

// ---- printing wrappers ----
//
// Each prints its report (tables plus one `ok <gate>` / `FAIL:<gate>:<detail>`
// line per internal gate) and returns the number of failed gates.
int cmd_example1(const RunConfig& cfg, std::ostream& os);
int cmd_example2(const RunConfig& cfg, std::ostream& os);
int cmd_example3(const RunConfig& cfg, std::ostream& os);
int cmd_measure(const RunConfig& cfg, std::ostream& os);

// Full property battery (biorthogonality, pseudo-hermiticity, conservation,
// BCH, models, measurement, integrator checks).  Same gate-line protocol.
int run_verify(const RunConfig& cfg, std::ostream& os);

// ---- property-suite support ----
//
// Deterministic random families (resampled until well-conditioned).
ComplexMatrix random_diagonalizable(std::mt19937_64& rng, Eigen::Index dim,
                                    double max_cond = 1e5);
ComplexMatrix random_real_spectrum(std::mt19937_64& rng, Eigen::Index dim,
                                   double min_gap = 1e-3);

// ---- entry point ----
//
// Parses argv (subcommands example1 / example2 / example3 / measure / verify,
// flags --dim --epsilon --eta --tau --dt --t-end --omega --mass --hbar --out
// --seed --tol, optional --config file with `key = value` lines) and runs the
// selected subcommand.  Returns the process exit code: 0 iff all gates pass.
int cli_main(int argc, char** argv);

}  // namespace nhqm
