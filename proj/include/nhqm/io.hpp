#pragma once

#include <string>
#include <vector>

#include "nhqm/matrixcore.hpp"
#include "nhqm/measurement.hpp"

namespace nhqm {

// ---- matrix text format ----
//
// First line: dim.  Then dim^2 lines "re im" in row-major order.  UTF-8, LF
// line endings.  Throws Error on unreadable files or malformed content.
void write_matrix(const std::string& path, const ComplexMatrix& m);
ComplexMatrix read_matrix(const std::string& path);

// ---- trajectory CSV ----
//
// Header `t,x_herm,x_nonherm_force,x_nonherm_naive,norm_herm,norm_nonherm`,
// one row per grid point, 15 significant digits.  All columns must share the
// time grid's length.
void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<double>& x_herm,
                          const std::vector<double>& x_force,
                          const std::vector<double>& x_naive,
                          const std::vector<double>& norm_herm,
                          const std::vector<double>& norm_nonherm);

// ---- measurement report CSV ----
//
// Columns n,m,overlap_psi,overlap_phi_psi,pointer_overlap,residual: the raw
// overlap magnitudes |<psi_m|psi_n>|, |<phi_m|psi_n>|, |<A_m|A_n>| and the
// repeatability residual for each level pair.
void write_measure_csv(const std::string& path, const BiorthogonalSystem& sys,
                       const ApparatusModel& app, const RepeatabilityReport& report);

}  // namespace nhqm
