#include "nhqm/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

}  // namespace

// ---- matrix text format ----

void write_matrix(const std::string& path, const ComplexMatrix& m) {
  require_square(m, "write_matrix");
  std::ofstream out = open_out(path);
  out << std::setprecision(17);
  out << m.rows() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << m(i, j).real() << " " << m(i, j).imag() << "\n";
    }
  }
  if (!out) throw Error("write failed: " + path);
}

ComplexMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);

  Eigen::Index dim = 0;
  if (!(in >> dim) || dim < 1) {
    throw Error("malformed matrix file (bad dimension): " + path);
  }
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im)) {
        throw Error("malformed matrix file (truncated entries): " + path);
      }
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

// ---- trajectory CSV ----

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<double>& x_herm,
                          const std::vector<double>& x_force,
                          const std::vector<double>& x_naive,
                          const std::vector<double>& norm_herm,
                          const std::vector<double>& norm_nonherm) {
  const std::size_t n = times.size();
  if (x_herm.size() != n || x_force.size() != n || x_naive.size() != n ||
      norm_herm.size() != n || norm_nonherm.size() != n) {
    throw DimensionMismatch("write_trajectory_csv: column lengths differ");
  }
  std::ofstream out = open_out(path);
  out << std::setprecision(15);
  out << "t,x_herm,x_nonherm_force,x_nonherm_naive,norm_herm,norm_nonherm\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << times[i] << "," << x_herm[i] << "," << x_force[i] << "," << x_naive[i]
        << "," << norm_herm[i] << "," << norm_nonherm[i] << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

// ---- measurement report CSV ----

void write_measure_csv(const std::string& path, const BiorthogonalSystem& sys,
                       const ApparatusModel& app, const RepeatabilityReport& report) {
  const Eigen::Index dim = sys.dim();
  if (static_cast<Eigen::Index>(app.pointers.size()) != dim) {
    throw PointerCountMismatch("write_measure_csv: one pointer per level required");
  }
  std::ofstream out = open_out(path);
  out << std::setprecision(15);
  out << "n,m,overlap_psi,overlap_phi_psi,pointer_overlap,residual\n";
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index m = 0; m < dim; ++m) {
      const double overlap_psi =
          std::abs(sys.right.col(m).dot(sys.right.col(n)));
      const double overlap_phi_psi =
          std::abs((sys.left.row(m) * sys.right.col(n)).value());
      const double pointer_overlap =
          std::abs(app.pointers[static_cast<std::size_t>(m)].dot(
              app.pointers[static_cast<std::size_t>(n)]));
      out << n << "," << m << "," << overlap_psi << "," << overlap_phi_psi << ","
          << pointer_overlap << "," << report.identity_residuals(m, n) << "\n";
    }
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace nhqm
