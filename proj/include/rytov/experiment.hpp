#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rytov/diagnostics.hpp"
#include "rytov/forward.hpp"
#include "rytov/greens.hpp"
#include "rytov/inversion.hpp"
#include "rytov/model.hpp"

namespace rytov {

inline constexpr std::string_view kRevision = "rytov-disk 1.0.0";

/// Wall-clock seconds per named stage, in execution order.
using Timings = std::vector<std::pair<std::string, double>>;

/// Everything derived from a config that does not depend on data: grid, Green's
/// table, linearized map and its truncated inverse.
class Experiment {
 public:
  explicit Experiment(const ProblemConfig& cfg);

  const ProblemConfig& config() const { return table_.config(); }
  const RadialGrid& grid() const { return table_.grid(); }
  const GreensTable& table() const { return table_; }
  const LinearizedMap& map() const { return map_; }
  const TsvdInverse& inverse() const { return inverse_; }
  const Timings& timings() const { return timings_; }

 private:
  Timings timings_;
  GreensTable table_;
  LinearizedMap map_;
  TsvdInverse inverse_;
};

/// Layered-disk data for cfg; noisy when cfg.gamma > 0.
struct SyntheticData {
  BoundaryFields clean;
  BoundaryFields noisy;  ///< equals clean when gamma = 0
  BoundaryData psi_clean;
  BoundaryData psi;      ///< data handed to the inversion
  bool has_noise = false;
};

SyntheticData synthesize_data(const ProblemConfig& cfg);

struct ReconstructionRun {
  RadialProfile eta_true;
  RadialProfile eta_proj;
  Reconstruction result;
  std::vector<double> errors;  ///< rel_l2_error(eta^(N), eta_proj) for N = 1..order
};

ReconstructionRun run_reconstruction(const Experiment& exp, const BoundaryData& psi, int order);

/// Oracle comparison for one source order.
struct OracleRow {
  int alpha = 0;
  double u0 = 0.0;          ///< g_alpha(R, R)
  double u0_fd = 0.0;
  double u = 0.0;           ///< layered solution at the detector
  double u_fd = 0.0;
  double deviation = 0.0;   ///< max of the two relative deviations
};

struct Diagnosis {
  ConvergenceReport report;
  std::vector<OracleRow> oracle;
  double max_deviation = 0.0;
};

Diagnosis run_diagnosis(const Experiment& exp, int fd_points);

/// `alpha,psi` without noise, `alpha,psi_clean,psi_noisy` otherwise.
void write_forward_csv(std::ostream& os, const SyntheticData& data);
/// `r,eta_true,eta_proj,eta_1,..,eta_N,mu_a_N` with eta_j the partial sums eta^(j).
void write_reconstruction_csv(std::ostream& os, const RadialGrid& grid, const ReconstructionRun& run);
/// `order,rel_l2_error_vs_eta_proj`.
void write_error_csv(std::ostream& os, const std::vector<double>& errors);
/// `key,value` summary of the convergence report followed by a blank line and the
/// per-mode table `alpha,u0,u0_fd,u,u_fd,deviation,mu_alpha,nu_alpha`.
void write_diagnosis_csv(std::ostream& os, const Diagnosis& diag);

/// Reads a data CSV with a header row and `alpha` first. The last column is used, so
/// both forward layouts are accepted. Throws DomainError unless there are exactly
/// `expected` rows with alpha = 1..expected.
BoundaryData read_data_csv(std::istream& is, int expected);

/// Run record. format_manifest writes the config snapshot as loadable config text and
/// everything else as `#` comments, so the manifest itself reproduces the run.
struct RunManifest {
  std::string command;
  ProblemConfig config;
  std::string data_source;
  std::string prng{kNoiseAlgorithm};
  Vector singular_values;  ///< retained
  std::vector<double> errors;
  std::vector<std::string> notes;
  Timings timings;
  std::string revision{kRevision};
};

std::string format_manifest(const RunManifest& m);

}  // namespace rytov
