#include "rytov/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

#include "rytov/csv.hpp"
#include "rytov/errors.hpp"

namespace rytov {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GreensTable timed_table(const ProblemConfig& cfg, Timings& timings) {
  const auto start = Clock::now();
  GreensTable table = build_greens_table(cfg, make_grid(cfg));
  timings.emplace_back("greens_table", seconds_since(start));
  return table;
}

TsvdInverse timed_tsvd(const LinearizedMap& map, const SvPolicy& policy, Timings& timings) {
  const auto start = Clock::now();
  TsvdInverse inv = build_tsvd(map, policy);
  timings.emplace_back("tsvd", seconds_since(start));
  return inv;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, int line_no) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("data csv line " + std::to_string(line_no) + ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

Experiment::Experiment(const ProblemConfig& cfg)
    : table_(timed_table(cfg, timings_)),
      map_(assemble_j1(table_)),
      inverse_(timed_tsvd(map_, cfg.sv_policy, timings_)) {}

SyntheticData synthesize_data(const ProblemConfig& cfg) {
  cfg.validate();
  SyntheticData data;
  data.clean = exact_boundary_fields(cfg);
  data.psi_clean = exact_boundary_data(cfg);
  data.has_noise = cfg.gamma > 0.0;
  if (data.has_noise) {
    auto [u0, u] = add_noise(data.clean.u0, data.clean.u, cfg.gamma, cfg.seed);
    data.noisy = {std::move(u0), std::move(u)};
    data.psi = log_ratio_data(data.noisy.u0, data.noisy.u);
  } else {
    data.noisy = data.clean;
    data.psi = data.psi_clean;
  }
  return data;
}

ReconstructionRun run_reconstruction(const Experiment& exp, const BoundaryData& psi, int order) {
  ReconstructionRun run;
  run.eta_true = true_profile(exp.config(), exp.grid());
  run.eta_proj = projected_truth(run.eta_true, exp.map(), exp.inverse());
  run.result = reconstruct(psi, exp.table(), exp.inverse(), order);
  for (const RadialProfile& p : run.result.partial_sums) {
    run.errors.push_back(rel_l2_error(p, run.eta_proj, exp.grid()));
  }
  return run;
}

Diagnosis run_diagnosis(const Experiment& exp, int fd_points) {
  const ProblemConfig& cfg = exp.config();
  Diagnosis diag;
  diag.report = estimate_mu_nu(cfg, exp.table());
  const BoundaryFields fields = exact_boundary_fields(cfg);
  const StepProfile none{};
  const StepProfile layered = layered_step(cfg);
  for (int a = 1; a <= cfg.M_SD; ++a) {
    OracleRow row;
    row.alpha = a;
    row.u0 = fields.u0(a - 1);
    row.u = fields.u(a - 1);
    row.u0_fd = fd_oracle(a, none, cfg, fd_points);
    row.u_fd = fd_oracle(a, layered, cfg, fd_points);
    row.deviation = std::max(std::abs(row.u0_fd - row.u0) / std::abs(row.u0),
                             std::abs(row.u_fd - row.u) / std::abs(row.u));
    diag.max_deviation = std::max(diag.max_deviation, row.deviation);
    diag.oracle.push_back(row);
  }
  return diag;
}

void write_forward_csv(std::ostream& os, const SyntheticData& data) {
  os << (data.has_noise ? "alpha,psi_clean,psi_noisy\n" : "alpha,psi\n");
  for (Eigen::Index i = 0; i < data.psi.values.size(); ++i) {
    os << (i + 1) << ',' << format_real(data.psi_clean.values(i));
    if (data.has_noise) os << ',' << format_real(data.psi.values(i));
    os << '\n';
  }
}

void write_reconstruction_csv(std::ostream& os, const RadialGrid& grid, const ReconstructionRun& run) {
  const auto& sums = run.result.partial_sums;
  os << "r,eta_true,eta_proj";
  for (std::size_t j = 1; j <= sums.size(); ++j) os << ",eta_" << j;
  os << ",mu_a_" << sums.size() << '\n';
  for (int i = 0; i < grid.size(); ++i) {
    os << format_real(grid.point(i)) << ',' << format_real(run.eta_true.values(i)) << ','
       << format_real(run.eta_proj.values(i));
    for (const RadialProfile& p : sums) os << ',' << format_real(p.values(i));
    os << ',' << format_real(run.result.mu_a.values(i)) << '\n';
  }
}

void write_error_csv(std::ostream& os, const std::vector<double>& errors) {
  os << "order,rel_l2_error_vs_eta_proj\n";
  for (std::size_t j = 0; j < errors.size(); ++j) os << (j + 1) << ',' << format_real(errors[j]) << '\n';
}

void write_diagnosis_csv(std::ostream& os, const Diagnosis& diag) {
  const ConvergenceReport& rep = diag.report;
  os << "key,value\n";
  os << "mu," << format_real(rep.mu) << '\n';
  os << "nu," << format_real(rep.nu) << '\n';
  os << "eta_norm," << format_real(rep.eta_norm) << '\n';
  os << "radius_product," << format_real(rep.eta_norm * (rep.mu + rep.nu)) << '\n';
  os << "forward_radius_ok," << (rep.forward_radius_ok ? "true" : "false") << '\n';
  os << "max_oracle_deviation," << format_real(diag.max_deviation) << '\n';
  os << '\n';
  os << "alpha,u0,u0_fd,u,u_fd,deviation,mu_alpha,nu_alpha\n";
  for (std::size_t i = 0; i < diag.oracle.size(); ++i) {
    const OracleRow& row = diag.oracle[i];
    os << row.alpha << ',' << format_real(row.u0) << ',' << format_real(row.u0_fd) << ','
       << format_real(row.u) << ',' << format_real(row.u_fd) << ',' << format_real(row.deviation) << ','
       << format_real(rep.mu_per_mode[i]) << ',' << format_real(rep.nu_per_mode[i]) << '\n';
  }
}

BoundaryData read_data_csv(std::istream& is, int expected) {
  std::string line;
  int line_no = 0;
  bool header = false;
  std::vector<double> values;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (!header) {
      if (fields.empty() || fields.front() != "alpha") {
        throw DomainError("data csv: header must start with 'alpha'");
      }
      header = true;
      continue;
    }
    if (fields.size() < 2) throw DomainError("data csv line " + std::to_string(line_no) + ": too few columns");
    const int alpha = parse_field<int>(fields.front(), line_no);
    if (alpha != static_cast<int>(values.size()) + 1) {
      throw DomainError("data csv line " + std::to_string(line_no) + ": expected alpha " +
                        std::to_string(values.size() + 1));
    }
    values.push_back(parse_field<double>(fields.back(), line_no));
  }
  if (!header) throw DomainError("data csv: empty input");
  if (static_cast<int>(values.size()) != expected) {
    throw DomainError("data csv: " + std::to_string(values.size()) + " rows but M_SD = " +
                      std::to_string(expected));
  }
  return {Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()))};
}

std::string format_manifest(const RunManifest& m) {
  std::ostringstream os;
  os << "# revision: " << m.revision << '\n';
  os << "# command: " << m.command << '\n';
  os << "# data: " << m.data_source << '\n';
  os << "# prng: " << m.prng << " seed=" << m.config.seed << '\n';
  os << "# retained_singular_values: " << m.singular_values.size() << '\n';
  for (Eigen::Index i = 0; i < m.singular_values.size(); ++i) {
    os << "#   sigma_" << (i + 1) << " = " << format_real(m.singular_values(i)) << '\n';
  }
  if (!m.errors.empty()) {
    os << "# rel_l2_error_vs_eta_proj:\n";
    for (std::size_t j = 0; j < m.errors.size(); ++j) {
      os << "#   order " << (j + 1) << " = " << format_real(m.errors[j]) << '\n';
    }
  }
  for (const std::string& note : m.notes) os << "# " << note << '\n';
  for (const auto& [stage, secs] : m.timings) os << "# time_" << stage << "_s = " << format_real(secs) << '\n';
  os << format_config(m.config);
  return os.str();
}

}  // namespace rytov
