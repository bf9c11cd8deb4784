// rytov: forward data, inverse Rytov reconstruction and diagnostics for the layered disk.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rytov/csv.hpp"
#include "rytov/errors.hpp"
#include "rytov/experiment.hpp"
#include "rytov/greens.hpp"

namespace fs = std::filesystem;
using namespace rytov;

namespace {

constexpr int kMaxOrder = 8;

struct Overrides {
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  std::optional<int> order;
  std::optional<int> sv_count;
  std::optional<double> sv_threshold;
};

ProblemConfig load_with_overrides(const std::string& path, const Overrides& o) {
  ProblemConfig cfg = load_config(path);
  if (o.noise) cfg.gamma = *o.noise;
  if (o.seed) cfg.seed = *o.seed;
  if (o.order) cfg.order = *o.order;
  if (o.sv_count && o.sv_threshold) throw ConfigError("--sv-count and --sv-threshold are exclusive");
  if (o.sv_count) cfg.sv_policy = SvCount{*o.sv_count};
  if (o.sv_threshold) cfg.sv_policy = SvThreshold{*o.sv_threshold};
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse Rytov series for the radially symmetric disk"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides over;
  std::string out_path;
  std::string data_path;
  std::string name = "reconstruction";
  std::string greens_csv;
  bool synthetic = false;
  int fd_points = 10000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (key = value)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--sv-count", over.sv_count, "override: keep this many singular values");
    cmd->add_option("--sv-threshold", over.sv_threshold, "override: keep singular values above this");
  };

  CLI::App* fwd = app.add_subcommand("forward", "exact boundary data psi, optionally noisy");
  add_common(fwd);
  fwd->add_option("--noise", over.noise, "noise level gamma (overrides config)");
  fwd->add_option("--seed", over.seed, "PRNG seed (overrides config)");
  fwd->add_option("--out", out_path, "output CSV")->required();

  CLI::App* rec = app.add_subcommand("reconstruct", "inverse Rytov series reconstruction");
  add_common(rec);
  auto* data_opt = rec->add_option("--data", data_path, "psi CSV (alpha first, last column used)")
                       ->check(CLI::ExistingFile);
  auto* syn_opt = rec->add_flag("--synthetic", synthetic, "generate the data from the config");
  data_opt->excludes(syn_opt);
  rec->add_option("--order", over.order, "series order N (overrides config)")->check(CLI::Range(1, kMaxOrder));
  rec->add_option("--noise", over.noise, "noise level for --synthetic");
  rec->add_option("--seed", over.seed, "PRNG seed for --synthetic");
  rec->add_option("--out", out_path, "output directory")->required();
  rec->add_option("--name", name, "file stem, e.g. eta1_run");

  CLI::App* diag = app.add_subcommand("diagnose", "convergence constants and oracle comparison");
  add_common(diag);
  diag->add_option("--fd-points", fd_points, "finite-difference cells")->check(CLI::PositiveNumber);
  diag->add_option("--out", out_path, "report CSV (stdout if omitted)");
  diag->add_option("--greens-csv", greens_csv, "also dump every Green's function mode to this CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.command = command_line(argc, argv);

    if (fwd->parsed()) {
      const ProblemConfig cfg = load_with_overrides(config_path, over);
      const SyntheticData data = synthesize_data(cfg);
      const Experiment exp(cfg);
      write_file(out_path, render([&](std::ostream& os) { write_forward_csv(os, data); }));
      manifest.config = cfg;
      manifest.data_source = "layered disk, eta_a = " + format_real(cfg.eta_a);
      manifest.singular_values = exp.inverse().sigma;
      manifest.timings = exp.timings();
      manifest.timings.emplace_back(
          "total", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      write_file(out_path + ".manifest", format_manifest(manifest));
      std::cout << "wrote " << out_path << '\n';
      return 0;
    }

    if (rec->parsed()) {
      if (!synthetic && data_path.empty()) throw ConfigError("reconstruct needs --data or --synthetic");
      const ProblemConfig cfg = load_with_overrides(config_path, over);
      if (cfg.order > kMaxOrder) throw ConfigError("order above " + std::to_string(kMaxOrder));
      const Experiment exp(cfg);
      BoundaryData psi;
      if (synthetic) {
        psi = synthesize_data(cfg).psi;
        manifest.data_source = "synthetic";
      } else {
        std::ifstream in(data_path);
        if (!in) throw std::runtime_error("cannot read " + data_path);
        psi = read_data_csv(in, cfg.M_SD);
        manifest.data_source = data_path;
      }
      const auto t0 = std::chrono::steady_clock::now();
      const ReconstructionRun run = run_reconstruction(exp, psi, cfg.order);
      const double t_series = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      const fs::path dir(out_path);
      write_file(dir / (name + ".csv"),
                 render([&](std::ostream& os) { write_reconstruction_csv(os, exp.grid(), run); }));
      write_file(dir / (name + "_errors.csv"), render([&](std::ostream& os) { write_error_csv(os, run.errors); }));

      manifest.config = cfg;
      manifest.singular_values = exp.inverse().sigma;
      manifest.errors = run.errors;
      manifest.notes.push_back("term_ratio = " + format_real(run.result.term_ratio));
      manifest.notes.push_back("radius_product = " + format_real(run.result.radius_product));
      manifest.notes.push_back(std::string("divergence_suspected = ") +
                               (run.result.divergence_suspected ? "true" : "false"));
      manifest.timings = exp.timings();
      manifest.timings.emplace_back("series", t_series);
      manifest.timings.emplace_back(
          "total", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      write_file(dir / (name + "_manifest.txt"), format_manifest(manifest));

      for (std::size_t j = 0; j < run.errors.size(); ++j) {
        std::cout << "N=" << (j + 1) << " rel_l2_error=" << run.errors[j] << '\n';
      }
      if (run.result.divergence_suspected) {
        std::cout << "warning: inverse series convergence not supported (radius product "
                  << run.result.radius_product << ")\n";
      }
      return 0;
    }

    if (diag->parsed()) {
      const ProblemConfig cfg = load_with_overrides(config_path, over);
      const Experiment exp(cfg);
      const Diagnosis d = run_diagnosis(exp, fd_points);
      const std::string text = render([&](std::ostream& os) { write_diagnosis_csv(os, d); });
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_file(out_path, text);
      }
      if (!greens_csv.empty()) {
        write_file(greens_csv, render([&](std::ostream& os) {
                     for (int a = 0; a < exp.table().num_modes(); ++a) write_mode_csv(os, exp.table().mode(a), a == 0);
                   }));
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
