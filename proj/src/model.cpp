#include "rytov/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rytov/csv.hpp"
#include "rytov/errors.hpp"

namespace rytov {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config: cannot parse value '" + std::string(text) + "' for key '" +
                      std::string(key) + "'");
  }
  return value;
}

std::string format_double(double v) { return format_real(v); }

const std::set<std::string_view> kKnownKeys = {"k",     "R",        "R_a",          "ell",
                                               "eta_a", "N_r",      "M_SD",         "sv_count",
                                               "order", "gamma",    "sv_threshold", "seed"};

}  // namespace

void ProblemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (!(k > 0.0) || !std::isfinite(k)) fail("k must be positive");
  if (!(R > 0.0) || !std::isfinite(R)) fail("R must be positive");
  if (!(R_a > 0.0 && R_a < R)) fail("R_a must lie in (0, R)");
  if (!(ell > 0.0) || !std::isfinite(ell)) fail("ell must be positive");
  if (!(eta_a >= -1.0) || !std::isfinite(eta_a)) fail("eta_a must be >= -1");
  if (N_r < 1) fail("N_r must be >= 1");
  if (M_SD < 1) fail("M_SD must be >= 1");
  if (order < 1) fail("order must be >= 1");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be >= 0");
  if (const auto* count = std::get_if<SvCount>(&sv_policy)) {
    if (count->value < 1 || count->value > std::min(M_SD, N_r)) {
      fail("sv_count must lie in [1, min(M_SD, N_r)]");
    }
  } else if (!(std::get<SvThreshold>(sv_policy).sigma0 > 0.0)) {
    fail("sv_threshold must be positive");
  }
}

ProblemConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!kKnownKeys.contains(key)) throw ConfigError("config: unknown key '" + std::string(key) + "'");
    if (!entries.emplace(std::string(key), std::string(value)).second) {
      throw ConfigError("config: duplicate key '" + std::string(key) + "'");
    }
  }

  auto require = [&](std::string_view key) -> const std::string& {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("config: missing key '" + std::string(key) + "'");
    return it->second;
  };

  ProblemConfig cfg;
  cfg.k = parse_number<double>("k", require("k"));
  cfg.R = parse_number<double>("R", require("R"));
  cfg.R_a = parse_number<double>("R_a", require("R_a"));
  cfg.ell = parse_number<double>("ell", require("ell"));
  cfg.eta_a = parse_number<double>("eta_a", require("eta_a"));
  cfg.N_r = parse_number<int>("N_r", require("N_r"));
  cfg.M_SD = parse_number<int>("M_SD", require("M_SD"));
  cfg.order = parse_number<int>("order", require("order"));

  const bool has_count = entries.contains("sv_count");
  const bool has_threshold = entries.contains("sv_threshold");
  if (has_count == has_threshold) {
    throw ConfigError("config: exactly one of sv_count and sv_threshold is required");
  }
  if (has_count) {
    cfg.sv_policy = SvCount{parse_number<int>("sv_count", entries.find("sv_count")->second)};
  } else {
    cfg.sv_policy =
        SvThreshold{parse_number<double>("sv_threshold", entries.find("sv_threshold")->second)};
  }
  cfg.gamma = entries.contains("gamma") ? parse_number<double>("gamma", entries.find("gamma")->second) : 0.0;
  cfg.seed = entries.contains("seed") ? parse_number<std::uint64_t>("seed", entries.find("seed")->second) : 0;
  cfg.validate();
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ProblemConfig& cfg) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).push_back('\n');
  };
  line("k", format_double(cfg.k));
  line("R", format_double(cfg.R));
  line("R_a", format_double(cfg.R_a));
  line("ell", format_double(cfg.ell));
  line("eta_a", format_double(cfg.eta_a));
  line("N_r", std::to_string(cfg.N_r));
  line("M_SD", std::to_string(cfg.M_SD));
  if (const auto* count = std::get_if<SvCount>(&cfg.sv_policy)) {
    line("sv_count", std::to_string(count->value));
  } else {
    line("sv_threshold", format_double(std::get<SvThreshold>(cfg.sv_policy).sigma0));
  }
  line("order", std::to_string(cfg.order));
  line("gamma", format_double(cfg.gamma));
  line("seed", std::to_string(cfg.seed));
  return out;
}

RadialGrid::RadialGrid(double R, int N_r) : radius_(R), spacing_(R / N_r), points_(N_r) {
  if (!(R > 0.0) || N_r < 1) throw ConfigError("grid: need R > 0 and N_r >= 1");
  // R * i / N_r keeps r_{N_r} == R and hits R_a exactly when it is a grid multiple.
  for (int i = 1; i <= N_r; ++i) points_(i - 1) = R * i / N_r;
}

RadialGrid make_grid(const ProblemConfig& cfg) {
  cfg.validate();
  return RadialGrid(cfg.R, cfg.N_r);
}

std::string_view to_string(ProfileRole role) {
  switch (role) {
    case ProfileRole::eta_true: return "eta_true";
    case ProfileRole::eta_proj: return "eta_proj";
    case ProfileRole::eta_order_j: return "eta_order_j";
    case ProfileRole::eta_partial_sum: return "eta_partial_sum";
    case ProfileRole::mu_a: return "mu_a";
  }
  return "unknown";
}

RadialProfile true_profile(const ProblemConfig& cfg, const RadialGrid& grid) {
  RadialProfile p{Vector::Zero(grid.size()), ProfileRole::eta_true};
  const double edge = cfg.R_a + 1e-12 * cfg.R;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.point(i) <= edge) p.values(i) = cfg.eta_a;
  }
  return p;
}

}  // namespace rytov
