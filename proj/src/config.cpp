#include "robustbo/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "robustbo/csv.hpp"
#include "robustbo/errors.hpp"

namespace robustbo {

std::string_view to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::Syn2D: return "syn2d";
    case ProblemKind::Syn4D: return "syn4d";
    case ProblemKind::Syn6D: return "syn6d";
    case ProblemKind::Carrier: return "carrier";
    case ProblemKind::Custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(MeasureChoice m) {
  switch (m) {
    case MeasureChoice::Exp: return "exp";
    case MeasureChoice::Ptr: return "ptr";
    case MeasureChoice::ExpMae: return "exp-mae";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

const std::set<std::string, std::less<>> kKnownKeys = {
    "problem",       "problem.path",      "problem.pmf",      "measure",          "measure.h",
    "measure.alpha", "setting",           "strategies",       "iterations",       "repetitions",
    "seed",          "output",            "bound_check",      "hat_t",            "hat_t.samples",
    "workers",       "bpt.c",             "kernel.form",      "kernel.lengthscale", "kernel.variance",
    "noise_var",
};

class Collector {
 public:
  explicit Collector(std::string_view origin) : origin_(origin) {}

  void add(std::size_t line, const std::string& message) {
    violations_.push_back(origin_ + ":" + std::to_string(line) + ": " + message);
  }
  void add(const std::string& message) { violations_.push_back(origin_ + ": " + message); }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::string origin_;
  std::vector<std::string> violations_;
};

struct Entry {
  std::string value;
  std::size_t line = 0;
};

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  return std::nullopt;
}

}  // namespace

CampaignConfig parse_config_text(std::string_view text, std::string_view origin) {
  Collector errors(origin);
  std::map<std::string, Entry, std::less<>> entries;
  CampaignConfig cfg;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.add(line_no, "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!kKnownKeys.contains(key)) {
      errors.add(line_no, "unknown key '" + key + "'");
      continue;
    }
    if (entries.contains(key)) errors.add(line_no, "duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }

  auto get = [&](std::string_view key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto get_int = [&](std::string_view key, int& out, long long lo, long long hi) {
    if (const Entry* e = get(key)) {
      const auto v = parse_int(e->value);
      if (!v) {
        errors.add(e->line, std::string(key) + ": '" + e->value + "' is not an integer");
      } else if (*v < lo || *v > hi) {
        errors.add(e->line, std::string(key) + " = " + e->value + " is out of range [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
      } else {
        out = static_cast<int>(*v);
      }
    }
  };
  auto get_real = [&](std::string_view key, auto&& check, const char* requirement) -> std::optional<double> {
    const Entry* e = get(key);
    if (!e) return std::nullopt;
    const auto v = parse_double(e->value);
    if (!v) {
      errors.add(e->line, std::string(key) + ": '" + e->value + "' is not a number");
      return std::nullopt;
    }
    if (!check(*v)) {
      errors.add(e->line, std::string(key) + " = " + e->value + " " + requirement);
      return std::nullopt;
    }
    return v;
  };

  if (const Entry* e = get("problem")) {
    static const std::map<std::string, ProblemKind, std::less<>> names = {
        {"syn2d", ProblemKind::Syn2D}, {"syn4d", ProblemKind::Syn4D}, {"syn6d", ProblemKind::Syn6D},
        {"carrier", ProblemKind::Carrier}, {"custom", ProblemKind::Custom}};
    const auto it = names.find(e->value);
    if (it == names.end()) {
      errors.add(e->line, "unknown problem '" + e->value + "' (expected syn2d, syn4d, syn6d, carrier or custom)");
    } else {
      cfg.problem = it->second;
    }
  } else {
    errors.add("missing required key 'problem'");
  }
  if (const Entry* e = get("problem.path")) cfg.problem_path = e->value;
  if (const Entry* e = get("problem.pmf")) cfg.pmf_path = e->value;
  if ((cfg.problem == ProblemKind::Carrier || cfg.problem == ProblemKind::Custom) && cfg.problem_path.empty() &&
      get("problem")) {
    errors.add("problem '" + std::string(to_string(cfg.problem)) + "' requires 'problem.path'");
  }
  if (cfg.problem != ProblemKind::Custom) {
    for (const char* key : {"problem.pmf", "kernel.form", "kernel.lengthscale", "kernel.variance", "noise_var"}) {
      if (const Entry* e = get(key)) errors.add(e->line, std::string(key) + " only applies to problem = custom");
    }
  }

  if (const Entry* e = get("measure")) {
    if (e->value == "exp") {
      cfg.measure = MeasureChoice::Exp;
    } else if (e->value == "ptr") {
      cfg.measure = MeasureChoice::Ptr;
    } else if (e->value == "exp-mae") {
      cfg.measure = MeasureChoice::ExpMae;
    } else {
      errors.add(e->line, "unknown measure '" + e->value + "' (expected exp, ptr or exp-mae)");
    }
  }
  cfg.h = get_real("measure.h", [](double v) { return std::isfinite(v); }, "must be finite");
  cfg.alpha = get_real("measure.alpha", [](double v) { return v >= 0.0 && std::isfinite(v); }, "must be >= 0");

  if (const Entry* e = get("setting")) {
    if (e->value == "simulator") {
      cfg.setting = Setting::Simulator;
    } else if (e->value == "uncontrollable") {
      cfg.setting = Setting::Uncontrollable;
    } else {
      errors.add(e->line, "unknown setting '" + e->value + "' (expected simulator or uncontrollable)");
    }
  }

  if (const Entry* e = get("strategies")) {
    std::set<Strategy> seen;
    for (auto field : split_fields(e->value)) {
      if (field.empty()) continue;
      const auto s = parse_strategy(field);
      if (!s) {
        errors.add(e->line, "unknown strategy '" + std::string(field) + "'");
      } else if (!seen.insert(*s).second) {
        errors.add(e->line, "strategy '" + std::string(field) + "' listed twice");
      } else {
        cfg.strategies.push_back(*s);
      }
    }
    if (cfg.strategies.empty() && errors.violations().empty()) errors.add(e->line, "strategies list is empty");
  } else {
    cfg.strategies = all_strategies();
  }

  get_int("iterations", cfg.iterations, 1, 1000000);
  get_int("repetitions", cfg.repetitions, 1, 1000000);
  get_int("workers", cfg.workers, 1, 1024);
  get_int("hat_t.samples", cfg.hat_t_samples, 1, 100000000);

  if (const Entry* e = get("seed")) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (res.ec != std::errc() || res.ptr != e->value.data() + e->value.size()) {
      errors.add(e->line, "seed: '" + e->value + "' is not a non-negative integer");
    } else {
      cfg.seed = v;
    }
  } else {
    cfg.warnings.push_back("no seed given, using 0");
  }

  if (const Entry* e = get("output")) {
    if (e->value.empty()) {
      errors.add(e->line, "output must not be empty");
    } else {
      cfg.output = e->value;
    }
  }
  if (const Entry* e = get("bound_check")) {
    const auto b = parse_bool(e->value);
    if (!b) {
      errors.add(e->line, "bound_check: '" + e->value + "' is not a boolean");
    } else {
      cfg.bound_check = *b;
    }
  }
  if (const Entry* e = get("hat_t")) {
    if (e->value == "off") {
      cfg.hat_t = HatTMode::Off;
    } else if (e->value == "exact") {
      cfg.hat_t = HatTMode::Exact;
    } else if (e->value == "mc") {
      cfg.hat_t = HatTMode::MonteCarlo;
    } else {
      errors.add(e->line, "hat_t: unknown mode '" + e->value + "' (expected off, exact or mc)");
    }
    if (cfg.hat_t == HatTMode::Exact && cfg.measure != MeasureChoice::Exp) {
      errors.add(e->line, "hat_t = exact requires measure = exp");
    }
  }
  cfg.bpt_c = get_real("bpt.c", [](double v) { return v > 0.0 && std::isfinite(v); }, "must be positive");

  if (const Entry* e = get("kernel.form")) {
    if (e->value != "se" && e->value != "matern32") {
      errors.add(e->line, "kernel.form: unknown form '" + e->value + "' (expected se or matern32)");
    } else {
      cfg.kernel_form = e->value;
    }
  }
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (auto v = get_real("kernel.lengthscale", positive, "must be positive")) cfg.kernel_lengthscale = *v;
  if (auto v = get_real("kernel.variance", positive, "must be positive")) cfg.kernel_variance = *v;
  if (auto v = get_real("noise_var", positive, "must be positive")) cfg.noise_var = *v;

  if (!errors.violations().empty()) throw ConfigError(errors.violations());
  return cfg;
}

CampaignConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace robustbo
