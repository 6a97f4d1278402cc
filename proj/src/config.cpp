#include "tabcop/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tabcop {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) +
                    "'");
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v);
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, v);
  return out;
}

std::string fmt_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

const char* on_off(bool b) { return b ? "on" : "off"; }

} // namespace

void Config::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "inference_limit") inference_limit = parse_uint(key, value);
  else if (key == "time_limit_s") time_limit_s = parse_double(key, value);
  else if (key == "bigstep_freq") bigstep_freq = parse_uint(key, value);
  else if (key == "cp_initial") cp_initial = parse_double(key, value);
  else if (key == "cp_later") cp_later = parse_double(key, value);
  else if (key == "feature_dim") feature_dim = parse_uint(key, value);
  else if (key == "discount") discount = parse_double(key, value);
  else if (key == "temperature") temperature = parse_double(key, value);
  else if (key == "path_limit") path_limit = parse_uint(key, value);
  else if (key == "rewrite") rewrite = parse_bool(key, value);
  else if (key == "guided_reduction") guided_reduction = parse_bool(key, value);
  else if (key == "eager_reduction") {
    if (value == "auto") eager_reduction.reset();
    else eager_reduction = parse_bool(key, value);
  }
  else if (key == "single_action_optim") single_action_optim = parse_bool(key, value);
  else if (key == "equality_axioms") equality_axioms = parse_bool(key, value);
  else if (key == "limited_policy") limited_policy = parse_bool(key, value);
  else if (key == "all_proofsteps") all_proofsteps = parse_bool(key, value);
  else if (key == "eta") learner.eta = parse_double(key, value);
  else if (key == "max_depth") learner.max_depth = parse_uint(key, value);
  else if (key == "lambda") learner.lambda = parse_double(key, value);
  else if (key == "rounds") learner.rounds = parse_uint(key, value);
  else if (key == "patience") learner.patience = parse_uint(key, value);
  else if (key == "sign_balance") learner.sign_balance = parse_bool(key, value);
  else if (key == "seed") seed = parse_uint(key, value);
  else if (key == "workers") workers = parse_uint(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");

  if (feature_dim == 0) throw ConfigError("feature_dim must be positive");
  if (workers == 0) throw ConfigError("workers must be positive");
  if (temperature <= 0) throw ConfigError("temperature must be positive");
  if (!(discount > 0 && discount < 1)) throw ConfigError("discount must lie in (0,1)");
  if (cp_initial <= 0 || cp_later <= 0) throw ConfigError("cp must be positive");
}

Config parse_config(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  bool seen_section = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (seen_section) {
        throw ConfigError("line " + std::to_string(line_no) + ": only one section is allowed");
      }
      seen_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string print_config(const Config& c) {
  std::ostringstream out;
  out << "[tabcop]\n";
  out << "inference_limit = " << c.inference_limit << '\n';
  out << "time_limit_s = " << fmt_double(c.time_limit_s) << '\n';
  out << "bigstep_freq = " << c.bigstep_freq << '\n';
  out << "cp_initial = " << fmt_double(c.cp_initial) << '\n';
  out << "cp_later = " << fmt_double(c.cp_later) << '\n';
  out << "feature_dim = " << c.feature_dim << '\n';
  out << "discount = " << fmt_double(c.discount) << '\n';
  out << "temperature = " << fmt_double(c.temperature) << '\n';
  out << "path_limit = " << c.path_limit << '\n';
  out << "rewrite = " << on_off(c.rewrite) << '\n';
  out << "guided_reduction = " << on_off(c.guided_reduction) << '\n';
  out << "eager_reduction = "
      << (c.eager_reduction ? on_off(*c.eager_reduction) : "auto") << '\n';
  out << "single_action_optim = " << on_off(c.single_action_optim) << '\n';
  out << "equality_axioms = " << on_off(c.equality_axioms) << '\n';
  out << "limited_policy = " << on_off(c.limited_policy) << '\n';
  out << "all_proofsteps = " << on_off(c.all_proofsteps) << '\n';
  out << "eta = " << fmt_double(c.learner.eta) << '\n';
  out << "max_depth = " << c.learner.max_depth << '\n';
  out << "lambda = " << fmt_double(c.learner.lambda) << '\n';
  out << "rounds = " << c.learner.rounds << '\n';
  out << "patience = " << c.learner.patience << '\n';
  out << "sign_balance = " << on_off(c.learner.sign_balance) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "workers = " << c.workers << '\n';
  return out.str();
}

} // namespace tabcop
