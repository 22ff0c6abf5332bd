#include "shrinkcv/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace shrinkcv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// section -> key -> raw value, plus consumption tracking
class RawConfig {
 public:
  explicit RawConfig(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw config_error("line " + std::to_string(lineno) + ": malformed section header");
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty())
          throw config_error("line " + std::to_string(lineno) + ": empty section name");
        sections_[section];
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw config_error("line " + std::to_string(lineno) + ": expected key = value");
      if (section.empty())
        throw config_error("line " + std::to_string(lineno) + ": key outside any section");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty())
        throw config_error("line " + std::to_string(lineno) + ": empty key");
      auto [it, inserted] = sections_[section].emplace(key, value);
      if (!inserted)
        throw config_error("duplicate key '" + key + "' in section [" + section + "]");
    }
  }

  bool has_section(const std::string& s) const { return sections_.count(s) != 0; }

  bool has(const std::string& s, const std::string& k) const {
    auto it = sections_.find(s);
    return it != sections_.end() && it->second.count(k) != 0;
  }

  std::string take(const std::string& s, const std::string& k) {
    consumed_[s].insert(k);
    return sections_.at(s).at(k);
  }

  // every present key must have been consumed
  void finish() const {
    for (const auto& [sec, kv] : sections_) {
      auto cit = consumed_.find(sec);
      if (cit == consumed_.end() && !kv.empty())
        throw config_error("unknown section [" + sec + "]");
      for (const auto& [key, value] : kv) {
        if (cit == consumed_.end() || cit->second.count(key) == 0)
          throw config_error("unknown key '" + key + "' in section [" + sec + "]");
      }
    }
  }

  void mark_section_known(const std::string& s) { consumed_[s]; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::map<std::string, std::set<std::string>> consumed_;
};

double parse_double(const std::string& v, const std::string& what) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw config_error("cannot parse '" + v + "' as a number for " + what);
  }
}

long long parse_int(const std::string& v, const std::string& what) {
  try {
    size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw config_error("cannot parse '" + v + "' as an integer for " + what);
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& what) {
  try {
    size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw config_error("cannot parse '" + v + "' as an unsigned integer for " + what);
  }
}

bool parse_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error("cannot parse '" + v + "' as a boolean for " + what);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) {
    // allow comma-separated lists too
    std::string piece;
    std::istringstream ts(tok);
    while (std::getline(ts, piece, ',')) {
      if (!piece.empty()) out.push_back(piece);
    }
  }
  return out;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::Scm: return "scm";
    case Method::Nscm: return "nscm";
    case Method::S2cmCv: return "s2cm_cv";
    case Method::S2cmAe: return "s2cm_ae";
    case Method::SteCv1: return "ste_cv1";
    case Method::SteCv2: return "ste_cv2";
    case Method::SteAe: return "ste_ae";
    case Method::OracleS2cm: return "oracle_s2cm";
    case Method::OracleSte: return "oracle_ste";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  static const std::map<std::string, Method> table = {
      {"scm", Method::Scm},           {"nscm", Method::Nscm},
      {"s2cm_cv", Method::S2cmCv},    {"s2cm_ae", Method::S2cmAe},
      {"ste_cv1", Method::SteCv1},    {"ste_cv2", Method::SteCv2},
      {"ste_ae", Method::SteAe},      {"oracle_s2cm", Method::OracleS2cm},
      {"oracle_ste", Method::OracleSte}};
  auto it = table.find(name);
  if (it == table.end()) throw config_error("unknown method '" + name + "'");
  return it->second;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw config_error("run.methods must not be empty");
  if (l_grid.empty()) throw config_error("run.l_grid must not be empty");
  for (int l : l_grid)
    if (l < 1) throw config_error("run.l_grid entries must be >= 1");
  if (trials < 1) throw config_error("run.trials must be >= 1");
  if (grid.n_points < 1) throw config_error("grid.n_points must be >= 1");
  if (!(grid.eps > 0.0 && grid.eps < 0.5)) throw config_error("grid.eps out of range");
  if (target.kind == TargetSpec::Kind::Knowledge && !(target.sigma_t_sq >= 0.0))
    throw config_error("target.sigma_t_sq must be >= 0");
  std::visit([](const auto& s) { s.validate(); }, scenario);
  ste.validate();
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  RawConfig raw(text);
  ExperimentConfig cfg;

  if (!raw.has("scenario", "kind")) throw config_error("missing [scenario] kind");
  raw.mark_section_known("scenario");
  const std::string kind = raw.take("scenario", "kind");
  if (kind == "ula") {
    UlaScenarioSpec s;
    if (raw.has("scenario", "n_antennas"))
      s.n_antennas = static_cast<int>(parse_int(raw.take("scenario", "n_antennas"), "n_antennas"));
    if (raw.has("scenario", "interferer_doas_deg")) {
      s.interferer_doas_deg.clear();
      for (const auto& tok : split_list(raw.take("scenario", "interferer_doas_deg")))
        s.interferer_doas_deg.push_back(parse_double(tok, "interferer_doas_deg"));
    }
    if (raw.has("scenario", "inr_db"))
      s.inr_db = parse_double(raw.take("scenario", "inr_db"), "inr_db");
    if (raw.has("scenario", "noise_power"))
      s.noise_power = parse_double(raw.take("scenario", "noise_power"), "noise_power");
    if (raw.has("scenario", "target_doa_deg"))
      s.target_doa_deg = parse_double(raw.take("scenario", "target_doa_deg"), "target_doa_deg");
    if (raw.has("scenario", "element_spacing"))
      s.element_spacing = parse_double(raw.take("scenario", "element_spacing"), "element_spacing");
    cfg.scenario = s;
  } else if (kind == "stap") {
    StapScenarioSpec s;
    if (raw.has("scenario", "n_pulses"))
      s.n_pulses = static_cast<int>(parse_int(raw.take("scenario", "n_pulses"), "n_pulses"));
    if (raw.has("scenario", "n_elements"))
      s.n_elements = static_cast<int>(parse_int(raw.take("scenario", "n_elements"), "n_elements"));
    if (raw.has("scenario", "n_clutter_patches"))
      s.n_clutter_patches = static_cast<int>(
          parse_int(raw.take("scenario", "n_clutter_patches"), "n_clutter_patches"));
    if (raw.has("scenario", "nu")) s.nu = parse_double(raw.take("scenario", "nu"), "nu");
    if (raw.has("scenario", "cnr")) s.cnr = parse_double(raw.take("scenario", "cnr"), "cnr");
    if (raw.has("scenario", "noise_power"))
      s.noise_power = parse_double(raw.take("scenario", "noise_power"), "noise_power");
    if (raw.has("scenario", "target_fd"))
      s.target_fd = parse_double(raw.take("scenario", "target_fd"), "target_fd");
    if (raw.has("scenario", "target_fs"))
      s.target_fs = parse_double(raw.take("scenario", "target_fs"), "target_fs");
    if (raw.has("scenario", "carrier_hz"))
      s.carrier_hz = parse_double(raw.take("scenario", "carrier_hz"), "carrier_hz");
    if (raw.has("scenario", "prf_hz"))
      s.prf_hz = parse_double(raw.take("scenario", "prf_hz"), "prf_hz");
    if (raw.has("scenario", "platform_velocity"))
      s.platform_velocity =
          parse_double(raw.take("scenario", "platform_velocity"), "platform_velocity");
    if (raw.has("scenario", "element_spacing"))
      s.element_spacing = parse_double(raw.take("scenario", "element_spacing"), "element_spacing");
    cfg.scenario = s;
  } else {
    throw config_error("scenario.kind must be 'ula' or 'stap'");
  }

  if (raw.has_section("target")) {
    raw.mark_section_known("target");
    if (raw.has("target", "kind")) {
      const std::string tk = raw.take("target", "kind");
      if (tk == "identity") {
        cfg.target.kind = TargetSpec::Kind::Identity;
      } else if (tk == "knowledge") {
        cfg.target.kind = TargetSpec::Kind::Knowledge;
      } else {
        throw config_error("target.kind must be 'identity' or 'knowledge'");
      }
    }
    if (raw.has("target", "sigma_t_sq"))
      cfg.target.sigma_t_sq = parse_double(raw.take("target", "sigma_t_sq"), "sigma_t_sq");
    if (raw.has("target", "redraw_per_trial"))
      cfg.target.redraw_per_trial =
          parse_bool(raw.take("target", "redraw_per_trial"), "redraw_per_trial");
  }

  if (!raw.has("run", "methods")) throw config_error("missing [run] methods");
  raw.mark_section_known("run");
  for (const auto& tok : split_list(raw.take("run", "methods")))
    cfg.methods.push_back(method_from_name(tok));
  if (!raw.has("run", "l_grid")) throw config_error("missing [run] l_grid");
  for (const auto& tok : split_list(raw.take("run", "l_grid")))
    cfg.l_grid.push_back(static_cast<int>(parse_int(tok, "l_grid")));
  if (raw.has("run", "trials"))
    cfg.trials = static_cast<int>(parse_int(raw.take("run", "trials"), "trials"));
  if (raw.has("run", "master_seed"))
    cfg.master_seed = parse_u64(raw.take("run", "master_seed"), "master_seed");
  if (raw.has("run", "outputs")) {
    cfg.out_sdr_loss = cfg.out_nmse = false;
    for (const auto& tok : split_list(raw.take("run", "outputs"))) {
      if (tok == "sdr_loss") cfg.out_sdr_loss = true;
      else if (tok == "nmse") cfg.out_nmse = true;
      else if (tok == "rho_curve") cfg.out_rho_curve = true;
      else if (tok == "distance_curve") cfg.out_distance_curve = true;
      else if (tok == "cost_curve") cfg.out_cost_curve = true;
      else throw config_error("unknown output '" + tok + "'");
    }
  }

  if (raw.has_section("grid")) {
    raw.mark_section_known("grid");
    if (raw.has("grid", "n_points"))
      cfg.grid.n_points = static_cast<int>(parse_int(raw.take("grid", "n_points"), "n_points"));
    if (raw.has("grid", "eps"))
      cfg.grid.eps = parse_double(raw.take("grid", "eps"), "eps");
  }

  if (raw.has_section("ste")) {
    raw.mark_section_known("ste");
    if (raw.has("ste", "delta"))
      cfg.ste.delta = parse_double(raw.take("ste", "delta"), "delta");
    if (raw.has("ste", "max_iter"))
      cfg.ste.max_iter = static_cast<int>(parse_int(raw.take("ste", "max_iter"), "max_iter"));
  }

  raw.finish();
  cfg.validate();
  return cfg;
}

}  // namespace shrinkcv
