#include "levymix/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace levymix {

namespace {

const std::vector<std::pair<std::string, std::string>> kKnownKeys = {
    {"levy.alpha", ""},
    {"levy.D", ""},
    {"levy.c_nu", "1"},
    {"levy.K", ""},
    {"levy.eps_small", ""},  // default derived: K/20
    {"levy.gaussian_correction", "true"},
    {"spectrum.N", ""},
    {"spectrum.source", "example_dirichlet:1"},
    {"spectrum.lambdas", ""},
    {"nonlinearity.kind", "zero"},
    {"nonlinearity.a", "0"},
    {"nonlinearity.g", "1"},
    {"nonlinearity.modes", "all"},
    {"nonlinearity.table", ""},
    {"numerics.dt", "0.001"},
    {"numerics.T_refractory", "1"},
    {"verification.p", ""},  // default derived: alpha/2
    {"verification.M", "1"},
    {"verification.d_small", "0.05"},
    {"verification.horizon", "10"},
    {"verification.replicas", "1000"},
    {"verification.seed", "12345"},
};

bool known_key(const std::string& k) {
  for (const auto& [name, def] : kKnownKeys)
    if (name == k) return true;
  return false;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse number for " + key + ": '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse integer for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("config: cannot parse boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

ParsedConfig ParsedConfig::from_text(const std::string& text) {
  ParsedConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      if (section != "levy" && section != "spectrum" && section != "nonlinearity" &&
          section != "numerics" && section != "verification")
        throw ConfigError("config: unknown section [" + section + "] at line " +
                          std::to_string(lineno));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
    if (section.empty())
      throw ConfigError("config: key outside any section at line " + std::to_string(lineno));
    const std::string key = section + "." + trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!known_key(key)) throw ConfigError("config: unknown key " + key);
    cfg.values_[key] = value;
  }
  return cfg;
}

ParsedConfig ParsedConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void ParsedConfig::apply_override(const std::string& setting) {
  const std::size_t eq = setting.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: '" + setting + "'");
  const std::string key = trim(setting.substr(0, eq));
  if (!known_key(key)) throw ConfigError("override: unknown key " + key);
  values_[key] = trim(setting.substr(eq + 1));
}

ModelConfig ParsedConfig::build(bool need_contraction) const {
  auto get = [&](const std::string& key) -> std::string {
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    for (const auto& [name, def] : kKnownKeys)
      if (name == key) return def;
    return "";
  };
  auto require = [&](const std::string& key) -> std::string {
    const std::string v = get(key);
    if (v.empty()) throw ConfigError("config: missing required key " + key);
    return v;
  };

  ModelConfig m;
  m.levy.alpha = parse_double("levy.alpha", require("levy.alpha"));
  m.levy.D = static_cast<int>(parse_long("levy.D", require("levy.D")));
  m.levy.K = parse_double("levy.K", require("levy.K"));
  m.levy.c_nu = parse_double("levy.c_nu", get("levy.c_nu"));
  const std::string eps = get("levy.eps_small");
  m.levy.eps_small = eps.empty() ? m.levy.K / 20.0 : parse_double("levy.eps_small", eps);
  m.levy.gaussian_correction = parse_bool("levy.gaussian_correction", get("levy.gaussian_correction"));

  const int N = static_cast<int>(parse_long("spectrum.N", require("spectrum.N")));
  const std::string source = get("spectrum.source");
  if (source.rfind("example_dirichlet", 0) == 0) {
    int d = 1;
    const std::size_t colon = source.find(':');
    if (colon != std::string::npos)
      d = static_cast<int>(parse_long("spectrum.source", source.substr(colon + 1)));
    if (d < 1) throw ConfigError("config: spectrum.source dimension must be >= 1");
    m.spectrum = build_example_spectrum(d, N);
  } else if (source == "explicit") {
    const std::string ls = get("spectrum.lambdas");
    if (ls.empty()) throw ConfigError("config: spectrum.source=explicit needs spectrum.lambdas");
    for (const std::string& v : split(ls, ',')) m.spectrum.lambdas.push_back(parse_double("spectrum.lambdas", v));
    if (static_cast<int>(m.spectrum.lambdas.size()) != N)
      throw ConfigError("config: spectrum.lambdas length must equal spectrum.N");
    m.spectrum.source = "explicit";
  } else {
    throw ConfigError("config: unknown spectrum.source '" + source + "'");
  }
  m.spectrum.D = m.levy.D;

  const std::string kind = get("nonlinearity.kind");
  const double a = parse_double("nonlinearity.a", get("nonlinearity.a"));
  const double gq = parse_double("nonlinearity.g", get("nonlinearity.g"));
  if (kind == "zero") {
    m.nonlinearity = Nonlinearity::zero();
  } else if (kind == "mode_tanh") {
    std::vector<int> modes;
    const std::string ms = get("nonlinearity.modes");
    if (ms != "all" && !ms.empty())
      for (const std::string& v : split(ms, ','))
        modes.push_back(static_cast<int>(parse_long("nonlinearity.modes", v)));
    m.nonlinearity = Nonlinearity::mode_tanh(a, gq, modes, N);
  } else if (kind == "table") {
    const std::string ts = get("nonlinearity.table");
    if (ts.empty()) throw ConfigError("config: nonlinearity.kind=table needs nonlinearity.table");
    std::vector<Nonlinearity::TableEntry> entries;
    for (const std::string& item : split(ts, ',')) {
      const std::vector<std::string> f = split(item, ':');
      if (f.size() != 3) throw ConfigError("config: table entries are row:col:weight");
      Nonlinearity::TableEntry e;
      e.row = static_cast<int>(parse_long("nonlinearity.table", f[0]));
      e.col = static_cast<int>(parse_long("nonlinearity.table", f[1]));
      e.weight = parse_double("nonlinearity.table", f[2]);
      entries.push_back(e);
    }
    m.nonlinearity = Nonlinearity::table(a, gq, entries, N);
  } else {
    throw ConfigError("config: unknown nonlinearity.kind '" + kind + "'");
  }

  m.dt = parse_double("numerics.dt", get("numerics.dt"));
  m.T_refractory = parse_double("numerics.T_refractory", get("numerics.T_refractory"));

  const std::string p = get("verification.p");
  m.verification.p = p.empty() ? m.levy.alpha / 2.0 : parse_double("verification.p", p);
  m.verification.M = parse_double("verification.M", get("verification.M"));
  m.verification.d_small = parse_double("verification.d_small", get("verification.d_small"));
  m.verification.horizon = parse_double("verification.horizon", get("verification.horizon"));
  m.verification.replicas = static_cast<int>(parse_long("verification.replicas", get("verification.replicas")));
  m.verification.seed = static_cast<std::uint64_t>(parse_long("verification.seed", get("verification.seed")));

  try {
    m.validate(need_contraction);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return m;
}

std::string ParsedConfig::echo() const {
  // Build once so derived defaults (eps_small, p) appear with their values.
  const ModelConfig m = build(false);
  auto get_or = [&](const std::string& key, const std::string& fallback) -> std::string {
    auto it = values_.find(key);
    return it != values_.end() ? it->second : fallback;
  };
  std::ostringstream out;
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  out << "[levy]\n";
  out << "alpha = " << num(m.levy.alpha) << "\n";
  out << "D = " << m.levy.D << "\n";
  out << "c_nu = " << num(m.levy.c_nu) << "\n";
  out << "K = " << num(m.levy.K) << "\n";
  out << "eps_small = " << num(m.levy.eps_small) << "\n";
  out << "gaussian_correction = " << (m.levy.gaussian_correction ? "true" : "false") << "\n";
  out << "[spectrum]\n";
  out << "N = " << m.spectrum.N() << "\n";
  out << "source = " << m.spectrum.source << "\n";
  if (m.spectrum.source == "explicit") {
    out << "lambdas = ";
    for (std::size_t i = 0; i < m.spectrum.lambdas.size(); ++i)
      out << (i ? "," : "") << num(m.spectrum.lambdas[i]);
    out << "\n";
  }
  out << "[nonlinearity]\n";
  out << "kind = " << get_or("nonlinearity.kind", "zero") << "\n";
  out << "a = " << get_or("nonlinearity.a", "0") << "\n";
  out << "g = " << get_or("nonlinearity.g", "1") << "\n";
  if (get_or("nonlinearity.kind", "zero") == "mode_tanh")
    out << "modes = " << get_or("nonlinearity.modes", "all") << "\n";
  if (get_or("nonlinearity.kind", "zero") == "table")
    out << "table = " << get_or("nonlinearity.table", "") << "\n";
  out << "[numerics]\n";
  out << "dt = " << num(m.dt) << "\n";
  out << "T_refractory = " << num(m.T_refractory) << "\n";
  out << "[verification]\n";
  out << "p = " << num(m.verification.p) << "\n";
  out << "M = " << num(m.verification.M) << "\n";
  out << "d_small = " << num(m.verification.d_small) << "\n";
  out << "horizon = " << num(m.verification.horizon) << "\n";
  out << "replicas = " << m.verification.replicas << "\n";
  out << "seed = " << m.verification.seed << "\n";
  return out.str();
}

}  // namespace levymix
