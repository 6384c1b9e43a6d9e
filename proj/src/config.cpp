#include "plateau/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "plateau/errors.hpp"

namespace plateau {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += '\n';
    out += i.line > 0 ? fmt::format("line {}, col {}: {}", i.line, i.column, i.message) : i.message;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // column of the value
};

struct FunctionSpec {
  bool is_poly = true;
  std::vector<double> coeffs;
  std::string path;
};

// Parses poly(...) | samples(...); on failure returns a message and the
// offset (within the value) of the offending character.
std::optional<FunctionSpec> parse_function(const std::string& v, std::string& err, int& offset) {
  auto open = v.find('(');
  const auto close = v.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    err = "expected poly(c0, c1, ...) or samples(path)";
    offset = 0;
    return std::nullopt;
  }
  const std::string head{trim(std::string_view(v).substr(0, open))};
  if (!trim(std::string_view(v).substr(close + 1)).empty()) {
    err = "unexpected text after ')'";
    offset = static_cast<int>(close + 1);
    return std::nullopt;
  }
  const std::string_view body = std::string_view(v).substr(open + 1, close - open - 1);
  FunctionSpec f;
  if (head == "poly") {
    std::size_t pos = 0;
    while (true) {
      const auto comma = body.find(',', pos);
      const auto tok = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      const auto d = parse_double(tok);
      if (!d) {
        err = fmt::format("malformed coefficient '{}'", trim(tok));
        offset = static_cast<int>(open + 1 + pos);
        return std::nullopt;
      }
      f.coeffs.push_back(*d);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return f;
  }
  if (head == "samples") {
    f.is_poly = false;
    f.path = std::string(trim(body));
    if (f.path.empty()) {
      err = "samples() needs a file path";
      offset = static_cast<int>(open + 1);
      return std::nullopt;
    }
    return f;
  }
  err = fmt::format("unknown function form '{}'", head);
  offset = 0;
  return std::nullopt;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ScalarFn1D load_samples(const std::filesystem::path& path, double t_bar) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(fmt::format("cannot open sample file {}", path.string()));
  std::vector<double> ts, vs;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto comma = s.find(',');
    const auto t = comma == std::string_view::npos ? std::nullopt : parse_double(s.substr(0, comma));
    const auto v = comma == std::string_view::npos ? std::nullopt : parse_double(s.substr(comma + 1));
    if (!t || !v)
      throw PreconditionError(fmt::format("{}:{}: expected 't,value' with two numbers", path.string(), ln));
    if (!ts.empty() && !(*t > ts.back()))
      throw PreconditionError(fmt::format("{}:{}: t values must be strictly increasing", path.string(), ln));
    ts.push_back(*t);
    vs.push_back(*v);
  }
  return ScalarFn1D::piecewise_linear(std::move(ts), std::move(vs), t_bar);
}

CaseConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  static const std::set<std::string> known{
      "t_bar",     "gamma1",    "gamma2",     "phi1",    "phi2",     "n_s",      "n_y",
      "n_t",       "n_h",       "gauss",      "tol",     "seed",     "out",      "workers",
      "zeta_grid", "lip_safety", "bumps",     "eps",     "ladder",   "stationarity_bump",
      "refine",    "probe_y0",  "probe_t0",   "probe_r", "probe_rho"};
  std::vector<ConfigIssue> issues;
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (eq == std::string::npos) {
      issues.push_back({ln, key_col, "expected 'key = value'"});
      continue;
    }
    const std::string key{trim(std::string_view(line).substr(0, eq))};
    const auto vstart = line.find_first_not_of(" \t", eq + 1);
    const std::string value{trim(std::string_view(line).substr(eq + 1))};
    if (!known.count(key)) {
      issues.push_back({ln, key_col, fmt::format("unknown key '{}'", key)});
      continue;
    }
    if (value.empty()) {
      issues.push_back({ln, static_cast<int>(eq) + 2, fmt::format("missing value for '{}'", key)});
      continue;
    }
    if (entries.count(key)) {
      issues.push_back({ln, key_col, fmt::format("duplicate key '{}' (first on line {})", key, entries[key].line)});
      continue;
    }
    entries[key] = {value, ln, static_cast<int>(vstart) + 1};
  }

  CaseConfig c;
  auto bad = [&](const Entry& e, const std::string& msg, int off = 0) {
    issues.push_back({e.line, e.column + off, msg});
  };
  auto get_double = [&](const char* key, double& dst) {
    if (auto it = entries.find(key); it != entries.end()) {
      if (auto d = parse_double(it->second.value)) dst = *d;
      else bad(it->second, fmt::format("'{}' expects a number, got '{}'", key, it->second.value));
    }
  };
  auto get_int = [&](const char* key, auto& dst, long long lo) {
    if (auto it = entries.find(key); it != entries.end()) {
      const auto v = parse_int(it->second.value);
      if (!v || *v < lo) bad(it->second, fmt::format("'{}' expects an integer >= {}, got '{}'", key, lo, it->second.value));
      else dst = static_cast<std::remove_reference_t<decltype(dst)>>(*v);
    }
  };
  auto get_list = [&](const char* key, auto& dst, std::size_t min_len) {
    auto it = entries.find(key);
    if (it == entries.end()) return;
    using T = typename std::remove_reference_t<decltype(dst)>::value_type;
    std::vector<T> out;
    std::string_view s = it->second.value;
    std::size_t pos = 0;
    while (true) {
      const auto comma = s.find(',', pos);
      const auto tok = s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      bool ok = false;
      if constexpr (std::is_integral_v<T>) {
        if (auto v = parse_int(tok); v && *v > 0) {
          out.push_back(static_cast<T>(*v));
          ok = true;
        }
      } else {
        if (auto v = parse_double(tok)) {
          out.push_back(*v);
          ok = true;
        }
      }
      if (!ok) {
        bad(it->second, fmt::format("malformed list element '{}' in '{}'", trim(tok), key), static_cast<int>(pos));
        return;
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (out.size() < min_len) {
      bad(it->second, fmt::format("'{}' needs at least {} values", key, min_len));
      return;
    }
    dst = std::move(out);
  };

  for (const char* req : {"t_bar", "gamma1", "gamma2", "phi1", "phi2"})
    if (!entries.count(req)) issues.push_back({0, 0, fmt::format("missing required key {}", req)});

  get_double("t_bar", c.t_bar);
  if (auto it = entries.find("t_bar"); it != entries.end() && !(c.t_bar > 0.0))
    bad(it->second, "t_bar must be positive");
  get_int("n_s", c.n_s, 16);
  get_int("n_y", c.n_y, 5);
  get_int("n_t", c.n_t, 3);
  get_int("n_h", c.n_h, 2);
  get_int("gauss", c.gauss, 1);
  if (c.gauss > 3) bad(entries["gauss"], "gauss must be 1, 2 or 3");
  get_double("tol", c.tol);
  if (auto it = entries.find("seed"); it != entries.end()) {
    const auto& v = it->second.value;
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
    if (ec != std::errc{} || end != v.data() + v.size())
      bad(it->second, fmt::format("'seed' expects an unsigned 64-bit integer, got '{}'", v));
    else
      c.seed = seed;
  }
  get_int("workers", c.workers, 0);
  get_int("zeta_grid", c.zeta_grid, 8);
  get_double("lip_safety", c.lip_safety);
  get_int("bumps", c.bumps, 0);
  get_list("eps", c.eps, 1);
  get_list("ladder", c.ladder, 1);
  get_list("refine", c.refine, 2);
  get_list("probe_rho", c.probe_rho, 1);
  get_double("probe_y0", c.probe_y0);
  if (entries.count("probe_t0")) {
    double v = 0.0;
    get_double("probe_t0", v);
    c.probe_t0 = v;
  }
  if (entries.count("probe_r")) {
    double v = 0.0;
    get_double("probe_r", v);
    c.probe_r = v;
  }
  if (auto it = entries.find("stationarity_bump"); it != entries.end()) {
    std::vector<double> b;
    get_list("stationarity_bump", b, 5);
    if (b.size() == 5) c.stationarity_bump = BumpSpec{b[0], b[1], b[2], b[3], b[4]};
  }
  if (auto it = entries.find("out"); it != entries.end()) c.out = it->second.value;

  const bool have_tbar = entries.count("t_bar") && c.t_bar > 0.0;
  struct Slot {
    const char* key;
    std::string* src;
    ScalarFn1D* fn;
  };
  for (Slot s : {Slot{"gamma1", &c.gamma1_src, &c.gamma1}, Slot{"gamma2", &c.gamma2_src, &c.gamma2},
                 Slot{"phi1", &c.phi1_src, &c.phi1}, Slot{"phi2", &c.phi2_src, &c.phi2}}) {
    auto it = entries.find(s.key);
    if (it == entries.end()) continue;
    *s.src = it->second.value;
    std::string err;
    int off = 0;
    const auto form = parse_function(it->second.value, err, off);
    if (!form) {
      bad(it->second, fmt::format("{}: {}", s.key, err), off);
      continue;
    }
    if (!have_tbar) continue;
    try {
      if (form->is_poly)
        *s.fn = ScalarFn1D::polynomial(form->coeffs, c.t_bar);
      else
        *s.fn = load_samples(base_dir / form->path, c.t_bar);
    } catch (const std::exception& e) {
      bad(it->second, fmt::format("{}: {}", s.key, e.what()));
    }
  }
  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
    throw ConfigError(std::move(issues));
  }
  return c;
}

CaseConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{0, 0, fmt::format("cannot open config file {}", path.string())}});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

PlateauProblem CaseConfig::problem() const {
  return make_problem(gamma1, gamma2, phi1, phi2, zeta_grid, lip_safety);
}

}  // namespace plateau
