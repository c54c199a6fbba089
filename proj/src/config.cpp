#include "nsinfer/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "nsinfer/error.hpp"
#include "nsinfer/format.hpp"

namespace nsinfer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

bool parse_count(const std::string& text, long long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

// Splits on commas outside parentheses.
std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  for (char ch : value) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  items.push_back(trim(cur));
  return items;
}

}  // namespace

CovarianceSpec parse_design(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "identity") return CovarianceSpec::identity();
  const auto open = text.find('(');
  if (open != std::string::npos && text.back() == ')') {
    const std::string kind = text.substr(0, open);
    double rho = 0.0;
    if (parse_real(text.substr(open + 1, text.size() - open - 2), rho)) {
      if (kind == "toeplitz") return CovarianceSpec::toeplitz(rho);
      if (kind == "equicorrelated") return CovarianceSpec::equicorrelated(rho);
    }
  }
  throw ParameterError("unknown design '" + text + "' (expected toeplitz(r), identity or equicorrelated(r))");
}

Index SparsityValue::resolve(Index n, Index p) const {
  switch (kind) {
    case Kind::P:
      return p;
    case Kind::N:
      return n;
    case Kind::Count:
      break;
  }
  return count;
}

std::string SparsityValue::to_string() const {
  if (kind == Kind::P) return "p";
  if (kind == Kind::N) return "n";
  return std::to_string(count);
}

SparsityValue SparsityValue::parse(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "p") return {Kind::P, 0};
  if (text == "n") return {Kind::N, 0};
  long long v = 0;
  if (!parse_count(text, v) || v < 1) throw ParameterError("sparsity must be a positive count, p or n; got '" + text + "'");
  return {Kind::Count, static_cast<Index>(v)};
}

std::vector<ScenarioConfig> ScenarioGrid::expand() const {
  std::vector<ScenarioConfig> cells;
  for (Method m : methods) {
    for (const CovarianceSpec& d : designs) {
      for (const ErrorDist& e : errors) {
        for (const SparsityValue& s : sparsity) {
          for (double hv : h) {
            ScenarioConfig c = base;
            c.method = m;
            c.design = d;
            c.error = e;
            c.s = s.resolve(base.n, base.p);
            c.h = hv;
            c.validate();
            cells.push_back(c);
          }
        }
      }
    }
  }
  return cells;
}

ScenarioGrid parse_grid(const std::string& text) {
  ScenarioGrid g;
  ScenarioConfig& b = g.base;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");

    auto real = [&](double& dst) {
      if (!parse_real(value, dst)) throw ConfigError(where + key + " expects a number, got '" + value + "'");
    };
    auto count = [&](Index& dst) {
      long long v = 0;
      if (!parse_count(value, v)) throw ConfigError(where + key + " expects an integer, got '" + value + "'");
      dst = static_cast<Index>(v);
    };

    try {
      if (key == "name") {
        g.name = value;
      } else if (key == "sample_mode") {
        b.sample_mode = parse_sample_mode(value);
      } else if (key == "scale_c") {
        real(b.scale_c);
      } else if (key == "n") {
        count(b.n);
      } else if (key == "p") {
        count(b.p);
      } else if (key == "alpha") {
        real(b.alpha);
      } else if (key == "reps") {
        count(b.reps);
      } else if (key == "draws") {
        count(b.draws);
      } else if (key == "seed") {
        std::uint64_t v = 0;
        auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
          throw ConfigError(where + "seed expects a nonnegative integer, got '" + value + "'");
        }
        b.seed = v;
      } else if (key == "eta") {
        real(b.eta);
      } else if (key == "rho0") {
        real(b.rho0);
      } else if (key == "lambda") {
        real(b.lambda);
      } else if (key == "wdl_sigma") {
        b.wdl_sigma = parse_wdl_sigma(value);
      } else if (key == "lp_max_iters") {
        count(b.lp_max_iters);
      } else if (key == "theta_rho") {
        b.theta_rho = parse_optional_rho_mode(value);
      } else if (key == "pi_rho") {
        b.pi_rho = parse_rho_mode(value);
      } else if (key == "group") {
        std::string spaced = value;
        for (char& ch : spaced) {
          if (ch == ',') ch = ' ';
        }
        std::istringstream gs(spaced);
        std::string tok;
        b.group.clear();
        while (gs >> tok) {
          long long v = 0;
          if (!parse_count(tok, v) || v < 1) throw ConfigError(where + "group indices are 1-based positive integers");
          b.group.push_back(static_cast<Index>(v - 1));
        }
      } else if (key == "methods") {
        g.methods.clear();
        for (const auto& item : split_list(value)) g.methods.push_back(parse_method(item));
      } else if (key == "designs") {
        g.designs.clear();
        for (const auto& item : split_list(value)) g.designs.push_back(parse_design(item));
      } else if (key == "errors") {
        g.errors.clear();
        for (const auto& item : split_list(value)) g.errors.push_back(ErrorDist::parse(item));
      } else if (key == "sparsity") {
        g.sparsity.clear();
        for (const auto& item : split_list(value)) g.sparsity.push_back(SparsityValue::parse(item));
      } else if (key == "h") {
        g.h.clear();
        for (const auto& item : split_list(value)) {
          double v = 0.0;
          if (!parse_real(item, v)) throw ConfigError(where + "h expects numbers, got '" + item + "'");
          g.h.push_back(v);
        }
      } else {
        throw ConfigError(where + "unknown key '" + key + "'");
      }
    } catch (const ParameterError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return g;
}

ScenarioGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str());
}

Scale parse_scale(const std::string& text) {
  if (text == "desk") return Scale::Desk;
  if (text == "paper") return Scale::Paper;
  throw ConfigError("unknown scale '" + text + "' (expected desk or paper)");
}

void apply_scale(ScenarioGrid& grid, Scale scale) {
  if (scale == Scale::Desk) {
    grid.base.n = 100;
    grid.base.p = 120;
    grid.base.reps = 200;
  } else {
    grid.base.n = 200;
    grid.base.p = 500;
    grid.base.reps = 100;
  }
}

std::string format_scenario(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "sample_mode = " << to_string(c.sample_mode) << "\n";
  out << "scale_c = " << format_double(c.scale_c) << "\n";
  out << "n = " << c.n << "\n";
  out << "p = " << c.p << "\n";
  out << "group =";
  for (Index g : c.group) out << " " << g + 1;
  out << "\n";
  out << "alpha = " << format_double(c.alpha) << "\n";
  out << "reps = " << c.reps << "\n";
  out << "draws = " << c.draws << "\n";
  out << "seed = " << c.seed << "\n";
  out << "eta = " << format_double(c.eta) << "\n";
  out << "rho0 = " << format_double(c.rho0) << "\n";
  out << "lambda = " << format_double(c.lambda) << "\n";
  out << "wdl_sigma = " << to_string(c.wdl_sigma) << "\n";
  out << "lp_max_iters = " << c.lp_max_iters << "\n";
  out << "theta_rho = " << to_string(c.theta_rho) << "\n";
  out << "pi_rho = " << to_string(c.pi_rho) << "\n";
  out << "methods = " << to_string(c.method) << "\n";
  out << "designs = " << c.design.to_string() << "\n";
  out << "errors = " << c.error.to_string() << "\n";
  out << "sparsity = " << c.s << "\n";
  out << "h = " << format_double(c.h) << "\n";
  return out.str();
}

}  // namespace nsinfer
