#include "zest_cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace zest::cli {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return "override";
  return "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& msg) {
  throw ConfigError(where(node) + ": " + key + ": " + msg);
}

std::string scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a scalar value");
  return node.Scalar();
}

double real(const YAML::Node& node, const std::string& key) {
  try {
    return parse_real(scalar(node, key));
  } catch (const std::invalid_argument& e) {
    fail(node, key, e.what());
  }
}

std::uint64_t unsigned_int(const YAML::Node& node, const std::string& key) {
  const std::string s = scalar(node, key);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    fail(node, key, "expected a non-negative integer, got '" + s + "'");
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) fail(node, key, "integer out of range");
  return v;
}

std::size_t count(const YAML::Node& node, const std::string& key) {
  return static_cast<std::size_t>(unsigned_int(node, key));
}

bool boolean(const YAML::Node& node, const std::string& key) {
  const std::string s = scalar(node, key);
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  fail(node, key, "expected true or false, got '" + s + "'");
}

// Walks a mapping, handing each known key to its handler; any key left over
// is reported as unknown.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  template <class Fn>
  void key(const std::string& name, Fn&& fn) {
    known_.insert(name);
    const YAML::Node child = node_[name];
    if (child) fn(child, qualified(name));
  }

  template <class Fn>
  void required(const std::string& name, Fn&& fn) {
    known_.insert(name);
    const YAML::Node child = node_[name];
    if (!child) fail(node_, qualified(name), "missing required key");
    fn(child, qualified(name));
  }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!known_.count(k)) fail(kv.first, qualified(k), "unknown key");
    }
  }

 private:
  std::string qualified(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

  const YAML::Node node_;
  std::string path_;
  std::set<std::string> known_;
};

AnnealingSpec parse_annealing(const YAML::Node& node, const std::string& path, AnnealingSpec a) {
  MapReader r(node, path);
  r.key("T", [&](const auto& n, const auto& k) { a.T = count(n, k); });
  r.key("scheme", [&](const auto& n, const auto& k) {
    try {
      a.scheme = scheme_from_string(scalar(n, k));
    } catch (const std::invalid_argument& e) {
      fail(n, k, e.what());
    }
  });
  r.key("kernel", [&](const auto& n, const auto& k) {
    try {
      a.kernel.kind = kernel_from_string(scalar(n, k));
    } catch (const std::invalid_argument& e) {
      fail(n, k, e.what());
    }
  });
  r.key("mh_steps", [&](const auto& n, const auto& k) { a.kernel.mh_steps = count(n, k); });
  r.key("mh_step_std", [&](const auto& n, const auto& k) { a.kernel.mh_step_std = real(n, k); });
  r.key("gibbs_sweeps", [&](const auto& n, const auto& k) { a.kernel.gibbs_sweeps = count(n, k); });
  r.finish();
  return a;
}

EstimatorSpec parse_estimator(const YAML::Node& node, const std::string& path, const AnnealingSpec& base) {
  EstimatorSpec e;
  auto kind = [&](const YAML::Node& n, const std::string& k) {
    try {
      e.kind = estimator_from_string(scalar(n, k));
    } catch (const std::invalid_argument& ex) {
      fail(n, k, ex.what());
    }
  };
  if (node.IsScalar()) {
    kind(node, path);
    return e;
  }
  MapReader r(node, path);
  r.required("kind", kind);
  r.key("name", [&](const auto& n, const auto& k) { e.name = scalar(n, k); });
  r.key("annealing", [&](const auto& n, const auto& k) { e.annealing = parse_annealing(n, k, base); });
  r.key("gf", [&](const auto& n, const auto& k) {
    const std::string v = scalar(n, k);
    if (v == "gf1") e.gf = GfChoice::gf1;
    else if (v == "gf2") e.gf = GfChoice::gf2;
    else fail(n, k, "expected gf1 or gf2");
  });
  r.finish();
  return e;
}

void apply_override(YAML::Node& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + spec + "': expected KEY=VALUE");
  const std::string path = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);

  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override '" + spec + "': empty path segment");
    parts.push_back(part);
  }

  YAML::Node cur;
  cur.reset(root);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    const bool last = i + 1 == parts.size();
    YAML::Node next;
    if (cur.IsSequence()) {
      if (p.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("override '" + spec + "': '" + p + "' must index a sequence");
      const std::size_t idx = std::stoul(p);
      if (idx >= cur.size()) throw ConfigError("override '" + spec + "': index " + p + " out of range");
      if (last) {
        cur[idx] = YAML::Load(value);
        return;
      }
      next.reset(cur[idx]);
    } else {
      if (last) {
        cur[p] = YAML::Load(value);
        return;
      }
      next.reset(cur[p]);
    }
    cur.reset(next);
  }
}

}  // namespace

double parse_real(const std::string& token) {
  if (token == "inf" || token == "+inf" || token == ".inf" || token == "+.inf" || token == "Inf" ||
      token == "infinity" || token == "Infinity")
    return std::numeric_limits<double>::infinity();
  if (token == "-inf" || token == "-.inf" || token == "-infinity")
    return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE || std::isnan(v))
    throw std::invalid_argument("expected a real number, got '" + token + "'");
  return v;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError("configuration is empty");
  for (const auto& o : overrides) apply_override(root, o);

  ExperimentConfig c;
  MapReader top(root, "");
  top.required("schema_version", [&](const auto& n, const auto& k) { c.schema_version = static_cast<int>(unsigned_int(n, k)); });
  top.key("experiment_id", [&](const auto& n, const auto& k) { c.experiment_id = scalar(n, k); });
  top.key("target", [&](const auto& n, const auto& k) {
    MapReader r(n, k);
    r.key("kind", [&](const auto& v, const auto& kk) { c.target.kind = scalar(v, kk); });
    r.key("shift", [&](const auto& v, const auto& kk) { c.target.shift = real(v, kk); });
    r.finish();
  });
  top.key("proposal", [&](const auto& n, const auto& k) {
    MapReader r(n, k);
    r.key("kind", [&](const auto& v, const auto& kk) { c.proposal.kind = scalar(v, kk); });
    r.key("K", [&](const auto& v, const auto& kk) { c.proposal.K = count(v, kk); });
    r.key("m", [&](const auto& v, const auto& kk) { c.proposal.m = real(v, kk); });
    r.key("s", [&](const auto& v, const auto& kk) { c.proposal.s = real(v, kk); });
    r.key("mu_min", [&](const auto& v, const auto& kk) { c.proposal.mu_min = real(v, kk); });
    r.key("mu_max", [&](const auto& v, const auto& kk) { c.proposal.mu_max = real(v, kk); });
    r.key("n", [&](const auto& v, const auto& kk) { c.proposal.n = count(v, kk); });
    r.finish();
  });
  top.key("run", [&](const auto& n, const auto& k) {
    MapReader r(n, k);
    r.key("N", [&](const auto& v, const auto& kk) { c.N = count(v, kk); });
    r.key("replicates", [&](const auto& v, const auto& kk) { c.replicates = count(v, kk); });
    r.key("seed", [&](const auto& v, const auto& kk) { c.seed = unsigned_int(v, kk); });
    r.key("cost_matching", [&](const auto& v, const auto& kk) { c.cost_matching = boolean(v, kk); });
    r.key("record_wall_time", [&](const auto& v, const auto& kk) { c.record_wall_time = boolean(v, kk); });
    r.finish();
  });
  // Estimator-level annealing sections start from the experiment-level one.
  top.key("annealing", [&](const auto& n, const auto& k) { c.annealing = parse_annealing(n, k, c.annealing); });
  top.required("estimators", [&](const auto& n, const auto& k) {
    if (!n.IsSequence()) fail(n, k, "expected a list");
    for (std::size_t i = 0; i < n.size(); ++i)
      c.estimators.push_back(parse_estimator(n[i], k + "[" + std::to_string(i) + "]", c.annealing));
  });
  top.key("oracle", [&](const auto& n, const auto& k) {
    MapReader r(n, k);
    r.key("lower", [&](const auto& v, const auto& kk) { c.oracle.lower = real(v, kk); });
    r.key("upper", [&](const auto& v, const auto& kk) { c.oracle.upper = real(v, kk); });
    r.key("points", [&](const auto& v, const auto& kk) { c.oracle.points = count(v, kk); });
    r.key("tiny", [&](const auto& v, const auto& kk) {
      if (!v.IsSequence()) fail(v, kk, "expected a list");
      for (std::size_t i = 0; i < v.size(); ++i) {
        TinyGfSpec t;
        MapReader tr(v[i], kk + "[" + std::to_string(i) + "]");
        tr.key("N", [&](const auto& x, const auto& kx) { t.N = count(x, kx); });
        tr.key("K", [&](const auto& x, const auto& kx) { t.K = count(x, kx); });
        tr.key("m", [&](const auto& x, const auto& kx) { t.m = real(x, kx); });
        tr.key("s", [&](const auto& x, const auto& kx) { t.s = real(x, kx); });
        tr.key("gf", [&](const auto& x, const auto& kx) { t.gf = scalar(x, kx); });
        tr.finish();
        c.oracle.tiny.push_back(t);
      }
    });
    r.finish();
  });
  top.finish();

  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("validation: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

}  // namespace zest::cli
