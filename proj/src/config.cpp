#include "percolab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace percolab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct KeyValue {
  std::string value;
  int line = 0;
};

/// Raw key -> values map preserving repeats.
struct RawConfig {
  std::map<std::string, std::vector<KeyValue>> entries;

  const KeyValue* single(const std::string& key) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    if (it->second.size() != 1)
      throw ConfigError("key '" + key + "' given more than once");
    return &it->second.front();
  }
};

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    raw.entries[key].push_back({value, line_no});
  }
  return raw;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected unsigned integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected number, got '" + v + "'");
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<std::int64_t> out;
  for (const std::string& tok : split_ws(v)) out.push_back(parse_int(key, tok));
  return out;
}

/// "a b | c d" with the '|' separating u0 from u1; a bare "c d" is the
/// k = 0 form.
SplitPoint parse_point(const std::string& key, const std::string& v, int k, int d) {
  SplitPoint p;
  const auto bar = v.find('|');
  std::string left = bar == std::string::npos ? "" : v.substr(0, bar);
  std::string right = bar == std::string::npos ? v : v.substr(bar + 1);
  for (const std::string& tok : split_ws(left)) p.u0.push_back(parse_int(key, tok));
  for (const std::string& tok : split_ws(right)) p.u1.push_back(parse_int(key, tok));
  if (static_cast<int>(p.u0.size()) != k || static_cast<int>(p.u1.size()) != d)
    throw ConfigError("key '" + key + "': point '" + v + "' does not match k=" +
                      std::to_string(k) + ", d=" + std::to_string(d));
  return p;
}

PointRange parse_range(const std::string& key, const std::string& v) {
  const auto toks = split_ws(v);
  if (toks.size() != 3)
    throw ConfigError("key '" + key + "': expected 'lo hi step'");
  PointRange r{parse_int(key, toks[0]), parse_int(key, toks[1]), parse_int(key, toks[2])};
  if (r.step <= 0 || r.hi < r.lo)
    throw ConfigError("key '" + key + "': need lo <= hi and step > 0");
  return r;
}

const std::set<std::string> kCommonKeys = {"k",       "d",       "epsilon", "beta",
                                           "box_lo0", "box_hi0", "box_lo1", "box_hi1",
                                           "n_samples", "seed",  "stream"};

std::set<std::string> allowed_keys(const std::string& command) {
  std::set<std::string> keys;
  if (command == "simulate") {
    keys = kCommonKeys;
    keys.insert({"measure", "point", "long_points", "short_points", "m", "L_values"});
  } else if (command == "certify") {
    keys = kCommonKeys;
    keys.insert({"lambda", "delta_frac", "alpha_frac", "gamma_L_max", "point"});
  } else if (command == "oracle-check") {
    keys = {"seed", "suites", "n_random", "n_model_boxes", "n_mc_instances", "mc_samples",
            "cap"};
  } else if (command == "fit") {
    keys = kCommonKeys;
    keys.insert({"point", "long_points", "short_points", "input_csv", "fixed_q"});
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return keys;
}

void check_tokens(const std::string& key, const std::vector<std::string>& toks,
                  const std::set<std::string>& allowed) {
  for (const std::string& t : toks)
    if (!allowed.contains(t))
      throw ConfigError("key '" + key + "': unknown token '" + t + "'");
}

}  // namespace

std::vector<SplitPoint> ExperimentConfig::measurement_points() const {
  std::vector<SplitPoint> out = points;
  if (long_points) {
    for (std::int64_t r = long_points->lo; r <= long_points->hi; r += long_points->step) {
      SplitPoint p = origin_point(params.k, params.d);
      p.u1[0] = r;
      out.push_back(std::move(p));
    }
  }
  if (short_points) {
    for (std::int64_t s = short_points->lo; s <= short_points->hi; s += short_points->step) {
      SplitPoint p = origin_point(params.k, params.d);
      p.u0[0] = s;
      out.push_back(std::move(p));
    }
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& command) {
  const RawConfig raw = parse_raw(text);
  const std::set<std::string> allowed = allowed_keys(command);

  for (const auto& [key, vals] : raw.entries) {
    if (!allowed.contains(key))
      throw ConfigError("unknown key '" + key + "' (line " +
                        std::to_string(vals.front().line) + ") for command '" + command + "'");
    if (key != "point" && vals.size() > 1)
      throw ConfigError("key '" + key + "' given more than once (line " +
                        std::to_string(vals.back().line) + ")");
  }

  ExperimentConfig c;
  c.command = command;

  auto required = [&](const char* key) -> const std::string& {
    const KeyValue* kv = raw.single(key);
    if (!kv) throw ConfigError("missing required key '" + std::string(key) + "'");
    return kv->value;
  };
  auto optional_kv = [&](const char* key) -> const KeyValue* { return raw.single(key); };

  const bool needs_model = command != "oracle-check";
  if (needs_model) {
    c.params.k = static_cast<int>(parse_int("k", required("k")));
    c.params.d = static_cast<int>(parse_int("d", required("d")));
    c.params.epsilon = parse_real("epsilon", required("epsilon"));
    c.params.beta = parse_real("beta", required("beta"));
    try {
      c.params.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid model parameters: ") + e.what());
    }

    if (c.params.k > 0) {
      c.box.lo0 = parse_int_list("box_lo0", required("box_lo0"));
      c.box.hi0 = parse_int_list("box_hi0", required("box_hi0"));
    } else {
      if (optional_kv("box_lo0") || optional_kv("box_hi0"))
        throw ConfigError("box_lo0/box_hi0 must be omitted when k = 0");
    }
    c.box.lo1 = parse_int_list("box_lo1", required("box_lo1"));
    c.box.hi1 = parse_int_list("box_hi1", required("box_hi1"));
    if (static_cast<int>(c.box.lo0.size()) != c.params.k ||
        static_cast<int>(c.box.lo1.size()) != c.params.d)
      throw ConfigError("box bounds do not match k and d");
    try {
      c.box.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid box: ") + e.what());
    }

    c.seed.seed = parse_u64("seed", required("seed"));
    if (const KeyValue* kv = optional_kv("stream")) c.seed.stream = parse_u64("stream", kv->value);
  } else {
    c.seed.seed = parse_u64("seed", required("seed"));
  }

  auto load_points = [&]() {
    const auto it = raw.entries.find("point");
    if (it != raw.entries.end())
      for (const KeyValue& kv : it->second)
        c.points.push_back(parse_point("point", kv.value, c.params.k, c.params.d));
    if (const KeyValue* kv = optional_kv("long_points"))
      c.long_points = parse_range("long_points", kv->value);
    if (const KeyValue* kv = optional_kv("short_points")) {
      if (c.params.k == 0)
        throw ConfigError("key 'short_points': no short directions when k = 0");
      c.short_points = parse_range("short_points", kv->value);
    }
    for (const SplitPoint& p : c.measurement_points())
      if (!c.box.contains(p))
        throw ConfigError("measurement point " + to_string(p) + " outside the box");
  };

  if (command == "simulate") {
    c.n_samples = parse_u64("n_samples", required("n_samples"));
    c.measure = {"tau", "chi"};
    if (const KeyValue* kv = optional_kv("measure")) {
      c.measure = split_ws(kv->value);
      check_tokens("measure", c.measure, {"tau", "chi", "tm", "tmsup", "gamma"});
      if (c.measure.empty()) throw ConfigError("key 'measure': empty");
    }
    if (const KeyValue* kv = optional_kv("m")) c.m = parse_real("m", kv->value);
    if (c.m < 0.0) throw ConfigError("key 'm': must be >= 0");
    if (const KeyValue* kv = optional_kv("L_values")) {
      c.L_values = parse_int_list("L_values", kv->value);
      for (std::int64_t L : c.L_values)
        if (L < 1) throw ConfigError("key 'L_values': radii must be >= 1");
    }
    load_points();
    auto wants = [&](const char* q) {
      return std::find(c.measure.begin(), c.measure.end(), q) != c.measure.end();
    };
    if ((wants("tau") || wants("tm")) && c.measurement_points().empty())
      throw ConfigError("measuring tau/tm needs at least one point");
    if ((wants("tmsup") || wants("gamma")) && c.L_values.empty())
      throw ConfigError("measuring tmsup/gamma needs L_values");
  } else if (command == "certify") {
    c.n_samples = parse_u64("n_samples", required("n_samples"));
    if (const KeyValue* kv = optional_kv("lambda")) c.lambda = parse_real("lambda", kv->value);
    if (const KeyValue* kv = optional_kv("delta_frac"))
      c.delta_frac = parse_real("delta_frac", kv->value);
    if (const KeyValue* kv = optional_kv("alpha_frac"))
      c.alpha_frac = parse_real("alpha_frac", kv->value);
    if (!(c.lambda > 0.0 && c.lambda < 1.0)) throw ConfigError("key 'lambda': must be in (0,1)");
    if (!(c.delta_frac > 0.0 && c.delta_frac < 1.0))
      throw ConfigError("key 'delta_frac': must be in (0,1)");
    if (!(c.alpha_frac > 0.0 && c.alpha_frac < 1.0))
      throw ConfigError("key 'alpha_frac': must be in (0,1)");
    if (const KeyValue* kv = optional_kv("gamma_L_max"))
      c.gamma_L_max = parse_u64("gamma_L_max", kv->value);
    const auto it = raw.entries.find("point");
    if (it != raw.entries.end())
      for (const KeyValue& kv : it->second)
        c.points.push_back(parse_point("point", kv.value, c.params.k, c.params.d));
    for (const SplitPoint& p : c.points)
      if (!c.box.contains(p))
        throw ConfigError("measurement point " + to_string(p) + " outside the box");
  } else if (command == "oracle-check") {
    c.suites = {"hsl", "fkg", "mc"};
    if (const KeyValue* kv = optional_kv("suites")) {
      c.suites = split_ws(kv->value);
      check_tokens("suites", c.suites, {"hsl", "fkg", "mc"});
      if (c.suites.empty()) throw ConfigError("key 'suites': empty");
    }
    if (const KeyValue* kv = optional_kv("n_random"))
      c.n_random = parse_u64("n_random", kv->value);
    if (const KeyValue* kv = optional_kv("n_model_boxes"))
      c.n_model_boxes = parse_u64("n_model_boxes", kv->value);
    if (const KeyValue* kv = optional_kv("n_mc_instances"))
      c.n_mc_instances = parse_u64("n_mc_instances", kv->value);
    if (const KeyValue* kv = optional_kv("mc_samples"))
      c.mc_samples = parse_u64("mc_samples", kv->value);
    if (const KeyValue* kv = optional_kv("cap")) {
      const std::uint64_t cap = parse_u64("cap", kv->value);
      if (cap < 1 || cap > 30) throw ConfigError("key 'cap': must be in [1,30]");
      c.cap = static_cast<std::uint32_t>(cap);
    }
  } else if (command == "fit") {
    if (const KeyValue* kv = optional_kv("input_csv")) c.input_csv = kv->value;
    if (const KeyValue* kv = optional_kv("fixed_q")) c.fixed_q = parse_real("fixed_q", kv->value);
    if (c.input_csv) {
      if (raw.entries.contains("point") || raw.entries.contains("long_points") ||
          raw.entries.contains("short_points") || raw.entries.contains("n_samples"))
        throw ConfigError("input_csv excludes inline measurement keys");
    } else {
      c.n_samples = parse_u64("n_samples", required("n_samples"));
      load_points();
      if (c.measurement_points().empty())
        throw ConfigError("fit needs points (or input_csv)");
    }
  }

  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command);
}

namespace {

std::string join_ints(const std::vector<std::int64_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

std::string join_tokens(const std::vector<std::string>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

void emit_real(std::ostringstream& os, const char* key, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  os << key << " = " << std::string(buf, r.ptr) << "\n";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# percolab " << c.command << " config\n";
  const bool needs_model = c.command != "oracle-check";
  if (needs_model) {
    os << "k = " << c.params.k << "\n";
    os << "d = " << c.params.d << "\n";
    emit_real(os, "epsilon", c.params.epsilon);
    emit_real(os, "beta", c.params.beta);
    if (c.params.k > 0) {
      os << "box_lo0 = " << join_ints(c.box.lo0) << "\n";
      os << "box_hi0 = " << join_ints(c.box.hi0) << "\n";
    }
    os << "box_lo1 = " << join_ints(c.box.lo1) << "\n";
    os << "box_hi1 = " << join_ints(c.box.hi1) << "\n";
    os << "seed = " << c.seed.seed << "\n";
    os << "stream = " << c.seed.stream << "\n";
  } else {
    os << "seed = " << c.seed.seed << "\n";
  }

  if (c.command == "simulate" || c.command == "certify" ||
      (c.command == "fit" && !c.input_csv)) {
    os << "n_samples = " << c.n_samples << "\n";
  }
  if (c.command == "simulate") {
    os << "measure = " << join_tokens(c.measure) << "\n";
    emit_real(os, "m", c.m);
    if (!c.L_values.empty()) os << "L_values = " << join_ints(c.L_values) << "\n";
  }
  if (c.command == "certify") {
    emit_real(os, "lambda", c.lambda);
    emit_real(os, "delta_frac", c.delta_frac);
    emit_real(os, "alpha_frac", c.alpha_frac);
    if (c.gamma_L_max) os << "gamma_L_max = " << *c.gamma_L_max << "\n";
  }
  if (c.command == "oracle-check") {
    os << "suites = " << join_tokens(c.suites) << "\n";
    os << "n_random = " << c.n_random << "\n";
    os << "n_model_boxes = " << c.n_model_boxes << "\n";
    os << "n_mc_instances = " << c.n_mc_instances << "\n";
    os << "mc_samples = " << c.mc_samples << "\n";
    if (c.cap) os << "cap = " << *c.cap << "\n";
  }
  if (c.command == "fit") {
    if (c.input_csv) os << "input_csv = " << *c.input_csv << "\n";
    if (c.fixed_q) emit_real(os, "fixed_q", *c.fixed_q);
  }
  for (const SplitPoint& p : c.points) os << "point = " << to_string(p) << "\n";
  if (c.long_points)
    os << "long_points = " << c.long_points->lo << " " << c.long_points->hi << " "
       << c.long_points->step << "\n";
  if (c.short_points)
    os << "short_points = " << c.short_points->lo << " " << c.short_points->hi << " "
       << c.short_points->step << "\n";
  return os.str();
}

}  // namespace percolab
