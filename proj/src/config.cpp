#include "noma/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace noma {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects any it was not asked about.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

  const json* find(const std::string& name) {
    seen_.insert(name);
    auto it = obj_.find(name);
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& name, T& out) {
    const json* v = find(name);
    if (!v) return;
    out = convert<T>(*v, key(name));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& key) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(key, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (v.is_number_integer()) return v.get<T>();
      if (v.is_number_float()) {
        // Accept integral floats such as 5e6.
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9e18) return static_cast<T>(d);
      }
      throw ConfigError(key, "expected an integer");
    } else {
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) {
        try {
          return to_double(parse_rational(v.get<std::string>()));
        } catch (const std::exception&) {
        }
      }
      throw ConfigError(key, "expected a number");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Eigen::VectorXd read_vector(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = Reader::convert<double>(v[i], key + "[" + std::to_string(i) + "]");
  }
  return out;
}

template <typename E>
E read_enum(const std::string& text, const std::string& key, std::initializer_list<std::pair<const char*, E>> options) {
  std::string allowed;
  for (const auto& [name, value] : options) {
    if (text == name) return value;
    allowed += allowed.empty() ? name : std::string(" | ") + name;
  }
  throw ConfigError(key, "expected one of " + allowed + ", got '" + text + "'");
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// Rethrows invariant violations with the key they belong to.
template <typename F>
void check(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  ScenarioConfig c;
  Reader r(root, "");
  std::string schema;
  r.get("schema", schema);
  if (schema.empty()) throw ConfigError("schema", std::string("missing; expected \"") + kConfigSchema + "\"");
  if (schema != kConfigSchema) throw ConfigError("schema", "unsupported schema '" + schema + "'");
  r.get("users", c.users);
  r.get("nmax", c.n_max);
  if (const json* fam = r.find("family")) {
    if (!fam->is_array()) throw ConfigError("family", "expected an array of \"{i,j}\" strings");
    for (std::size_t i = 0; i < fam->size(); ++i) {
      const std::string key = "family[" + std::to_string(i) + "]";
      check(key, [&] { c.family_members.push_back(VirtualUser::parse(Reader::convert<std::string>((*fam)[i], key))); });
    }
  }
  r.get("slots", c.slots);
  r.get("seed", c.seed);
  r.get("replications", c.replications);
  r.get("jobs", c.jobs);
  r.get("rate_model", c.rate_model);
  r.get("benchmarks", c.benchmarks);
  r.get("cdf_bins", c.cdf_bins);

  if (const json* ch = r.find("channel")) {
    Reader cr(*ch, "channel");
    auto& p = c.channel;
    cr.get("outer_radius_m", p.cell_outer_radius);
    cr.get("inner_radius_m", p.cell_inner_radius);
    cr.get("bandwidth_hz", p.bandwidth);
    cr.get("noise_psd_dbm_hz", p.noise_psd);
    cr.get("noise_figure_db", p.noise_figure);
    cr.get("shadowing_sigma_db", p.shadowing_sigma);
    cr.get("pathloss_intercept_db", p.pathloss_intercept);
    cr.get("pathloss_slope_db", p.pathloss_slope);
    cr.get("max_rate", p.max_rate);
    if (const json* tx = cr.find("tx_power_max_dbm")) p.tx_power_max = Reader::convert<double>(*tx, cr.key("tx_power_max_dbm"));
    cr.get("target_snr_db", p.target_snr);
    cr.get("fading", p.fading);
    cr.get("physical_interference", p.physical_interference);
    std::string shadowing;
    cr.get("shadowing", shadowing);
    if (!shadowing.empty()) {
      c.shadowing = read_enum<Shadowing>(shadowing, cr.key("shadowing"),
                                         {{"per-slot", Shadowing::PerSlot}, {"per-placement", Shadowing::PerPlacement}});
    }
    cr.finish();
  }
  if (const json* d = r.find("demands")) {
    Reader dr(*d, "demands");
    if (const json* v = dr.find("lower")) c.demand_lower = read_vector(*v, "demands.lower");
    if (const json* v = dr.find("upper")) c.demand_upper = read_vector(*v, "demands.upper");
    dr.finish();
  }
  if (const json* m = r.find("mobility")) {
    Reader mr(*m, "mobility");
    std::string model;
    mr.get("model", model);
    if (!model.empty()) {
      c.mobility = read_enum<Mobility>(model, mr.key("model"),
                                       {{"static", Mobility::Static}, {"random-walk", Mobility::RandomWalk}});
    }
    mr.get("speed_min", c.speed_min);
    mr.get("speed_max", c.speed_max);
    mr.get("slot_duration_s", c.slot_duration);
    mr.finish();
  }
  if (const json* a = r.find("adaptation")) {
    Reader ar(*a, "adaptation");
    std::string mode;
    ar.get("mode", mode);
    if (!mode.empty()) {
      c.adaptation = read_enum<AdaptMode>(mode, ar.key("mode"),
                                          {{"algorithm2", AdaptMode::Algorithm2}, {"rm-equality", AdaptMode::RmEquality}});
    }
    ar.get("step_size", c.step_size);
    ar.get("sampling_h", c.sampling_h);
    ar.get("perturb_l", c.perturb_l);
    ar.finish();
  }
  r.finish();

  check("users", [&] {
    if (c.users < 1) throw InvalidArgument("must be >= 1");
  });
  check("nmax", [&] {
    if (c.n_max < 1 || c.n_max > c.users) throw InvalidArgument("must lie in [1, users]");
  });
  check("family", [&] { (void)c.family(); });
  check("channel", [&] { c.channel.validate(); });
  check("slots", [&] {
    if (c.slots < 1) throw InvalidArgument("must be >= 1");
  });
  check("demands", [&] {
    if (c.demand_lower.size() && c.demand_lower.size() != c.users) throw InvalidArgument("lower needs one entry per user");
    if (c.demand_upper.size() && c.demand_upper.size() != c.users) throw InvalidArgument("upper needs one entry per user");
    c.demands().validate();
  });
  check("config", [&] { c.validate(); });
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ScenarioConfig& c) {
  json root;
  root["schema"] = kConfigSchema;
  root["users"] = c.users;
  root["nmax"] = c.n_max;
  if (!c.family_members.empty()) {
    json fam = json::array();
    for (const auto& v : c.family_members) fam.push_back(v.to_string());
    root["family"] = fam;
  }
  root["slots"] = c.slots;
  root["seed"] = c.seed;
  root["replications"] = c.replications;
  root["jobs"] = c.jobs;
  root["rate_model"] = c.rate_model;
  root["benchmarks"] = c.benchmarks;
  root["cdf_bins"] = c.cdf_bins;
  const auto& p = c.channel;
  json ch;
  ch["outer_radius_m"] = p.cell_outer_radius;
  ch["inner_radius_m"] = p.cell_inner_radius;
  ch["bandwidth_hz"] = p.bandwidth;
  ch["noise_psd_dbm_hz"] = p.noise_psd;
  ch["noise_figure_db"] = p.noise_figure;
  ch["shadowing_sigma_db"] = p.shadowing_sigma;
  ch["pathloss_intercept_db"] = p.pathloss_intercept;
  ch["pathloss_slope_db"] = p.pathloss_slope;
  ch["max_rate"] = p.max_rate;
  ch["tx_power_max_dbm"] = p.tx_power_max ? json(*p.tx_power_max) : json(nullptr);
  ch["target_snr_db"] = p.target_snr;
  ch["fading"] = p.fading;
  ch["physical_interference"] = p.physical_interference;
  ch["shadowing"] = c.shadowing == Shadowing::PerSlot ? "per-slot" : "per-placement";
  root["channel"] = ch;
  const auto d = c.demands();
  root["demands"] = {{"lower", vector_json(d.lower)}, {"upper", vector_json(d.upper)}};
  root["mobility"] = {{"model", c.mobility == Mobility::Static ? "static" : "random-walk"},
                      {"speed_min", c.speed_min},
                      {"speed_max", c.speed_max},
                      {"slot_duration_s", c.slot_duration}};
  root["adaptation"] = {{"mode", c.adaptation == AdaptMode::Algorithm2 ? "algorithm2" : "rm-equality"},
                        {"step_size", c.step_size},
                        {"sampling_h", c.sampling_h},
                        {"perturb_l", c.perturb_l}};
  return root.dump(2) + "\n";
}

}  // namespace noma
