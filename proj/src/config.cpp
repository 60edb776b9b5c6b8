#include "fqlsni/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fqlsni/csv.hpp"
#include "fqlsni/errors.hpp"

namespace fqlsni {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError(where + ": '" + s + "' is not a number");
  return v;
}

/// Reads one section and remembers which keys were consumed.
class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(pt::ptree::path_type(name_, '/'))) node_ = &*child;
  }

  bool present() const { return node_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(pt::ptree::path_type(key, '/'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void num(const std::string& key, double& out) {
    if (auto v = raw(key)) out = to_double(*v, where(key));
  }

  void flag(const std::string& key, bool& out) {
    auto v = raw(key);
    if (!v) return;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
      out = true;
    } else if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
      out = false;
    } else {
      throw ConfigError(where(key) + ": expected a boolean, got '" + *v + "'");
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    auto v = raw(key);
    if (!v) return;
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
    if (ec != std::errc{} || ptr != v->data() + v->size()) throw ConfigError(where(key) + ": bad integer");
    out = x;
  }

  void text(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

  std::optional<std::vector<double>> list(const std::string& key) {
    auto v = raw(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split(*v)) out.push_back(to_double(item, where(key)));
    return out;
  }

  std::optional<std::vector<std::string>> words(const std::string& key) {
    auto v = raw(key);
    if (!v) return std::nullopt;
    return split(*v);
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, _] : *node_) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

 private:
  std::string name_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> used_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::Vector3d to_vec3(const std::vector<double>& v, const std::string& where) {
  if (v.size() != 3) throw ConfigError(where + ": expected three values");
  return {v[0], v[1], v[2]};
}

int parse_axis(const std::string& s) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  throw ConfigError("gust axis must be x, y or z");
}

void read_channel(Section& s, ChannelConfig& ch) {
  if (auto v = s.raw("controller")) ch.controller = parse_controller_kind(*v);
  if (auto v = s.raw("reference")) ch.reference.kind = parse_reference_kind(*v);
  s.num("amplitude", ch.reference.amplitude);
  s.num("period", ch.reference.period);
  s.num("offset", ch.reference.offset);
  s.num("start", ch.reference.start);

  const bool has_gamma = s.raw("gamma").has_value();
  const bool has_beta = s.raw("beta").has_value();
  s.num("gamma", ch.sni.gamma);
  s.num("tau", ch.sni.tau);
  s.num("beta", ch.sni.beta);
  if (has_gamma && !has_beta) ch.sni.beta = ch.sni.gamma + 1.0;

  s.num("kp", ch.pid.kp);
  s.num("ki", ch.pid.ki);
  s.num("kd", ch.pid.kd);
  s.num("derivative_tf", ch.pid.derivative_tf);
  s.num("integrator_limit", ch.pid.integrator_limit);
  if (auto v = s.list("fuzzy_gamma_rates")) ch.fuzzy_table.gamma_rates = to_vector(*v);
  if (auto v = s.list("fuzzy_tau_rates")) ch.fuzzy_table.tau_rates = to_vector(*v);
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  pt::ptree root;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }

  ScenarioConfig cfg;
  std::set<std::string> known;
  auto section = [&](const std::string& name) {
    known.insert(name);
    return Section(root, name);
  };

  {
    auto s = section("scenario");
    s.text("name", cfg.name);
    s.num("duration", cfg.duration);
    s.num("dt", cfg.dt);
    s.seed("seed", cfg.seed);
    s.text("output_dir", cfg.output_dir);
    s.num("qtable_dump_interval", cfg.qtable_dump_interval);
    s.num("settle_band_fraction", cfg.settle_band_fraction);
    s.num("settle_band_floor", cfg.settle_band_floor);
    s.finish();
  }
  {
    auto s = section("plant");
    auto& p = cfg.nominal;
    for (auto [key, field] : std::initializer_list<std::pair<const char*, double*>>{
             {"m", &p.m},     {"Ix", &p.Ix},   {"Iy", &p.Iy},   {"Iz", &p.Iz},   {"Jr", &p.Jr},
             {"Km", &p.Km},   {"Kf", &p.Kf},   {"L", &p.L},     {"g", &p.g},     {"Cdx", &p.Cdx},
             {"Cdy", &p.Cdy}, {"Cdz", &p.Cdz}, {"Cax", &p.Cax}, {"Cay", &p.Cay}, {"Caz", &p.Caz}}) {
      s.num(key, *field);
    }
    s.finish();
  }
  {
    auto s = section("actuator");
    bool enabled = cfg.limits.has_value();
    ActuatorLimits lim = cfg.limits.value_or(ActuatorLimits{});
    s.flag("enabled", enabled);
    s.num("thrust_max", lim.thrust_max);
    s.num("moment_max", lim.moment_max);
    cfg.limits = enabled ? std::optional<ActuatorLimits>(lim) : std::nullopt;
    s.finish();
  }
  {
    auto s = section("fql");
    s.num("eta", cfg.fql.eta);
    s.num("sigma", cfg.fql.sigma);
    s.num("explore_duration", cfg.fql.explore_duration);
    s.num("epsilon", cfg.fql.epsilon);
    if (auto v = s.list("gamma_actions")) cfg.gamma_actions = ActionSet::from(*v);
    if (auto v = s.list("tau_actions")) cfg.tau_actions = ActionSet::from(*v);
    s.finish();
  }
  {
    auto s = section("gain_bounds");
    s.num("gamma_min", cfg.bounds.gamma_min);
    s.num("gamma_max", cfg.bounds.gamma_max);
    s.num("tau_min", cfg.bounds.tau_min);
    s.num("tau_max", cfg.bounds.tau_max);
    s.finish();
  }
  {
    auto s = section("rules");
    if (s.present()) {
      std::vector<GaussianMf> mfs = cfg.rules.mfs();
      std::vector<std::string> labels = cfg.rules.labels();
      double lo = cfg.rules.input_min(), hi = cfg.rules.input_max();
      auto centers = s.list("centers");
      auto widths = s.list("widths");
      if (centers) {
        mfs.assign(centers->size(), GaussianMf{0.0, mfs.empty() ? 1.0 : mfs.front().width});
        for (std::size_t i = 0; i < centers->size(); ++i) mfs[i].center = (*centers)[i];
      }
      if (widths) {
        if (widths->size() == 1) {
          for (auto& mf : mfs) mf.width = widths->front();
        } else if (widths->size() == mfs.size()) {
          for (std::size_t i = 0; i < mfs.size(); ++i) mfs[i].width = (*widths)[i];
        } else {
          throw ConfigError("[rules] widths: need one width or one per center");
        }
      }
      if (auto v = s.words("labels")) labels = *v;
      s.num("input_min", lo);
      s.num("input_max", hi);
      cfg.rules = RuleBase(std::move(mfs), std::move(labels), lo, hi);
    }
    s.finish();
  }
  for (auto c : kChannels) {
    auto s = section("channel." + std::string(kChannelNames[static_cast<std::size_t>(index(c))]));
    read_channel(s, cfg.channel(c));
    s.finish();
  }
  {
    auto s = section("dryden");
    auto& d = cfg.disturbances.dryden;
    s.flag("enabled", cfg.disturbances.dryden_enabled);
    if (auto v = s.list("length_scales")) d.length_scales = to_vec3(*v, s.where("length_scales"));
    if (auto v = s.list("intensities")) d.intensities = to_vec3(*v, s.where("intensities"));
    s.num("airspeed", d.airspeed);
    s.num("cap", d.cap);
    s.seed("seed", d.seed);
    s.finish();
  }
  {
    auto s = section("gust");
    auto& g = cfg.disturbances.gust;
    s.flag("enabled", cfg.disturbances.gust_enabled);
    s.num("amplitude", g.amplitude);
    s.num("duration", g.duration);
    s.num("start", g.start);
    if (auto v = s.raw("axis")) g.axis = parse_axis(*v);
    s.finish();
  }
  {
    auto s = section("coupling");
    s.num("wind_torque_gain", cfg.disturbances.wind_torque_gain);
    s.finish();
  }
  {
    auto s = section("bias");
    auto& b = cfg.disturbances.bias;
    s.flag("enabled", cfg.disturbances.bias_enabled);
    s.num("mass", b.mass);
    s.num("Ix", b.Ix);
    s.num("Iy", b.Iy);
    s.num("Iz", b.Iz);
    s.finish();
  }

  for (const auto& [name, _] : root) {
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

std::string join(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

class Writer {
 public:
  void section(std::string_view name) {
    if (!out_.empty()) out_ += '\n';
    out_ += "[" + std::string(name) + "]\n";
  }
  void put(std::string_view key, std::string_view value) {
    out_ += std::string(key) + " = " + std::string(value) + '\n';
  }
  void put(std::string_view key, double value) { put(key, format_double(value)); }
  void flag(std::string_view key, bool value) { put(key, value ? "true" : "false"); }
  std::string str() && { return std::move(out_); }

 private:
  std::string out_;
};

}  // namespace

std::string to_config_text(const ScenarioConfig& cfg) {
  Writer w;
  w.section("scenario");
  w.put("name", cfg.name);
  w.put("duration", cfg.duration);
  w.put("dt", cfg.dt);
  w.put("seed", std::to_string(cfg.seed));
  if (!cfg.output_dir.empty()) w.put("output_dir", cfg.output_dir);
  w.put("qtable_dump_interval", cfg.qtable_dump_interval);
  w.put("settle_band_fraction", cfg.settle_band_fraction);
  w.put("settle_band_floor", cfg.settle_band_floor);

  const auto& p = cfg.nominal;
  w.section("plant");
  for (auto [key, value] : std::initializer_list<std::pair<const char*, double>>{
           {"m", p.m},     {"Ix", p.Ix},   {"Iy", p.Iy},   {"Iz", p.Iz},   {"Jr", p.Jr},
           {"Km", p.Km},   {"Kf", p.Kf},   {"L", p.L},     {"g", p.g},     {"Cdx", p.Cdx},
           {"Cdy", p.Cdy}, {"Cdz", p.Cdz}, {"Cax", p.Cax}, {"Cay", p.Cay}, {"Caz", p.Caz}}) {
    w.put(key, value);
  }

  w.section("actuator");
  w.flag("enabled", cfg.limits.has_value());
  const ActuatorLimits lim = cfg.limits.value_or(ActuatorLimits{});
  w.put("thrust_max", lim.thrust_max);
  w.put("moment_max", lim.moment_max);

  w.section("fql");
  w.put("eta", cfg.fql.eta);
  w.put("sigma", cfg.fql.sigma);
  w.put("explore_duration", cfg.fql.explore_duration);
  w.put("epsilon", cfg.fql.epsilon);
  w.put("gamma_actions", join(cfg.gamma_actions.consequents));
  w.put("tau_actions", join(cfg.tau_actions.consequents));

  w.section("gain_bounds");
  w.put("gamma_min", cfg.bounds.gamma_min);
  w.put("gamma_max", cfg.bounds.gamma_max);
  w.put("tau_min", cfg.bounds.tau_min);
  w.put("tau_max", cfg.bounds.tau_max);

  w.section("rules");
  std::string centers, widths, labels;
  for (std::size_t i = 0; i < cfg.rules.mfs().size(); ++i) {
    const char* sep = i ? ", " : "";
    centers += sep + format_double(cfg.rules.mfs()[i].center);
    widths += sep + format_double(cfg.rules.mfs()[i].width);
    labels += sep + cfg.rules.labels()[i];
  }
  w.put("centers", centers);
  w.put("widths", widths);
  w.put("labels", labels);
  w.put("input_min", cfg.rules.input_min());
  w.put("input_max", cfg.rules.input_max());

  for (auto c : kChannels) {
    const auto& ch = cfg.channel(c);
    w.section("channel." + std::string(kChannelNames[static_cast<std::size_t>(index(c))]));
    w.put("controller", to_string(ch.controller));
    w.put("reference", to_string(ch.reference.kind));
    w.put("amplitude", ch.reference.amplitude);
    w.put("period", ch.reference.period);
    w.put("offset", ch.reference.offset);
    w.put("start", ch.reference.start);
    w.put("gamma", ch.sni.gamma);
    w.put("tau", ch.sni.tau);
    w.put("beta", ch.sni.beta);
    w.put("kp", ch.pid.kp);
    w.put("ki", ch.pid.ki);
    w.put("kd", ch.pid.kd);
    w.put("derivative_tf", ch.pid.derivative_tf);
    w.put("integrator_limit", ch.pid.integrator_limit);
    w.put("fuzzy_gamma_rates", join(ch.fuzzy_table.gamma_rates));
    w.put("fuzzy_tau_rates", join(ch.fuzzy_table.tau_rates));
  }

  const auto& d = cfg.disturbances;
  w.section("dryden");
  w.flag("enabled", d.dryden_enabled);
  w.put("length_scales", join(d.dryden.length_scales));
  w.put("intensities", join(d.dryden.intensities));
  w.put("airspeed", d.dryden.airspeed);
  w.put("cap", d.dryden.cap);
  w.put("seed", std::to_string(d.dryden.seed));

  w.section("gust");
  w.flag("enabled", d.gust_enabled);
  w.put("amplitude", d.gust.amplitude);
  w.put("duration", d.gust.duration);
  w.put("start", d.gust.start);
  w.put("axis", std::string(1, "xyz"[d.gust.axis]));

  w.section("coupling");
  w.put("wind_torque_gain", d.wind_torque_gain);

  w.section("bias");
  w.flag("enabled", d.bias_enabled);
  w.put("mass", d.bias.mass);
  w.put("Ix", d.bias.Ix);
  w.put("Iy", d.bias.Iy);
  w.put("Iz", d.bias.Iz);
  return std::move(w).str();
}

}  // namespace fqlsni
