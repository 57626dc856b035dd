#include "rbsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "device.q1_freq_ghz", "device.q2_freq_ghz", "device.q1_anharm_mhz", "device.q2_anharm_mhz",
      "device.q1_t1_us", "device.q1_t2_us", "device.q2_t1_us", "device.q2_t2_us",
      "device.single_gate_ns", "device.sigma_ns", "device.tau2_ns", "device.cr_m", "device.cr_mu",
      "device.cr_eta", "device.cr_rate", "device.cr_eps", "device.coupling_j_mhz", "device.detuning_mhz",
      "device.residual_ix", "device.residual_zi",
      "spam.thermal_q1", "spam.thermal_q2", "spam.misassign_q1", "spam.misassign_q2", "spam.confusion",
      "rb.lengths", "rb.sequences", "rb.shots", "rb.noise", "rb.clifford_depolarizing",
      "rb.gate_depolarizing", "rb.noisy_inversion", "rb.interleaved_gate",
      "qpt.gate", "qpt.noise", "qpt.depolarizing", "qpt.shots",
      "sweep.tau2_grid", "sweep.rabi_max_ns", "sweep.rabi_step_ns",
      "run.seed", "run.out", "run.threads"};
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <class T>
  void get(const std::string& key, T& target) const {
    const auto value = tree_.get_optional<std::string>(key);
    if (!value) return;
    std::istringstream in(*value);
    T parsed{};
    in >> parsed;
    if (in.fail() || !(in >> std::ws).eof()) throw ValidationError(key + ": cannot parse '" + *value + "'");
    target = parsed;
  }

  std::optional<std::string> text(const std::string& key) const {
    const auto value = tree_.get_optional<std::string>(key);
    return value ? std::optional<std::string>(*value) : std::nullopt;
  }

  std::optional<double> number(const std::string& key) const {
    std::optional<double> out;
    if (text(key)) {
      double v = 0.0;
      get(key, v);
      out = v;
    }
    return out;
  }

 private:
  const pt::ptree& tree_;
};

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(key + ": cannot parse list entry '" + item + "'");
    }
  }
  return out;
}

std::vector<int> parse_lengths(const std::string& text) {
  const auto dash = text.find('-');
  if (dash != std::string::npos) {
    const auto bounds = parse_list("rb.lengths", text.substr(0, dash) + "," + text.substr(dash + 1));
    std::vector<int> out;
    for (int k = static_cast<int>(bounds[0]); k <= static_cast<int>(bounds[1]); ++k) out.push_back(k);
    return out;
  }
  std::vector<int> out;
  for (const double v : parse_list("rb.lengths", text)) out.push_back(static_cast<int>(v));
  return out;
}

NoiseKind parse_noise(const std::string& key, const std::string& text) {
  if (text == "device") return NoiseKind::Device;
  if (text == "depolarizing") return NoiseKind::Depolarizing;
  if (text == "none") return NoiseKind::None;
  throw ValidationError(key + ": expected device, depolarizing or none, got '" + text + "'");
}

std::optional<int> parse_shots(const std::string& key, const std::string& text) {
  if (text == "exact") return std::nullopt;
  try {
    return std::stoi(text);
  } catch (const std::exception&) {
    throw ValidationError(key + ": expected a shot count or 'exact'");
  }
}

}  // namespace

void RunConfig::validate() const {
  device.validate();
  spam.validate();
  rb.validate();
  auto probability = [](double p, const std::string& key) {
    if (p < 0.0 || p > 1.0) throw ValidationError(key + ": must lie in [0, 1]");
  };
  probability(rb_noise.clifford_depolarizing, "rb.clifford_depolarizing");
  if (rb_noise.gate_depolarizing) probability(*rb_noise.gate_depolarizing, "rb.gate_depolarizing");
  if (rb_noise.interleaved_gate && *rb_noise.interleaved_gate >= CliffordTable::kSize)
    throw ValidationError("rb.interleaved_gate: not a Clifford table index");
  probability(qpt.depolarizing, "qpt.depolarizing");
  if (qpt.shots && *qpt.shots < 1) throw ValidationError("qpt.shots: must be positive or 'exact'");
  for (const double t : sweep.tau2_grid)
    if (t < 0.0) throw ValidationError("sweep.tau2_grid: durations must be non-negative");
  if (sweep.rabi_step_ns <= 0.0) throw ValidationError("sweep.rabi_step_ns: must be positive");
}

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      if (!known_keys().count(section + "." + key))
        throw ValidationError(section + "." + key + ": unknown configuration key");
    }
  }

  const Reader r(tree);
  RunConfig cfg;
  auto& d = cfg.device;
  r.get("device.q1_freq_ghz", d.qubits[0].frequency_ghz);
  r.get("device.q2_freq_ghz", d.qubits[1].frequency_ghz);
  r.get("device.q1_anharm_mhz", d.qubits[0].anharmonicity_mhz);
  r.get("device.q2_anharm_mhz", d.qubits[1].anharmonicity_mhz);
  r.get("device.q1_t1_us", d.qubits[0].t1_us);
  r.get("device.q1_t2_us", d.qubits[0].t2_us);
  r.get("device.q2_t1_us", d.qubits[1].t1_us);
  r.get("device.q2_t2_us", d.qubits[1].t2_us);
  r.get("device.single_gate_ns", d.single_gate_ns);
  r.get("device.sigma_ns", d.gaussian_sigma_ns);
  r.get("device.tau2_ns", d.tau2_ns);
  r.get("device.cr_m", d.cr_m);
  r.get("device.cr_mu", d.cr_mu);
  r.get("device.cr_eta", d.cr_eta);
  r.get("device.residual_ix", d.residual_ix);
  r.get("device.residual_zi", d.residual_zi);
  d.coupling_j_mhz = r.number("device.coupling_j_mhz");
  d.detuning_mhz = r.number("device.detuning_mhz");
  if (d.cr_mu == 0.0) throw ValidationError("device.cr_mu: must be nonzero");
  if (const auto rate = r.number("device.cr_rate")) {
    d.cr_eps = *rate / d.cr_mu;
  } else if (const auto eps = r.number("device.cr_eps")) {
    d.cr_eps = *eps;
  } else if (d.tau2_ns > 0.0) {
    d.cr_eps = calibrated_cr_rate(d.tau2_ns) / d.cr_mu;
  }

  double mis1 = 0.0, mis2 = 0.0, th1 = 0.0, th2 = 0.0;
  r.get("spam.misassign_q1", mis1);
  r.get("spam.misassign_q2", mis2);
  r.get("spam.thermal_q1", th1);
  r.get("spam.thermal_q2", th2);
  for (const auto& [key, v] : {std::pair{"spam.misassign_q1", mis1}, std::pair{"spam.misassign_q2", mis2}})
    if (v < 0.0 || v > 1.0) throw ValidationError(std::string(key) + ": must lie in [0, 1]");
  cfg.spam = SpamModel::symmetric(mis1, mis2, th1, th2);
  if (const auto m = r.text("spam.confusion")) {
    const auto entries = parse_list("spam.confusion", *m);
    if (entries.size() != 16) throw ValidationError("spam.confusion: expected 16 entries");
    for (int k = 0; k < 16; ++k) cfg.spam.confusion(k / 4, k % 4) = entries[k];
  }

  if (const auto v = r.text("rb.lengths")) cfg.rb.lengths = parse_lengths(*v);
  r.get("rb.sequences", cfg.rb.sequences);
  if (const auto v = r.text("rb.shots")) cfg.rb.shots = parse_shots("rb.shots", *v);
  if (const auto v = r.text("rb.noise")) cfg.rb_noise.kind = parse_noise("rb.noise", *v);
  r.get("rb.clifford_depolarizing", cfg.rb_noise.clifford_depolarizing);
  cfg.rb_noise.gate_depolarizing = r.number("rb.gate_depolarizing");
  if (const auto v = r.text("rb.noisy_inversion")) {
    if (*v != "true" && *v != "false") throw ValidationError("rb.noisy_inversion: expected true or false");
    cfg.rb_noise.noisy_inversion = *v == "true";
  }
  if (const auto v = r.text("rb.interleaved_gate"); v && *v != "zx") {
    std::size_t index = 0;
    r.get("rb.interleaved_gate", index);
    cfg.rb_noise.interleaved_gate = index;
  }

  if (const auto v = r.text("qpt.gate")) cfg.qpt.gate = *v;
  if (const auto v = r.text("qpt.noise")) cfg.qpt.noise = parse_noise("qpt.noise", *v);
  r.get("qpt.depolarizing", cfg.qpt.depolarizing);
  if (const auto v = r.text("qpt.shots")) cfg.qpt.shots = parse_shots("qpt.shots", *v);

  if (const auto v = r.text("sweep.tau2_grid")) cfg.sweep.tau2_grid = parse_list("sweep.tau2_grid", *v);
  r.get("sweep.rabi_max_ns", cfg.sweep.rabi_max_ns);
  r.get("sweep.rabi_step_ns", cfg.sweep.rabi_step_ns);

  r.get("run.seed", cfg.rb.seed);
  r.get("run.threads", cfg.rb.threads);
  if (const auto v = r.text("run.out")) cfg.out_dir = *v;

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace rbsim
