#include "rbsim/io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

void write_decay_csv(std::ostream& out, const std::vector<DecayDataset>& data) {
  out << "protocol,length,seq_index,p00,shots,seed\n";
  out << std::setprecision(17);
  for (const auto& d : data) {
    const std::string shots = d.shots ? std::to_string(*d.shots) : "exact";
    for (std::size_t l = 0; l < d.lengths.size(); ++l)
      for (std::size_t s = 0; s < d.values[l].size(); ++s)
        out << d.protocol << ',' << d.lengths[l] << ',' << s << ',' << d.values[l][s] << ',' << shots << ','
            << d.seed << '\n';
  }
}

std::vector<DecayDataset> read_decay_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "protocol,length,seq_index,p00,shots,seed")
    throw ValidationError("decay CSV: unexpected header");
  std::vector<DecayDataset> out;
  std::map<std::string, std::size_t> slot;
  std::vector<std::map<int, std::map<int, double>>> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) throw ValidationError("decay CSV: expected 6 fields in '" + line + "'");
    auto [it, fresh] = slot.emplace(f[0], out.size());
    if (fresh) {
      DecayDataset d;
      d.protocol = f[0];
      d.seed = std::stoull(f[5]);
      if (f[4] != "exact") d.shots = std::stoi(f[4]);
      out.push_back(std::move(d));
      rows.emplace_back();
    }
    rows[it->second][std::stoi(f[1])][std::stoi(f[2])] = std::stod(f[3]);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (const auto& [length, seqs] : rows[k]) {
      out[k].lengths.push_back(length);
      std::vector<double> v;
      for (const auto& [s, value] : seqs) v.push_back(value);
      out[k].values.push_back(std::move(v));
    }
  }
  return out;
}

void write_ptm_csv(std::ostream& out, const Ptm& r) {
  for (int j = 0; j < 16; ++j) out << (j ? "," : "") << PauliLabel(j).name();
  out << '\n' << std::setprecision(17);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) out << (j ? "," : "") << r(i, j);
    out << '\n';
  }
}

Ptm read_ptm_csv(std::istream& in) {
  std::string line;
  std::getline(in, line);
  const auto header = split(trim(line), ',');
  if (header.size() != 16) throw ValidationError("PTM CSV: header must have 16 labels");
  for (int j = 0; j < 16; ++j)
    if (header[j] != PauliLabel(j).name()) throw ValidationError("PTM CSV: unexpected label " + header[j]);
  Ptm r;
  for (int i = 0; i < 16; ++i) {
    if (!std::getline(in, line)) throw ValidationError("PTM CSV: expected 16 rows");
    const auto f = split(trim(line), ',');
    if (f.size() != 16) throw ValidationError("PTM CSV: expected 16 columns");
    for (int j = 0; j < 16; ++j) r(i, j) = std::stod(f[j]);
  }
  return r;
}

void write_tomography_csv(std::ostream& out, const TomographyRecord& rec, std::uint64_t seed) {
  out << "prep_index,meas_index,p00,p01,p10,p11,seed\n" << std::setprecision(17);
  for (std::size_t a = 0; a < rec.probabilities.size(); ++a)
    for (std::size_t b = 0; b < rec.probabilities[a].size(); ++b) {
      const auto& p = rec.probabilities[a][b];
      out << a << ',' << b << ',' << p[0] << ',' << p[1] << ',' << p[2] << ',' << p[3] << ',' << seed << '\n';
    }
}

nlohmann::json fit_to_json(const FitResult& fit) {
  return {{"A", fit.params.a},
          {"B", fit.params.b},
          {"alpha", fit.params.alpha},
          {"A_sigma", fit.sigma_a},
          {"B_sigma", fit.sigma_b},
          {"alpha_sigma", fit.sigma_alpha},
          {"chi2_red", fit.chi2_red},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"degenerate", fit.degenerate},
          {"alpha_in_range", fit.alpha_in_range()},
          {"diagnostic", fit.diagnostic}};
}

nlohmann::json rb_summary(const std::string& protocol, std::uint64_t seed, const FitResult& fit, int d) {
  const Estimate r = error_per_clifford(fit.params.alpha, fit.sigma_alpha, d);
  nlohmann::json j = fit_to_json(fit);
  j["protocol"] = protocol;
  j["seed"] = seed;
  j["r"] = r.value;
  j["r_sigma"] = r.sigma;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << content;
}

}  // namespace rbsim
