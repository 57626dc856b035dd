#include "rbsim/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbsim/clifford.hpp"
#include "rbsim/config.hpp"
#include "rbsim/device.hpp"
#include "rbsim/error.hpp"
#include "rbsim/fit.hpp"
#include "rbsim/io.hpp"
#include "rbsim/rb.hpp"
#include "rbsim/tomography.hpp"

namespace rbsim {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  bool exact = false;
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
  if (g.seed) cfg.rb.seed = *g.seed;
  if (g.out_dir) cfg.out_dir = *g.out_dir;
  if (g.threads) cfg.rb.threads = *g.threads;
  if (g.exact) {
    cfg.rb.shots.reset();
    cfg.qpt.shots.reset();
  }
  cfg.validate();
  return cfg;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string decay_csv(const std::vector<DecayDataset>& data) {
  std::ostringstream os;
  write_decay_csv(os, data);
  return os.str();
}

std::string ptm_csv(const Ptm& r) {
  std::ostringstream os;
  write_ptm_csv(os, r);
  return os.str();
}

std::size_t zx_index(const CliffordTable& table) { return table.lookup(zx_m90_perm()); }

// Noisy executed channel of one table element compiled to layers.
Ptm compiled_channel(const CliffordTable& table, std::size_t index, const DeviceParams& p) {
  Ptm acc = Ptm::Identity();
  for (const auto& layer : table.circuit(index).layers) acc = gate_channel(layer, p) * acc;
  return acc;
}

NoiseModel rb_noise_model(const RunConfig& cfg, const CliffordTable& table, std::size_t gate) {
  NoiseModel model;
  const Ptm ideal_gate = table.element(gate).to_matrix();
  if (cfg.rb_noise.kind == NoiseKind::Device) {
    model = NoiseModel::from_device(table, cfg.device);
    if (!cfg.rb_noise.interleaved_gate) model.interleaved_gate = gate_channel(Layer::zx(), cfg.device);
    else model.interleaved_gate.reset();
  } else if (cfg.rb_noise.kind == NoiseKind::Depolarizing) {
    model = NoiseModel::gate_independent(table, depolarizing_ptm(cfg.rb_noise.clifford_depolarizing));
  } else {
    model = NoiseModel::ideal(table);
  }
  if (cfg.rb_noise.gate_depolarizing) model.interleaved_gate = depolarizing_ptm(*cfg.rb_noise.gate_depolarizing) * ideal_gate;
  model.noisy_inversion = cfg.rb_noise.noisy_inversion;
  return model;
}

int fit_status(std::ostream& err, const std::string& name, const FitResult& fit) {
  if (fit.accepted()) return kExitOk;
  err << "error: fit '" << name << "' did not converge: " << fit.diagnostic << "\n";
  return kExitNumerical;
}

std::string format_estimate(double value, double sigma) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << value << " +/- " << sigma;
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_group_stats(std::ostream& out) {
  const auto& table = two_qubit_cliffords();
  const auto stats = gate_count_stats(table);
  out << "metric,value\n";
  out << "total," << table.size() << "\n";
  for (int c = 0; c < 4; ++c) out << "class_" << c + 1 << "," << stats.class_sizes[c] << "\n";
  out << std::setprecision(17);
  out << "avg_zx," << stats.mean_two_qubit << "\n";
  out << "avg_1q," << stats.mean_single_qubit << "\n";
  out << "avg_1q_with_idle," << stats.mean_single_qubit_with_idle << "\n";
  for (std::size_t k = 0; k < stats.single_qubit_histogram.size(); ++k)
    if (stats.single_qubit_histogram[k]) out << "hist_1q_" << k << "," << stats.single_qubit_histogram[k] << "\n";
  return kExitOk;
}

int cmd_group_verify(std::ostream& out, std::ostream& err, std::optional<std::size_t> corrupt,
                     std::uint64_t seed) {
  const auto& base = two_qubit_cliffords();
  const CliffordTable corrupted = corrupt ? base.with_corrupted_sign(*corrupt, 1) : CliffordTable{};
  const CliffordTable& table = corrupt ? corrupted : base;
  const auto report = verify_table(table, 10000, seed);
  if (!report.ok) {
    for (const auto& f : report.failures) err << "verify: " << f << "\n";
    out << "verify,FAIL\n";
    return kExitValidation;
  }
  const auto sizes = table.class_sizes();
  out << "verify,OK\n"
      << "elements," << table.size() << "\n"
      << "classes," << sizes[0] << "/" << sizes[1] << "/" << sizes[2] << "/" << sizes[3] << "\n"
      << "closure_trials," << report.closure_trials << "\n";
  return kExitOk;
}

int cmd_rb_standard(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& table = two_qubit_cliffords();
  const NoiseModel noise = rb_noise_model(cfg, table, zx_index(table));
  const DecayDataset data = run_rb(cfg.rb, table, noise, cfg.spam);
  const FitResult fit = fit_dataset(data);
  const json summary = rb_summary("standard", cfg.rb.seed, fit, 4);

  write_text(cfg.out_dir / "rb_standard.csv", decay_csv({data}));
  write_text(cfg.out_dir / "rb_standard.json", dump(summary));
  out << "standard RB: alpha = " << format_estimate(fit.params.alpha, fit.sigma_alpha)
      << ", r = " << format_estimate(summary["r"].get<double>(), summary["r_sigma"].get<double>())
      << " (seed " << cfg.rb.seed << ")\n";
  return fit_status(err, "standard", fit);
}

int cmd_rb_interleaved(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& table = two_qubit_cliffords();
  const std::size_t gate = cfg.rb_noise.interleaved_gate.value_or(zx_index(table));
  const NoiseModel noise = rb_noise_model(cfg, table, gate);
  const DecayDataset ref = run_rb(cfg.rb, table, noise, cfg.spam);
  const DecayDataset inter = run_interleaved(cfg.rb, table, noise, cfg.spam, gate);
  const FitResult fit_ref = fit_dataset(ref);
  const FitResult fit_int = fit_dataset(inter);
  const Estimate rc =
      interleaved_error(fit_ref.params.alpha, fit_ref.sigma_alpha, fit_int.params.alpha, fit_int.sigma_alpha, 4);

  json summary = {{"protocol", "interleaved"},
                  {"seed", cfg.rb.seed},
                  {"gate_index", gate},
                  {"alpha", fit_int.params.alpha},
                  {"alpha_sigma", fit_int.sigma_alpha},
                  {"r", rc.value},
                  {"r_sigma", rc.sigma},
                  {"r_warning", rc.warning},
                  {"chi2_red", fit_int.chi2_red},
                  {"standard", rb_summary("standard", cfg.rb.seed, fit_ref, 4)},
                  {"interleaved", rb_summary("interleaved", cfg.rb.seed, fit_int, 4)}};
  write_text(cfg.out_dir / "rb_interleaved.csv", decay_csv({ref, inter}));
  write_text(cfg.out_dir / "rb_interleaved.json", dump(summary));
  out << "interleaved RB: alpha = " << format_estimate(fit_ref.params.alpha, fit_ref.sigma_alpha)
      << ", alpha_C = " << format_estimate(fit_int.params.alpha, fit_int.sigma_alpha)
      << ", r_C = " << format_estimate(rc.value, rc.sigma) << " (seed " << cfg.rb.seed << ")\n";
  if (rc.warning) err << "warning: interleaved decay is slower than the reference decay\n";
  const int a = fit_status(err, "standard", fit_ref);
  const int b = fit_status(err, "interleaved", fit_int);
  return std::max(a, b);
}

int cmd_rb_simultaneous(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& table = two_qubit_cliffords();
  const NoiseModel noise = rb_noise_model(cfg, table, zx_index(table));
  const SimultaneousData data = run_simultaneous_1q(cfg.rb, table, noise, cfg.spam);
  const SimultaneousAnalysis an = analyze_simultaneous(data);

  auto entry = [&](const std::string& name, const FitResult& fit) {
    return rb_summary(name, cfg.rb.seed, fit, 2);
  };
  json summary = {{"protocol", "simultaneous"},
                  {"seed", cfg.rb.seed},
                  {"delta_alpha", an.delta.value},
                  {"delta_alpha_sigma", an.delta.sigma},
                  {"fits",
                   {entry(data.q1.protocol, an.alpha1), entry(data.q2.protocol, an.alpha2),
                    entry(data.cc_q1.protocol, an.alpha1_2), entry(data.cc_q2.protocol, an.alpha2_1),
                    entry(data.cc_joint.protocol, an.alpha12)}}};
  write_text(cfg.out_dir / "rb_simultaneous.csv",
             decay_csv({data.q1, data.q2, data.cc_q1, data.cc_q2, data.cc_joint}));
  write_text(cfg.out_dir / "rb_simultaneous.json", dump(summary));
  out << "simultaneous RB: r1 = " << format_estimate(an.r1.value, an.r1.sigma)
      << ", r2 = " << format_estimate(an.r2.value, an.r2.sigma)
      << ", delta_alpha = " << format_estimate(an.delta.value, an.delta.sigma) << " (seed " << cfg.rb.seed
      << ")\n";
  int status = kExitOk;
  for (const auto* fit : {&an.alpha1, &an.alpha2, &an.alpha1_2, &an.alpha2_1, &an.alpha12})
    status = std::max(status, fit_status(err, "simultaneous", *fit));
  return status;
}

int cmd_qpt(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& table = two_qubit_cliffords();
  Ptm ideal;
  Ptm executed;
  if (cfg.qpt.gate == "zx") {
    ideal = zx_m90_perm().to_matrix();
    executed = gate_channel(Layer::zx(), cfg.device);
  } else if (cfg.qpt.gate == "identity") {
    ideal = Ptm::Identity();
    executed = decoherence_channel(cfg.device, cfg.device.single_gate_ns).ptm();
  } else {
    std::size_t index = 0;
    try {
      index = std::stoul(cfg.qpt.gate);
    } catch (const std::exception&) {
      throw ValidationError("qpt.gate: expected zx, identity or a table index");
    }
    if (index >= table.size()) throw ValidationError("qpt.gate: not a Clifford table index");
    ideal = table.element(index).to_matrix();
    executed = compiled_channel(table, index, cfg.device);
  }
  if (cfg.qpt.noise == NoiseKind::None) executed = ideal;
  if (cfg.qpt.noise == NoiseKind::Depolarizing) executed = depolarizing_ptm(cfg.qpt.depolarizing) * ideal;

  const TomographySettings settings{cfg.qpt.shots, cfg.rb.seed};
  const TomographyRecord record = simulate_qpt(executed, settings, cfg.spam);
  const Ptm raw = linear_inversion_ptm(record);
  const ProjectionResult proj = project_cptp(raw);
  const QptReport report = qpt_report(raw, proj.ptm, ideal);

  std::ostringstream rec;
  write_tomography_csv(rec, record, cfg.rb.seed);
  write_text(cfg.out_dir / "qpt_record.csv", rec.str());
  write_text(cfg.out_dir / "qpt_ptm_raw.csv", ptm_csv(raw));
  write_text(cfg.out_dir / "qpt_ptm_projected.csv", ptm_csv(proj.ptm));
  write_text(cfg.out_dir / "qpt_ptm_ideal.csv", ptm_csv(ideal));
  const json summary = {
      {"protocol", "qpt"},
      {"seed", cfg.rb.seed},
      {"gate", cfg.qpt.gate},
      {"shots", cfg.qpt.shots ? json(*cfg.qpt.shots) : json("exact")},
      {"raw_fidelity", report.raw_fidelity},
      {"projected_fidelity", report.projected_fidelity},
      {"executed_fidelity", avg_gate_fidelity(executed, ideal)},
      {"raw_min_eigenvalue", report.raw_residuals.min_eigenvalue},
      {"raw_tp_residual", report.raw_residuals.tp_residual},
      {"projected_min_eigenvalue", report.projected_residuals.min_eigenvalue},
      {"projected_tp_residual", report.projected_residuals.tp_residual},
      {"projection_iterations", proj.iterations},
      {"projection_converged", proj.converged}};
  write_text(cfg.out_dir / "qpt.json", dump(summary));
  out << "QPT " << cfg.qpt.gate << ": F_raw = " << std::fixed << std::setprecision(4) << report.raw_fidelity
      << ", F_projected = " << report.projected_fidelity << " (seed " << cfg.rb.seed << ")\n";
  if (!proj.converged) {
    err << "error: CPTP projection did not converge in " << proj.iterations << " iterations\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_sweep_rabi(const RunConfig& cfg, std::ostream& out) {
  std::vector<double> taus;
  for (double t = 0.0; t <= cfg.sweep.rabi_max_ns + 1e-9; t += cfg.sweep.rabi_step_ns) taus.push_back(t);
  std::ostringstream os;
  os << "tau_ns,branch,control,p0_target,seed\n" << std::setprecision(17);
  for (const bool echoed : {false, true}) {
    for (const bool excited : {false, true}) {
      const auto trace = echoed ? echoed_rabi_sweep(cfg.device, taus, excited)
                                : cr_rabi_sweep(cfg.device, taus, excited);
      for (std::size_t k = 0; k < taus.size(); ++k)
        os << taus[k] << "," << (echoed ? "echoed" : "direct") << "," << (excited ? 1 : 0) << "," << trace[k]
           << "," << cfg.rb.seed << "\n";
    }
  }
  write_text(cfg.out_dir / "sweep_cr_rabi.csv", os.str());
  out << "cr-rabi: " << taus.size() << " durations x 4 traces written\n";
  return kExitOk;
}

// Exact-mode standard RB with decoherence as the only error.
FitResult decoherence_limit(const RunConfig& cfg, const CliffordTable& table, DeviceParams p) {
  p.residual_ix = 0.0;
  p.residual_zi = 0.0;
  RBConfig rb = cfg.rb;
  rb.shots.reset();
  NoiseModel noise = NoiseModel::from_device(table, p);
  noise.noisy_inversion = cfg.rb_noise.noisy_inversion;
  return fit_dataset(run_rb(rb, table, noise, SpamModel::ideal()));
}

int cmd_sweep_tau2(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& table = two_qubit_cliffords();
  std::ostringstream os;
  os << "tau2_ns,gate_ns,r,r_sigma,r_limit_t2,r_limit_2t1,seed\n" << std::setprecision(17);
  int status = kExitOk;
  for (const double tau2 : cfg.sweep.tau2_grid) {
    const DeviceParams p = cfg.device.with_tau2(tau2);
    NoiseModel noise = NoiseModel::from_device(table, p);
    noise.noisy_inversion = cfg.rb_noise.noisy_inversion;
    const FitResult fit = fit_dataset(run_rb(cfg.rb, table, noise, cfg.spam));
    const Estimate r = error_per_clifford(fit.params.alpha, fit.sigma_alpha, 4);
    const FitResult lim_t2 = decoherence_limit(cfg, table, p);
    const FitResult lim_2t1 = decoherence_limit(cfg, table, p.coherence_limited());
    os << tau2 << "," << p.zx_gate_ns() << "," << r.value << "," << r.sigma << ","
       << error_per_clifford(lim_t2.params.alpha, 4) << "," << error_per_clifford(lim_2t1.params.alpha, 4) << ","
       << cfg.rb.seed << "\n";
    for (const auto* f : {&fit, &lim_t2, &lim_2t1}) status = std::max(status, fit_status(err, "tau2 sweep", *f));
  }
  write_text(cfg.out_dir / "sweep_tau2.csv", os.str());
  out << "tau2 sweep: " << cfg.sweep.tau2_grid.size() << " grid points written (seed " << cfg.rb.seed << ")\n";
  return status;
}

int cmd_fit(const std::string& path, double b0, std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw ValidationError("fit: cannot open " + path);
  const auto datasets = read_decay_csv(in);
  json all = json::array();
  int status = kExitOk;
  for (const auto& data : datasets) {
    const FitResult fit = fit_dataset(data, b0);
    const int d = b0 == 0.5 ? 2 : 4;
    all.push_back(rb_summary(data.protocol, data.seed, fit, d));
    status = std::max(status, fit_status(err, data.protocol, fit));
  }
  out << all.dump(2) << "\n";
  return status;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-qubit randomized benchmarking simulator", "rbsim"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Run configuration file (INI)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master RNG seed");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker thread cap (0: all cores)");
  app.add_flag("--exact", g.exact, "Use exact outcome probabilities instead of shots");

  auto* group = app.add_subcommand("group", "Two-qubit Clifford group tables")->require_subcommand(1);
  group->fallthrough();
  auto* group_stats = group->add_subcommand("stats", "Class sizes and gate counts as CSV");
  auto* group_verify = group->add_subcommand("verify", "Exact closure, inverse and recomposition checks");
  std::optional<std::size_t> corrupt;
  group_verify->add_option("--inject-corruption", corrupt, "Flip one sign of element IDX before verifying");

  auto* rb = app.add_subcommand("rb", "Randomized benchmarking campaigns")->require_subcommand(1);
  rb->fallthrough();
  auto* rb_standard = rb->add_subcommand("standard", "Standard two-qubit RB");
  auto* rb_interleaved = rb->add_subcommand("interleaved", "Interleaved RB of the configured gate");
  auto* rb_simultaneous = rb->add_subcommand("simultaneous", "Simultaneous single-qubit RB");

  auto* qpt = app.add_subcommand("qpt", "Process tomography of the configured gate");

  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps")->require_subcommand(1);
  sweep->fallthrough();
  auto* sweep_rabi = sweep->add_subcommand("cr-rabi", "Cross-resonance Rabi traces");
  auto* sweep_tau2 = sweep->add_subcommand("tau2", "Error per Clifford versus CR segment length");

  auto* fit = app.add_subcommand("fit", "Refit a decay CSV and print the JSON summary");
  std::string fit_path;
  double b0 = 0.25;
  fit->add_option("csv", fit_path, "Decay CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--b0", b0, "Initial asymptote (0.25 two-qubit, 0.5 single-qubit)");

  for (auto* sub : {group_stats, group_verify, rb_standard, rb_interleaved, rb_simultaneous, qpt, sweep_rabi,
                    sweep_tau2, fit})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*group_stats) return cmd_group_stats(out);
    if (*group_verify) return cmd_group_verify(out, err, corrupt, g.seed.value_or(1));
    if (*fit) return cmd_fit(fit_path, b0, out, err);

    const RunConfig cfg = resolve_config(g);
    if (*rb_standard) return cmd_rb_standard(cfg, out, err);
    if (*rb_interleaved) return cmd_rb_interleaved(cfg, out, err);
    if (*rb_simultaneous) return cmd_rb_simultaneous(cfg, out, err);
    if (*qpt) return cmd_qpt(cfg, out, err);
    if (*sweep_rabi) return cmd_sweep_rabi(cfg, out);
    if (*sweep_tau2) return cmd_sweep_tau2(cfg, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace rbsim
