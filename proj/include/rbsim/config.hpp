#pragma once

// Sectioned key-value run configuration:
//
//   [device]  q1_t1_us, q1_t2_us, q2_t1_us, q2_t2_us, q1_freq_ghz, q2_freq_ghz,
//             q1_anharm_mhz, q2_anharm_mhz, single_gate_ns, sigma_ns, tau2_ns,
//             cr_m, cr_mu, cr_eta, cr_rate (eps*mu, rad/ns), cr_eps,
//             coupling_j_mhz, detuning_mhz, residual_ix, residual_zi
//   [spam]    thermal_q1, thermal_q2, misassign_q1, misassign_q2,
//             confusion (16 comma-separated entries, row-major)
//   [rb]      lengths ("1-20" or "1,2,4,8"), sequences, shots (N or exact),
//             noise (device | depolarizing), clifford_depolarizing,
//             gate_depolarizing, noisy_inversion, interleaved_gate (zx | index)
//   [qpt]     gate (zx | identity | index), noise (device | none | depolarizing),
//             depolarizing, shots
//   [sweep]   tau2_grid, rabi_max_ns, rabi_step_ns
//   [run]     seed, out, threads
//
// Missing keys keep the measured device defaults.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rbsim/device.hpp"
#include "rbsim/rb.hpp"

namespace rbsim {

enum class NoiseKind { Device, Depolarizing, None };

struct RbNoiseConfig {
  NoiseKind kind = NoiseKind::Device;
  double clifford_depolarizing = 1.0;
  std::optional<double> gate_depolarizing;  // interleaved gate channel
  bool noisy_inversion = true;
  std::optional<std::size_t> interleaved_gate;  // table index; default ZX_{-pi/2}
};

struct QptConfig {
  std::string gate = "zx";
  NoiseKind noise = NoiseKind::Device;
  double depolarizing = 1.0;
  std::optional<int> shots = 1000;
};

struct SweepConfig {
  std::vector<double> tau2_grid = {115, 150, 178, 250, 350, 500, 650, 800};
  double rabi_max_ns = 800.0;
  double rabi_step_ns = 4.0;
};

struct RunConfig {
  DeviceParams device = DeviceParams::measured_defaults();
  SpamModel spam;
  RBConfig rb;
  RbNoiseConfig rb_noise;
  QptConfig qpt;
  SweepConfig sweep;
  std::filesystem::path out_dir = "rbsim_out";

  // Throws ValidationError with the offending field name.
  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text);

}  // namespace rbsim
