#pragma once

// CSV and JSON emitters for campaign results.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "rbsim/fit.hpp"
#include "rbsim/pauli.hpp"
#include "rbsim/rb.hpp"
#include "rbsim/tomography.hpp"

namespace rbsim {

// Long format: protocol,length,seq_index,p00,shots,seed. `shots` is
// "exact" in probability mode; values are written with full precision.
void write_decay_csv(std::ostream& out, const std::vector<DecayDataset>& data);
// Groups rows by protocol, preserving first-seen order.
std::vector<DecayDataset> read_decay_csv(std::istream& in);

// 16 x 16 grid with header II,IX,...,ZZ; row k is label k.
void write_ptm_csv(std::ostream& out, const Ptm& r);
Ptm read_ptm_csv(std::istream& in);

// prep_index,meas_index,p00,p01,p10,p11,seed
void write_tomography_csv(std::ostream& out, const TomographyRecord& rec, std::uint64_t seed);

nlohmann::json fit_to_json(const FitResult& fit);
// {protocol, seed, alpha, alpha_sigma, r, r_sigma, chi2_red, ...}
nlohmann::json rb_summary(const std::string& protocol, std::uint64_t seed, const FitResult& fit, int d);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace rbsim
