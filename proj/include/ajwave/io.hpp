#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ajwave/designer.hpp"
#include "ajwave/harness.hpp"
#include "ajwave/waveform.hpp"

// Serialization: the JSON coefficient file and the CSV formats. All real
// numbers in CSVs are printed as %.12e; every writer has a matching reader
// so outputs can be round-tripped byte-identically.

namespace ajwave {

std::string fmt_real(double v);  // %.12e

struct CoeffFile {
  int n = 0;
  double fhat_hz = 0.0;
  double tc_s = 0.0;
  Eigen::VectorXd coeffs;
  double cost = 0.0;  // seconds
  std::string method;  // "eigen" | "powell"
  std::uint64_t seed = 0;
};

std::string coeff_file_text(const CoeffFile& f);
void write_coeff_file(const std::string& path, const CoeffFile& f);
CoeffFile parse_coeff_file_text(const std::string& text);
CoeffFile read_coeff_file(const std::string& path);

// Sweep CSV: axis,value,n_bits,n_errors,ber,ci_low,ci_high,seed,clamp_count
void write_sweep_csv(std::ostream& os, const std::string& axis, const std::vector<BerPoint>& points);
std::vector<BerPoint> read_sweep_csv(std::istream& is, std::string* axis = nullptr);

// 2-D grid CSV: the sweep columns plus fhat_hz,fj_hz appended.
void write_grid_csv(std::ostream& os, const std::vector<GridBerPoint>& points);
std::vector<GridBerPoint> read_grid_csv(std::istream& is);

// Spectrogram CSV: first column fhat_hz, then one psd@<freq_hz> column per bin.
void write_spectrogram_csv(std::ostream& os, const SpectrogramResult& sg);
SpectrogramResult read_spectrogram_csv(std::istream& is);

// PSD CSV: freq_hz,psd
void write_psd_csv(std::ostream& os, const Spectrum& s);
Spectrum read_psd_csv(std::istream& is);

// Instrumented correlator dump: bit_index,R_k,S_k,J_k,N_k,tau_s
void write_instrument_csv(std::ostream& os, const std::vector<InstrumentRecord>& records);
std::vector<InstrumentRecord> read_instrument_csv(std::istream& is);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ajwave
