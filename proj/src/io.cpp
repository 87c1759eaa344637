#include "ajwave/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ajwave {

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double to_real(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("csv: malformed real '" + s + "'");
  return v;
}

long long to_count(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::runtime_error("csv: malformed integer '" + s + "'");
  return v;
}

std::uint64_t to_seed(const std::string& s) {
  std::size_t pos = 0;
  const std::uint64_t v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::runtime_error("csv: malformed seed '" + s + "'");
  return v;
}

std::string expect_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(std::string("csv: missing ") + what);
  return line;
}

void write_ber_fields(std::ostream& os, const BerPoint& p) {
  os << p.n_bits << ',' << p.n_errors << ',' << fmt_real(p.ber) << ',' << fmt_real(p.ci_low) << ','
     << fmt_real(p.ci_high) << ',' << p.seed << ',' << p.clamp_count;
}

BerPoint parse_ber_fields(const std::vector<std::string>& f, std::size_t off) {
  BerPoint p;
  p.n_bits = to_count(f[off]);
  p.n_errors = to_count(f[off + 1]);
  p.ber = to_real(f[off + 2]);
  p.ci_low = to_real(f[off + 3]);
  p.ci_high = to_real(f[off + 4]);
  p.seed = to_seed(f[off + 5]);
  p.clamp_count = to_count(f[off + 6]);
  return p;
}

}  // namespace

std::string coeff_file_text(const CoeffFile& f) {
  nlohmann::ordered_json j;
  j["n"] = f.n;
  j["fhat_hz"] = f.fhat_hz;
  j["tc_s"] = f.tc_s;
  j["coeffs"] = std::vector<double>(f.coeffs.begin(), f.coeffs.end());
  j["cost"] = f.cost;
  j["method"] = f.method;
  j["seed"] = f.seed;
  return j.dump(2) + "\n";
}

void write_coeff_file(const std::string& path, const CoeffFile& f) {
  write_text_file(path, coeff_file_text(f));
}

CoeffFile parse_coeff_file_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CoeffFile f;
  f.n = j.at("n").get<int>();
  f.fhat_hz = j.at("fhat_hz").get<double>();
  f.tc_s = j.at("tc_s").get<double>();
  const auto vals = j.at("coeffs").get<std::vector<double>>();
  f.coeffs = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  f.cost = j.at("cost").get<double>();
  f.method = j.at("method").get<std::string>();
  f.seed = j.at("seed").get<std::uint64_t>();
  if (f.n != static_cast<int>(f.coeffs.size())) {
    throw std::runtime_error("coefficient file: n does not match the coefficient count");
  }
  return f;
}

CoeffFile read_coeff_file(const std::string& path) {
  return parse_coeff_file_text(read_text_file(path));
}

void write_sweep_csv(std::ostream& os, const std::string& axis, const std::vector<BerPoint>& points) {
  os << "axis,value,n_bits,n_errors,ber,ci_low,ci_high,seed,clamp_count\n";
  for (const auto& p : points) {
    os << axis << ',' << fmt_real(p.swept_value) << ',';
    write_ber_fields(os, p);
    os << '\n';
  }
}

std::vector<BerPoint> read_sweep_csv(std::istream& is, std::string* axis) {
  const std::string header = expect_line(is, "sweep header");
  if (header != "axis,value,n_bits,n_errors,ber,ci_low,ci_high,seed,clamp_count") {
    throw std::runtime_error("csv: unexpected sweep header");
  }
  std::vector<BerPoint> points;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("csv: sweep row needs 9 fields");
    if (axis) *axis = f[0];
    BerPoint p = parse_ber_fields(f, 2);
    p.swept_value = to_real(f[1]);
    points.push_back(p);
  }
  return points;
}

void write_grid_csv(std::ostream& os, const std::vector<GridBerPoint>& points) {
  os << "axis,value,n_bits,n_errors,ber,ci_low,ci_high,seed,clamp_count,fhat_hz,fj_hz\n";
  for (const auto& g : points) {
    os << "fhat_vs_fJ_grid," << fmt_real(g.point.swept_value) << ',';
    write_ber_fields(os, g.point);
    os << ',' << fmt_real(g.fhat_hz) << ',' << fmt_real(g.fj_hz) << '\n';
  }
}

std::vector<GridBerPoint> read_grid_csv(std::istream& is) {
  const std::string header = expect_line(is, "grid header");
  if (header != "axis,value,n_bits,n_errors,ber,ci_low,ci_high,seed,clamp_count,fhat_hz,fj_hz") {
    throw std::runtime_error("csv: unexpected grid header");
  }
  std::vector<GridBerPoint> points;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) throw std::runtime_error("csv: grid row needs 11 fields");
    GridBerPoint g;
    g.point = parse_ber_fields(f, 2);
    g.point.swept_value = to_real(f[1]);
    g.fhat_hz = to_real(f[9]);
    g.fj_hz = to_real(f[10]);
    points.push_back(g);
  }
  return points;
}

void write_spectrogram_csv(std::ostream& os, const SpectrogramResult& sg) {
  os << "fhat_hz";
  for (Eigen::Index c = 0; c < sg.freqs_hz.size(); ++c) os << ",psd@" << fmt_real(sg.freqs_hz[c]);
  os << '\n';
  for (Eigen::Index r = 0; r < sg.fhat_hz.size(); ++r) {
    os << fmt_real(sg.fhat_hz[r]);
    for (Eigen::Index c = 0; c < sg.psd_rows.cols(); ++c) os << ',' << fmt_real(sg.psd_rows(r, c));
    os << '\n';
  }
}

SpectrogramResult read_spectrogram_csv(std::istream& is) {
  const std::string header = expect_line(is, "spectrogram header");
  const auto cols = split_csv_line(header);
  if (cols.size() < 2 || cols[0] != "fhat_hz") throw std::runtime_error("csv: unexpected spectrogram header");
  SpectrogramResult sg;
  sg.freqs_hz.resize(static_cast<Eigen::Index>(cols.size() - 1));
  for (std::size_t c = 1; c < cols.size(); ++c) {
    if (cols[c].rfind("psd@", 0) != 0) throw std::runtime_error("csv: unexpected spectrogram column");
    sg.freqs_hz[static_cast<Eigen::Index>(c - 1)] = to_real(cols[c].substr(4));
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> fhats;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != cols.size()) throw std::runtime_error("csv: spectrogram row width mismatch");
    fhats.push_back(to_real(f[0]));
    std::vector<double> row(f.size() - 1);
    for (std::size_t c = 1; c < f.size(); ++c) row[c - 1] = to_real(f[c]);
    rows.push_back(std::move(row));
  }
  sg.fhat_hz = Eigen::Map<const Eigen::VectorXd>(fhats.data(), static_cast<Eigen::Index>(fhats.size()));
  sg.psd_rows.resize(static_cast<Eigen::Index>(rows.size()), sg.freqs_hz.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    sg.psd_rows.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[r].data(), sg.freqs_hz.size());
  }
  return sg;
}

void write_psd_csv(std::ostream& os, const Spectrum& s) {
  os << "freq_hz,psd\n";
  for (Eigen::Index m = 0; m < s.freqs_hz.size(); ++m) {
    os << fmt_real(s.freqs_hz[m]) << ',' << fmt_real(s.psd[m]) << '\n';
  }
}

Spectrum read_psd_csv(std::istream& is) {
  const std::string header = expect_line(is, "psd header");
  if (header != "freq_hz,psd") throw std::runtime_error("csv: unexpected psd header");
  std::vector<double> freqs, vals;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2) throw std::runtime_error("csv: psd row needs 2 fields");
    freqs.push_back(to_real(f[0]));
    vals.push_back(to_real(f[1]));
  }
  Spectrum s;
  s.freqs_hz = Eigen::Map<const Eigen::VectorXd>(freqs.data(), static_cast<Eigen::Index>(freqs.size()));
  s.psd = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  if (s.freqs_hz.size() >= 2) s.df_hz = s.freqs_hz[1] - s.freqs_hz[0];
  return s;
}

void write_instrument_csv(std::ostream& os, const std::vector<InstrumentRecord>& records) {
  os << "bit_index,R_k,S_k,J_k,N_k,tau_s\n";
  for (const auto& r : records) {
    os << r.bit_index << ',' << fmt_real(r.r) << ',' << fmt_real(r.s) << ',' << fmt_real(r.j) << ','
       << fmt_real(r.n) << ',' << fmt_real(r.tau_s) << '\n';
  }
}

std::vector<InstrumentRecord> read_instrument_csv(std::istream& is) {
  const std::string header = expect_line(is, "instrument header");
  if (header != "bit_index,R_k,S_k,J_k,N_k,tau_s") throw std::runtime_error("csv: unexpected instrument header");
  std::vector<InstrumentRecord> records;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("csv: instrument row needs 6 fields");
    InstrumentRecord r;
    r.bit_index = to_count(f[0]);
    r.r = to_real(f[1]);
    r.s = to_real(f[2]);
    r.j = to_real(f[3]);
    r.n = to_real(f[4]);
    r.tau_s = to_real(f[5]);
    records.push_back(r);
  }
  return records;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ajwave
