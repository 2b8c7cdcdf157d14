#include "tribaker/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tribaker::io {

namespace fs = std::filesystem;

namespace {

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_out(const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated binary header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void write_header(std::ostream& os, const char* magic, std::uint64_t dim) {
  os.write(magic, 8);
  put_u64(os, dim);
}

std::uint64_t read_header(std::istream& is, const char* magic, const fs::path& path) {
  char got[8];
  if (!is.read(got, 8) || std::memcmp(got, magic, 8) != 0) {
    throw std::runtime_error("bad magic in " + path.string());
  }
  return get_u64(is);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string escape_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out.push_back(',');
      out += escape_field(r[i]);
    }
    out.push_back('\n');
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvTable::write(const fs::path& path) const {
  auto out = open_out(path);
  const std::string s = str();
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

CsvTable CsvTable::read(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto rows = parse_csv(ss.str());
  if (rows.empty()) throw std::runtime_error("empty CSV: " + path.string());
  CsvTable t(rows.front());
  for (std::size_t i = 1; i < rows.size(); ++i) t.add_row(std::move(rows[i]));
  return t;
}

void CsvTable::upsert(const std::vector<std::string>& row, std::size_t key_columns) {
  if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
  auto same_key = [&](const std::vector<std::string>& r) {
    return std::equal(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(key_columns), row.begin());
  };
  std::erase_if(rows_, same_key);
  rows_.push_back(row);
  std::stable_sort(rows_.begin(), rows_.end(), [key_columns](const auto& a, const auto& b) {
    for (std::size_t i = 0; i < key_columns; ++i) {
      if (a[i] == b[i]) continue;
      double x = 0.0;
      double y = 0.0;
      const auto ra = std::from_chars(a[i].data(), a[i].data() + a[i].size(), x);
      const auto rb = std::from_chars(b[i].data(), b[i].data() + b[i].size(), y);
      if (ra.ec == std::errc() && rb.ec == std::errc() && x != y) return x < y;
      return a[i] < b[i];
    }
    return false;
  });
}

void write_pgm(const fs::path& path, int side, const std::vector<double>& values, const PgmOptions& opts) {
  if (opts.bit_depth != 8 && opts.bit_depth != 16) throw std::invalid_argument("write_pgm: bit depth must be 8 or 16");
  if (values.size() != static_cast<std::size_t>(side) * side) throw std::invalid_argument("write_pgm: size mismatch");
  const int maxval = opts.bit_depth == 8 ? 255 : 65535;
  const double vmax = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  constexpr double kLogFloor = 1e-6;

  auto level = [&](double v) -> int {
    if (!(vmax > 0.0) || !(v > 0.0)) return 0;
    double x = v / vmax;
    if (opts.scale == IntensityScale::kLog) {
      x = (std::log10(std::max(x, kLogFloor)) - std::log10(kLogFloor)) / -std::log10(kLogFloor);
    }
    return static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * maxval));
  };

  auto out = open_out(path);
  const std::string header = "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n" +
                             std::to_string(maxval) + "\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (int row = 0; row < side; ++row) {
    const int p_cell = side - 1 - row;
    for (int q_cell = 0; q_cell < side; ++q_cell) {
      const int lv = level(values[static_cast<std::size_t>(q_cell) * side + p_cell]);
      if (opts.bit_depth == 8) {
        out.put(static_cast<char>(lv));
      } else {
        out.put(static_cast<char>(lv >> 8));
        out.put(static_cast<char>(lv & 0xff));
      }
    }
  }
}

PgmImage read_pgm(const fs::path& path) {
  auto in = open_in(path);
  std::string magic;
  PgmImage img;
  in >> magic >> img.width >> img.height >> img.max_value;
  if (magic != "P5" || !in) throw std::runtime_error("not a binary PGM: " + path.string());
  in.get();
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (img.max_value < 256) {
      img.pixels[i] = static_cast<std::uint8_t>(in.get());
    } else {
      const int hi = in.get();
      const int lo = in.get();
      img.pixels[i] = static_cast<std::uint16_t>((hi << 8) | lo);
    }
  }
  if (!in) throw std::runtime_error("truncated PGM: " + path.string());
  return img;
}

CsvTable measure_table(const MeasureGrid& grid) {
  CsvTable t({"q_cell", "p_cell", "weight"});
  for (int a = 0; a < grid.cells_per_side; ++a) {
    for (int b = 0; b < grid.cells_per_side; ++b) {
      t.add_row({std::to_string(a), std::to_string(b), fmt_double(grid.at(a, b))});
    }
  }
  return t;
}

CsvTable image_table(const PhaseSpaceImage& image) {
  CsvTable t({"q_cell", "p_cell", "value"});
  for (int a = 0; a < image.grid_side; ++a) {
    for (int b = 0; b < image.grid_side; ++b) {
      t.add_row({std::to_string(a), std::to_string(b), fmt_double(image.at(a, b))});
    }
  }
  return t;
}

CsvTable spectrum_table(const CVector& eigenvalues) {
  CsvTable t({"index", "re", "im", "abs"});
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    t.add_row({std::to_string(j), fmt_double(eigenvalues(j).real()), fmt_double(eigenvalues(j).imag()),
               fmt_double(std::abs(eigenvalues(j)))});
  }
  return t;
}

CsvTable orbit_table(const std::vector<PeriodicOrbit>& orbits, double reflectivity) {
  CsvTable t({"period", "symbols", "q0", "p0", "total_action", "n_1", "weight", "inside"});
  for (const auto& o : orbits) {
    t.add_row({std::to_string(o.period()), o.symbols.str(), fmt_double(o.points.front().q),
               fmt_double(o.points.front().p), fmt_double(o.total_action), std::to_string(o.opening_symbols),
               fmt_double(orbit_weight(o, reflectivity)), o.inside_repeller ? "1" : "0"});
  }
  return t;
}

CsvTable scar_metadata_table(const ScarBasisSet& basis) {
  CsvTable t({"index", "symbols", "m", "bohr_phase", "inside", "norm_right", "norm_left", "tau"});
  for (int i = 0; i < basis.size(); ++i) {
    const auto& f = basis.functions[static_cast<std::size_t>(i)];
    t.add_row({std::to_string(i), f.orbit.str(), std::to_string(f.m), fmt_double(f.bohr_phase),
               f.inside_repeller ? "1" : "0", fmt_double(f.right.norm()), fmt_double(f.left.norm()),
               std::to_string(f.ehrenfest)});
  }
  return t;
}

void write_matrix(const fs::path& path, const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("write_matrix: matrix is not square");
  auto out = open_out(path);
  write_header(out, kMatrixMagic, static_cast<std::uint64_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_f64(out, m(r, c).real());
      put_f64(out, m(r, c).imag());
    }
  }
}

CMatrix read_matrix(const fs::path& path) {
  auto in = open_in(path);
  const auto n = static_cast<Eigen::Index>(read_header(in, kMatrixMagic, path));
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double re = get_f64(in);
      m(r, c) = Complex(re, get_f64(in));
    }
  }
  return m;
}

void write_vector(const fs::path& path, const CVector& v) {
  auto out = open_out(path);
  write_header(out, kVectorMagic, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    put_f64(out, v(i).real());
    put_f64(out, v(i).imag());
  }
}

CVector read_vector(const fs::path& path) {
  auto in = open_in(path);
  const auto n = static_cast<Eigen::Index>(read_header(in, kVectorMagic, path));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = get_f64(in);
    v(i) = Complex(re, get_f64(in));
  }
  return v;
}

void write_resonances(const fs::path& dir, const ResonanceSet& set) {
  fs::create_directories(dir);
  write_vector(dir / "eigenvalues.bin", set.eigenvalues);
  // Column j of right/left is stored as row j.
  write_matrix(dir / "right.bin", set.right.transpose());
  write_matrix(dir / "left.bin", set.left.transpose());
  CsvTable meta({"defective_index"});
  for (int d : set.defective) meta.add_row({std::to_string(d)});
  meta.write(dir / "defective.csv");
}

ResonanceSet read_resonances(const fs::path& dir, int n_c) {
  ResonanceSet set;
  set.eigenvalues = read_vector(dir / "eigenvalues.bin");
  set.right = read_matrix(dir / "right.bin").transpose();
  set.left = read_matrix(dir / "left.bin").transpose();
  const auto n = static_cast<int>(set.eigenvalues.size());
  if (n_c < 1 || n_c > n) throw std::invalid_argument("read_resonances: n_c out of range");
  for (const auto& row : CsvTable::read(dir / "defective.csv").rows()) set.defective.push_back(std::stoi(row[0]));
  set.n_longlived = n_c;
  const double above = std::abs(set.eigenvalues(n_c - 1));
  const double below = n_c < n ? std::abs(set.eigenvalues(n_c)) : 0.0;
  set.cutoff = 0.5 * (above + below);
  return set;
}

std::string hash_key(const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace tribaker::io
