#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tribaker/classical_map.hpp"
#include "tribaker/periodic_orbits.hpp"
#include "tribaker/phase_space.hpp"
#include "tribaker/quantum_map.hpp"
#include "tribaker/scar_basis.hpp"
#include "tribaker/types.hpp"

namespace tribaker::io {

/// RFC-4180 table with LF line endings. Numbers are written in the shortest
/// form that parses back to the same double.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
  [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::string str() const;

  void write(const std::filesystem::path& path) const;
  static CsvTable read(const std::filesystem::path& path);

  /// Replaces rows whose first `key_columns` fields equal the new row's and
  /// appends the rest, then sorts rows by key.
  void upsert(const std::vector<std::string>& row, std::size_t key_columns);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt_double(double v);
std::string escape_field(const std::string& field);

enum class IntensityScale { kLinear, kLog };

struct PgmOptions {
  int bit_depth = 8;  // 8 or 16
  IntensityScale scale = IntensityScale::kLinear;
};

/// Binary P5 graymap of a row-major width x height array. p runs upward, so
/// image row 0 is the top (largest p).
void write_pgm(const std::filesystem::path& path, int side, const std::vector<double>& q_major_values,
               const PgmOptions& opts);

struct PgmImage {
  int width = 0;
  int height = 0;
  int max_value = 0;
  std::vector<std::uint16_t> pixels;
};
PgmImage read_pgm(const std::filesystem::path& path);

CsvTable measure_table(const MeasureGrid& grid);
CsvTable image_table(const PhaseSpaceImage& image);
CsvTable spectrum_table(const CVector& eigenvalues);
CsvTable orbit_table(const std::vector<PeriodicOrbit>& orbits, double reflectivity);
CsvTable scar_metadata_table(const ScarBasisSet& basis);

/// Raw complex dump: 8-byte magic, uint64 LE dimension, then interleaved
/// real/imaginary float64 LE values (matrices row-major, N x N).
inline constexpr char kMatrixMagic[9] = "TBKCMAT1";
inline constexpr char kVectorMagic[9] = "TBKCVEC1";

void write_matrix(const std::filesystem::path& path, const CMatrix& m);
CMatrix read_matrix(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, const CVector& v);
CVector read_vector(const std::filesystem::path& path);

/// Resonance cache: eigenvalues, right and left blocks, n_c.
void write_resonances(const std::filesystem::path& dir, const ResonanceSet& set);
ResonanceSet read_resonances(const std::filesystem::path& dir, int n_c);

/// FNV-1a over a key string; used for content-addressed cache folders.
std::string hash_key(const std::string& key);

}  // namespace tribaker::io
