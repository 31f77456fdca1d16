#pragma once

#include <json.hpp>

#include "bhs/covering.hpp"
#include "bhs/homog.hpp"

namespace bhs {

using Json = nlohmann::json;

// Cell descriptor schema: {kind, params{...}, alpha, beta}. Axis indices are
// 1-based on the wire, 0-based internally.
struct CellDescriptor {
  CellGeometry geometry;
  double alpha = 1.0;
  double beta = 1.0;

  CoefficientField make_field() const {
    return CoefficientField::two_phase(geometry, alpha, beta);
  }
};

Json cell_to_json(const CellDescriptor& cell);
CellDescriptor cell_from_json(const Json& j);

// {provenance, N, entries: row-major}
Json tensor_to_json(const HomogenizedTensor& tensor);
HomogenizedTensor tensor_from_json(const Json& j);

// {domain, kind, cells:[{cx,cy,eps}], residual_fraction, seed, ...}
Json covering_to_json(const VitaliCovering& covering);
VitaliCovering covering_from_json(const Json& j);

std::string format_double(double v);  // shortest round-trip, '.' separator

// FNV-1a of the canonical (sorted-key) dump.
std::string config_hash(const Json& config);

// CSV with a "# config=<hash>" first line; numeric cells use format_double.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            const std::string& hash);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::string path_;
  std::string buffer_;
  size_t columns_ = 0;
  void flush();
  friend class CsvFlusher;
 public:
  ~CsvWriter();
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace bhs
