#include "bhs/io.hpp"

#include <cstdio>
#include <fstream>

namespace bhs {

namespace {

std::string provenance_name(TensorProvenance p) {
  switch (p) {
    case TensorProvenance::CellIntegral:
      return "cell-integral";
    case TensorProvenance::EigHessian:
      return "eig-hessian";
    case TensorProvenance::Analytic:
      return "analytic";
    case TensorProvenance::PeriodicCell:
      return "periodic-cell";
  }
  return "analytic";
}

TensorProvenance provenance_from(const std::string& s) {
  if (s == "cell-integral") return TensorProvenance::CellIntegral;
  if (s == "eig-hessian") return TensorProvenance::EigHessian;
  if (s == "periodic-cell") return TensorProvenance::PeriodicCell;
  if (s == "analytic") return TensorProvenance::Analytic;
  throw ArgumentError("unknown tensor provenance: " + s);
}

}  // namespace

Json cell_to_json(const CellDescriptor& cell) {
  Json j;
  j["alpha"] = cell.alpha;
  j["beta"] = cell.beta;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskInclusion>) {
          j["kind"] = "disk";
          j["params"] = {{"R", g.core_radius}};
        } else if constexpr (std::is_same_v<T, LaminateCell>) {
          j["kind"] = "laminate";
          j["params"] = {{"a", g.half_width}, {"axis", g.axis + 1}};
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          j["kind"] = "confocal";
          j["params"] = {{"rho1", g.rho1},
                         {"rho2", g.rho2},
                         {"m", {g.offsets[0], g.offsets[1]}}};
        } else {
          j["kind"] = "periodic-square";
          Json p;
          switch (g.inclusion) {
            case PeriodicSquare::Inclusion::None:
              p["inclusion"] = "none";
              break;
            case PeriodicSquare::Inclusion::Strip:
              p["inclusion"] = "strip";
              p["theta"] = g.theta;
              p["axis"] = g.axis + 1;
              break;
            case PeriodicSquare::Inclusion::Disk:
              p["inclusion"] = "disk";
              p["R"] = g.radius;
              break;
          }
          j["params"] = p;
        }
      },
      cell.geometry);
  return j;
}

CellDescriptor cell_from_json(const Json& j) {
  CellDescriptor cell;
  cell.alpha = j.at("alpha").get<double>();
  cell.beta = j.at("beta").get<double>();
  std::string kind = j.at("kind").get<std::string>();
  const Json& p = j.at("params");
  if (kind == "disk") {
    cell.geometry = DiskInclusion{p.at("R").get<double>()};
  } else if (kind == "laminate") {
    cell.geometry =
        LaminateCell{p.at("a").get<double>(), p.at("axis").get<int>() - 1};
  } else if (kind == "confocal") {
    ConfocalEllipse g;
    g.rho1 = p.at("rho1").get<double>();
    g.rho2 = p.at("rho2").get<double>();
    g.offsets = {p.at("m").at(0).get<double>(), p.at("m").at(1).get<double>()};
    cell.geometry = g;
  } else if (kind == "periodic-square") {
    PeriodicSquare g;
    std::string inc = p.at("inclusion").get<std::string>();
    if (inc == "none") {
      g.inclusion = PeriodicSquare::Inclusion::None;
    } else if (inc == "strip") {
      g.inclusion = PeriodicSquare::Inclusion::Strip;
      g.theta = p.at("theta").get<double>();
      g.axis = p.at("axis").get<int>() - 1;
    } else if (inc == "disk") {
      g.inclusion = PeriodicSquare::Inclusion::Disk;
      g.radius = p.at("R").get<double>();
    } else {
      throw ArgumentError("unknown periodic-square inclusion: " + inc);
    }
    cell.geometry = g;
  } else {
    throw ArgumentError("unknown cell kind: " + kind);
  }
  return cell;
}

Json tensor_to_json(const HomogenizedTensor& tensor) {
  Json j;
  j["provenance"] = provenance_name(tensor.provenance);
  j["N"] = 2;
  j["entries"] = {tensor.entries(0, 0), tensor.entries(0, 1),
                  tensor.entries(1, 0), tensor.entries(1, 1)};
  return j;
}

HomogenizedTensor tensor_from_json(const Json& j) {
  HomogenizedTensor t;
  t.provenance = provenance_from(j.at("provenance").get<std::string>());
  const Json& e = j.at("entries");
  t.entries << e.at(0).get<double>(), e.at(1).get<double>(),
      e.at(2).get<double>(), e.at(3).get<double>();
  return t;
}

Json covering_to_json(const VitaliCovering& cov) {
  Json j;
  j["domain"] = {{"x0", cov.domain.x0},
                 {"y0", cov.domain.y0},
                 {"x1", cov.domain.x1},
                 {"y1", cov.domain.y1}};
  j["kind"] = cov.kind == CoveringKind::DiskPack ? "disk-pack" : "laminate-bands";
  if (cov.kind == CoveringKind::LaminateBands) j["axis"] = cov.axis + 1;
  Json cells = Json::array();
  for (const auto& c : cov.cells)
    cells.push_back({{"cx", c.center.x()}, {"cy", c.center.y()}, {"eps", c.eps}});
  j["cells"] = std::move(cells);
  j["residual_fraction"] = cov.residual_fraction;
  j["kappa"] = cov.kappa;
  j["seed"] = cov.seed;
  j["target_missed"] = cov.target_missed;
  return j;
}

VitaliCovering covering_from_json(const Json& j) {
  VitaliCovering cov;
  const Json& d = j.at("domain");
  cov.domain = Rect{d.at("x0").get<double>(), d.at("y0").get<double>(),
                    d.at("x1").get<double>(), d.at("y1").get<double>()};
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "disk-pack") {
    cov.kind = CoveringKind::DiskPack;
    cov.reference_cell_area = M_PI;
  } else if (kind == "laminate-bands") {
    cov.kind = CoveringKind::LaminateBands;
    cov.reference_cell_area = 4.0;
    cov.axis = j.at("axis").get<int>() - 1;
  } else {
    throw ArgumentError("unknown covering kind: " + kind);
  }
  for (const auto& c : j.at("cells")) {
    cov.cells.push_back({Vec2(c.at("cx").get<double>(), c.at("cy").get<double>()),
                         c.at("eps").get<double>()});
    cov.kappa = std::max(cov.kappa, cov.cells.back().eps);
  }
  cov.residual_fraction = j.at("residual_fraction").get<double>();
  cov.seed = j.at("seed").get<std::uint64_t>();
  cov.target_missed = j.value("target_missed", false);
  return cov;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_hash(const Json& config) {
  return hex64(fnv1a64(config.dump()));
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns,
                     const std::string& hash)
    : path_(path), columns_(columns.size()) {
  buffer_ = "# config=" + hash + "\n";
  for (size_t i = 0; i < columns.size(); ++i) {
    buffer_ += columns[i];
    buffer_ += (i + 1 < columns.size()) ? ',' : '\n';
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_)
    throw ArgumentError("CsvWriter: row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    buffer_ += format_double(values[i]);
    buffer_ += (i + 1 < values.size()) ? ',' : '\n';
  }
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw ArgumentError("CsvWriter: row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    buffer_ += cells[i];
    buffer_ += (i + 1 < cells.size()) ? ',' : '\n';
  }
}

void CsvWriter::flush() {
  std::ofstream os(path_, std::ios::binary);
  os << buffer_;
}

CsvWriter::~CsvWriter() { flush(); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ArgumentError("cannot open output file: " + path);
  os << content;
}

}  // namespace bhs
