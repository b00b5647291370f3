#include "fracdecomp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fracdecomp {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::runtime_error parse_error(const std::filesystem::path& file, int line,
                               const std::string& what) {
  std::ostringstream oss;
  oss << file.string() << ":" << line << ": " << what;
  return std::runtime_error(oss.str());
}

ordered_json domain_to_json(const Domain& d) {
  ordered_json j;
  j["dimension"] = d.dim();
  switch (d.kind()) {
    case DomainKind::WholeSpaceBox:
      j["kind"] = "whole-space";
      j["half_width"] = d.half_width();
      j["support_radius"] = d.support_radius();
      break;
    case DomainKind::Ball:
      j["kind"] = "ball";
      j["radius"] = d.radius();
      break;
    case DomainKind::Box: {
      j["kind"] = "box";
      ordered_json lo = ordered_json::array(), hi = ordered_json::array();
      for (int i = 0; i < d.dim(); ++i) {
        lo.push_back(d.lo(i));
        hi.push_back(d.hi(i));
      }
      j["lo"] = lo;
      j["hi"] = hi;
      break;
    }
  }
  return j;
}

Domain domain_from_json(const ordered_json& j) {
  const int dim = j.at("dimension").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "whole-space") {
    return Domain::whole_space(dim, j.at("support_radius").get<double>(),
                               j.at("half_width").get<double>());
  }
  if (kind == "ball") return Domain::ball(dim, j.at("radius").get<double>());
  if (kind == "box") {
    Point lo{0, 0}, hi{0, 0};
    for (int i = 0; i < dim; ++i) {
      lo[static_cast<std::size_t>(i)] = j.at("lo").at(i).get<double>();
      hi[static_cast<std::size_t>(i)] = j.at("hi").at(i).get<double>();
    }
    return Domain::box(dim, lo, hi);
  }
  throw std::runtime_error("unknown domain kind: " + kind);
}

ordered_json grid_to_json(const Grid& g) {
  ordered_json j;
  j["dimension"] = g.dim();
  ordered_json cells = ordered_json::array(), lo = ordered_json::array(),
               hi = ordered_json::array();
  for (int d = 0; d < g.dim(); ++d) {
    cells.push_back(g.cells(d));
    lo.push_back(g.lo(d));
    hi.push_back(g.hi(d));
  }
  j["cells"] = cells;
  j["lo"] = lo;
  j["hi"] = hi;
  return j;
}

Grid grid_from_json(const ordered_json& j) {
  const int dim = j.at("dimension").get<int>();
  std::array<int, 2> cells{1, 1};
  Point lo{0, 0}, hi{0, 0};
  for (int d = 0; d < dim; ++d) {
    const auto ds = static_cast<std::size_t>(d);
    cells[ds] = j.at("cells").at(d).get<int>();
    lo[ds] = j.at("lo").at(d).get<double>();
    hi[ds] = j.at("hi").at(d).get<double>();
  }
  return Grid(dim, cells, lo, hi);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& file,
                    int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw parse_error(file, line, "cannot parse number '" + s + "'");
  }
}

}  // namespace

void write_function_csv(const SampledFunction& f,
                        const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot open " + csv_path.string());
  out << (f.grid().dim() == 1 ? "x,value" : "x,y,value") << "\n";
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.node(i);
    out << format_double(x[0]);
    if (g.dim() == 2) out << "," << format_double(x[1]);
    out << "," << format_double(f[i]) << "\n";
  }
}

void write_function(const SampledFunction& f,
                    const std::filesystem::path& json_path) {
  std::filesystem::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  write_function_csv(f, csv_path);
  ordered_json j;
  j["domain"] = domain_to_json(f.domain());
  j["grid"] = grid_to_json(f.grid());
  j["data-file"] = csv_path.filename().string();
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot open " + json_path.string());
  out << j.dump(2) << "\n";
}

SampledFunction read_function(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(json_path.string() + ": " + e.what());
  }
  const Domain dom = domain_from_json(j.at("domain"));
  const Grid grid = grid_from_json(j.at("grid"));
  const std::filesystem::path csv_path =
      json_path.parent_path() / j.at("data-file").get<std::string>();

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  int lineno = 0;
  std::getline(csv, line);  // header
  ++lineno;
  std::vector<double> values;
  values.reserve(grid.size());
  const std::size_t ncols = grid.dim() == 1 ? 2 : 3;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != ncols)
      throw parse_error(csv_path, lineno, "expected " + std::to_string(ncols) +
                                              " columns, got " +
                                              std::to_string(cols.size()));
    values.push_back(parse_double(cols.back(), csv_path, lineno));
  }
  if (values.size() != grid.size())
    throw std::runtime_error(csv_path.string() + ": expected " +
                             std::to_string(grid.size()) + " rows, got " +
                             std::to_string(values.size()));
  return SampledFunction(dom, grid, std::move(values));
}

void write_field(const HalfSpaceField& field,
                 const std::filesystem::path& json_path) {
  std::filesystem::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot open " + csv_path.string());
  const Grid& g = field.xgrid();
  out << (g.dim() == 1 ? "x,t" : "x,y,t");
  for (int c = 0; c < field.components(); ++c) out << ",c" << c;
  out << "\n";
  for (int k = 0; k < field.tgrid().levels(); ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.node(i);
      out << format_double(x[0]);
      if (g.dim() == 2) out << "," << format_double(x[1]);
      out << "," << format_double(field.tgrid().node(k));
      for (int c = 0; c < field.components(); ++c)
        out << "," << format_double(field.at(k, i, c));
      out << "\n";
    }
  }

  ordered_json j;
  j["xgrid"] = grid_to_json(g);
  j["tgrid"] = {{"t_min", field.tgrid().t_min()},
                {"t_max", field.tgrid().t_max()},
                {"levels", field.tgrid().levels()},
                {"ratio", field.tgrid().ratio()}};
  j["components"] = field.components();
  j["data-file"] = csv_path.filename().string();
  std::ofstream jout(json_path);
  if (!jout) throw std::runtime_error("cannot open " + json_path.string());
  jout << j.dump(2) << "\n";
}

HalfSpaceField read_field(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path.string());
  ordered_json j;
  in >> j;
  const Grid g = grid_from_json(j.at("xgrid"));
  const auto& tj = j.at("tgrid");
  const TGrid tg = TGrid::geometric(tj.at("t_min").get<double>(),
                                    tj.at("t_max").get<double>(),
                                    tj.at("levels").get<int>());
  HalfSpaceField field(g, tg, j.at("components").get<int>());
  const std::filesystem::path csv_path =
      json_path.parent_path() / j.at("data-file").get<std::string>();
  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  int lineno = 0;
  std::getline(csv, line);
  ++lineno;
  const std::size_t base_cols = g.dim() == 1 ? 2 : 3;
  const std::size_t ncols =
      base_cols + static_cast<std::size_t>(field.components());
  std::size_t row = 0;
  const std::size_t rows_expected =
      static_cast<std::size_t>(tg.levels()) * g.size();
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != ncols)
      throw parse_error(csv_path, lineno, "expected " + std::to_string(ncols) +
                                              " columns, got " +
                                              std::to_string(cols.size()));
    if (row >= rows_expected)
      throw parse_error(csv_path, lineno, "more rows than grid nodes");
    const int level = static_cast<int>(row / g.size());
    const std::size_t flat = row % g.size();
    for (int c = 0; c < field.components(); ++c) {
      field.at(level, flat, c) = parse_double(
          cols[base_cols + static_cast<std::size_t>(c)], csv_path, lineno);
    }
    ++row;
  }
  if (row != rows_expected)
    throw std::runtime_error(csv_path.string() + ": expected " +
                             std::to_string(rows_expected) + " rows, got " +
                             std::to_string(row));
  return field;
}

}  // namespace fracdecomp
