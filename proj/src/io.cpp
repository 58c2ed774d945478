#include "section_lab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace section_lab::io {

namespace {

[[noreturn]] void input_error(const std::string& msg) { throw Error(ErrorCode::InputError, msg); }

template <int Dim>
PointSet<Dim> read_points(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) input_error(std::string(what) + " must be a nonempty array");
  PointSet<Dim> pts(Dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const json& row = rows[k];
    if (!row.is_array() || row.size() != Dim) {
      input_error(std::string(what) + " entries must have " + std::to_string(Dim) + " coordinates");
    }
    for (int d = 0; d < Dim; ++d) pts(d, static_cast<Eigen::Index>(k)) = row[d].get<double>();
  }
  return pts;
}

/// Checks a user-supplied facet list against the vertex list.
template <int Dim>
void check_facets(const PointSet<Dim>& v, const json& facets) {
  if (!facets.is_array() || facets.empty()) input_error("facets must be a nonempty array");
  const double extent = (v.rowwise().maxCoeff() - v.rowwise().minCoeff()).norm();
  const double tol = 1e-9 * extent;
  const Point<Dim> inside = v.rowwise().mean();
  for (const json& f : facets) {
    std::vector<int> loop = f.get<std::vector<int>>();
    if (loop.size() < static_cast<std::size_t>(Dim)) {
      throw Error(ErrorCode::InvalidBody, "facet has too few vertices");
    }
    for (int i : loop) {
      if (i < 0 || i >= v.cols()) throw Error(ErrorCode::InvalidBody, "facet index out of range");
    }
    Point<Dim> normal;
    if constexpr (Dim == 2) {
      const Point<2> d = v.col(loop[1]) - v.col(loop[0]);
      normal = Point<2>(d.y(), -d.x());
    } else {
      normal.setZero();
      for (std::size_t k = 0; k < loop.size(); ++k) {
        normal += Point<3>(v.col(loop[k])).cross(Point<3>(v.col(loop[(k + 1) % loop.size()])));
      }
    }
    if (!(normal.norm() > 0.0)) throw Error(ErrorCode::InvalidBody, "facet is degenerate");
    normal.normalize();
    const double offset = normal.dot(v.col(loop[0]));
    for (int i : loop) {
      if (std::abs(normal.dot(v.col(i)) - offset) > tol) {
        throw Error(ErrorCode::InvalidBody, "facet is not planar");
      }
    }
    if (normal.dot(inside) > offset) {
      throw Error(ErrorCode::InvalidBody, "facet is not oriented outward");
    }
    if (((normal.transpose() * v).array() > offset + tol).any()) {
      throw Error(ErrorCode::InvalidBody, "body is not convex: a vertex lies outside a facet");
    }
  }
}

template <int Dim>
ConvexBody parse_dim(const json& doc, const std::string& label) {
  if (doc.contains("normals") || doc.contains("offsets")) {
    const PointSet<Dim> normals = read_points<Dim>(doc.at("normals"), "normals");
    const auto offsets = doc.at("offsets").get<std::vector<double>>();
    return polytope_from_halfspaces<Dim>(
        normals, Eigen::Map<const Eigen::VectorXd>(offsets.data(), static_cast<Eigen::Index>(offsets.size())),
        label);
  }
  const PointSet<Dim> v = read_points<Dim>(doc.at("vertices"), "vertices");
  if (doc.contains("facets")) {
    check_facets<Dim>(v, doc.at("facets"));
    Polytope<Dim> body = build_polytope<Dim>(v, label);
    if (body.num_vertices() != v.cols()) {
      throw Error(ErrorCode::InvalidBody, "vertex list contains points that are not extreme");
    }
    return body;
  }
  return build_polytope<Dim>(v, label);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) input_error("cannot open output file " + path.string());
  return out;
}

void write_metadata(std::ostream& out, const json& metadata) {
  for (const auto& [key, value] : metadata.items()) {
    out << "# " << key << ": " << value.dump() << '\n';
  }
}

}  // namespace

ConvexBody parse_body(const json& doc) {
  try {
    const std::string label = doc.value("label", std::string("body"));
    const std::string kind = doc.value("kind", std::string(doc.contains("normals") ? "halfspaces" : "polytope"));
    if (kind == "ball") {
      const auto center = doc.at("center").get<std::vector<double>>();
      const double radius = doc.at("radius").get<double>();
      if (center.size() == 2) return Ball<2>(Point<2>(center[0], center[1]), radius, label);
      if (center.size() == 3) return Ball<3>(Point<3>(center[0], center[1], center[2]), radius, label);
      input_error("ball center must have 2 or 3 coordinates");
    }
    if (kind != "polytope" && kind != "halfspaces") input_error("unknown body kind '" + kind + "'");
    int d = doc.value("dim", 0);
    if (d == 0) {
      const json& probe = doc.contains("vertices") ? doc.at("vertices") : doc.at("normals");
      if (probe.is_array() && !probe.empty() && probe[0].is_array()) d = static_cast<int>(probe[0].size());
    }
    if (d == 2) return parse_dim<2>(doc, label);
    if (d == 3) return parse_dim<3>(doc, label);
    input_error("body dimension must be 2 or 3");
  } catch (const json::exception& e) {
    input_error(std::string("malformed body file: ") + e.what());
  }
}

ConvexBody load_body(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) input_error("cannot read body file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    input_error("body file is not valid JSON: " + std::string(e.what()));
  }
  return parse_body(doc);
}

ConvexBody resolve_shape(const std::string& shape, bool normalize_volume) {
  if (const auto builtin = parse_builtin(shape)) {
    return builtin_body(*builtin, normalize_volume);
  }
  if (!std::filesystem::exists(shape)) {
    input_error("shape '" + shape + "' is neither a built-in name nor an existing file");
  }
  ConvexBody body = load_body(shape);
  if (normalize_volume) {
    const double factor = std::pow(volume(body), -1.0 / dim(body));
    body = std::visit([factor](const auto& b) -> ConvexBody { return scaled(b, factor); }, body);
  }
  return body;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json to_json(const SectionSample& sample) {
  return json{{"values", sample.values},
              {"n_proposed", sample.n_proposed},
              {"n_accepted", sample.n_accepted},
              {"n_zero", sample.n_zero},
              {"seed", sample.seed},
              {"body_label", sample.body_label},
              {"dim", sample.dim}};
}

void write_sample_csv(const std::filesystem::path& path, const SectionSample& sample,
                      const json& config) {
  std::ofstream out = open_out(path);
  write_metadata(out, json{{"body_label", sample.body_label},
                           {"dim", sample.dim},
                           {"seed", sample.seed},
                           {"n_proposed", sample.n_proposed},
                           {"n_accepted", sample.n_accepted},
                           {"n_zero", sample.n_zero},
                           {"config", config}});
  out << "section_volume\n";
  std::string buffer;
  buffer.reserve(1 << 20);
  char num[32];
  for (double v : sample.values) {
    const auto res = std::to_chars(num, num + sizeof(num), v);
    buffer.append(num, res.ptr);
    buffer.push_back('\n');
    if (buffer.size() > (1 << 20) - 64) {
      out << buffer;
      buffer.clear();
    }
  }
  out << buffer;
}

void write_sample_json(const std::filesystem::path& path, const SectionSample& sample,
                       const json& config) {
  json doc = to_json(sample);
  doc["config"] = config;
  write_json(path, doc);
}

void write_density_csv(const std::filesystem::path& path, const DensityEstimate& est,
                       const json& metadata) {
  std::ofstream out = open_out(path);
  write_metadata(out, metadata);
  out << "grid,value\n";
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    out << format_double(est.grid[i]) << ',' << format_double(est.values[i]) << '\n';
  }
}

void write_step_cdf_csv(const std::filesystem::path& path, const StepCDF& cdf,
                        const json& metadata) {
  std::ofstream out = open_out(path);
  write_metadata(out, metadata);
  out << "location,cumulative\n";
  for (std::size_t i = 0; i < cdf.locations.size(); ++i) {
    out << format_double(cdf.locations[i]) << ',' << format_double(cdf.cumulative[i]) << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

std::vector<double> read_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) input_error("cannot read observations file " + path.string());
  if (path.extension() == ".json") {
    try {
      const json doc = json::parse(in);
      if (doc.is_array()) return doc.get<std::vector<double>>();
      return doc.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      input_error("malformed observations file: " + std::string(e.what()));
    }
  }
  std::vector<double> values;
  std::string line;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::string field = line.substr(0, line.find(','));
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc()) {
      if (first_data_line) {
        first_data_line = false;
        continue;  // header
      }
      input_error("non-numeric observation: '" + line + "'");
    }
    first_data_line = false;
    values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorCode::EmptySample, "observations file has no values");
  return values;
}

}  // namespace section_lab::io
