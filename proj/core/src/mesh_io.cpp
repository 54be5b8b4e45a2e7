#include "hodgekit/mesh_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "hodgekit/errors.hpp"

namespace hodgekit::io {

namespace {

[[noreturn]] void unreadable(const std::string& what) {
  throw Error(ErrorCode::mesh_unreadable, what);
}

// Next non-empty, non-comment line; collects hodgekit directives from comments.
bool next_line(std::istream& in, std::string& line, std::vector<std::string>* directives) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (directives) directives->push_back(line.substr(first + 1));
      continue;
    }
    line = line.substr(first);
    return true;
  }
  return false;
}

Eigen::VectorXd parse_period(const std::vector<std::string>& directives, Eigen::Index dim) {
  for (const auto& d : directives) {
    std::istringstream is(d);
    std::string key;
    is >> key;
    if (key != "hodgekit-period") continue;
    Eigen::VectorXd period = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index a = 0; a < dim; ++a)
      if (!(is >> period[a])) unreadable("malformed hodgekit-period directive");
    return period;
  }
  return {};
}

void write_period(std::ostream& out, const SimplicialComplex& complex) {
  if (!complex.periodic()) return;
  out << "# hodgekit-period";
  for (Eigen::Index a = 0; a < complex.period().size(); ++a) out << ' ' << complex.period()[a];
  out << '\n';
}

}  // namespace

ComplexPtr read_off(std::istream& in) {
  std::vector<std::string> directives;
  std::string line;
  if (!next_line(in, line, &directives) || line.rfind("OFF", 0) != 0)
    unreadable("missing OFF header");
  std::string rest = line.substr(3);
  if (rest.find_first_not_of(" \t\r") == std::string::npos &&
      !next_line(in, rest, &directives))
    unreadable("missing OFF counts");
  long nv = -1, nf = -1, ne = 0;
  {
    std::istringstream is(rest);
    if (!(is >> nv >> nf)) unreadable("malformed OFF counts");
    is >> ne;
  }
  if (nv <= 0 || nf <= 0) unreadable("OFF file declares no vertices or faces");

  Eigen::MatrixXd vertices(nv, 3);
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line, &directives)) unreadable("truncated OFF vertex list");
    std::istringstream is(line);
    if (!(is >> vertices(i, 0) >> vertices(i, 1) >> vertices(i, 2)))
      unreadable("malformed OFF vertex line " + std::to_string(i));
  }
  std::vector<Simplex> faces;
  faces.reserve(static_cast<std::size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    if (!next_line(in, line, &directives)) unreadable("truncated OFF face list");
    std::istringstream is(line);
    int k = 0;
    if (!(is >> k) || k != 3) unreadable("OFF face " + std::to_string(i) + " is not a triangle");
    Simplex f(3);
    if (!(is >> f[0] >> f[1] >> f[2])) unreadable("malformed OFF face line " + std::to_string(i));
    faces.push_back(std::move(f));
  }
  Eigen::VectorXd period = parse_period(directives, 3);
  return build_complex(std::move(vertices), faces, std::move(period));
}

void write_off(std::ostream& out, const SimplicialComplex& complex) {
  if (complex.dimension() != 2) throw Error(ErrorCode::shape, "OFF output needs a 2-complex");
  out << std::setprecision(17) << "OFF\n";
  write_period(out, complex);
  const auto& tris = complex.simplices(2);
  out << complex.vertices().rows() << ' ' << tris.size() << ' ' << complex.count(1) << '\n';
  for (Eigen::Index i = 0; i < complex.vertices().rows(); ++i) {
    for (Eigen::Index a = 0; a < 3; ++a)
      out << (a ? " " : "") << (a < complex.ambient_dimension() ? complex.vertices()(i, a) : 0.0);
    out << '\n';
  }
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& s = tris[t];
    // Emit in the stored orientation.
    if (complex.orientation(t) > 0)
      out << "3 " << s[0] << ' ' << s[1] << ' ' << s[2] << '\n';
    else
      out << "3 " << s[1] << ' ' << s[0] << ' ' << s[2] << '\n';
  }
}

ComplexPtr read_line_graph(std::istream& in) {
  std::vector<std::string> directives;
  std::string line;
  if (!next_line(in, line, &directives)) unreadable("empty line-graph file");
  long nv = -1;
  {
    std::istringstream is(line);
    if (!(is >> nv) || nv <= 0) unreadable("line-graph file must start with a vertex count");
  }
  std::vector<std::vector<double>> coords;
  std::vector<Simplex> edges;
  while (next_line(in, line, &directives)) {
    std::istringstream is(line);
    if (line[0] == 'v') {
      std::string tag;
      is >> tag;
      std::vector<double> xyz;
      double x;
      while (is >> x) xyz.push_back(x);
      if (xyz.empty()) unreadable("malformed vertex line: " + line);
      coords.push_back(std::move(xyz));
      continue;
    }
    Simplex e(2);
    if (!(is >> e[0] >> e[1])) unreadable("malformed edge line: " + line);
    edges.push_back(std::move(e));
  }
  if (edges.empty()) unreadable("line-graph file has no edges");

  Eigen::MatrixXd vertices;
  if (coords.empty()) {
    vertices.resize(nv, 2);
    for (long i = 0; i < nv; ++i) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nv);
      vertices(i, 0) = std::cos(angle);
      vertices(i, 1) = std::sin(angle);
    }
  } else {
    if (static_cast<long>(coords.size()) != nv)
      unreadable("line-graph file lists " + std::to_string(coords.size()) +
                 " vertex coordinates for " + std::to_string(nv) + " vertices");
    const auto dim = static_cast<Eigen::Index>(coords.front().size());
    vertices.resize(nv, dim);
    for (long i = 0; i < nv; ++i) {
      if (static_cast<Eigen::Index>(coords[i].size()) != dim)
        unreadable("inconsistent coordinate dimension in line-graph file");
      for (Eigen::Index a = 0; a < dim; ++a) vertices(i, a) = coords[i][a];
    }
  }
  Eigen::VectorXd period = parse_period(directives, vertices.cols());
  return build_complex(std::move(vertices), edges, std::move(period));
}

void write_line_graph(std::ostream& out, const SimplicialComplex& complex) {
  if (complex.dimension() != 1)
    throw Error(ErrorCode::shape, "line-graph output needs a 1-complex");
  out << std::setprecision(17);
  write_period(out, complex);
  out << complex.vertices().rows() << '\n';
  for (Eigen::Index i = 0; i < complex.vertices().rows(); ++i) {
    out << 'v';
    for (Eigen::Index a = 0; a < complex.ambient_dimension(); ++a)
      out << ' ' << complex.vertices()(i, a);
    out << '\n';
  }
  const auto& edges = complex.simplices(1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (complex.orientation(e) > 0)
      out << edges[e][0] << ' ' << edges[e][1] << '\n';
    else
      out << edges[e][1] << ' ' << edges[e][0] << '\n';
  }
}

ComplexPtr read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) unreadable("cannot open mesh file " + path.string());
  if (path.extension() == ".off" || path.extension() == ".OFF") return read_off(in);
  return read_line_graph(in);
}

void write_mesh(const std::filesystem::path& path, const SimplicialComplex& complex) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::mesh_unreadable, "cannot write mesh file " + path.string());
  if (complex.dimension() == 2)
    write_off(out, complex);
  else
    write_line_graph(out, complex);
}

std::string cochain_to_json(const Cochain& cochain) {
  nlohmann::json j;
  j["degree"] = cochain.degree();
  j["complex_id"] = cochain.complex_id();
  j["values"] = std::vector<double>(cochain.values().begin(), cochain.values().end());
  return j.dump();
}

Cochain cochain_from_json(const std::string& text, const SimplicialComplex& complex) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::cochain_malformed, std::string("cochain JSON does not parse: ") + e.what());
  }
  if (!j.is_object() || !j.contains("degree") || !j["degree"].is_number_integer() ||
      !j.contains("values") || !j["values"].is_array())
    throw Error(ErrorCode::cochain_malformed,
                "cochain JSON needs an integer 'degree' and a 'values' array");
  const int degree = j["degree"].get<int>();
  if (degree < 0 || degree > complex.dimension())
    throw Error(ErrorCode::degree, "cochain degree " + std::to_string(degree) +
                                       " outside 0.." + std::to_string(complex.dimension()));
  if (j.contains("complex_id")) {
    if (!j["complex_id"].is_string())
      throw Error(ErrorCode::cochain_malformed, "'complex_id' must be a string");
    const auto id = j["complex_id"].get<std::string>();
    if (!id.empty() && id != complex.id())
      throw Error(ErrorCode::shape, "cochain complex_id " + id + " does not match mesh " +
                                        complex.id());
  }
  const auto& arr = j["values"];
  Eigen::VectorXd values(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw Error(ErrorCode::cochain_malformed, "cochain value " + std::to_string(i) +
                                                    " is not a number");
    values[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return make_cochain(complex, degree, std::move(values));
}

Cochain read_cochain(const std::filesystem::path& path, const SimplicialComplex& complex) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::cochain_malformed, "cannot open cochain file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return cochain_from_json(buf.str(), complex);
}

}  // namespace hodgekit::io
