#include "pseudospec/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pseudospec::io {

namespace {

double number_at(const json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string("expected a number for ") + what);
  return j.get<double>();
}

Complex complex_at(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(std::string(what) + ": expected [re, im] pair");
  Complex z{number_at(j[0], what), number_at(j[1], what)};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ParseError(std::string(what) + ": non-finite value");
  return z;
}

std::string format_double(double v) {
  std::array<char, 48> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6f", v);
  return buf.data();
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

ComplexMatrix parse_matrix(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
    throw ParseError("matrix: expected { \"n\": int, \"entries\": [[re, im], ...] }");
  if (!j["n"].is_number_integer() || j["n"].get<long>() < 1)
    throw ParseError("matrix: field 'n' must be a positive integer");
  const Index n = j["n"].get<Index>();
  const json& entries = j["entries"];
  if (!entries.is_array() || static_cast<Index>(entries.size()) != n * n)
    throw ParseError("matrix: 'entries' must hold exactly n*n = " + std::to_string(n * n) +
                     " pairs, got " + std::to_string(entries.size()));
  ComplexMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k)
      a(i, k) = complex_at(entries[static_cast<std::size_t>(i * n + k)], "matrix entry");
  return a;
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_matrix(j);
}

json matrix_to_json(const ComplexMatrix& a) {
  json entries = json::array();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k) entries.push_back(complex_to_json(a(i, k)));
  return json{{"n", a.rows()}, {"entries", entries}};
}

StructurePattern parse_structure(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("positions"))
    throw ParseError("structure: expected { \"n\": int, \"positions\": [[i, j], ...] }");
  if (!j["n"].is_number_integer() || j["n"].get<long>() < 1)
    throw ParseError("structure: field 'n' must be a positive integer");
  const Index n = j["n"].get<Index>();
  std::vector<std::pair<Index, Index>> positions;
  for (const json& p : j["positions"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
      throw ParseError("structure: positions must be 1-based [row, col] integer pairs");
    positions.emplace_back(p[0].get<Index>() - 1, p[1].get<Index>() - 1);
  }
  try {
    return StructurePattern::create(n, std::move(positions));
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("structure: ") + e.what());
  }
}

StructurePattern load_structure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open structure file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_structure(j);
}

json structure_to_json(const StructurePattern& s) {
  json positions = json::array();
  for (const auto& [i, j] : s.positions) positions.push_back(json::array({i + 1, j + 1}));
  return json{{"n", s.n}, {"positions", positions}};
}

MonicPolynomial PolynomialFile::as_monic() const {
  if (!monic) throw ParseError("polynomial: expected a monic polynomial file");
  return MonicPolynomial{coeffs};
}

GeneralPolynomial PolynomialFile::as_general() const {
  if (monic) {
    ComplexVector full(coeffs.size() + 1);
    full(0) = Complex{1, 0};
    full.segment(1, coeffs.size()) = coeffs;
    return GeneralPolynomial::from(std::move(full));
  }
  return GeneralPolynomial::from(coeffs);
}

PolynomialFile parse_polynomial(const json& j) {
  if (!j.is_object() || !j.contains("monic") || !j.contains("coeffs") || !j["monic"].is_boolean())
    throw ParseError("polynomial: expected { \"monic\": bool, \"coeffs\": [[re, im], ...] }");
  PolynomialFile file;
  file.monic = j["monic"].get<bool>();
  const json& coeffs = j["coeffs"];
  if (!coeffs.is_array() || coeffs.empty())
    throw ParseError("polynomial: 'coeffs' must be a nonempty array");
  file.coeffs.resize(static_cast<Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    file.coeffs(static_cast<Index>(i)) = complex_at(coeffs[i], "polynomial coefficient");
  return file;
}

PolynomialFile load_polynomial(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open polynomial file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_polynomial(j);
}

PerturbationVector parse_perturbation(const json& j) {
  if (!j.is_object() || !j.contains("components"))
    throw ParseError("perturbation: expected { \"components\": [[re, im], ...] }");
  const json& comps = j["components"];
  if (!comps.is_array() || comps.empty())
    throw ParseError("perturbation: 'components' must be a nonempty array");
  ComplexVector z(static_cast<Index>(comps.size()));
  for (std::size_t i = 0; i < comps.size(); ++i)
    z(static_cast<Index>(i)) = complex_at(comps[i], "perturbation component");
  return PerturbationVector(std::move(z));
}

PerturbationVector load_perturbation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open perturbation file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_perturbation(j);
}

json perturbation_to_json(const PerturbationVector& z) {
  json comps = json::array();
  for (Index i = 0; i < z.size(); ++i) comps.push_back(complex_to_json(z.components(i)));
  return json{{"components", comps}, {"norm", z.euclidean_norm}};
}

json region_report(const GridRegion& region) {
  std::size_t inside_cells = 0;
  std::array<std::size_t, 4> tally{};
  for (Index c = 0; c < region.cell_count(); ++c) {
    if (region.inside[static_cast<std::size_t>(c)]) ++inside_cells;
    tally[static_cast<std::size_t>(region.provenance[static_cast<std::size_t>(c)])] += 1;
  }
  return json{
      {"box",
       {{"re_min", region.box.re_min},
        {"re_max", region.box.re_max},
        {"im_min", region.box.im_min},
        {"im_max", region.box.im_max}}},
      {"resolution", json::array({region.n_re, region.n_im})},
      {"epsilon", region.epsilon},
      {"mode", region.mode == RegionMode::kStructured ? "structured" : "unstructured"},
      {"component_count", region.component_count},
      {"inside_cells", inside_cells},
      {"area", static_cast<double>(inside_cells) * region.cell_dre() * region.cell_dim()},
      {"provenance",
       {{"certified_outside", tally[0]},
        {"outside_unknown", tally[1]},
        {"sampled_inside", tally[2]},
        {"certified_inside", tally[3]}}},
  };
}

json component_check_report(const ComponentCheck& check) {
  json comps = json::array();
  for (const auto& c : check.components) {
    json per_z = json::array();
    for (const auto& [zi, sum] : c.per_z_sums) per_z.push_back(json::array({zi, sum}));
    comps.push_back(json{{"component_id", c.component_id},
                         {"baseline_sum", c.baseline_sum},
                         {"conserved", c.conserved},
                         {"nonempty_for_all_z", c.nonempty_for_all_z},
                         {"per_z_sums", per_z}});
  }
  return json{{"components", comps},
              {"coverage_violations", check.coverage_violations},
              {"all_conserved", check.all_conserved()},
              {"all_nonempty", check.all_nonempty()}};
}

json trajectory_to_json(const TrajectoryRecord& record) {
  json paths = json::array();
  for (Index i = 0; i < record.paths.rows(); ++i) {
    json path = json::array();
    for (Index j = 0; j < record.paths.cols(); ++j) path.push_back(complex_to_json(record.paths(i, j)));
    paths.push_back(path);
  }
  json candidates = json::array();
  for (const auto& c : record.bifurcation_candidates)
    candidates.push_back(json{
        {"t_lo", c.t_lo}, {"t_hi", c.t_hi}, {"u_before", c.u_before}, {"u_after", c.u_after}});
  return json{{"t_samples", record.t_samples},
              {"paths", paths},
              {"step_residuals", record.step_residuals},
              {"distinct_counts", record.distinct_counts},
              {"bifurcation_candidates", candidates}};
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

std::string render_pgm(const GridRegion& region) {
  std::string out = "P5\n" + std::to_string(region.n_re) + " " + std::to_string(region.n_im) +
                    "\n255\n";
  const int step = region.component_count > 0 ? 127 / region.component_count : 0;
  out.reserve(out.size() + static_cast<std::size_t>(region.cell_count()));
  for (Index iy = region.n_im - 1; iy >= 0; --iy)
    for (Index ix = 0; ix < region.n_re; ++ix) {
      const Index c = region.cell_index(ix, iy);
      unsigned char byte = 0;
      if (region.inside[static_cast<std::size_t>(c)]) {
        const int label = region.labels.empty() ? 1 : region.labels[static_cast<std::size_t>(c)];
        byte = static_cast<unsigned char>(std::min(255, 128 + label * step));
      }
      out.push_back(static_cast<char>(byte));
    }
  return out;
}

void write_pgm(const std::filesystem::path& path, const GridRegion& region) {
  atomic_write(path, render_pgm(region));
}

namespace {

// Marching squares over the cell-center indicator of one component, padded
// with an outside ring so contours close. Vertices are edge midpoints keyed
// on a doubled integer lattice, which makes loop chaining exact.
struct Segment {
  long ax, ay, bx, by;
};

std::vector<std::vector<std::pair<double, double>>> component_loops(const GridRegion& region,
                                                                    int label) {
  auto inside = [&](Index ix, Index iy) -> bool {
    if (ix < 0 || ix >= region.n_re || iy < 0 || iy >= region.n_im) return false;
    return region.labels[static_cast<std::size_t>(region.cell_index(ix, iy))] == label;
  };

  std::vector<Segment> segments;
  for (Index sy = -1; sy < region.n_im; ++sy)
    for (Index sx = -1; sx < region.n_re; ++sx) {
      const int code = (inside(sx, sy) ? 1 : 0) | (inside(sx + 1, sy) ? 2 : 0) |
                       (inside(sx + 1, sy + 1) ? 4 : 0) | (inside(sx, sy + 1) ? 8 : 0);
      // Edge midpoints on the doubled lattice (corner (i,j) -> (2i, 2j)).
      const long bx = 2 * sx + 1, by = 2 * sy;        // bottom
      const long rx = 2 * sx + 2, ry = 2 * sy + 1;    // right
      const long tx = 2 * sx + 1, ty = 2 * sy + 2;    // top
      const long lx = 2 * sx, ly = 2 * sy + 1;        // left
      auto add = [&](long x1, long y1, long x2, long y2) {
        segments.push_back({x1, y1, x2, y2});
      };
      switch (code) {
        case 1: add(lx, ly, bx, by); break;
        case 2: add(bx, by, rx, ry); break;
        case 3: add(lx, ly, rx, ry); break;
        case 4: add(tx, ty, rx, ry); break;
        case 5: add(lx, ly, bx, by); add(tx, ty, rx, ry); break;  // saddle: keep corners apart
        case 6: add(bx, by, tx, ty); break;
        case 7: add(lx, ly, tx, ty); break;
        case 8: add(lx, ly, tx, ty); break;
        case 9: add(bx, by, tx, ty); break;
        case 10: add(bx, by, rx, ry); add(lx, ly, tx, ty); break;  // saddle
        case 11: add(tx, ty, rx, ry); break;
        case 12: add(lx, ly, rx, ry); break;
        case 13: add(bx, by, rx, ry); break;
        case 14: add(lx, ly, bx, by); break;
        default: break;
      }
    }

  auto key = [&](long x, long y) { return (x + 4) * (2 * static_cast<long>(region.n_im) + 8) + (y + 4); };
  std::map<long, std::vector<std::size_t>> at_vertex;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    at_vertex[key(segments[i].ax, segments[i].ay)].push_back(i);
    at_vertex[key(segments[i].bx, segments[i].by)].push_back(i);
  }

  auto to_plane = [&](long x, long y) {
    // Doubled-lattice coordinates back to cell-center coordinates.
    const double ix = static_cast<double>(x) / 2.0;
    const double iy = static_cast<double>(y) / 2.0;
    return std::make_pair(region.box.re_min + (ix + 0.5) * region.cell_dre(),
                          region.box.im_min + (iy + 0.5) * region.cell_dim());
  };

  std::vector<char> used(segments.size(), 0);
  std::vector<std::vector<std::pair<double, double>>> loops;
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    std::vector<std::pair<double, double>> loop;
    long cx = segments[start].ax, cy = segments[start].ay;
    const long ox = cx, oy = cy;
    std::size_t current = start;
    while (true) {
      used[current] = 1;
      loop.push_back(to_plane(cx, cy));
      const Segment& seg = segments[current];
      const long nx2 = (seg.ax == cx && seg.ay == cy) ? seg.bx : seg.ax;
      const long ny2 = (seg.ax == cx && seg.ay == cy) ? seg.by : seg.ay;
      cx = nx2;
      cy = ny2;
      if (cx == ox && cy == oy) break;
      const auto& incident = at_vertex[key(cx, cy)];
      std::size_t next = current;
      for (std::size_t cand : incident)
        if (!used[cand]) {
          next = cand;
          break;
        }
      if (next == current) break;  // open chain; should not happen on the padded field
      current = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

const char* kPalette[] = {"#1b6ca8", "#c0392b", "#1e8449", "#8e44ad",
                          "#d68910", "#148f77", "#7b241c", "#2c3e50"};

}  // namespace

std::string render_svg(const GridRegion& region, const TrajectoryRecord* record) {
  const double w = region.box.re_max - region.box.re_min;
  const double h = region.box.im_max - region.box.im_min;
  auto sx = [&](double re) { return re - region.box.re_min; };
  auto sy = [&](double im) { return region.box.im_max - im; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << format_double(w) << " "
      << format_double(h) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << format_double(w) << "\" height=\"" << format_double(h)
      << "\" fill=\"#ffffff\"/>\n";

  const double stroke = 0.4 * std::max(region.cell_dre(), region.cell_dim());
  for (int label = 1; label <= region.component_count; ++label) {
    const auto loops = component_loops(region, label);
    if (loops.empty()) continue;
    svg << "<path fill=\"none\" stroke=\"" << kPalette[(label - 1) % 8] << "\" stroke-width=\""
        << format_double(stroke) << "\" d=\"";
    for (const auto& loop : loops) {
      for (std::size_t i = 0; i < loop.size(); ++i)
        svg << (i == 0 ? "M " : "L ") << format_double(sx(loop[i].first)) << ","
            << format_double(sy(loop[i].second)) << " ";
      svg << "Z ";
    }
    svg << "\"/>\n";
  }

  if (record != nullptr && record->paths.cols() > 0) {
    for (Index i = 0; i < record->paths.rows(); ++i) {
      svg << "<polyline fill=\"none\" stroke=\"#222222\" stroke-width=\"" << format_double(stroke)
          << "\" points=\"";
      for (Index j = 0; j < record->paths.cols(); ++j)
        svg << format_double(sx(record->paths(i, j).real())) << ","
            << format_double(sy(record->paths(i, j).imag())) << " ";
      svg << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::filesystem::path& path, const GridRegion& region,
               const TrajectoryRecord* record) {
  atomic_write(path, render_svg(region, record));
}

}  // namespace pseudospec::io
