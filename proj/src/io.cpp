#include "covsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "covsim/errors.hpp"

namespace covsim {

namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

// Splits on commas and/or whitespace; empty tokens are dropped.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& tok, const fs::path& path, int line_no) {
  double v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

std::vector<Vec3> load_xyz(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::vector<Vec3> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() != 3)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 3 values per line, got " + std::to_string(toks.size()));
    points.emplace_back(parse_double(toks[0], path, line_no), parse_double(toks[1], path, line_no),
                        parse_double(toks[2], path, line_no));
  }
  return points;
}

void save_xyz(const fs::path& path, const std::vector<Vec3>& points) {
  std::string out;
  for (const auto& p : points)
    out += fmt_double(p.x()) + " " + fmt_double(p.y()) + " " + fmt_double(p.z()) + "\n";
  atomic_write_text(path, out);
}

HeightField load_grid_field(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::string line;
  int line_no = 0;
  const auto next_tokens = [&]() {
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      auto toks = tokenize(line);
      if (!toks.empty()) return toks;
    }
    throw ConfigError(path.string() + ": unexpected end of file in grid header/body");
  };

  const auto nx_toks = next_tokens();
  const auto ny_toks = next_tokens();
  if (nx_toks.size() != 1 || ny_toks.size() != 1)
    throw ConfigError(path.string() + ": header lines 1-2 must hold nx and ny");
  const int nx = int(parse_double(nx_toks[0], path, line_no));
  const int ny = int(parse_double(ny_toks[0], path, line_no));
  if (nx < 2 || ny < 2) throw ConfigError(path.string() + ": grid needs nx >= 2 and ny >= 2");

  const auto xr = next_tokens();
  const auto yr = next_tokens();
  if (xr.size() != 2 || yr.size() != 2)
    throw ConfigError(path.string() + ": header lines 3-4 must hold 'x_min x_max' / 'y_min y_max'");
  DomainRect domain{parse_double(xr[0], path, line_no), parse_double(xr[1], path, line_no),
                    parse_double(yr[0], path, line_no), parse_double(yr[1], path, line_no)};
  domain.validate();

  Eigen::MatrixXd z(ny, nx);
  for (int i = 0; i < ny; ++i) {
    const auto row = next_tokens();
    if (int(row.size()) != nx)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(nx) + " values, got " + std::to_string(row.size()));
    for (int j = 0; j < nx; ++j) z(i, j) = parse_double(row[size_t(j)], path, line_no);
  }
  return grid_field(domain, std::move(z));
}

void save_grid_csv(const fs::path& path, const HeightField& field, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("save_grid_csv: need nx >= 2 and ny >= 2");
  const DomainRect& d = field.domain();
  std::string out = std::to_string(nx) + "," + std::to_string(ny) + "," + fmt_double(d.x_min) +
                    "," + fmt_double(d.x_max) + "," + fmt_double(d.y_min) + "," +
                    fmt_double(d.y_max) + "\n";
  for (int i = 0; i < ny; ++i) {
    const double y = d.y_min + d.height() * double(i) / (ny - 1);
    for (int j = 0; j < nx; ++j) {
      const double x = d.x_min + d.width() * double(j) / (nx - 1);
      if (j) out += ',';
      out += fmt_double(field(x, y));
    }
    out += '\n';
  }
  atomic_write_text(path, out);
}

void save_mask_csv(const fs::path& path, const SurfaceGrid& grid,
                   const std::vector<std::uint8_t>& mask) {
  if (mask.size() != grid.cells.size())
    throw std::invalid_argument("save_mask_csv: mask size does not match grid");
  const DomainRect& d = grid.domain;
  std::string out = std::to_string(grid.nx) + "," + std::to_string(grid.ny) + "," +
                    fmt_double(d.x_min) + "," + fmt_double(d.x_max) + "," + fmt_double(d.y_min) +
                    "," + fmt_double(d.y_max) + "\n";
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (ix) out += ',';
      out += mask[size_t(grid.index(ix, iy))] ? '1' : '0';
    }
    out += '\n';
  }
  atomic_write_text(path, out);
}

void save_trace_csv(const fs::path& path, const RunTrace& trace) {
  std::string out = "iter,coverage,noisy_coverage";
  const int n = trace.entries.empty() ? 0 : int(trace.entries.front().config.cols());
  for (int i = 0; i < n; ++i) {
    const std::string s = std::to_string(i);
    out += ",x" + s + ",y" + s + ",z" + s;
  }
  out += '\n';
  for (int it = 0; it < int(trace.entries.size()); ++it) {
    const TraceEntry& e = trace.entries[size_t(it)];
    out += std::to_string(it) + "," + fmt_double(e.coverage) + "," + fmt_double(e.noisy);
    for (Eigen::Index i = 0; i < e.config.cols(); ++i)
      out += "," + fmt_double(e.config(0, i)) + "," + fmt_double(e.config(1, i)) + "," +
             fmt_double(e.config(2, i));
    out += '\n';
  }
  atomic_write_text(path, out);
}

RunTrace load_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty trace file");
  const auto header = tokenize(line);
  if (header.size() < 6 || (header.size() - 3) % 3 != 0)
    throw ConfigError(path.string() + ": malformed trace header");
  const int n_agents = int(header.size() - 3) / 3;

  RunTrace trace;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (int(toks.size()) != 3 + 3 * n_agents)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(3 + 3 * n_agents) + " columns");
    TraceEntry e;
    e.coverage = parse_double(toks[1], path, line_no);
    e.noisy = parse_double(toks[2], path, line_no);
    e.config.resize(3, n_agents);
    for (int i = 0; i < n_agents; ++i)
      for (int axis = 0; axis < 3; ++axis)
        e.config(axis, i) = parse_double(toks[size_t(3 + 3 * i + axis)], path, line_no);
    trace.entries.push_back(std::move(e));
  }
  if (trace.entries.empty()) throw ConfigError(path.string() + ": trace has no rows");
  trace.best_config = trace.entries[size_t(trace.best_iteration())].config;
  trace.best_value = trace.max_coverage();
  return trace;
}

void atomic_write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace covsim
