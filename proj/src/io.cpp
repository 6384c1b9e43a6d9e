#include "plateau/io.hpp"

#include <fstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "plateau/errors.hpp"

namespace plateau {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

void check(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  out << "# " << fmt::format("{}", fmt::join(columns, ",")) << '\n';
  fmt::memory_buffer buf;
  for (const auto& r : rows) {
    buf.clear();
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) buf.push_back(',');
      fmt::format_to(std::back_inserter(buf), "{:.17g}", r[k]);
    }
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  check(out, path);
}

void write_lambda_csv(const std::filesystem::path& path, const LambdaMap& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(m.grid.size());
  for (std::size_t i = 0; i < m.grid.size(); ++i) rows.push_back({m.grid[i], m.values[i]});
  write_csv(path, {"s", "lambda"}, rows);
}

void write_graph_csv(const std::filesystem::path& path, const GraphFunction& g) {
  std::vector<std::vector<double>> rows;
  rows.reserve(g.node_count());
  for (const auto& r : g.rows)
    for (std::size_t k = 0; k < r.t.size(); ++k) rows.push_back({r.y, r.t[k], r.u[k]});
  if (g.side == GraphSide::Left)
    write_csv(path, {"y", "t", "u"}, rows);
  else
    write_csv(path, {"eta", "tau", "u_r"}, rows);
}

void export_mesh(const RuledSurface& R, const std::filesystem::path& obj_path,
                 const std::filesystem::path& burgers_csv_path) {
  const std::size_t ns = R.n_s(), nh = R.n_h();
  if (R.mesh.size() != ns * nh) throw PreconditionError("ruled surface mesh has inconsistent size");
  auto out = open_out(obj_path);
  out << fmt::format("# ruled surface: {} x {} vertices (s-major)\n", ns, nh);
  for (const auto& p : R.mesh) out << fmt::format("v {:.17g} {:.17g} {:.17g}\n", p.x, p.y, p.t);
  for (std::size_t i = 0; i + 1 < ns; ++i)
    for (std::size_t j = 0; j + 1 < nh; ++j) {
      const std::size_t a = i * nh + j + 1, b = a + 1, c = a + nh, d = c + 1;  // 1-based
      out << fmt::format("f {} {} {}\nf {} {} {}\n", a, c, d, a, d, b);
    }
  check(out, obj_path);
  const auto B = R.burgers_per_node();
  std::vector<std::vector<double>> rows;
  rows.reserve(R.mesh.size());
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nh; ++j) rows.push_back({static_cast<double>(i * nh + j), B[i]});
  write_csv(burgers_csv_path, {"vertex", "burgers"}, rows);
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  check(out, path);
}

}  // namespace plateau
