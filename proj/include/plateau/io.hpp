#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "plateau/graph.hpp"
#include "plateau/ruling.hpp"

namespace plateau {

using Json = nlohmann::ordered_json;

// Comma-separated numbers with 17 significant digits; the first line is a
// `# col1,col2,...` comment.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_lambda_csv(const std::filesystem::path& path, const LambdaMap& m);
// Columns y,t,u (left) or eta,tau,u_r (right).
void write_graph_csv(const std::filesystem::path& path, const GraphFunction& g);

// OBJ with vertices ρ(h_j, s_i) in s-major order and each quad split into two
// triangles; a companion CSV holds B u per vertex.
void export_mesh(const RuledSurface& R, const std::filesystem::path& obj_path,
                 const std::filesystem::path& burgers_csv_path);

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace plateau
