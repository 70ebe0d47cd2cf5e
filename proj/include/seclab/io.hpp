#pragma once

// File formats:
//   channel  {"x":2,"y1":2,"y2":2,"z":2,"p":[[[[...]]]]}   p indexed [x][y1][y2][z]
//   aux      {"u1":2,"u2":2,"joint":[[...]],"map":[[...]]} joint[u1][u2], map[u1*|U2|+u2][x]
//   system   {"vars":[...],"cons":[{"coeffs":{"R1":1.0},"sense":"<","bound":0.8}]}
//   plot CSV sample_id,vertex_index,r1,r2 (9 significant digits, LF)

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seclab/channel.hpp"
#include "seclab/codebook.hpp"
#include "seclab/region.hpp"

namespace seclab {

BroadcastChannelSpec channel_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const BroadcastChannelSpec& ch);
BroadcastChannelSpec load_channel(const std::filesystem::path& path);

AuxiliaryStructure aux_from_json(const nlohmann::json& j);
nlohmann::json aux_to_json(const AuxiliaryStructure& aux);
AuxiliaryStructure load_aux(const std::filesystem::path& path);

ConstraintSystem system_from_json(const nlohmann::json& j);
nlohmann::ordered_json system_to_json(const ConstraintSystem& sys);
ConstraintSystem load_system(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

/// %.9g formatting used by every CSV writer.
std::string format_decimal(double v);

/// `ids` defaults to 0, 1, 2, ... when empty.
void write_plot_data(std::ostream& out, const std::vector<RatePolygon>& polygons,
                     const std::vector<std::size_t>& ids = {});
void export_plot_data(const std::vector<RatePolygon>& polygons, const std::filesystem::path& path,
                      const std::vector<std::size_t>& ids = {});

/// One row per (i, m, l): "i,m,l,s_1 s_2 ... s_n".
void write_codebook_csv(std::ostream& out, const MartonCodebook& cb);

/// Writes bytes exactly as given (binary mode); throws IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace seclab
