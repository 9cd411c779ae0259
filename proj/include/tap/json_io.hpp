#ifndef TAP_JSON_IO_HPP
#define TAP_JSON_IO_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tap/core.hpp"

namespace tap {

using Json = nlohmann::json;

Json to_json(const PlacedBox& pb);
PlacedBox placed_box_from_json(const Json& j);

Json to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const Json& j);

Json to_json(const RewardBreakdown& r);
RewardBreakdown reward_from_json(const Json& j);

Json to_json(const Solution& s);
Solution solution_from_json(const Json& j);

// Canonical text form used for files and checksums (sorted keys, 2-space
// indent, trailing newline).
std::string dump_canonical(const Json& j);

// Whole-file helpers. Writes go through a temp file + rename so a failed run
// never leaves a partial file. Missing/unwritable paths raise IoError;
// malformed content raises ValidationError.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);
Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

ProblemInstance load_instance(const std::string& path);
void save_instance(const std::string& path, const ProblemInstance& inst);
Solution load_solution(const std::string& path);
void save_solution(const std::string& path, const Solution& s);

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace tap

#endif
