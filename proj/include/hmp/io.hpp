#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace hmp::io
{

using Json = nlohmann::ordered_json;

/// 17 significant digits; non-finite values print as nan / inf / -inf.
std::string format_double(double x);

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV with a header row; numbers at 17 significant digits.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// Like Json::dump but every floating value is printed with 17 significant
/// digits; non-finite doubles become null.
std::string dump_json(const Json& value, int indent = 2);

/// $LAB_ARTIFACT_ROOT, or ./artifacts when unset.
std::filesystem::path artifact_root();

} // namespace hmp::io
