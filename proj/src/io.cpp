#include "hmp/io.hpp"

#include "hmp/common.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace hmp::io
{

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError(fmt::format("cannot write {}", tmp.string()));
        out << content;
        out.flush();
        if (!out)
            throw IoError(fmt::format("short write to {}", tmp.string()));
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError(fmt::format("cannot rename {} to {}: {}", tmp.string(), path.string(), ec.message()));
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows)
{
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

namespace
{

void dump(const Json& v, int indent, int depth, std::string& out)
{
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const std::string sep = indent > 0 ? ": " : ":";
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            out += first ? "" : ",";
            first = false;
            out += pad + Json(it.key()).dump() + sep;
            dump(it.value(), indent, depth + 1, out);
        }
        out += close + '}';
        return;
    }
    case Json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& item : v) {
            out += first ? "" : ",";
            first = false;
            out += pad;
            dump(item, indent, depth + 1, out);
        }
        out += close + ']';
        return;
    }
    case Json::value_t::number_float: {
        const double x = v.get<double>();
        out += std::isfinite(x) ? fmt::format("{:.17g}", x) : "null";
        return;
    }
    default:
        out += v.dump();
    }
}

} // namespace

std::string dump_json(const Json& value, int indent)
{
    std::string out;
    dump(value, indent, 0, out);
    out += '\n';
    return out;
}

std::filesystem::path artifact_root()
{
    if (const char* env = std::getenv("LAB_ARTIFACT_ROOT"); env && *env)
        return env;
    return "artifacts";
}

} // namespace hmp::io
