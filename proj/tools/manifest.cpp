#include "manifest.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <unistd.h>

#include "carbonledger/error.hpp"

namespace carbonledger::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::missing_data, fmt::format("cannot open '{}'", path.string()));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json digests_to_json(const std::vector<FileDigest>& v) {
    json out = json::array();
    for (const auto& d : v) out.push_back({{"path", d.path}, {"sha256", d.sha256}});
    return out;
}

std::vector<FileDigest> digests_from_json(const json& j) {
    std::vector<FileDigest> out;
    for (const auto& e : j) out.push_back({e.at("path").get<std::string>(), e.at("sha256").get<std::string>()});
    return out;
}

}  // namespace

std::string sha256_bytes(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::configuration, "SHA-256 digest failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string sha256_file(const fs::path& path) { return sha256_bytes(read_all(path)); }

std::string build_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(t));
}

std::string manifest_path_for(const fs::path& output) { return output.string() + ".manifest.json"; }

std::string to_json(const RunManifest& m) {
    json j;
    j["tool"] = "carbonledger";
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    j["scenario"] = m.scenario;
    j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
    j["command_line"] = m.command_line;
    j["inputs"] = digests_to_json(m.inputs);
    j["outputs"] = digests_to_json(m.outputs);
    return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& json_text) {
    RunManifest m;
    try {
        const json j = json::parse(json_text);
        m.version = j.at("version").get<std::string>();
        m.timestamp = j.at("timestamp").get<std::string>();
        m.scenario = j.at("scenario").get<std::string>();
        if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
        m.command_line = j.at("command_line").get<std::vector<std::string>>();
        m.inputs = digests_from_json(j.at("inputs"));
        m.outputs = digests_from_json(j.at("outputs"));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, fmt::format("malformed manifest: {}", e.what()));
    }
    return m;
}

std::vector<std::string> verify_manifest(const fs::path& manifest) {
    const RunManifest m = parse_manifest(read_all(manifest));
    const fs::path base = manifest.parent_path();
    std::vector<std::string> problems;
    auto check = [&](const FileDigest& d) {
        fs::path p(d.path);
        if (p.is_relative() && !fs::exists(p)) p = base / p;
        if (!fs::exists(p)) {
            problems.push_back(fmt::format("{}: missing", d.path));
        } else if (sha256_file(p) != d.sha256) {
            problems.push_back(fmt::format("{}: digest mismatch", d.path));
        }
    };
    for (const auto& d : m.inputs) check(d);
    for (const auto& d : m.outputs) check(d);
    return problems;
}

void write_atomic(const fs::path& path, const std::string& bytes) {
    const fs::path tmp = path.string() + fmt::format(".tmp{}", static_cast<long>(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::missing_data, fmt::format("cannot write '{}'", tmp.string()));
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw Error(ErrorCode::missing_data, fmt::format("write to '{}' failed", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorCode::missing_data, fmt::format("cannot move output into '{}': {}", path.string(), ec.message()));
    }
}

}  // namespace carbonledger::cli
