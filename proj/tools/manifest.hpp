#pragma once

// Sidecar run manifest: `<output>.manifest.json` next to every output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace carbonledger::cli {

struct FileDigest {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string version;
    std::string timestamp;
    std::vector<std::string> command_line;
};

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(const std::string& bytes);

/// UTC ISO-8601; honours SOURCE_DATE_EPOCH.
std::string build_timestamp();

std::string manifest_path_for(const std::filesystem::path& output);
std::string to_json(const RunManifest& m);
RunManifest parse_manifest(const std::string& json_text);

/// Recomputes every digest; returns one line per mismatch or missing file.
/// Relative paths resolve against the manifest's directory.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest);

/// Writes to a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace carbonledger::cli
