#pragma once

// On-disk result cache: JSON-lines records under $AP3_CACHE_DIR (default
// ./.ap3cache), keyed by an FNV-1a hash of the canonical parameter JSON.
// Appends take an exclusive flock and write whole lines, so concurrent
// writers interleave cleanly and readers can tolerate live appends.

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ap3/common.hpp"

namespace ap3::cache {

using json = nlohmann::json;

inline std::string cache_dir() {
    const char* env = std::getenv("AP3_CACHE_DIR");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string(".ap3cache");
}

inline std::string records_path() { return cache_dir() + "/records.jsonl"; }

inline std::string param_hash(const json& params) {
    const std::string dump = params.dump();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// Appends one record; returns its parameter hash.
inline std::string append_record(const std::string& command, const json& params,
                                 std::uint64_t seed, const json& result) {
    std::filesystem::create_directories(cache_dir());
    const std::string hash = param_hash(params);
    json record{{"command", command},
                {"param_hash", hash},
                {"timestamp", timestamp_utc()},
                {"seed", seed},
                {"result", result},
                {"version", kVersion}};
    const std::string line = record.dump() + "\n";

    const int fd = ::open(records_path().c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    ensure(fd >= 0, "cache: cannot open records file");
    ::flock(fd, LOCK_EX);
    const ssize_t written = ::write(fd, line.data(), line.size());
    ::flock(fd, LOCK_UN);
    ::close(fd);
    ensure(written == static_cast<ssize_t>(line.size()), "cache: short write");
    return hash;
}

inline std::vector<json> list_records() {
    std::vector<json> out;
    std::ifstream in(records_path());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(json::parse(line));
    }
    return out;
}

inline std::optional<json> find_record(const std::string& hash) {
    for (auto& rec : list_records())
        if (rec.value("param_hash", "") == hash) return rec;
    return std::nullopt;
}

inline void clear() { std::filesystem::remove(records_path()); }

}  // namespace ap3::cache
