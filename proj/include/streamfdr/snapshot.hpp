#pragma once

#include "streamfdr/core.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace streamfdr {

inline constexpr int kSnapshotSchema = 1;

// Engine state as a JSON document carrying its schema version and a CRC-32
// of the canonical payload. Serialization is deterministic, so
// serialize(restore(s)) == s.
std::string serialize_snapshot(const Engine& engine);

// Verifies schema and checksum before rebuilding anything. Throws an
// integrity error on any mismatch.
Engine restore_snapshot(std::string_view text);

// alpha_{t+1} for the stored engine; nothing is written.
double next_level_preview(std::string_view snapshot_text);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Advisory lock held via an exclusively created "<path>.lock" file.
class StateLock {
public:
    explicit StateLock(std::filesystem::path state_path);
    ~StateLock();
    StateLock(const StateLock&) = delete;
    StateLock& operator=(const StateLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

}  // namespace streamfdr
