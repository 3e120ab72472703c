#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace collab {

// Points inside write_file_atomic where a test hook may throw to simulate a crash.
enum class WriteStage {
    temp_opened,   // temp file created, nothing written
    temp_partial,  // roughly half the bytes written
    temp_synced,   // temp complete and flushed, rename not yet done
    renamed,       // target replaced
};

using WriteFaultHook = std::function<void(const std::filesystem::path& target, WriteStage stage)>;

// Process-wide; pass nullptr to clear. Intended for fault-injection tests only.
void set_write_fault_hook(WriteFaultHook hook);

// Writes to "<target>.tmp.<unique>", fsyncs, then renames over the target, so a
// reader sees either the old file or the complete new one. On failure the temp
// file is removed when possible; a crash can leave it behind (see is_temp_file).
// Throws Error(io_error).
void write_file_atomic(const std::filesystem::path& target, std::string_view content);

bool is_temp_file(const std::filesystem::path& p);

// Throws Error(io_error) when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace collab
