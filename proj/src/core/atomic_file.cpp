#include "collab/core/atomic_file.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "collab/core/error.hpp"

namespace collab {

namespace fs = std::filesystem;

namespace {

std::mutex hook_mutex;
WriteFaultHook fault_hook;
std::atomic<std::uint64_t> temp_counter{0};

void fire(const fs::path& target, WriteStage stage) {
    WriteFaultHook hook;
    {
        std::lock_guard lock(hook_mutex);
        hook = fault_hook;
    }
    if (hook) hook(target, stage);
}

[[noreturn]] void io_fail(const std::string& what, const fs::path& p) {
    throw Error(Errc::io_error, what + " " + p.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t n, const fs::path& p) {
    while (n > 0) {
        const auto w = ::write(fd, data, n);
        if (w < 0) {
            if (errno == EINTR) continue;
            io_fail("write", p);
        }
        data += w;
        n -= static_cast<std::size_t>(w);
    }
}

void sync_directory(const fs::path& dir) {
    const int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

}  // namespace

void set_write_fault_hook(WriteFaultHook hook) {
    std::lock_guard lock(hook_mutex);
    fault_hook = std::move(hook);
}

bool is_temp_file(const fs::path& p) { return p.filename().string().find(".tmp.") != std::string::npos; }

void write_file_atomic(const fs::path& target, std::string_view content) {
    const auto dir = target.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
    }
    const fs::path temp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                          std::to_string(temp_counter.fetch_add(1));
    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_fail("cannot create", temp);
    bool closed = false;
    bool renamed = false;
    try {
        fire(target, WriteStage::temp_opened);
        const auto half = content.size() / 2;
        write_all(fd, content.data(), half, temp);
        fire(target, WriteStage::temp_partial);
        write_all(fd, content.data() + half, content.size() - half, temp);
        if (::fsync(fd) != 0) io_fail("fsync", temp);
        fire(target, WriteStage::temp_synced);
        ::close(fd);
        closed = true;
        if (::rename(temp.c_str(), target.c_str()) != 0) io_fail("rename onto", target);
        renamed = true;
        sync_directory(dir);
        fire(target, WriteStage::renamed);
    } catch (...) {
        if (!renamed) {
            if (!closed) ::close(fd);
            std::error_code ec;
            fs::remove(temp, ec);
        }
        throw;
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace collab
