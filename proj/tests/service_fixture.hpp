#pragma once

// Temp stores and a mock-backed service over the fixture corpus.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "collab/agent/demo.hpp"
#include "collab/core/atomic_file.hpp"
#include "collab/gen/mock_provider.hpp"
#include "collab/service/service.hpp"

namespace collab::testing {

namespace fs = std::filesystem;

struct TempStore {
    fs::path path;
    explicit TempStore(const std::string& tag = "store") {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("collab-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempStore() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempStore(const TempStore&) = delete;
    TempStore& operator=(const TempStore&) = delete;
};

inline const std::string kCorpusManifest = std::string(COLLAB_DATA_DIR) + "/fixtures/corpus.json";
inline const std::string kDemoDictionary = std::string(COLLAB_DATA_DIR) + "/dictionaries/demo.json";
inline constexpr std::int64_t kFixtureEpoch = 1767225600000;

// Service over a temp store, the mock provider with the demo agent script and
// the hashing embedder.
struct ServiceHarness {
    TempStore dir;
    gen::MockProvider mock;
    index::HashingEmbedder embedder;
    Clock clock;
    std::unique_ptr<service::Service> svc;

    explicit ServiceHarness(Clock c = fixed_clock(Timestamp{kFixtureEpoch})) : dir("svc"), clock(std::move(c)) {
        agent::install_demo_agent_script(mock);
        reopen();
    }

    void reopen() {
        svc.reset();
        gen::RetryPolicy retry;
        retry.base_delay = std::chrono::milliseconds(0);
        svc = std::make_unique<service::Service>(
            dir.path, service::ServiceDeps{mock, embedder, gen::load_dictionary(kDemoDictionary),
                                           index::FusionConfig{}, clock, retry});
    }

    void load_corpus() { service::ingest_manifest(*svc, kCorpusManifest); }

    void load_and_generate() {
        load_corpus();
        for (const auto& d : svc->store().all_discussions()) svc->generate_artifacts(d.discussion_id);
    }

    service::DoctorReport doctor() { return service::run_doctor(dir.path, embedder); }
};

// Every regular file under root keyed by relative path.
inline std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[e.path().lexically_relative(root).generic_string()] = collab::read_file(e.path());
    }
    return out;
}

// Throws at the n-th (0-based) time a write reaches `stage`; clears itself on scope exit.
class FaultAt {
public:
    FaultAt(WriteStage stage, int n) : fired_(std::make_shared<std::atomic<bool>>(false)) {
        auto count = std::make_shared<std::atomic<int>>(0);
        set_write_fault_hook([stage, n, count, fired = fired_](const fs::path&, WriteStage s) {
            if (s == stage && (*count)++ == n) {
                *fired = true;
                throw std::runtime_error("injected fault");
            }
        });
    }
    ~FaultAt() { set_write_fault_hook(nullptr); }
    bool fired() const { return *fired_; }

private:
    std::shared_ptr<std::atomic<bool>> fired_;
};

inline constexpr WriteStage kAllWriteStages[] = {WriteStage::temp_opened, WriteStage::temp_partial,
                                                 WriteStage::temp_synced, WriteStage::renamed};

}  // namespace collab::testing
