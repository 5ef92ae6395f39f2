#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "rageval/corpus.hpp"

namespace testsupport {

inline std::string source_root() { return RAGEVAL_SOURCE_ROOT; }

inline std::string fixture_path(const std::string& rel) {
    return (std::filesystem::path(source_root()) / rel).string();
}

/// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("rageval-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path.string(); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

/// The instance every prompt golden is rendered against. Three documents:
/// two carry the reasoning chain, the third is a distractor.
inline rageval::corpus::QaInstance golden_instance() {
    rageval::corpus::QaInstance inst;
    inst.id = "golden-0001";
    inst.question =
        "Which river flows through the capital of the country whose highest mountain is Mont "
        "Blanc?";
    inst.ground_truth = "The Seine";
    inst.documents = {
        "Mont Blanc, at 4,807 metres, is the highest mountain in France.",
        "The Seine flows through Paris, the capital of France, before reaching the English "
        "Channel.",
        "The Danube passes through four European capital cities on its way to the Black Sea.",
    };
    return inst;
}

}  // namespace testsupport
