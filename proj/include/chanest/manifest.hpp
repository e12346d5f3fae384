#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chanest {

inline constexpr const char* kToolVersion = "0.1.0";

/**
 * Reproducibility record emitted next to every CLI output: the resolved
 * configuration, seeds, digests of inputs and outputs, and the wall clock.
 */
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> inputs;   // paths; digests added on write
    std::vector<std::string> outputs;
    double wall_clock_sec = 0.0;
    int threads = 1;

    void add(const std::string& key, const std::string& value) { config.emplace_back(key, value); }
    void add(const std::string& key, double value);
    void add(const std::string& key, std::int64_t value);
    void add(const std::string& key, std::uint64_t value);

    /** Writes <path> as JSON, hashing every input/output file. */
    void write(const std::string& path) const;
};

}  // namespace chanest
