#include "chanest/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "chanest/sha256.hpp"

namespace chanest {

void RunManifest::add(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    config.emplace_back(key, buf);
}

void RunManifest::add(const std::string& key, std::int64_t value) {
    config.emplace_back(key, std::to_string(value));
}

void RunManifest::add(const std::string& key, std::uint64_t value) {
    config.emplace_back(key, std::to_string(value));
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["threads"] = threads;
    j["wall_clock_sec"] = wall_clock_sec;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::json ins = nlohmann::json::array();
    for (const auto& p : inputs) ins.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    j["inputs"] = ins;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& p : outputs) outs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    j["outputs"] = outs;

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace chanest
