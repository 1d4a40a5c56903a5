#include "mixlab/manifest.hpp"

#include <filesystem>

#include <json.hpp>

#include "mixlab/errors.hpp"
#include "mixlab/util.hpp"

namespace mixlab {

using nlohmann::json;
namespace fs = std::filesystem;

std::string Manifest::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["dataset_hash"] = dataset_hash;
    j["stream_keys"] = stream_keys;
    json arts = json::array();
    for (const Artifact& a : artifacts) {
        arts.push_back({{"path", a.path}, {"bytes", a.bytes}, {"hash", a.hash}});
    }
    j["artifacts"] = arts;
    j["failed_seeds"] = failed_seeds;
    j["notes"] = notes;
    return j.dump(2);
}

Manifest Manifest::from_json(const std::string& text) {
    json j = json::parse(text);
    Manifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.dataset_hash = j.at("dataset_hash").get<std::string>();
    m.stream_keys = j.at("stream_keys").get<std::map<std::string, uint64_t>>();
    for (const json& a : j.at("artifacts")) {
        m.artifacts.push_back({a.at("path").get<std::string>(),
                               a.at("bytes").get<uint64_t>(),
                               a.at("hash").get<std::string>()});
    }
    m.failed_seeds = j.at("failed_seeds").get<std::vector<uint64_t>>();
    m.notes = j.at("notes").get<std::map<std::string, std::string>>();
    return m;
}

void manifest_add(Manifest& m, const std::string& dir, const std::string& rel_path) {
    const fs::path full = fs::path(dir) / rel_path;
    if (!fs::exists(full)) {
        throw ValidationError("manifest artifact missing: " + full.string());
    }
    Manifest::Artifact a;
    a.path = rel_path;
    a.bytes = static_cast<uint64_t>(fs::file_size(full));
    a.hash = hex64(fnv1a64_file(full.string()));
    m.artifacts.push_back(std::move(a));
}

void save_manifest(const Manifest& m, const std::string& dir) {
    write_text_file((fs::path(dir) / "manifest.json").string(), m.to_json() + "\n");
}

Manifest load_manifest(const std::string& dir) {
    const fs::path p = fs::path(dir) / "manifest.json";
    if (!fs::exists(p)) throw ValidationError("no manifest.json in " + dir);
    return Manifest::from_json(read_text_file(p.string()));
}

std::vector<std::string> verify_manifest(const std::string& dir) {
    const Manifest m = load_manifest(dir);
    std::vector<std::string> problems;
    for (const Manifest::Artifact& a : m.artifacts) {
        const fs::path full = fs::path(dir) / a.path;
        if (!fs::exists(full)) {
            problems.push_back(a.path + ": missing");
            continue;
        }
        const auto bytes = static_cast<uint64_t>(fs::file_size(full));
        if (bytes != a.bytes) {
            problems.push_back(a.path + ": size " + std::to_string(bytes) +
                               " != recorded " + std::to_string(a.bytes));
            continue;
        }
        const std::string h = hex64(fnv1a64_file(full.string()));
        if (h != a.hash) {
            problems.push_back(a.path + ": hash " + h + " != recorded " + a.hash);
        }
    }
    return problems;
}

}  // namespace mixlab
