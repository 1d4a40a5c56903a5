#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mixlab {

// Run-directory inventory: every emitted artifact with its content hash, the
// config and dataset identities, and the stream keys the run used. Contains
// no timestamps or absolute paths, so re-running a config reproduces the
// manifest byte for byte.
struct Manifest {
    std::string config_hash;
    std::string dataset_hash;
    std::map<std::string, uint64_t> stream_keys;
    struct Artifact {
        std::string path;  // relative to the run directory
        uint64_t bytes = 0;
        std::string hash;
    };
    std::vector<Artifact> artifacts;
    std::vector<uint64_t> failed_seeds;
    std::map<std::string, std::string> notes;

    std::string to_json() const;
    static Manifest from_json(const std::string& text);
};

// Hashes the file and appends it to the artifact list.
void manifest_add(Manifest& m, const std::string& dir, const std::string& rel_path);

void save_manifest(const Manifest& m, const std::string& dir);
Manifest load_manifest(const std::string& dir);

// Recomputes every artifact hash; returns the list of mismatches (empty
// means the directory verifies).
std::vector<std::string> verify_manifest(const std::string& dir);

}  // namespace mixlab
