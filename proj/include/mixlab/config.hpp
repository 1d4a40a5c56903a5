#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mixlab {

// Flat key = value config file: one binding per line, '#' comments, no
// nesting. Typed getters validate on access; unknown keys are rejected up
// front so typos fail loudly.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    double get_real(const std::string& key) const;
    double get_real(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<long> get_int_list(const std::string& key) const;
    std::vector<long> get_int_list(const std::string& key,
                                   const std::vector<long>& fallback) const;
    std::vector<double> get_real_list(const std::string& key) const;
    std::vector<double> get_real_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);

    // Keys this build understands; parse() rejects anything else.
    static const std::vector<std::string>& known_keys();

    // Canonical one-line-per-key rendering (sorted), used for config hashes
    // and for echoing the effective config into run directories.
    std::string canonical_text() const;
    uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace mixlab
