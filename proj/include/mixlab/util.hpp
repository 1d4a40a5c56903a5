#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixlab {

// FNV-1a 64-bit, used for artifact/content hashes in run manifests.
uint64_t fnv1a64(const void* data, size_t len);
uint64_t fnv1a64(const std::string& s);
uint64_t fnv1a64_file(const std::string& path);

std::string hex64(uint64_t v);

// Shortest round-trip decimal form of a double (std::to_chars). Every number
// that lands in a CSV or an SVG text label goes through this one formatter.
std::string fmt_double(double v);
double parse_double(const std::string& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

double mean(const std::vector<double>& v);
// Population standard deviation (what np.std reports by default).
double stddev_pop(const std::vector<double>& v);

}  // namespace mixlab
