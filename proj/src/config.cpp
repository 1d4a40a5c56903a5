#include "mixlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "mixlab/errors.hpp"
#include "mixlab/util.hpp"

namespace mixlab {

const std::vector<std::string>& Config::known_keys() {
    static const std::vector<std::string> keys = {
        "dataset.path",        // load an existing .mxds pair instead of generating
        "dataset.eval_path",
        "dataset.classes",
        "dataset.fragile",
        "dataset.overlap",
        "dataset.magnitude_coding",
        "dataset.features",
        "dataset.train_per_class",
        "dataset.eval_per_class",
        "dataset.seed",
        "image.c",
        "image.h",
        "image.w",
        "model.hidden",        // comma list of hidden widths
        "train.epochs",
        "train.lr",
        "train.decay_factor",
        "train.decay_epochs",
        "train.momentum",
        "train.weight_decay",
        "train.batch_size",
        "method",              // vanilla | mixup | cutmix | saliency_grid
        "msda.alpha",
        "msda.grid",
        "dropmix.rate",
        "dropmix.granularity", // batch | sample
        "seeds",
        "log_plans",
        "jobs",
        "sweep.axis",          // dropmix_rate | alpha
        "sweep.grid",
        "labelinfo.grid",      // lambda grid for analyze-labelinfo
    };
    return keys;
}

Config Config::parse(const std::string& text) {
    Config cfg;
    const auto& known = known_keys();
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " has no '=': " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ValidationError("unknown config key '" + key + "' on line " +
                                  std::to_string(lineno));
        }
        if (cfg.values_.count(key)) {
            throw ValidationError("duplicate config key '" + key + "' on line " +
                                  std::to_string(lineno));
        }
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) { return parse(read_text_file(path)); }

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("missing config key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long Config::get_int(const std::string& key) const {
    const std::string s = get_string(key);
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("config key '" + key + "' is not an integer: " + s);
    }
    return v;
}

long Config::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double Config::get_real(const std::string& key) const {
    try {
        return parse_double(get_string(key));
    } catch (const ValidationError&) {
        throw ValidationError("config key '" + key + "' is not a number: " +
                              get_string(key));
    }
}

double Config::get_real(const std::string& key, double fallback) const {
    return has(key) ? get_real(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ValidationError("config key '" + key + "' is not a boolean: " + s);
}

std::vector<long> Config::get_int_list(const std::string& key) const {
    std::vector<long> out;
    for (const std::string& part : split(get_string(key), ',')) {
        const std::string p = trim(part);
        if (p.empty()) continue;
        long v = 0;
        auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
        if (ec != std::errc() || ptr != p.data() + p.size()) {
            throw ValidationError("config key '" + key + "' has a non-integer entry: " + p);
        }
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("config key '" + key + "' lists no values");
    return out;
}

std::vector<long> Config::get_int_list(const std::string& key,
                                       const std::vector<long>& fallback) const {
    return has(key) ? get_int_list(key) : fallback;
}

std::vector<double> Config::get_real_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& part : split(get_string(key), ',')) {
        const std::string p = trim(part);
        if (p.empty()) continue;
        out.push_back(parse_double(p));
    }
    if (out.empty()) throw ValidationError("config key '" + key + "' lists no values");
    return out;
}

std::vector<double> Config::get_real_list(const std::string& key,
                                          const std::vector<double>& fallback) const {
    return has(key) ? get_real_list(key) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ValidationError("unknown config key '" + key + "'");
    }
    values_[key] = value;
}

std::string Config::canonical_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    return os.str();
}

uint64_t Config::hash() const { return fnv1a64(canonical_text()); }

}  // namespace mixlab
