#include "mixlab/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mixlab/util.hpp"

namespace mixlab {

void Dataset::validate() const {
    if (features.rank() != 2) throw ShapeError("dataset features must be rank-2");
    if (labels.size() != n_samples()) {
        throw ValidationError("dataset has " + std::to_string(n_samples()) +
                              " samples but " + std::to_string(labels.size()) + " labels");
    }
    if (n_classes == 0) throw ValidationError("dataset has no classes");
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= n_classes) {
            throw ValidationError("label " + std::to_string(labels[i]) + " at row " +
                                  std::to_string(i) + " exceeds class count");
        }
    }
}

std::vector<size_t> Dataset::per_class_counts() const {
    std::vector<size_t> counts(n_classes, 0);
    for (uint32_t l : labels) ++counts[l];
    return counts;
}

bool Dataset::operator==(const Dataset& other) const {
    return n_classes == other.n_classes && split == other.split &&
           labels == other.labels && features.shape() == other.features.shape() &&
           std::memcmp(features.data(), other.features.data(),
                       features.size() * sizeof(double)) == 0;
}

void FragilitySpec::validate() const {
    if (n_classes == 0) throw ValidationError("need at least one class");
    if (n_fragile > n_classes) {
        throw ValidationError("n_fragile " + std::to_string(n_fragile) +
                              " exceeds n_classes " + std::to_string(n_classes));
    }
    if (overlap < 0.0) throw ValidationError("overlap must be non-negative");
    if (n_features == 0) throw ValidationError("need at least one feature");
}

namespace {

double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

std::vector<double> unit_direction(size_t dim, RngStream& stream) {
    std::vector<double> d(dim);
    double norm2 = 0.0;
    for (double& v : d) {
        v = stream.next_gaussian();
        norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : d) v *= inv;
    return d;
}

}  // namespace

Dataset make_blobs(const FragilitySpec& spec, size_t n_per_class, RngStream& stream,
                   Split split) {
    spec.validate();
    if (n_per_class < 1) throw ValidationError("n_per_class must be at least 1");

    const size_t dim = spec.n_features;
    const size_t n_robust = spec.n_classes - spec.n_fragile;

    // Class directions are drawn first so the sample draws that follow do not
    // depend on per-class order.
    std::vector<std::vector<double>> dirs(spec.n_classes);
    for (size_t m = 0; m < n_robust; ++m) dirs[m] = unit_direction(dim, stream);
    for (size_t f = 0; f < spec.n_fragile; ++f) {
        const size_t cls = n_robust + f;
        if (spec.magnitude_coding && n_robust > 0) {
            dirs[cls] = dirs[f % n_robust];  // share a robust class's direction
        } else {
            dirs[cls] = unit_direction(dim, stream);
        }
    }

    Dataset d;
    d.n_classes = spec.n_classes;
    d.split = split;
    d.features = Tensor({spec.n_classes * n_per_class, dim});
    d.labels.resize(spec.n_classes * n_per_class);

    size_t row = 0;
    for (size_t m = 0; m < spec.n_classes; ++m) {
        const bool fragile = spec.magnitude_coding && spec.is_fragile(m) && n_robust > 0;
        const double scale = fragile ? kFragileScale : 1.0;
        for (size_t s = 0; s < n_per_class; ++s, ++row) {
            double* x = d.features.row(row);
            double norm2 = 0.0;
            for (size_t j = 0; j < dim; ++j) {
                x[j] = dirs[m][j] + spec.overlap * stream.next_gaussian();
                norm2 += x[j] * x[j];
            }
            const double inv = scale / std::sqrt(norm2);
            for (size_t j = 0; j < dim; ++j) x[j] = quantize_f32(x[j] * inv);
            d.labels[row] = static_cast<uint32_t>(m);
        }
    }
    d.validate();
    return d;
}

namespace {

constexpr char kMagic[4] = {'M', 'X', 'D', 'S'};
constexpr uint32_t kVersion = 1;
constexpr size_t kHeaderBytes = 24;

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const std::string& s, size_t off) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    }
    return v;
}

void put_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(const std::string& s, size_t off) {
    uint32_t bits = get_u32(s, off);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

void write_dataset(const Dataset& d, const std::string& path) {
    d.validate();
    if (d.n_samples() > UINT32_MAX || d.n_features() > UINT32_MAX) {
        throw ValidationError("dataset too large for the .mxds header");
    }
    std::string out;
    out.reserve(kHeaderBytes + d.features.size() * 4 + d.labels.size() * 4);
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(d.n_samples()));
    put_u32(out, static_cast<uint32_t>(d.n_features()));
    put_u32(out, static_cast<uint32_t>(d.n_classes));
    put_u32(out, static_cast<uint32_t>(d.split));
    for (double v : d.features.values()) {
        const auto f = static_cast<float>(v);
        if (static_cast<double>(f) != v) {
            throw ValidationError(
                "feature value is not float32-exact; .mxds stores float32");
        }
        put_f32(out, f);
    }
    for (uint32_t l : d.labels) put_u32(out, l);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open dataset for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw ValidationError("dataset write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open dataset: " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (data.size() < kHeaderBytes) {
        throw FormatError("truncated header at offset 0: file has " +
                          std::to_string(data.size()) + " of " +
                          std::to_string(kHeaderBytes) + " bytes");
    }
    if (std::memcmp(data.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic at offset 0");
    }
    if (get_u32(data, 4) != kVersion) {
        throw FormatError("unsupported version at offset 4");
    }
    const size_t n_samples = get_u32(data, 8);
    const size_t n_features = get_u32(data, 12);
    const size_t n_classes = get_u32(data, 16);
    const uint32_t split_tag = get_u32(data, 20);
    if (split_tag > 1) throw FormatError("invalid split tag at offset 20");
    if (n_samples == 0 || n_features == 0 || n_classes == 0) {
        throw FormatError("zero count in header at offset 8");
    }

    const size_t feature_bytes = n_samples * n_features * 4;
    const size_t expected = kHeaderBytes + feature_bytes + n_samples * 4;
    if (data.size() != expected) {
        throw FormatError("payload size mismatch at offset " +
                          std::to_string(kHeaderBytes) + ": expected " +
                          std::to_string(expected) + " bytes, have " +
                          std::to_string(data.size()));
    }

    Dataset d;
    d.n_classes = n_classes;
    d.split = static_cast<Split>(split_tag);
    d.features = Tensor({n_samples, n_features});
    size_t off = kHeaderBytes;
    for (double& v : d.features.values()) {
        v = static_cast<double>(get_f32(data, off));
        off += 4;
    }
    d.labels.resize(n_samples);
    for (size_t i = 0; i < n_samples; ++i, off += 4) {
        d.labels[i] = get_u32(data, off);
        if (d.labels[i] >= n_classes) {
            throw FormatError("label " + std::to_string(d.labels[i]) +
                              " out of range at offset " + std::to_string(off));
        }
    }
    return d;
}

CifarIngest ingest_cifar_binary(const std::string& path, size_t n_classes, Split split) {
    if (n_classes != 10 && n_classes != 100) {
        throw ValidationError("CIFAR reader supports 10 or 100 classes");
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open CIFAR file: " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    const size_t label_bytes = n_classes == 100 ? 2 : 1;
    const size_t row_size = label_bytes + 3072;
    if (data.empty()) throw FormatError("empty CIFAR file at offset 0");
    if (data.size() % row_size != 0) {
        throw FormatError("file size " + std::to_string(data.size()) +
                          " is not a multiple of the " + std::to_string(row_size) +
                          "-byte row at offset " +
                          std::to_string(data.size() - data.size() % row_size));
    }
    const size_t n = data.size() / row_size;

    CifarIngest out;
    out.dataset.n_classes = n_classes;
    out.dataset.split = split;
    out.dataset.features = Tensor({n, 3072});
    out.dataset.labels.resize(n);

    for (size_t i = 0; i < n; ++i) {
        const size_t base = i * row_size;
        // CIFAR-100 rows carry coarse then fine labels; the fine one is ours.
        const auto label = static_cast<unsigned char>(data[base + label_bytes - 1]);
        if (label >= n_classes) {
            throw FormatError("label byte " + std::to_string(label) +
                              " out of range at offset " +
                              std::to_string(base + label_bytes - 1));
        }
        out.dataset.labels[i] = label;
        double* x = out.dataset.features.row(i);
        for (size_t j = 0; j < 3072; ++j) {
            x[j] = static_cast<unsigned char>(data[base + label_bytes + j]) / 255.0;
        }
    }

    // Per-channel standardization with constants computed from this file.
    for (size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double* x = out.dataset.features.row(i);
            for (size_t j = 0; j < 1024; ++j) sum += x[c * 1024 + j];
        }
        const double mean = sum / static_cast<double>(n * 1024);
        double var = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double* x = out.dataset.features.row(i);
            for (size_t j = 0; j < 1024; ++j) {
                var += (x[c * 1024 + j] - mean) * (x[c * 1024 + j] - mean);
            }
        }
        const double std = std::sqrt(var / static_cast<double>(n * 1024));
        out.channel_mean[c] = mean;
        out.channel_std[c] = std;
        const double inv = std > 0.0 ? 1.0 / std : 1.0;
        for (size_t i = 0; i < n; ++i) {
            double* x = out.dataset.features.row(i);
            for (size_t j = 0; j < 1024; ++j) {
                x[c * 1024 + j] = quantize_f32((x[c * 1024 + j] - mean) * inv);
            }
        }
    }
    return out;
}

uint64_t dataset_hash(const Dataset& d) {
    uint64_t h = fnv1a64(d.features.data(), d.features.size() * sizeof(double));
    h ^= fnv1a64(d.labels.data(), d.labels.size() * sizeof(uint32_t));
    h ^= d.n_classes * 0x9E3779B97F4A7C15ULL;
    return h;
}

}  // namespace mixlab
