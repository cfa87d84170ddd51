#include "hermest/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hermest/errors.hpp"
#include "hermest/hermite_sim.hpp"

namespace hermest {

void write_text_file(const std::string& file, const std::string& content) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw runtime_failure("cannot open '" + file + "' for writing");
    os.write(content.data(), std::streamsize(content.size()));
    if (!os) throw runtime_failure("write to '" + file + "' failed");
}

std::string read_text_file(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw runtime_failure("cannot open '" + file + "' for reading");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_manifest(const std::string& out_file, const std::vector<std::string>& argv,
                    const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["argv"] = argv;
    j["outputs"] = outputs;
    write_text_file(out_file + ".manifest.json", j.dump(2) + "\n");
}

std::vector<std::string> read_manifest_argv(const std::string& manifest_file) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(manifest_file));
    } catch (const nlohmann::json::parse_error& e) {
        throw runtime_failure("manifest '" + manifest_file + "' is not valid JSON: " + e.what());
    }
    if (!j.contains("argv") || !j["argv"].is_array())
        throw validation_error("manifest '" + manifest_file + "' has no argv array");
    std::vector<std::string> argv;
    for (const auto& v : j["argv"]) {
        if (!v.is_string())
            throw validation_error("manifest '" + manifest_file + "' argv must be strings");
        argv.push_back(v.get<std::string>());
    }
    return argv;
}

namespace {

// Binary layout: magic "HERM1", u8 q, f64 hurst, f64 step, u64 length n,
// u8 backend tag, u64 seed, then n+1 f64 values. Integers and floats
// little-endian, header fields packed in this order.
constexpr char kMagic[5] = {'H', 'E', 'R', 'M', '1'};

template <typename T>
void put(std::string& buf, T v) {
    char tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    buf.append(tmp, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& pos, const std::string& file) {
    if (pos + sizeof(T) > buf.size())
        throw runtime_failure("path file '" + file + "' is truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

std::uint8_t backend_tag(Backend b) {
    switch (b) {
        case Backend::exact_fbm: return 0;
        case Backend::nclt: return 1;
        default: return 2;
    }
}

Backend backend_from_tag(std::uint8_t t, const std::string& file) {
    switch (t) {
        case 0: return Backend::exact_fbm;
        case 1: return Backend::nclt;
        case 2: return Backend::chaos_grid;
        default: throw runtime_failure("path file '" + file + "' has an unknown backend tag");
    }
}

}  // namespace

void write_path(const ProcessPath& path, const std::string& file) {
    if (path.values.empty()) throw validation_error("write_path: empty path");
    std::string buf;
    buf.reserve(32 + path.values.size() * sizeof(double));
    buf.append(kMagic, sizeof(kMagic));
    put<std::uint8_t>(buf, std::uint8_t(path.params.q));
    put<double>(buf, path.params.hurst);
    put<double>(buf, path.step);
    put<std::uint64_t>(buf, std::uint64_t(path.values.size() - 1));
    put<std::uint8_t>(buf, backend_tag(path.backend));
    put<std::uint64_t>(buf, path.seed);
    for (double v : path.values) put<double>(buf, v);
    write_text_file(file, buf);
}

ProcessPath read_path(const std::string& file) {
    std::string buf = read_text_file(file);
    if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw runtime_failure("'" + file + "' is not a path file (bad magic)");
    std::size_t pos = sizeof(kMagic);
    ProcessPath p;
    p.params.q = take<std::uint8_t>(buf, pos, file);
    p.params.hurst = take<double>(buf, pos, file);
    p.step = take<double>(buf, pos, file);
    auto n = take<std::uint64_t>(buf, pos, file);
    p.backend = backend_from_tag(take<std::uint8_t>(buf, pos, file), file);
    p.seed = take<std::uint64_t>(buf, pos, file);
    if (buf.size() - pos != (n + 1) * sizeof(double))
        throw runtime_failure("path file '" + file + "' length does not match its header");
    p.values.resize(std::size_t(n + 1));
    for (std::size_t i = 0; i <= n; ++i) p.values[i] = take<double>(buf, pos, file);
    return p;
}

}  // namespace hermest
