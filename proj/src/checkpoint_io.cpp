// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/checkpoint_io.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace nexf {

namespace {

template <typename T> T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

class Writer {
  public:
    explicit Writer(const std::filesystem::path &path) : out_(path, std::ios::binary) {
        if (!out_)
            throw Error("cannot open " + path.string() + " for writing");
    }
    template <typename T> void put(T v) {
        v = to_little(v);
        out_.write(reinterpret_cast<const char *>(&v), sizeof(T));
    }
    void put_string(const std::string &s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void put_doubles(const std::vector<double> &v) {
        put<std::uint64_t>(v.size());
        for (double d : v)
            put(d);
    }
    void raw(const char *p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void finish(const std::filesystem::path &path) {
        out_.flush();
        if (!out_)
            throw Error("failed writing " + path.string());
    }

  private:
    std::ofstream out_;
};

class Reader {
  public:
    explicit Reader(const std::filesystem::path &path) : in_(path, std::ios::binary), path_(path) {
        if (!in_)
            throw Error("cannot open checkpoint " + path.string());
    }
    template <typename T> T get() {
        T v;
        in_.read(reinterpret_cast<char *>(&v), sizeof(T));
        if (!in_)
            throw Error("truncated checkpoint " + path_.string());
        return to_little(v);
    }
    std::string get_bytes(std::uint64_t n) {
        if (n > (1ULL << 32))
            throw Error("corrupt checkpoint " + path_.string());
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        if (!in_)
            throw Error("truncated checkpoint " + path_.string());
        return s;
    }
    std::string get_string() { return get_bytes(get<std::uint32_t>()); }
    std::vector<double> get_doubles() {
        const auto n = get<std::uint64_t>();
        if (n > (1ULL << 32))
            throw Error("corrupt checkpoint " + path_.string());
        std::vector<double> v(n);
        for (double &d : v)
            d = get<double>();
        return v;
    }

  private:
    std::ifstream in_;
    std::filesystem::path path_;
};

}  // namespace

void write_param_file(const std::filesystem::path &path, const ParamFile &file) {
    file.params.validate();
    Writer w(path);
    w.raw("NEXF", 4);
    w.put<std::uint32_t>(kCheckpointVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(file.params.segments().size()));
    for (const Segment &s : file.params.segments()) {
        w.put_string(s.name);
        w.put<std::uint64_t>(s.offset);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(s.shape.size()));
        for (std::size_t d : s.shape)
            w.put<std::uint64_t>(d);
    }
    w.put_doubles(file.params.data());
    w.put<std::uint64_t>(file.meta.size());
    w.raw(file.meta.data(), file.meta.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(file.extras.size()));
    for (const auto &[name, values] : file.extras) {
        w.put_string(name);
        w.put_doubles(values);
    }
    w.finish(path);
}

ParamFile read_param_file(const std::filesystem::path &path) {
    Reader r(path);
    if (r.get_bytes(4) != "NEXF")
        throw Error(path.string() + " is not a checkpoint (bad magic)");
    const auto version = r.get<std::uint32_t>();
    if (version != kCheckpointVersion)
        throw Error(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    const auto nseg = r.get<std::uint32_t>();
    std::vector<Segment> segments;
    for (std::uint32_t i = 0; i < nseg; ++i) {
        Segment s;
        s.name = r.get_string();
        s.offset = r.get<std::uint64_t>();
        const auto rank = r.get<std::uint32_t>();
        if (rank > 8)
            throw Error("corrupt checkpoint " + path.string());
        for (std::uint32_t k = 0; k < rank; ++k)
            s.shape.push_back(r.get<std::uint64_t>());
        segments.push_back(std::move(s));
    }
    ParamFile file;
    file.params = ParamStore::from_parts(std::move(segments), r.get_doubles());
    file.meta = r.get_bytes(r.get<std::uint64_t>());
    const auto nextra = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < nextra; ++i) {
        std::string name = r.get_string();
        file.extras[name] = r.get_doubles();
    }
    return file;
}

}  // namespace nexf
