#include "matr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace matr {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'A', 'T', 'R', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
    return v;
}

void write_string(std::ostream& os, const std::string& s) {
    write_pod<uint32_t>(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is, const std::string& path) {
    const uint32_t len = read_pod<uint32_t>(is, path);
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
    return s;
}

void write_doubles(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& is, std::vector<double>& v, const std::string& path) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
}

} // namespace

void save_checkpoint(const std::string& path, const std::string& config_json,
                     const ParamSet& params, const AdamW* optimizer) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    os.write(kMagic, sizeof(kMagic));
    write_pod<uint32_t>(os, kVersion);
    const bool with_opt = optimizer && !optimizer->slots().empty();
    write_pod<uint32_t>(os, with_opt ? 1u : 0u);
    write_string(os, config_json);
    write_pod<uint32_t>(os, static_cast<uint32_t>(params.size()));
    for (const auto& p : params) {
        write_string(os, p.name);
        write_pod<uint32_t>(os, static_cast<uint32_t>(p.value->shape.size()));
        for (int64_t d : p.value->shape) write_pod<uint64_t>(os, static_cast<uint64_t>(d));
        write_doubles(os, p.value->data);
    }
    if (with_opt) {
        write_pod<int64_t>(os, optimizer->step_count());
        for (const auto& slot : optimizer->slots()) {
            write_doubles(os, slot.m);
            write_doubles(os, slot.v);
        }
    }
    if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    const uint32_t version = read_pod<uint32_t>(is, path);
    if (version != kVersion)
        throw std::runtime_error("checkpoint: unsupported format version " +
                                 std::to_string(version) + " in " + path);
    const uint32_t flags = read_pod<uint32_t>(is, path);

    Checkpoint ckpt;
    ckpt.config_json = read_string(is, path);
    const uint32_t n_params = read_pod<uint32_t>(is, path);
    ckpt.params.reserve(n_params);
    for (uint32_t i = 0; i < n_params; ++i) {
        std::string name = read_string(is, path);
        const uint32_t ndim = read_pod<uint32_t>(is, path);
        Shape shape(ndim);
        for (uint32_t d = 0; d < ndim; ++d)
            shape[d] = static_cast<int64_t>(read_pod<uint64_t>(is, path));
        std::vector<double> data(static_cast<size_t>(shape_numel(shape)));
        read_doubles(is, data, path);
        ckpt.params.emplace_back(std::move(name), Array::from(std::move(shape), std::move(data)));
    }
    if (flags & 1u) {
        ckpt.optimizer_step = read_pod<int64_t>(is, path);
        ckpt.optimizer_slots.resize(n_params);
        for (uint32_t i = 0; i < n_params; ++i) {
            const size_t n = ckpt.params[i].second->data.size();
            ckpt.optimizer_slots[i].m.resize(n);
            ckpt.optimizer_slots[i].v.resize(n);
            read_doubles(is, ckpt.optimizer_slots[i].m, path);
            read_doubles(is, ckpt.optimizer_slots[i].v, path);
        }
    }
    return ckpt;
}

void assign_params(ParamSet& params, const Checkpoint& ckpt) {
    std::map<std::string, const Var*> by_name;
    for (const auto& [name, value] : ckpt.params) by_name[name] = &value;
    for (auto& p : params) {
        auto it = by_name.find(p.name);
        if (it == by_name.end())
            throw std::runtime_error("checkpoint: missing parameter " + p.name);
        const Var& src = *it->second;
        if (src->shape != p.value->shape)
            throw std::runtime_error("checkpoint: shape mismatch for " + p.name + ": file has " +
                                     shape_str(src->shape) + ", model expects " +
                                     shape_str(p.value->shape));
        p.value->data = src->data;
    }
}

} // namespace matr
