#include "ckdiff/checkpoint.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ckdiff {

namespace {

// safetensors caps the header at 100 MB; anything larger is a corrupt length.
constexpr std::uint64_t kMaxHeaderLen = 100u * 1000u * 1000u;

}  // namespace

MappedFile::MappedFile(const std::string& path) : path_(path) {
    const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd < 0) throw IoFailure("cannot open " + path);
    struct stat st{};
    if (::fstat(fd, &st) != 0) {
        ::close(fd);
        throw IoFailure("cannot stat " + path);
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
        void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
        if (p == MAP_FAILED) {
            ::close(fd);
            throw IoFailure("cannot mmap " + path);
        }
        data_ = static_cast<const std::byte*>(p);
    }
    ::close(fd);
}

MappedFile::~MappedFile() {
    if (data_) ::munmap(const_cast<std::byte*>(data_), size_);
}

void CheckpointIndex::add_shard_header(const std::string& file_path) {
    auto file = std::make_shared<MappedFile>(file_path);
    const std::size_t shard_id = shards_.size();

    if (file->size() < 8) throw MalformedHeader(file_path + ": file shorter than header length");
    std::uint64_t header_len = 0;
    std::memcpy(&header_len, file->data(), 8);  // little-endian on all supported targets
    if (header_len > kMaxHeaderLen || 8 + header_len > file->size()) {
        throw MalformedHeader(file_path + ": header length " + std::to_string(header_len) +
                              " exceeds file size");
    }

    ordered_json header;
    try {
        const char* begin = reinterpret_cast<const char*>(file->data() + 8);
        header = ordered_json::parse(begin, begin + header_len);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedHeader(file_path + ": invalid JSON header: " + e.what());
    }
    if (!header.is_object()) throw MalformedHeader(file_path + ": header is not a JSON object");

    const std::uint64_t data_len = file->size() - 8 - header_len;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;

    for (const auto& [name, entry] : header.items()) {
        if (name == "__metadata__") {
            if (!entry.is_object())
                throw MalformedHeader(file_path + ": __metadata__ is not an object");
            for (const auto& [k, v] : entry.items()) {
                metadata_[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
            continue;
        }
        TensorMeta meta;
        meta.name = name;
        meta.shard = shard_id;
        try {
            const std::string dtype_str = entry.at("dtype").get<std::string>();
            const auto dtype = dtype_from_string(dtype_str);
            if (!dtype) {
                throw MalformedHeader(file_path + ": tensor '" + name + "' has unsupported dtype " +
                                      dtype_str + " (floating-point tensors only)");
            }
            meta.dtype = *dtype;
            meta.shape = entry.at("shape").get<std::vector<std::int64_t>>();
            const auto offsets = entry.at("data_offsets").get<std::vector<std::uint64_t>>();
            if (offsets.size() != 2) throw MalformedHeader(file_path + ": bad data_offsets");
            meta.begin = offsets[0];
            meta.end = offsets[1];
        } catch (const nlohmann::json::exception& e) {
            throw MalformedHeader(file_path + ": tensor '" + name + "': " + e.what());
        }
        for (auto d : meta.shape) {
            if (d < 0) throw MalformedHeader(file_path + ": tensor '" + name + "' negative extent");
        }
        if (meta.end < meta.begin) {
            throw OffsetOutOfBounds(file_path + ": tensor '" + name + "' has end < begin");
        }
        if (meta.end > data_len) {
            throw OffsetOutOfBounds(file_path + ": tensor '" + name + "' range [" +
                                    std::to_string(meta.begin) + ", " + std::to_string(meta.end) +
                                    ") exceeds data region of " + std::to_string(data_len) +
                                    " bytes");
        }
        const std::uint64_t expected =
            static_cast<std::uint64_t>(meta.num_elements()) * dtype_size(meta.dtype);
        if (expected != meta.end - meta.begin) {
            throw MalformedHeader(file_path + ": tensor '" + name + "' shape implies " +
                                  std::to_string(expected) + " bytes but range has " +
                                  std::to_string(meta.end - meta.begin));
        }
        if (by_name_.count(meta.name)) {
            throw MalformedHeader("duplicate tensor name '" + meta.name + "'");
        }
        meta.role = classify_tensor(meta.name);
        ranges.emplace_back(meta.begin, meta.end);
        by_name_.emplace(meta.name, tensors_.size());
        tensors_.push_back(std::move(meta));
    }

    std::sort(ranges.begin(), ranges.end());
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        if (ranges[i].first < ranges[i - 1].second) {
            throw OffsetOutOfBounds(file_path + ": overlapping tensor byte ranges");
        }
    }

    shards_.push_back(std::move(file));
}

void CheckpointIndex::finalize() {
    total_params_ = 0;
    for (const auto& t : tensors_) total_params_ += t.num_elements();
}

CheckpointIndex CheckpointIndex::open(const std::string& path) {
    CheckpointIndex index;
    index.path_ = path;

    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        // sharded checkpoint: {"weight_map": {"tensor": "shard-file"}}
        std::ifstream in(path);
        if (!in) throw IoFailure("cannot open " + path);
        nlohmann::json shard_index;
        try {
            in >> shard_index;
        } catch (const nlohmann::json::exception& e) {
            throw MalformedHeader(path + ": invalid shard index JSON: " + e.what());
        }
        if (!shard_index.contains("weight_map") || !shard_index["weight_map"].is_object()) {
            throw MalformedHeader(path + ": shard index is missing weight_map");
        }
        std::set<std::string> files;
        for (const auto& [tensor, file] : shard_index["weight_map"].items()) {
            files.insert(file.get<std::string>());
        }
        const fs::path dir = fs::path(path).parent_path();
        for (const auto& file : files) {
            index.add_shard_header((dir / file).string());
        }
        for (const auto& [tensor, file] : shard_index["weight_map"].items()) {
            if (!index.by_name_.count(tensor)) {
                throw MalformedHeader(path + ": weight_map names tensor '" + tensor +
                                      "' not present in any shard");
            }
        }
    } else {
        index.add_shard_header(path);
    }
    index.finalize();
    return index;
}

const TensorMeta* CheckpointIndex::find(std::string_view name) const {
    const auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? nullptr : &tensors_[it->second];
}

const TensorMeta& CheckpointIndex::at(std::string_view name) const {
    const TensorMeta* t = find(name);
    if (!t) throw UnknownTensor("no tensor named '" + std::string(name) + "' in " + path_);
    return *t;
}

std::span<const std::byte> CheckpointIndex::raw(const TensorMeta& t) const {
    const auto& file = *shards_[t.shard];
    std::uint64_t header_len = 0;
    std::memcpy(&header_len, file.data(), 8);
    return {file.data() + 8 + header_len + t.begin, static_cast<std::size_t>(t.end - t.begin)};
}

void CheckpointIndex::read_into(const TensorMeta& t, std::int64_t elem_begin, std::int64_t count,
                                float* out) const {
    const auto bytes = raw(t);
    decode_elements(t.dtype, bytes.data() + elem_begin * dtype_size(t.dtype), count, out);
}

void CheckpointIndex::read_into(const TensorMeta& t, std::int64_t elem_begin, std::int64_t count,
                                double* out) const {
    const auto bytes = raw(t);
    decode_elements(t.dtype, bytes.data() + elem_begin * dtype_size(t.dtype), count, out);
}

CheckpointIndex open_checkpoint(const std::string& path) { return CheckpointIndex::open(path); }

std::vector<float> read_tensor_f32(const CheckpointIndex& index, std::string_view name) {
    const TensorMeta& t = index.at(name);
    std::vector<float> out(static_cast<std::size_t>(t.num_elements()));
    index.read_into(t, 0, t.num_elements(), out.data());
    return out;
}

std::vector<double> read_tensor_f64(const CheckpointIndex& index, std::string_view name) {
    const TensorMeta& t = index.at(name);
    std::vector<double> out(static_cast<std::size_t>(t.num_elements()));
    index.read_into(t, 0, t.num_elements(), out.data());
    return out;
}

void write_checkpoint(const std::string& path, std::span<const TensorInit> tensors,
                      const std::map<std::string, std::string>& metadata) {
    ordered_json header = ordered_json::object();
    if (!metadata.empty()) {
        ordered_json meta = ordered_json::object();
        for (const auto& [k, v] : metadata) meta[k] = v;
        header["__metadata__"] = meta;
    }
    std::uint64_t offset = 0;
    for (const auto& t : tensors) {
        std::int64_t n = 1;
        for (auto d : t.shape) n *= d;
        if (static_cast<std::size_t>(n) != t.values.size()) {
            throw InvalidArgument("tensor '" + t.name + "' shape does not match value count");
        }
        const std::uint64_t nbytes = static_cast<std::uint64_t>(n) * dtype_size(t.dtype);
        header[t.name] = {{"dtype", dtype_name(t.dtype)},
                          {"shape", t.shape},
                          {"data_offsets", {offset, offset + nbytes}}};
        offset += nbytes;
    }
    const std::string header_str = header.dump();
    const std::uint64_t header_len = header_str.size();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + path);
    out.write(reinterpret_cast<const char*>(&header_len), 8);
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    std::vector<std::byte> buf;
    for (const auto& t : tensors) {
        buf.resize(t.values.size() * dtype_size(t.dtype));
        encode_elements(t.dtype, t.values.data(), static_cast<std::int64_t>(t.values.size()),
                        buf.data());
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoFailure("write failed for " + path);
}

}  // namespace ckdiff
