#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ckdiff/dtypes.hpp"
#include "ckdiff/errors.hpp"
#include "ckdiff/roles.hpp"

namespace ckdiff {

// Read-only memory map of one checkpoint shard.
class MappedFile {
  public:
    explicit MappedFile(const std::string& path);
    ~MappedFile();
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    const std::byte* data() const { return data_; }
    std::size_t size() const { return size_; }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    const std::byte* data_ = nullptr;
    std::size_t size_ = 0;
};

struct TensorMeta {
    std::string name;
    Dtype dtype = Dtype::F32;
    std::vector<std::int64_t> shape;
    std::uint64_t begin = 0;  // offsets into the shard's data region
    std::uint64_t end = 0;
    std::size_t shard = 0;
    TensorRole role;

    std::int64_t num_elements() const {
        std::int64_t n = 1;
        for (auto d : shape) n *= d;
        return n;
    }
    bool is_matrix() const { return shape.size() == 2; }
};

// Parsed manifest of a checkpoint (single safetensors file or a sharded set
// behind a *.index.json). Immutable after construction; payload bytes are
// memory-mapped and only touched on read.
class CheckpointIndex {
  public:
    static CheckpointIndex open(const std::string& path);

    const std::string& path() const { return path_; }
    const std::vector<TensorMeta>& tensors() const { return tensors_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }
    std::int64_t total_params() const { return total_params_; }

    const TensorMeta* find(std::string_view name) const;
    const TensorMeta& at(std::string_view name) const;  // throws UnknownTensor

    // Zero-copy view of the stored bytes.
    std::span<const std::byte> raw(const TensorMeta& t) const;

    // Decode elements [elem_begin, elem_begin + count) of t.
    void read_into(const TensorMeta& t, std::int64_t elem_begin, std::int64_t count,
                   float* out) const;
    void read_into(const TensorMeta& t, std::int64_t elem_begin, std::int64_t count,
                   double* out) const;

  private:
    void add_shard_header(const std::string& file_path);
    void finalize();

    std::string path_;
    std::vector<std::shared_ptr<MappedFile>> shards_;
    std::vector<TensorMeta> tensors_;  // header order, shards in filename order
    std::unordered_map<std::string, std::size_t> by_name_;
    std::map<std::string, std::string> metadata_;
    std::int64_t total_params_ = 0;
};

CheckpointIndex open_checkpoint(const std::string& path);

std::vector<float> read_tensor_f32(const CheckpointIndex& index, std::string_view name);
std::vector<double> read_tensor_f64(const CheckpointIndex& index, std::string_view name);

// Minimal safetensors writer, used by the toy lab and test fixtures.
struct TensorInit {
    std::string name;
    Dtype dtype = Dtype::F32;
    std::vector<std::int64_t> shape;
    std::vector<float> values;  // encoded into dtype on write
};

void write_checkpoint(const std::string& path, std::span<const TensorInit> tensors,
                      const std::map<std::string, std::string>& metadata = {});

}  // namespace ckdiff
