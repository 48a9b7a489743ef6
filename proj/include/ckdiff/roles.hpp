#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace ckdiff {

enum class TensorKind {
    Q,
    K,
    V,
    O,
    GateProj,
    UpProj,
    DownProj,
    LayerNorm,
    Embedding,
    Head,
    Other,
};

const char* kind_name(TensorKind k);
std::optional<TensorKind> kind_from_string(std::string_view s);

struct TensorRole {
    std::optional<int> layer_index;
    TensorKind kind = TensorKind::Other;

    bool operator==(const TensorRole&) const = default;
};

// Maps tensor names to architectural roles. The built-in table covers the
// Llama/Qwen/Mistral/DeepSeek naming conventions; a pattern file (JSON) can
// replace it.
class RoleClassifier {
  public:
    RoleClassifier();  // built-in table

    // File format: {"layer_pattern": "regex with one numeric capture",
    //               "rules": [{"kind": "q", "pattern": "regex"}, ...]}
    static RoleClassifier from_file(const std::string& path);

    TensorRole classify(const std::string& name) const;

  private:
    RoleClassifier(std::string layer_pattern, std::vector<std::pair<std::string, TensorKind>> rules);

    std::regex layer_re_;
    std::vector<std::pair<std::regex, TensorKind>> rules_;
};

// Classification with the built-in table; total and pure.
TensorRole classify_tensor(const std::string& name);

}  // namespace ckdiff
