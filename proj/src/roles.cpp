#include "ckdiff/roles.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ckdiff/errors.hpp"

namespace ckdiff {

const char* kind_name(TensorKind k) {
    switch (k) {
        case TensorKind::Q: return "q";
        case TensorKind::K: return "k";
        case TensorKind::V: return "v";
        case TensorKind::O: return "o";
        case TensorKind::GateProj: return "gate_proj";
        case TensorKind::UpProj: return "up_proj";
        case TensorKind::DownProj: return "down_proj";
        case TensorKind::LayerNorm: return "layer_norm";
        case TensorKind::Embedding: return "embedding";
        case TensorKind::Head: return "head";
        case TensorKind::Other: return "other";
    }
    return "other";
}

std::optional<TensorKind> kind_from_string(std::string_view s) {
    for (TensorKind k : {TensorKind::Q, TensorKind::K, TensorKind::V, TensorKind::O,
                         TensorKind::GateProj, TensorKind::UpProj, TensorKind::DownProj,
                         TensorKind::LayerNorm, TensorKind::Embedding, TensorKind::Head,
                         TensorKind::Other}) {
        if (s == kind_name(k)) return k;
    }
    return std::nullopt;
}

namespace {

// Normalization patterns take priority so e.g. "q_norm" never reads as Q.
const std::vector<std::pair<std::string, TensorKind>>& builtin_rules() {
    static const std::vector<std::pair<std::string, TensorKind>> rules = {
        {R"((^|\.)([a-z0-9_]*(layernorm|layer_norm|rmsnorm|rms_norm)[a-z0-9_]*|norm|ln_[a-z0-9]+|ln[0-9]+)(\.|$))",
         TensorKind::LayerNorm},
        {R"((^|\.)(q_proj|q_a_proj|q_b_proj|wq|query)(\.|$))", TensorKind::Q},
        {R"((^|\.)(k_proj|kv_a_proj_with_mqa|kv_b_proj|wk|key)(\.|$))", TensorKind::K},
        {R"((^|\.)(v_proj|wv|value)(\.|$))", TensorKind::V},
        {R"((^|\.)(o_proj|wo|out_proj|dense)(\.|$))", TensorKind::O},
        {R"((^|\.)(gate_proj|w1)(\.|$))", TensorKind::GateProj},
        {R"((^|\.)(up_proj|w3)(\.|$))", TensorKind::UpProj},
        {R"((^|\.)(down_proj|w2)(\.|$))", TensorKind::DownProj},
        {R"((^|\.)(embed_tokens|tok_embeddings|wte|word_embeddings|embed_in)(\.|$))",
         TensorKind::Embedding},
        {R"((^|\.)(lm_head|embed_out|output)(\.|$))", TensorKind::Head},
    };
    return rules;
}

constexpr const char* kBuiltinLayerPattern = R"((^|\.)(layers|h|blocks|layer)\.([0-9]+)(\.|$))";

}  // namespace

RoleClassifier::RoleClassifier(std::string layer_pattern,
                               std::vector<std::pair<std::string, TensorKind>> rules)
    : layer_re_(layer_pattern, std::regex::ECMAScript | std::regex::icase) {
    rules_.reserve(rules.size());
    for (auto& [pattern, kind] : rules) {
        rules_.emplace_back(std::regex(pattern, std::regex::ECMAScript | std::regex::icase), kind);
    }
}

RoleClassifier::RoleClassifier() : RoleClassifier(kBuiltinLayerPattern, builtin_rules()) {}

RoleClassifier RoleClassifier::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open role pattern file " + path);
    nlohmann::json spec;
    try {
        in >> spec;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("role pattern file " + path + ": " + e.what());
    }
    std::string layer_pattern =
        spec.value("layer_pattern", std::string(kBuiltinLayerPattern));
    std::vector<std::pair<std::string, TensorKind>> rules;
    for (const auto& rule : spec.value("rules", nlohmann::json::array())) {
        const std::string kind_str = rule.at("kind").get<std::string>();
        const auto kind = kind_from_string(kind_str);
        if (!kind) throw InvalidArgument("unknown tensor kind '" + kind_str + "' in " + path);
        rules.emplace_back(rule.at("pattern").get<std::string>(), *kind);
    }
    if (rules.empty()) throw InvalidArgument("role pattern file " + path + " has no rules");
    try {
        return RoleClassifier(std::move(layer_pattern), std::move(rules));
    } catch (const std::regex_error& e) {
        throw InvalidArgument(std::string("bad regex in role pattern file: ") + e.what());
    }
}

TensorRole RoleClassifier::classify(const std::string& name) const {
    TensorRole role;
    std::smatch m;
    if (std::regex_search(name, m, layer_re_)) {
        // first all-digit capture group carries the layer index
        for (std::size_t g = 1; g < m.size(); ++g) {
            const std::string s = m[g].str();
            if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
                role.layer_index = std::stoi(s);
                break;
            }
        }
    }
    for (const auto& [re, kind] : rules_) {
        if (std::regex_search(name, re)) {
            role.kind = kind;
            break;
        }
    }
    return role;
}

TensorRole classify_tensor(const std::string& name) {
    static const RoleClassifier builtin;
    return builtin.classify(name);
}

}  // namespace ckdiff
