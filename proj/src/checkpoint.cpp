// SPDX-License-Identifier: Apache-2.0

#include "hintflow/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hintflow/errors.hpp"

namespace hintflow {

namespace {

constexpr std::string_view kMagic = "HFCKPT01";

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }

    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

    std::string get_bytes(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw FormatError("checkpoint truncated");
    }

    const std::string& bytes_;
    std::size_t pos_ = 0;
};

std::string shape_string(const std::vector<std::uint64_t>& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

const CheckpointSection& find_section(const std::vector<CheckpointSection>& sections, std::string_view name,
                                      const std::vector<std::uint64_t>& dims) {
    const auto it = std::find_if(sections.begin(), sections.end(), [&](const auto& s) { return s.name == name; });
    if (it == sections.end()) throw FormatError("checkpoint lacks section '" + std::string(name) + "'");
    if (it->dims != dims)
        throw FormatError("section '" + std::string(name) + "' has shape " + shape_string(it->dims) + ", expected " +
                          shape_string(dims));
    return *it;
}

}  // namespace

std::vector<CheckpointSection> to_sections(const PolicyParams& policy) {
    const auto& shape = policy.shape();
    const std::uint64_t nl = shape.languages;
    const std::uint64_t vmax = shape.vocab.empty() ? 0 : *std::max_element(shape.vocab.begin(), shape.vocab.end());

    std::vector<CheckpointSection> out;
    out.push_back({"format_logit", {1}, {policy.format_logit()}});

    CheckpointSection lang{"lang_logits", {nl, nl}, {}};
    CheckpointSection tok{"token_logits", {nl, vmax}, std::vector<double>(nl * vmax, 0.0)};
    CheckpointSection ans{"answer_logits", {nl, shape.families, shape.answers}, {}};
    for (std::uint32_t l = 0; l < nl; ++l) {
        const auto row = policy.lang_row(LanguageIndex{l});
        lang.values.insert(lang.values.end(), row.begin(), row.end());
        const auto trow = policy.token_row(LanguageIndex{l});
        std::copy(trow.begin(), trow.end(), tok.values.begin() + static_cast<std::ptrdiff_t>(l * vmax));
        for (std::size_t f = 0; f < shape.families; ++f) {
            const auto arow = policy.answer_row(LanguageIndex{l}, f);
            ans.values.insert(ans.values.end(), arow.begin(), arow.end());
        }
    }
    out.push_back(std::move(lang));
    out.push_back(std::move(tok));
    out.push_back(std::move(ans));
    return out;
}

PolicyParams from_sections(const std::vector<CheckpointSection>& sections, const PolicyShape& shape) {
    const std::uint64_t nl = shape.languages;
    const std::uint64_t vmax = shape.vocab.empty() ? 0 : *std::max_element(shape.vocab.begin(), shape.vocab.end());
    PolicyParams policy(shape);

    policy.format_logit() = find_section(sections, "format_logit", {1}).values[0];
    const auto& lang = find_section(sections, "lang_logits", {nl, nl});
    const auto& tok = find_section(sections, "token_logits", {nl, vmax});
    const auto& ans = find_section(sections, "answer_logits", {nl, shape.families, shape.answers});
    for (std::uint32_t l = 0; l < nl; ++l) {
        auto row = policy.lang_row(LanguageIndex{l});
        std::copy_n(lang.values.begin() + static_cast<std::ptrdiff_t>(l * nl), nl, row.begin());
        auto trow = policy.token_row(LanguageIndex{l});
        std::copy_n(tok.values.begin() + static_cast<std::ptrdiff_t>(l * vmax), trow.size(), trow.begin());
        for (std::size_t f = 0; f < shape.families; ++f) {
            auto arow = policy.answer_row(LanguageIndex{l}, f);
            const auto at = (l * shape.families + f) * shape.answers;
            std::copy_n(ans.values.begin() + static_cast<std::ptrdiff_t>(at), shape.answers, arow.begin());
        }
    }
    return policy;
}

std::string encode_checkpoint(const std::vector<CheckpointSection>& sections) {
    std::string out(kMagic);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sections.size()));
    for (const auto& s : sections) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.name.size()));
        out += s.name;
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.dims.size()));
        for (auto d : s.dims) put_le<std::uint64_t>(out, d);
        for (double v : s.values) put_f64(out, v);
    }
    return out;
}

std::vector<CheckpointSection> decode_checkpoint(const std::string& bytes) {
    Reader in(bytes);
    if (in.get_bytes(kMagic.size()) != kMagic) throw FormatError("not a checkpoint file");
    const auto count = in.get<std::uint32_t>();
    std::vector<CheckpointSection> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        CheckpointSection s;
        s.name = in.get_bytes(in.get<std::uint32_t>());
        const auto rank = in.get<std::uint32_t>();
        std::uint64_t n = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            s.dims.push_back(in.get<std::uint64_t>());
            n *= s.dims.back();
        }
        if (n > bytes.size() / 8) throw FormatError("section '" + s.name + "' larger than file");
        s.values.reserve(n);
        for (std::uint64_t j = 0; j < n; ++j) s.values.push_back(in.get_f64());
        out.push_back(std::move(s));
    }
    if (!in.done()) throw FormatError("trailing bytes after last checkpoint section");
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::filesystem::path manifest_path(const std::filesystem::path& checkpoint) {
    auto p = checkpoint;
    p += ".manifest";
    return p;
}

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& policy) {
    const auto sections = to_sections(policy);
    const auto bytes = encode_checkpoint(sections);
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write checkpoint " + path.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    std::ofstream man(manifest_path(path), std::ios::trunc);
    if (!man) throw FormatError("cannot write checkpoint manifest for " + path.string());
    man << "format hintflow-checkpoint 1\n";
    for (const auto& s : sections) man << "section " << s.name << ' ' << shape_string(s.dims) << '\n';
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
    man << "checksum fnv1a64 " << hex.str() << '\n';
}

PolicyParams load_checkpoint(const std::filesystem::path& path, const PolicyShape& shape) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (std::ifstream man(manifest_path(path)); man) {
        std::string line;
        while (std::getline(man, line)) {
            std::istringstream ls(line);
            std::string key, algo, value;
            ls >> key >> algo >> value;
            if (key != "checksum") continue;
            std::ostringstream hex;
            hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
            if (algo != "fnv1a64" || value != hex.str()) throw FormatError("checkpoint checksum mismatch");
        }
    }
    return from_sections(decode_checkpoint(bytes), shape);
}

}  // namespace hintflow
