// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hintflow/policy.hpp"

namespace hintflow {

/// Binary layout (all integers and reals little-endian):
///
///   "HFCKPT01"                       8-byte magic
///   u32 section_count
///   per section:
///     u32 name_len, name bytes
///     u32 rank, u64 dims[rank]
///     f64 values[prod(dims)]
///
/// Sections: format_logit [1], lang_logits [L, L], token_logits [L, Vmax]
/// (rows zero-padded past each language's vocabulary), answer_logits
/// [L, F, K]. A text manifest next to the file lists each section with its
/// shape plus an FNV-1a 64 checksum of the binary file.
struct CheckpointSection {
    std::string name;
    std::vector<std::uint64_t> dims;
    std::vector<double> values;
};

std::vector<CheckpointSection> to_sections(const PolicyParams& policy);
/// Throws FormatError when the sections do not match `shape`.
PolicyParams from_sections(const std::vector<CheckpointSection>& sections, const PolicyShape& shape);

std::string encode_checkpoint(const std::vector<CheckpointSection>& sections);
std::vector<CheckpointSection> decode_checkpoint(const std::string& bytes);

std::uint64_t fnv1a64(const std::string& bytes);

std::filesystem::path manifest_path(const std::filesystem::path& checkpoint);

/// Writes the checkpoint and its manifest.
void save_checkpoint(const std::filesystem::path& path, const PolicyParams& policy);

/// Verifies the manifest checksum when the manifest exists. Throws
/// FormatError on corruption or shape mismatch.
PolicyParams load_checkpoint(const std::filesystem::path& path, const PolicyShape& shape);

}  // namespace hintflow
