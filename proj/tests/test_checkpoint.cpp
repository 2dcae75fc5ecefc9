#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "arena_fixtures.hpp"
#include "hintflow/checkpoint.hpp"
#include "hintflow/errors.hpp"

using namespace hintflow;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hintflow_ckpt_test";
    fs::create_directories(dir);
    return dir / name;
}
}  // namespace

TEST_CASE("sections carry the documented shapes") {
    auto spec = default_arena();
    spec.languages[2].vocab_size = 5;
    std::mt19937_64 gen(1);
    const auto p = fixtures::random_policy(spec, gen);
    const auto s = to_sections(p);
    REQUIRE(s.size() == 4);
    CHECK(s[0].name == "format_logit");
    CHECK(s[0].dims == std::vector<std::uint64_t>{1});
    CHECK(s[1].dims == std::vector<std::uint64_t>{6, 6});
    CHECK(s[2].dims == std::vector<std::uint64_t>{6, 16});
    CHECK(s[3].dims == std::vector<std::uint64_t>{6, 4, 8});
    // Padding past a short vocabulary is zero.
    for (std::size_t v = 5; v < 16; ++v) CHECK(s[2].values[2 * 16 + v] == 0.0);
    CHECK(from_sections(s, spec.policy_shape()) == p);
}

TEST_CASE("encode and decode round trip bit for bit") {
    const auto spec = default_arena();
    std::mt19937_64 gen(2);
    const auto p = fixtures::random_policy(spec, gen, 3.0);
    const auto bytes = encode_checkpoint(to_sections(p));
    CHECK(bytes.substr(0, 8) == "HFCKPT01");
    CHECK(from_sections(decode_checkpoint(bytes), spec.policy_shape()) == p);

    CHECK_THROWS_AS(decode_checkpoint("HFCKPT02" + bytes.substr(8)), FormatError);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), FormatError);
    CHECK_THROWS_AS(decode_checkpoint(bytes + "x"), FormatError);
}

TEST_CASE("files, manifest and checksum") {
    const auto spec = default_arena();
    std::mt19937_64 gen(3);
    const auto p = fixtures::random_policy(spec, gen);
    const auto path = scratch("a.bin");
    save_checkpoint(path, p);
    CHECK(load_checkpoint(path, spec.policy_shape()) == p);

    std::ifstream m(manifest_path(path));
    std::string all((std::istreambuf_iterator<char>(m)), {});
    CHECK(all.find("section answer_logits 6x4x8") != std::string::npos);
    CHECK(all.find("checksum fnv1a64 ") != std::string::npos);

    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(-1, std::ios::end);
        f.put('\x7f');
    }
    CHECK_THROWS_AS(load_checkpoint(path, spec.policy_shape()), FormatError);
    CHECK_THROWS_AS(load_checkpoint(scratch("missing.bin"), spec.policy_shape()), FormatError);

    save_checkpoint(path, p);
    auto other = spec;
    other.answers = 4;
    CHECK_THROWS_AS(load_checkpoint(path, other.policy_shape()), FormatError);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
