#include <doctest.h>
#include <openssl/evp.h>

#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "curvekit/error.hpp"
#include "curvekit/random.hpp"
#include "curvekit/tensor_io.hpp"

using namespace curvekit;
namespace fs = std::filesystem;

namespace {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("curvekit_io_" + name); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected curvekit::Error");
  return ErrorCode::InvalidArgument;
}

Tensor2D random_tensor(std::size_t n, std::size_t d, std::uint64_t seed) {
  Tensor2D t(n, d);
  SplitMix64 rng(seed);
  std::normal_distribution<double> normal;
  for (double& v : t.data()) v = normal(rng);
  return t;
}

}  // namespace

TEST_CASE("golden fixture loads with its published hash") {
  const fs::path golden = fs::path(CURVEKIT_FIXTURES) / "golden_2x3.ltnt";
  const auto bytes = read_file(golden);
  CHECK(sha256_hex(bytes) == "5ff3fb810fb031d3ff27a2dabac1f9fd3a7e9d170d0fd3138fe10b3d7f0d48f5");
  const Tensor2D t = load_tensor(golden);
  CHECK(t == Tensor2D(2, 3, {1, 2, 3, 4, 5, 6}));
  // The writer reproduces the fixture byte for byte.
  CHECK(encode_tensor(t) == bytes);
}

TEST_CASE("2x3 binary round trip") {
  const Tensor2D t(2, 3, {1, 2, 3, 4, 5, 6});
  const auto path = temp_path("2x3.ltnt");
  save_tensor(t, path);
  CHECK(load_tensor(path) == t);
}

TEST_CASE("zero-row tensor round trips") {
  const Tensor2D t(0, 3);
  const auto path = temp_path("empty.ltnt");
  save_tensor(t, path);
  const auto back = load_tensor(path);
  CHECK(back.rows() == 0);
  CHECK(back.cols() == 3);
  CHECK(fs::file_size(path) == 14);
}

TEST_CASE("1024x512 random tensor re-saves byte-identically") {
  const Tensor2D t = random_tensor(1024, 512, 99);
  const auto a = temp_path("big_a.ltnt"), b = temp_path("big_b.ltnt");
  save_tensor(t, a);
  save_tensor(load_tensor(a), b);
  CHECK(sha256_hex(read_file(a)) == sha256_hex(read_file(b)));
  CHECK(load_tensor(b) == t);
}

TEST_CASE("round trip property over random shapes and extensions") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    SplitMix64 rng(seed);
    Tensor2D t = random_tensor(rng() % 7, 1 + rng() % 9, seed);
    if (seed % 3 == 0) t.ext.block_size = std::uint32_t(1 + rng() % 5);
    if (seed % 4 == 0) t.ext.metadata = "seed=" + std::to_string(seed);
    std::size_t offset = 0;
    const auto bytes = encode_tensor(t);
    CHECK(decode_tensor(bytes, offset) == t);
    CHECK(offset == bytes.size());
  }
}

TEST_CASE("header declaring 4x4 with 15 values is a shape mismatch") {
  Tensor2D t(3, 5);
  auto bytes = encode_tensor(t);
  // Patch the header to claim 4 x 4 = 16 values over a 15-value payload.
  bytes[6] = 4;
  bytes[10] = 4;
  const auto path = temp_path("short.ltnt");
  write_file(path, bytes);
  CHECK(code_of([&] { load_tensor(path); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("trailing bytes are rejected") {
  auto bytes = encode_tensor(Tensor2D(1, 2, {1, 2}));
  bytes.push_back(0);
  const auto path = temp_path("trailing.ltnt");
  write_file(path, bytes);
  CHECK(code_of([&] { load_tensor(path); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("wrong magic and non-finite payloads") {
  auto bytes = encode_tensor(Tensor2D(1, 2, {1, 2}));
  bytes[0] = 0x01;  // binary garbage instead of "L"
  const auto path = temp_path("magic.ltnt");
  write_file(path, bytes);
  CHECK(code_of([&] { load_tensor(path); }) == ErrorCode::MagicMismatch);

  std::size_t offset = 0;
  auto bad_version = encode_tensor(Tensor2D(1, 1, {1}));
  bad_version[4] = 2;
  CHECK(code_of([&] { decode_tensor(bad_version, offset); }) == ErrorCode::MagicMismatch);

  Tensor2D nan_tensor(2, 2, {1, 2, 3, 4});
  auto nan_bytes = encode_tensor(nan_tensor);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(nan_bytes.data() + 14 + 3 * 8, &nan, 8);
  offset = 0;
  try {
    decode_tensor(nan_bytes, offset);
    FAIL("expected NonFiniteValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    CHECK(std::string(e.what()).find("byte offset 38") != std::string::npos);
  }
}

TEST_CASE("real32 payloads widen to real64") {
  const Tensor2D t(1, 3, {0.5, -2.0, 0.1});
  const auto bytes = encode_tensor(t, DType::Real32);
  CHECK(bytes.size() == 14 + 12);
  std::size_t offset = 0;
  const auto back = decode_tensor(bytes, offset);
  CHECK(back(0, 0) == 0.5);
  CHECK(back(0, 1) == -2.0);
  CHECK(back(0, 2) == double(0.1f));
}

TEST_CASE("CSV parsing") {
  const auto t = parse_csv("0.5,0.5\n1.0,0.0");
  CHECK(t == Tensor2D(2, 2, {0.5, 0.5, 1.0, 0.0}));
  CHECK(load_tensor(fs::path(CURVEKIT_FIXTURES) / "small.csv") == t);
  CHECK(parse_csv(format_csv(t)) == t);
  CHECK(parse_csv("1, 2\r\n3 ,4\n\n") == Tensor2D(2, 2, {1, 2, 3, 4}));

  CHECK(code_of([] { parse_csv("1,2\n3\n"); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([] { parse_csv("1,x\n"); }) == ErrorCode::CsvParse);
  CHECK(code_of([] { parse_csv("1,2\nnan,4\n"); }) == ErrorCode::NonFiniteValue);
  try {
    parse_csv("1,2\n3,4\n5,inf\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("image tensors carry their dimensions") {
  ImageTensor img(2, 3, 2);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = double(i);
  const Tensor2D t = image_to_tensor(img);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 6);
  std::size_t offset = 0;
  const auto bytes = encode_tensor(t);
  const auto back = decode_tensor(bytes, offset);
  CHECK(image_from_tensor(back) == img);
  CHECK(code_of([] { image_from_tensor(Tensor2D(2, 6)); }) == ErrorCode::InvalidImage);
}

TEST_CASE("bundles") {
  SUBCASE("two layers come back ordered") {
    std::vector<LayerBundle> layers = {{"fc", 1, 2, Tensor2D(2, 1, {3, 4})}, {"conv1", 0, 2, Tensor2D(2, 2, {1, 2, 3, 4})}};
    const auto path = temp_path("two.lbnd");
    save_bundle(layers, path);
    const auto back = load_bundle(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].layer_name == "conv1");
    CHECK(back[0].layer_index == 0);
    CHECK(back[1].layer_name == "fc");
    CHECK(back[1].total_layers == 2);
    CHECK(back[1].tensor == layers[0].tensor);
  }
  SUBCASE("duplicate index") {
    std::vector<LayerBundle> layers = {{"a", 0, 2, Tensor2D(1, 1, {1})}, {"b", 0, 2, Tensor2D(1, 1, {2})}};
    CHECK(code_of([&] { decode_bundle(encode_bundle(layers)); }) == ErrorCode::DuplicateLayerIndex);
  }
  SUBCASE("ordinal out of range") {
    std::vector<LayerBundle> layers = {{"a", 2, 2, Tensor2D(1, 1, {1})}};
    CHECK(code_of([&] { decode_bundle(encode_bundle(layers)); }) == ErrorCode::OrdinalOutOfRange);
  }
  SUBCASE("row counts must agree") {
    std::vector<LayerBundle> layers = {{"a", 0, 2, Tensor2D(1, 1, {1})}, {"b", 1, 2, Tensor2D(2, 1, {2, 3})}};
    CHECK(code_of([&] { decode_bundle(encode_bundle(layers)); }) == ErrorCode::ShapeMismatch);
  }
  SUBCASE("five-layer round trip") {
    std::vector<LayerBundle> layers;
    for (std::uint32_t l = 0; l < 5; ++l) {
      Tensor2D t = random_tensor(12, 3 + l, 40 + l);
      t.ext.block_size = 4;
      layers.push_back({"layer" + std::to_string(l), l, 5, std::move(t)});
    }
    CHECK(decode_bundle(encode_bundle(layers)) == layers);
  }
}

TEST_CASE("exporter-written real32 bundle") {
  const auto layers = load_bundle(fs::path(CURVEKIT_FIXTURES) / "exporter_real32.lbnd");
  REQUIRE(layers.size() == 2);
  CHECK(layers[0].layer_name == "input");
  CHECK(layers[1].layer_name == "fc");
  CHECK(layers[0].tensor == [] {
    Tensor2D t(3, 2, {0.5, 1.0, 0.25, -2.0, 1.5, 0.125});
    t.ext.block_size = 3;
    t.ext.metadata = "layers=auto";
    return t;
  }());
  CHECK(layers[1].tensor(1, 1) == 4.0);
}
