#include "curvekit/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

#include "curvekit/error.hpp"

namespace curvekit {

// ---------------------------------------------------------------------------
// Tensor2D / ImageTensor

Tensor2D::Tensor2D(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Tensor2D::Tensor2D(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeMismatch, "tensor declared " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                                              " but holds " + std::to_string(data_.size()) + " values");
  }
}

Tensor2D Tensor2D::from_matrix(const Eigen::Ref<const RowMatrix>& m) {
  Tensor2D t(std::size_t(m.rows()), std::size_t(m.cols()));
  t.matrix() = m;
  return t;
}

Tensor2D Tensor2D::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > rows_) {
    throw Error(ErrorCode::ShapeMismatch, "row slice [" + std::to_string(first) + ", " +
                                              std::to_string(first + count) + ") exceeds " + std::to_string(rows_));
  }
  auto begin = data_.begin() + std::ptrdiff_t(first * cols_);
  return Tensor2D(count, cols_, std::vector<double>(begin, begin + std::ptrdiff_t(count * cols_)));
}

ImageTensor::ImageTensor(std::size_t h, std::size_t w, std::size_t c)
    : height(h), width(w), channels(c), data(h * w * c, 0.0) {}

void ImageTensor::validate() const {
  if (height == 0 || width == 0 || channels == 0) {
    throw Error(ErrorCode::InvalidImage, "image dimensions must be positive");
  }
  if (data.size() != height * width * channels) {
    throw Error(ErrorCode::InvalidImage, "image data length " + std::to_string(data.size()) + " != m*n*c = " +
                                             std::to_string(height * width * channels));
  }
}

Tensor2D image_to_tensor(const ImageTensor& img) {
  img.validate();
  Tensor2D t(img.channels, img.height * img.width, img.data);
  t.ext.image = ImageDims{std::uint32_t(img.height), std::uint32_t(img.width), std::uint32_t(img.channels)};
  return t;
}

ImageTensor image_from_tensor(const Tensor2D& t) {
  if (!t.ext.image) throw Error(ErrorCode::InvalidImage, "tensor carries no image dimensions");
  const auto& dims = *t.ext.image;
  if (t.rows() != dims.channels || t.cols() != std::size_t(dims.height) * dims.width) {
    throw Error(ErrorCode::ShapeMismatch, "image dims do not match tensor shape");
  }
  ImageTensor img;
  img.height = dims.height;
  img.width = dims.width;
  img.channels = dims.channels;
  img.data = t.values();
  img.validate();
  return img;
}

// ---------------------------------------------------------------------------
// Little-endian primitives

namespace {

constexpr char kTensorMagic[4] = {'L', 'T', 'N', 'T'};
constexpr char kBundleMagic[4] = {'L', 'B', 'N', 'D'};
constexpr std::uint8_t kExtensionFlag = 0x80;

enum : std::uint8_t { kTagImage = 1, kTagBlockSize = 2, kTagMetadata = 3 };

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) {
    auto b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { uint_le(v, 2); }
  void u32(std::uint32_t v) { uint_le(v, 4); }
  void u64(std::uint64_t v) { uint_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

 private:
  void uint_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(std::uint8_t(v >> (8 * i)));
  }
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t& offset, std::size_t base)
      : bytes_(bytes), off_(offset), base_(base) {}

  std::size_t offset() const { return off_; }
  std::size_t abs_offset() const { return base_ + off_; }
  std::size_t remaining() const { return bytes_.size() - off_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::ShapeMismatch, std::string("truncated ") + what + " at byte offset " +
                                                std::to_string(abs_offset()) + " (need " + std::to_string(n) +
                                                " bytes, have " + std::to_string(remaining()) + ")");
    }
  }
  std::uint64_t uint_le(int n, const char* what) {
    need(std::size_t(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(bytes_[off_ + std::size_t(i)]) << (8 * i);
    off_ += std::size_t(n);
    return v;
  }
  std::uint8_t u8(const char* what) { return std::uint8_t(uint_le(1, what)); }
  std::uint16_t u16(const char* what) { return std::uint16_t(uint_le(2, what)); }
  std::uint32_t u32(const char* what) { return std::uint32_t(uint_le(4, what)); }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(off_, n);
    off_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t& off_;
  std::size_t base_;
};

void write_extensions(Writer& w, const TensorExtensions& ext) {
  std::vector<std::uint8_t> block;
  Writer b(block);
  if (ext.image) {
    b.u8(kTagImage);
    b.u32(12);
    b.u32(ext.image->height);
    b.u32(ext.image->width);
    b.u32(ext.image->channels);
  }
  if (ext.block_size) {
    b.u8(kTagBlockSize);
    b.u32(4);
    b.u32(*ext.block_size);
  }
  if (!ext.metadata.empty()) {
    b.u8(kTagMetadata);
    b.u32(std::uint32_t(ext.metadata.size()));
    b.bytes(ext.metadata.data(), ext.metadata.size());
  }
  w.u32(std::uint32_t(block.size()));
  w.bytes(block.data(), block.size());
}

TensorExtensions read_extensions(Reader& r) {
  TensorExtensions ext;
  const std::uint32_t total = r.u32("extension length");
  std::size_t block_off = 0;
  auto block = r.take(total, "extension block");
  Reader b(block, block_off, r.abs_offset() - total);
  while (b.remaining() > 0) {
    const std::uint8_t tag = b.u8("extension tag");
    const std::uint32_t len = b.u32("extension entry length");
    auto body = b.take(len, "extension entry");
    std::size_t body_off = 0;
    Reader e(body, body_off, b.abs_offset() - len);
    switch (tag) {
      case kTagImage:
        if (len != 12) throw Error(ErrorCode::ShapeMismatch, "image extension must be 12 bytes");
        ext.image = ImageDims{e.u32("height"), e.u32("width"), e.u32("channels")};
        break;
      case kTagBlockSize:
        if (len != 4) throw Error(ErrorCode::ShapeMismatch, "block-size extension must be 4 bytes");
        ext.block_size = e.u32("block size");
        break;
      case kTagMetadata:
        ext.metadata.assign(reinterpret_cast<const char*>(body.data()), body.size());
        break;
      default:
        break;  // unknown entries are skipped
    }
  }
  return ext;
}

}  // namespace

// ---------------------------------------------------------------------------
// LTNT

std::vector<std::uint8_t> encode_tensor(const Tensor2D& t, DType dtype) {
  if (t.rows() > UINT32_MAX || t.cols() > UINT32_MAX) {
    throw Error(ErrorCode::ShapeMismatch, "tensor shape exceeds u32 header fields");
  }
  std::vector<std::uint8_t> out;
  const std::size_t width = dtype == DType::Real64 ? 8 : 4;
  out.reserve(14 + t.size() * width);
  Writer w(out);
  w.bytes(kTensorMagic, 4);
  w.u8(kLtntVersion);
  w.u8(std::uint8_t(std::uint8_t(dtype) | (t.ext.empty() ? 0 : kExtensionFlag)));
  w.u32(std::uint32_t(t.rows()));
  w.u32(std::uint32_t(t.cols()));
  if (!t.ext.empty()) write_extensions(w, t.ext);
  for (double v : t.data()) {
    if (dtype == DType::Real64) {
      w.f64(v);
    } else {
      w.f32(static_cast<float>(v));
    }
  }
  return out;
}

Tensor2D decode_tensor(std::span<const std::uint8_t> bytes, std::size_t& offset, std::size_t base_offset) {
  Reader r(bytes, offset, base_offset);
  const std::size_t start = r.abs_offset();
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kTensorMagic, 4) != 0) {
    throw Error(ErrorCode::MagicMismatch, "expected \"LTNT\" at byte offset " + std::to_string(start));
  }
  const std::uint8_t version = r.u8("version");
  if (version != kLtntVersion) {
    throw Error(ErrorCode::MagicMismatch,
                "unsupported LTNT version " + std::to_string(version) + " at byte offset " + std::to_string(start + 4));
  }
  const std::uint8_t tag = r.u8("dtype");
  const std::uint8_t dtype = tag & std::uint8_t(~kExtensionFlag);
  if (dtype > 1) {
    throw Error(ErrorCode::MagicMismatch,
                "unknown dtype tag " + std::to_string(dtype) + " at byte offset " + std::to_string(start + 5));
  }
  const std::uint64_t n = r.u32("row count");
  const std::uint64_t d = r.u32("column count");
  TensorExtensions ext;
  if (tag & kExtensionFlag) ext = read_extensions(r);

  const std::size_t width = dtype == 0 ? 8 : 4;
  const std::uint64_t count = n * d;
  const std::size_t payload_at = r.abs_offset();
  if (count * width > r.remaining()) {
    throw Error(ErrorCode::ShapeMismatch, "header at byte offset " + std::to_string(start) + " declares " +
                                              std::to_string(n) + "x" + std::to_string(d) + " but payload at offset " +
                                              std::to_string(payload_at) + " holds " +
                                              std::to_string(r.remaining() / width) + " values");
  }
  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    double v;
    if (width == 8) {
      v = std::bit_cast<double>(r.uint_le(8, "value"));
    } else {
      v = double(std::bit_cast<float>(std::uint32_t(r.uint_le(4, "value"))));
    }
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(i / d) + " column " + std::to_string(i % d) +
                                                 " (byte offset " + std::to_string(payload_at + i * width) + ")");
    }
    values[i] = v;
  }
  Tensor2D t(n, d, std::move(values));
  if (ext.image && (ext.image->channels != n || std::uint64_t(ext.image->height) * ext.image->width != d)) {
    throw Error(ErrorCode::ShapeMismatch, "image extension does not match tensor shape at byte offset " +
                                              std::to_string(start));
  }
  t.ext = std::move(ext);
  return t;
}

// ---------------------------------------------------------------------------
// CSV

Tensor2D parse_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::size_t fields = 0;
    while (true) {
      const auto comma = line.find(',');
      std::string_view field = line.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::CsvParse, "row " + std::to_string(rows) + " (line " + std::to_string(line_no) +
                                             "): cannot parse \"" + std::string(field) + "\"");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(rows) + " (line " + std::to_string(line_no) + ")");
      }
      values.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw Error(ErrorCode::ShapeMismatch, "row " + std::to_string(rows) + " has " + std::to_string(fields) +
                                                " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  return Tensor2D(rows, cols, std::move(values));
}

std::string format_csv(const Tensor2D& t) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (j) out.push_back(',');
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t(i, j));
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

namespace {

bool looks_like_text(std::span<const std::uint8_t> bytes) {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) {
    return b == '\n' || b == '\r' || b == '\t' || (b >= 0x20 && b < 0x7f);
  });
}

}  // namespace

Tensor2D load_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kTensorMagic, 4) == 0) {
    std::size_t offset = 0;
    Tensor2D t = decode_tensor(bytes, offset);
    if (offset != bytes.size()) {
      throw Error(ErrorCode::ShapeMismatch, std::to_string(bytes.size() - offset) +
                                                " trailing bytes at byte offset " + std::to_string(offset));
    }
    return t;
  }
  if (!bytes.empty() && looks_like_text(bytes)) {
    return parse_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  throw Error(ErrorCode::MagicMismatch, path.string() + ": expected \"LTNT\" at byte offset 0 or CSV text");
}

void save_tensor(const Tensor2D& t, const std::filesystem::path& path, DType dtype) {
  write_file(path, encode_tensor(t, dtype));
}

// ---------------------------------------------------------------------------
// LBND

std::vector<std::uint8_t> encode_bundle(std::span<const LayerBundle> layers, DType dtype) {
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.bytes(kBundleMagic, 4);
  w.u32(std::uint32_t(layers.size()));
  for (const auto& layer : layers) {
    if (layer.layer_name.size() > UINT16_MAX) {
      throw Error(ErrorCode::InvalidArgument, "layer name longer than 65535 bytes");
    }
    w.u16(std::uint16_t(layer.layer_name.size()));
    w.bytes(layer.layer_name.data(), layer.layer_name.size());
    w.u32(layer.layer_index);
    w.u32(layer.total_layers);
    auto record = encode_tensor(layer.tensor, dtype);
    w.bytes(record.data(), record.size());
  }
  return out;
}

std::vector<LayerBundle> decode_bundle(std::span<const std::uint8_t> bytes) {
  std::size_t offset = 0;
  Reader r(bytes, offset, 0);
  auto magic = r.take(4, "bundle magic");
  if (std::memcmp(magic.data(), kBundleMagic, 4) != 0) {
    throw Error(ErrorCode::MagicMismatch, "expected \"LBND\" at byte offset 0");
  }
  const std::uint32_t count = r.u32("layer count");
  std::vector<LayerBundle> layers;
  std::set<std::uint32_t> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    LayerBundle layer;
    const std::size_t record_at = r.abs_offset();
    const std::uint16_t name_len = r.u16("layer name length");
    auto name = r.take(name_len, "layer name");
    layer.layer_name.assign(reinterpret_cast<const char*>(name.data()), name.size());
    layer.layer_index = r.u32("layer index");
    layer.total_layers = r.u32("total layers");
    if (layer.layer_index >= layer.total_layers) {
      throw Error(ErrorCode::OrdinalOutOfRange, "layer \"" + layer.layer_name + "\" index " +
                                                    std::to_string(layer.layer_index) + " >= total " +
                                                    std::to_string(layer.total_layers) + " (record at byte offset " +
                                                    std::to_string(record_at) + ")");
    }
    if (!seen.insert(layer.layer_index).second) {
      throw Error(ErrorCode::DuplicateLayerIndex, "layer index " + std::to_string(layer.layer_index) +
                                                      " repeated (record at byte offset " + std::to_string(record_at) +
                                                      ")");
    }
    layer.tensor = decode_tensor(bytes, offset, 0);
    if (!layers.empty() && layer.tensor.rows() != layers.front().tensor.rows()) {
      throw Error(ErrorCode::ShapeMismatch, "layer \"" + layer.layer_name + "\" has " +
                                                std::to_string(layer.tensor.rows()) + " rows, expected " +
                                                std::to_string(layers.front().tensor.rows()));
    }
    layers.push_back(std::move(layer));
  }
  if (offset != bytes.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(bytes.size() - offset) + " trailing bytes at byte offset " +
                                              std::to_string(offset));
  }
  std::sort(layers.begin(), layers.end(),
            [](const LayerBundle& a, const LayerBundle& b) { return a.layer_index < b.layer_index; });
  return layers;
}

std::vector<LayerBundle> load_bundle(const std::filesystem::path& path) { return decode_bundle(read_file(path)); }

void save_bundle(std::span<const LayerBundle> layers, const std::filesystem::path& path, DType dtype) {
  write_file(path, encode_bundle(layers, dtype));
}

}  // namespace curvekit
