#include "zspa/emb_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "zspa/error.hpp"

namespace zspa {

namespace {

constexpr std::string_view kMagic = "EMB1";

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(bytes[offset + i]) << (8 * i));
  }
  return value;
}

std::string at(std::size_t offset) { return " at byte offset " + std::to_string(offset); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for '" + path.string() + "'");
  return bytes;
}

}  // namespace

std::vector<std::uint8_t> encode_emb(MatrixView matrix) {
  std::vector<std::uint8_t> out;
  out.reserve(kEmbHeaderSize + 4 * matrix.data().size());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint16_t>(out, kEmbVersion);
  put_le<std::uint16_t>(out, kEmbDtypeF32);
  put_le<std::uint64_t>(out, matrix.rows());
  put_le<std::uint64_t>(out, matrix.cols());
  for (float v : matrix.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingMatrix decode_emb(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min(bytes.size(), kMagic.size());
  if (magic_len < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                  [](char m, std::uint8_t b) { return static_cast<std::uint8_t>(m) == b; })) {
    throw Error(ErrorCode::BadMagic, "expected \"EMB1\"" + at(0));
  }
  if (bytes.size() < kEmbHeaderSize) {
    throw Error(ErrorCode::TruncatedPayload, "header ends" + at(bytes.size()) + ", need " +
                                                 std::to_string(kEmbHeaderSize) + " bytes");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kEmbVersion) {
    throw Error(ErrorCode::BadVersion, "version " + std::to_string(version) + at(4));
  }
  const auto dtype = get_le<std::uint16_t>(bytes, 6);
  if (dtype != kEmbDtypeF32) {
    throw Error(ErrorCode::BadDtype, "dtype tag " + std::to_string(dtype) + at(6));
  }
  const auto rows = get_le<std::uint64_t>(bytes, 8);
  const auto cols = get_le<std::uint64_t>(bytes, 16);
  if (cols == 0) throw Error(ErrorCode::BadShape, "cols must be >= 1" + at(16));
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (rows > kMax / cols || rows * cols > (kMax - kEmbHeaderSize) / 4) {
    throw Error(ErrorCode::BadShape, std::to_string(rows) + " x " + std::to_string(cols) +
                                         " overflows the payload size" + at(8));
  }
  const std::uint64_t count = rows * cols;
  const std::uint64_t expected = kEmbHeaderSize + 4 * count;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedPayload, "payload ends" + at(bytes.size()) + ", expected " +
                                                 std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::TrailingData, std::to_string(bytes.size() - expected) +
                                             " unexpected bytes" + at(expected));
  }

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = kEmbHeaderSize + 4 * i;
    data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(i / cols) + ", column " +
                                                 std::to_string(i % cols) + at(offset));
    }
  }
  return EmbeddingMatrix(rows, cols, std::move(data));
}

EmbeddingMatrix parse_csv_matrix(std::string_view text) {
  std::vector<float> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    std::size_t fields = 0;
    while (true) {
      const auto comma = line.find(',');
      std::string_view field = trim(line.substr(0, comma));
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      float value = 0.0f;
      const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", field " +
                                               std::to_string(fields + 1) + ": '" +
                                               std::string(field) + "'");
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(rows) + " (line " +
                                                   std::to_string(line_no) + ")");
      }
      data.push_back(value);
      ++fields;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }

    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw Error(ErrorCode::DimensionMismatch, "line " + std::to_string(line_no) + " has " +
                                                    std::to_string(fields) + " values, expected " +
                                                    std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::ParseError, "CSV contains no rows");
  return EmbeddingMatrix(rows, cols, std::move(data));
}

EmbeddingMatrix read_emb(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".csv") {
    return parse_csv_matrix(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return decode_emb(bytes);
}

void write_emb(MatrixView matrix, const std::filesystem::path& path) {
  const auto bytes = encode_emb(matrix);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace zspa
