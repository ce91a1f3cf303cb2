#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "zspa/embedding.hpp"

namespace zspa {

// EMB1 layout, all integers little-endian:
//
//   offset  size  field
//        0     4  magic "EMB1"
//        4     2  version (1)
//        6     2  dtype tag (1 = IEEE-754 binary32)
//        8     8  rows
//       16     8  cols
//       24  4*r*c payload, row-major binary32
inline constexpr std::size_t kEmbHeaderSize = 24;
inline constexpr std::uint16_t kEmbVersion = 1;
inline constexpr std::uint16_t kEmbDtypeF32 = 1;

std::vector<std::uint8_t> encode_emb(MatrixView matrix);

/// Throws BadMagic, BadVersion, BadDtype, BadShape, TruncatedPayload,
/// TrailingData or NonFiniteValue; messages carry the byte offset.
EmbeddingMatrix decode_emb(std::span<const std::uint8_t> bytes);

/// Header-free CSV, one token per line, comma-separated decimal floats.
/// Throws ParseError (with line number), DimensionMismatch for ragged rows,
/// NonFiniteValue.
EmbeddingMatrix parse_csv_matrix(std::string_view text);

/// Reads EMB1, or CSV when the extension is ".csv". Throws IoError if the
/// file cannot be read.
EmbeddingMatrix read_emb(const std::filesystem::path& path);

/// Always writes the binary EMB1 layout.
void write_emb(MatrixView matrix, const std::filesystem::path& path);

}  // namespace zspa
