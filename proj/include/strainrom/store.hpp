// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "strainrom/sampling.hpp"

namespace strainrom {

// Binary matrix file layout (all integers and floats little-endian):
//   char[8]  magic "EMSLSNAP"
//   u32      version = 1
//   u64      rows
//   u64      cols
//   f64      rows*cols values, column-major
//   u32      CRC32 of every preceding byte
inline constexpr std::uint32_t kStoreVersion = 1;

void write_matrix(const std::filesystem::path& file, const Eigen::MatrixXd& m);
/// Throws FormatVersionMismatch on a bad magic/version, ChecksumMismatch on a
/// truncated or corrupted file, IoError if the file cannot be opened.
Eigen::MatrixXd read_matrix(const std::filesystem::path& file);

/// Text manifest: one "key=value" per line, '#' starts a comment.
using Manifest = std::map<std::string, std::string>;
void write_manifest(const std::filesystem::path& file, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& file);

/// Snapshot store directory: manifest.txt plus one .bin file per matrix.
void write_store(const SnapshotSet& set, const std::filesystem::path& dir);
SnapshotSet read_store(const std::filesystem::path& dir);

}  // namespace strainrom
