// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "strainrom/cubature.hpp"
#include "strainrom/emsl.hpp"
#include "strainrom/pod.hpp"
#include "strainrom/store.hpp"

namespace strainrom {

// Models are store directories: manifest.txt with type=POD|ECM|E3C|EMSL
// plus one binary matrix per field. Extra manifest entries (mesh hash,
// material, training settings) are passed through unchanged.

void write_basis(const std::filesystem::path& dir, const ModeBasis& basis, Manifest extra = {});
ModeBasis read_basis(const std::filesystem::path& dir, Manifest* manifest = nullptr);

void write_cubature(const std::filesystem::path& dir, const CubatureModel& model, Manifest extra = {});
CubatureModel read_cubature(const std::filesystem::path& dir, Manifest* manifest = nullptr);

void write_emsl(const std::filesystem::path& dir, const EmslModel& model, Manifest extra = {});
EmslModel read_emsl(const std::filesystem::path& dir, Manifest* manifest = nullptr);

/// The type tag of a model directory. Throws FormatVersionMismatch if absent.
std::string model_type(const std::filesystem::path& dir);

}  // namespace strainrom
