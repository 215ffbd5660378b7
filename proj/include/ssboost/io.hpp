#pragma once

#include "ssboost/core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ssb {

inline constexpr char kEegbMagic[4] = {'E', 'E', 'G', 'B'};
inline constexpr std::uint32_t kEegbVersion = 1;

/// EEGB layout (all little-endian):
///   "EEGB" | u32 version | u32 n_trials | u32 n_samples | u32 n_channels |
///   f32 sample_rate | n_channels x (u32 byte length, UTF-8 name) |
///   n_trials x i8 label | f32 samples, trial-major, then time, then channel.
std::vector<std::uint8_t> encode_eegb(const SessionDataset& d);
SessionDataset decode_eegb(const std::vector<std::uint8_t>& bytes, int session_index = 0);

std::size_t eegb_header_bytes(const SessionDataset& d);

void write_eegb(const SessionDataset& d, const std::filesystem::path& path);
/// The format carries no session index; the caller supplies it.
SessionDataset read_eegb(const std::filesystem::path& path, int session_index = 0);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a sibling temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ssb
