#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "nnql/kernel.hpp"
#include "nnql/qtable.hpp"

namespace nnql {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  QTable table;
  KernelKind kernel = KernelKind::OneNN;
  std::uint64_t steps = 0;
  std::uint64_t iterations = 0;
};

/// Text file: a magic/version line, one JSON document, and an FNV-1a
/// checksum line over the JSON bytes.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

/// Throws CheckpointError on a version mismatch, a bad checksum, or a
/// truncated or malformed file. Never returns a partial table.
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text);

/// Writes the table and reads it back.
QTable checkpoint_roundtrip(const QTable& table, const std::filesystem::path& path,
                            KernelKind kernel = KernelKind::OneNN);

}  // namespace nnql
