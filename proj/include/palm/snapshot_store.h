#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "palm/map_composer.h"

namespace palm {

/// File-backed snapshot store: `<root>/<snapshot_id>.json` plus a `CURRENT`
/// file naming the published snapshot. Readers get a shared_ptr to an
/// immutable snapshot; publication swaps that pointer atomically, so a reader
/// sees either the old or the new snapshot in full.
class SnapshotStore {
 public:
  /// Creates `root` if needed; throws std::runtime_error if it is not writable.
  explicit SnapshotStore(std::filesystem::path root);

  std::shared_ptr<const composer::MapSnapshot> current() const {
    return std::atomic_load(&current_);
  }

  /// Writes the snapshot file, then CURRENT, then swaps the in-memory
  /// pointer. Publishers are serialized.
  void publish(composer::MapSnapshot snapshot);

  /// Loads the snapshot named by CURRENT, if any, and makes it current.
  std::shared_ptr<const composer::MapSnapshot> load_current();

  std::optional<std::string> current_id_on_disk() const;
  const std::filesystem::path& root() const { return root_; }

  /// Serializes ingestion. Hold it across parse + compose + publish.
  std::mutex& writer_mutex() { return writer_; }

 private:
  std::filesystem::path root_;
  std::shared_ptr<const composer::MapSnapshot> current_;
  mutable std::mutex writer_;
  std::mutex publish_;
};

}  // namespace palm
