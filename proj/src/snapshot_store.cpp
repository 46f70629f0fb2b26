#include "palm/snapshot_store.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace palm {

namespace fs = std::filesystem;

namespace {

// Write to a sibling temp file and rename over the target.
void write_atomically(const fs::path& target, const std::string& content) {
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SnapshotStore::SnapshotStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  if (::access(root_.c_str(), W_OK) != 0)
    throw std::runtime_error("store path is not writable: " + root_.string());
}

void SnapshotStore::publish(composer::MapSnapshot snapshot) {
  std::lock_guard lock(publish_);
  const std::string id = snapshot.snapshot_id;
  write_atomically(root_ / (id + ".json"), composer::snapshot_to_json(snapshot));
  write_atomically(root_ / "CURRENT", id + "\n");
  std::shared_ptr<const composer::MapSnapshot> next =
      std::make_shared<const composer::MapSnapshot>(std::move(snapshot));
  std::atomic_store(&current_, std::move(next));
}

std::optional<std::string> SnapshotStore::current_id_on_disk() const {
  const fs::path p = root_ / "CURRENT";
  if (!fs::exists(p)) return std::nullopt;
  std::string id = read_file(p);
  while (!id.empty() && (id.back() == '\n' || id.back() == '\r')) id.pop_back();
  if (id.empty()) return std::nullopt;
  return id;
}

std::shared_ptr<const composer::MapSnapshot> SnapshotStore::load_current() {
  auto id = current_id_on_disk();
  if (!id) return nullptr;
  auto snap = std::make_shared<const composer::MapSnapshot>(
      composer::snapshot_from_json(read_file(root_ / (*id + ".json"))));
  std::atomic_store(&current_, std::shared_ptr<const composer::MapSnapshot>(snap));
  return snap;
}

}  // namespace palm
