// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/agent_types.hpp>
#include <mango/url.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <vector>

namespace mango
{

/// Append-only, per-URL episodic memory. With a backing file every record is
/// written as one JSON line and flushed before store() returns.
class MemoryStore
{
  public:
    /// In-memory only.
    MemoryStore() = default;

    /// Starts a fresh store persisted to `path` (truncates any existing file).
    static MemoryStore create(const std::filesystem::path& path);

    /// Reloads a persisted store and keeps appending to it.
    static MemoryStore open(const std::filesystem::path& path);

    /// Reads a JSON-lines file without attaching it for writing.
    static MemoryStore load(const std::filesystem::path& path);

    /// Appends the record. Iterations must strictly increase per URL
    /// (std::invalid_argument otherwise). Throws PersistenceFailure.
    void store(EpisodeRecord record);

    /// All episodes for `url`, oldest first; empty when unseen.
    [[nodiscard]] std::vector<EpisodeRecord> retrieve(const CanonicalUrl& url) const;

    [[nodiscard]] const std::map<CanonicalUrl, std::vector<EpisodeRecord>>& episodes() const noexcept { return _episodes; }
    [[nodiscard]] std::size_t size() const;

    bool operator==(const MemoryStore& other) const { return _episodes == other._episodes; }

  private:
    void insert(EpisodeRecord record);

    std::map<CanonicalUrl, std::vector<EpisodeRecord>> _episodes;
    std::optional<std::filesystem::path> _path;
    std::ofstream _out;
};

} // namespace mango
