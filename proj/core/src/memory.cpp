// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/memory.hpp>

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace mango
{

MemoryStore MemoryStore::create(const std::filesystem::path& path)
{
    MemoryStore store;
    store._path = path;
    store._out.open(path, std::ios::out | std::ios::trunc);
    if (!store._out)
        throw PersistenceFailure("cannot create memory file: " + path.string());
    return store;
}

MemoryStore MemoryStore::open(const std::filesystem::path& path)
{
    auto store = std::filesystem::exists(path) ? load(path) : MemoryStore {};
    store._path = path;
    store._out.open(path, std::ios::out | std::ios::app);
    if (!store._out)
        throw PersistenceFailure("cannot open memory file: " + path.string());
    return store;
}

MemoryStore MemoryStore::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw PersistenceFailure("cannot read memory file: " + path.string());
    MemoryStore store;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.empty())
            continue;
        try
        {
            store.insert(nlohmann::json::parse(line).get<EpisodeRecord>());
        }
        catch (const std::exception& e)
        {
            throw PersistenceFailure(path.string() + ":" + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return store;
}

void MemoryStore::insert(EpisodeRecord record)
{
    auto& list = _episodes[record.url];
    if (!list.empty() && list.back().iteration >= record.iteration)
        throw std::invalid_argument("episode iterations must increase per URL: " + record.url.str());
    list.push_back(std::move(record));
}

void MemoryStore::store(EpisodeRecord record)
{
    auto const line = nlohmann::json(record).dump();
    insert(std::move(record));
    if (_path)
    {
        _out << line << '\n';
        _out.flush();
        if (!_out)
            throw PersistenceFailure("write failed: " + _path->string());
    }
}

std::vector<EpisodeRecord> MemoryStore::retrieve(const CanonicalUrl& url) const
{
    auto const it = _episodes.find(url);
    return it == _episodes.end() ? std::vector<EpisodeRecord> {} : it->second;
}

std::size_t MemoryStore::size() const
{
    std::size_t n = 0;
    for (auto const& [_, list]: _episodes)
        n += list.size();
    return n;
}

} // namespace mango
