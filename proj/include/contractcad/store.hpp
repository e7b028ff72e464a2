#pragma once

#include "contractcad/assembler.hpp"
#include "contractcad/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ccad {

/// Advisory exclusive lock on a repository (flock on "<root>/.lock").
class RepoLock {
public:
    explicit RepoLock(const std::filesystem::path& root);
    ~RepoLock();
    RepoLock(const RepoLock&) = delete;
    RepoLock& operator=(const RepoLock&) = delete;

private:
    int fd_ = -1;
};

struct LoadedInstance {
    DocumentInstance instance;
    bool finalized = false;
    std::string generic_sha256;
    std::vector<std::string> warnings;
};

/// On-disk layout:
///   generic/<docId>/manifest.json
///   generic/<docId>/fragments/<versionId>.txt
///   instances/<instanceId>.json
class Repository {
public:
    explicit Repository(std::filesystem::path root);

    /// Creates the directory skeleton (idempotent).
    static Repository init(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    bool exists() const;

    std::vector<std::string> list_generics() const;
    bool has_generic(std::string_view id) const;
    /// Refuses structurally invalid documents. Output bytes depend only on
    /// the document value.
    void save_generic(const GenericDocument& doc) const;
    /// Re-hashes every fragment. Throws NotFound, HashMismatch,
    /// UnsupportedSchema, ManifestParse, StructuralFault or Io.
    GenericDocument load_generic(std::string_view id) const;

    std::vector<std::string> list_instances() const;
    void save_instance(const DocumentInstance& instance, const GenericDocument& doc) const;
    void save_instance(const FinalizedInstance& finalized) const;
    /// A finalized instance whose generic changed is an error; a draft only
    /// gets a warning.
    LoadedInstance load_instance(std::string_view id) const;

    std::filesystem::path manifest_path(std::string_view id) const;
    std::filesystem::path fragment_path(std::string_view doc_id, std::string_view version_id) const;
    std::filesystem::path instance_path(std::string_view id) const;

private:
    void write_instance(const DocumentInstance& instance, const std::string& sha, bool finalized) const;

    std::filesystem::path root_;
};

/// Writes `bytes` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

} // namespace ccad
