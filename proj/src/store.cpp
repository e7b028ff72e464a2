#include "contractcad/store.hpp"

#include "contractcad/codec.hpp"
#include "contractcad/error.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ccad {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
    throw Error(ErrorKind::Io, path.string() + ": " + what);
}

void check_id(std::string_view id, const char* what) {
    if (!is_valid_id(id)) throw Error(ErrorKind::InvalidArgument, std::string("invalid ") + what + " '" + std::string(id) + "'");
}

} // namespace

RepoLock::RepoLock(const fs::path& root) {
    const fs::path path = root / ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) io_error(path, std::strerror(errno));
    if (::flock(fd_, LOCK_EX) != 0) {
        const int err = errno;
        ::close(fd_);
        io_error(path, std::strerror(err));
    }
}

RepoLock::~RepoLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    std::error_code ec;
    if (!path.parent_path().empty()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) io_error(path.parent_path(), ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) io_error(tmp, "cannot open for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) io_error(tmp, "write failed");
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        io_error(path, "rename failed: " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!fs::exists(path)) throw Error(ErrorKind::NotFound, path.string() + ": no such file");
        io_error(path, "cannot open for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) io_error(path, "read failed");
    return buf.str();
}

Repository::Repository(fs::path root) : root_(std::move(root)) {}

Repository Repository::init(fs::path root) {
    std::error_code ec;
    fs::create_directories(root / "generic", ec);
    if (!ec) fs::create_directories(root / "instances", ec);
    if (ec) io_error(root, ec.message());
    return Repository(std::move(root));
}

bool Repository::exists() const { return fs::is_directory(root_ / "generic"); }

fs::path Repository::manifest_path(std::string_view id) const {
    return root_ / "generic" / std::string(id) / "manifest.json";
}

fs::path Repository::fragment_path(std::string_view doc_id, std::string_view version_id) const {
    return root_ / "generic" / std::string(doc_id) / "fragments" / (std::string(version_id) + ".txt");
}

fs::path Repository::instance_path(std::string_view id) const {
    return root_ / "instances" / (std::string(id) + ".json");
}

namespace {

std::vector<std::string> list_dir(const fs::path& dir, bool directories, std::string_view suffix) {
    std::vector<std::string> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (directories && entry.is_directory()) out.push_back(name);
        else if (!directories && entry.is_regular_file() && name.ends_with(suffix))
            out.push_back(name.substr(0, name.size() - suffix.size()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<std::string> Repository::list_generics() const {
    std::vector<std::string> out;
    for (auto& id : list_dir(root_ / "generic", true, {}))
        if (fs::exists(manifest_path(id))) out.push_back(std::move(id));
    return out;
}

bool Repository::has_generic(std::string_view id) const { return is_valid_id(id) && fs::exists(manifest_path(id)); }

void Repository::save_generic(const GenericDocument& doc) const {
    const auto faults = validate_structure(doc);
    if (!faults.empty())
        throw Error(ErrorKind::StructuralFault, "refusing to save '" + doc.id + "': " + faults.front().subject + ": " +
                                                    faults.front().message);
    std::set<std::string> wanted;
    for (const auto& [unit, list] : doc.versions) {
        for (const auto& v : list) {
            const fs::path path = fragment_path(doc.id, v.id);
            wanted.insert(path.filename().string());
            std::error_code ec;
            if (fs::exists(path, ec)) {
                try {
                    if (read_file(path) == v.source) continue;
                } catch (const Error&) {
                }
            }
            write_file_atomic(path, v.source);
        }
    }
    const fs::path dir = root_ / "generic" / doc.id / "fragments";
    std::error_code ec;
    fs::create_directories(dir, ec);
    for (const auto& name : list_dir(dir, false, ".txt"))
        if (!wanted.contains(name + ".txt")) fs::remove(dir / (name + ".txt"), ec);
    write_file_atomic(manifest_path(doc.id), manifest_text(doc));
}

GenericDocument Repository::load_generic(std::string_view id) const {
    check_id(id, "generic document id");
    const fs::path path = manifest_path(id);
    if (!fs::exists(path)) throw Error(ErrorKind::NotFound, "generic document '" + std::string(id) + "' not found");
    json manifest;
    try {
        manifest = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ManifestParse, path.string() + ": " + e.what());
    }
    GenericDocument doc = generic_from_manifest(manifest, [&](const json& v) {
        const std::string vid = v.at("id").get<std::string>();
        if (!is_valid_id(vid)) throw Error(ErrorKind::ManifestParse, "invalid version id '" + vid + "'");
        const fs::path fragment = fragment_path(id, vid);
        if (!fs::exists(fragment))
            throw Error(ErrorKind::Io, fragment.string() + ": fragment file of version " + vid + " is missing");
        std::string text = read_file(fragment);
        if (sha256_hex(text) != v.at("fragmentSha256").get<std::string>())
            throw Error(ErrorKind::HashMismatch,
                        "fragment of version " + vid + " does not match its recorded hash (" + fragment.string() + ")");
        return text;
    });
    if (doc.id != id)
        throw Error(ErrorKind::ManifestParse, path.string() + ": manifest id '" + doc.id + "' does not match directory");
    const auto faults = validate_structure(doc);
    if (!faults.empty())
        throw Error(ErrorKind::StructuralFault,
                    path.string() + ": " + faults.front().subject + ": " + faults.front().message);
    return doc;
}

std::vector<std::string> Repository::list_instances() const { return list_dir(root_ / "instances", false, ".json"); }

void Repository::write_instance(const DocumentInstance& instance, const std::string& sha, bool finalized) const {
    check_id(instance.id, "instance id");
    write_file_atomic(instance_path(instance.id), instance_json(instance, sha, finalized).dump(2) + "\n");
}

void Repository::save_instance(const DocumentInstance& instance, const GenericDocument& doc) const {
    if (instance.generic_id != doc.id)
        throw Error(ErrorKind::DifferentGeneric, "instance '" + instance.id + "' belongs to '" + instance.generic_id + "'");
    const auto problems = validate_instance(doc, instance);
    if (!problems.empty()) throw Error(ErrorKind::InvalidArgument, "instance '" + instance.id + "': " + problems.front());
    write_instance(instance, generic_digest(doc), false);
}

void Repository::save_instance(const FinalizedInstance& finalized) const {
    write_instance(finalized.instance(), finalized.generic_sha256(), true);
}

LoadedInstance Repository::load_instance(std::string_view id) const {
    check_id(id, "instance id");
    const fs::path path = instance_path(id);
    if (!fs::exists(path)) throw Error(ErrorKind::NotFound, "instance '" + std::string(id) + "' not found");
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ManifestParse, path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("genericId") || !j.at("genericId").is_string())
        throw Error(ErrorKind::ManifestParse, path.string() + ": missing genericId");
    const std::string generic_id = j.at("genericId").get<std::string>();
    if (!has_generic(generic_id))
        throw Error(ErrorKind::NotFound,
                    "instance '" + std::string(id) + "' references absent generic document '" + generic_id + "'");
    const GenericDocument doc = load_generic(generic_id);

    LoadedInstance out;
    out.instance = instance_from_json(j, doc);
    out.finalized = j.value("finalized", false);
    out.generic_sha256 = j.value("genericSha256", std::string{});
    if (out.instance.id != id)
        throw Error(ErrorKind::ManifestParse, path.string() + ": instance id '" + out.instance.id + "' does not match file");
    if (out.generic_sha256 != generic_digest(doc)) {
        const std::string what = "generic document '" + generic_id + "' changed since instance '" + std::string(id) +
                                 "' was saved";
        if (out.finalized) throw Error(ErrorKind::HashMismatch, what);
        out.warnings.push_back(what);
    }
    const auto problems = validate_instance(doc, out.instance);
    if (!problems.empty())
        throw Error(ErrorKind::ManifestParse, path.string() + ": " + problems.front());
    return out;
}

} // namespace ccad
