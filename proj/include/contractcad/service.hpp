#pragma once

#include "contractcad/assembler.hpp"
#include "contractcad/codec.hpp"
#include "contractcad/store.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace ccad::service {

struct Response {
    int status = 200;
    json body;
};

using Headers = std::map<std::string, std::string>;

/// Transport-independent request handler. Sessions live in memory; a
/// repository, when given, supplies generic documents and receives saves.
class Service {
public:
    explicit Service(std::optional<Repository> repo = std::nullopt);

    /// Registers a generic document held only in memory.
    void add_generic(GenericDocument doc);

    /// `path` may carry a query string. Header names are matched
    /// case-insensitively. Never throws.
    Response handle_request(const std::string& method, const std::string& path, const std::string& body,
                            const Headers& headers = {});

private:
    struct Slot {
        std::shared_mutex mutex;
        AssemblySession session;
        std::optional<FinalizedInstance> finalized;
        explicit Slot(AssemblySession s) : session(std::move(s)) {}
    };

    Response route(const std::string& method, const std::string& path, const std::string& body,
                   const Headers& headers);
    std::shared_ptr<Slot> slot(const std::string& id) const;
    std::shared_ptr<const CheckContext> generic(const std::string& id);
    std::vector<std::string> generic_ids() const;

    Response list_generics();
    Response get_generic(const std::string& id);
    Response promote(const std::string& id, const json& body, const Headers& headers);
    Response create_session(const json& body);
    Response get_session(const std::string& id);
    Response edit(const std::string& id, const json& body, const Headers& headers);
    Response preview(const std::string& id, const json& body);
    Response finalize(const std::string& id, const Headers& headers);
    Response undo(const std::string& id, const Headers& headers);
    Response set_mode(const std::string& id, const json& body, const Headers& headers);
    Response save(const std::string& id);
    Response render(const std::string& id, const std::string& query);
    Response report(const std::string& id);
    Response explain(const std::string& id, const std::string& index);
    Response case_check(const json& body);

    std::optional<Repository> repo_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<const CheckContext>> generics_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::uint64_t next_session_ = 1;
};

} // namespace ccad::service
