#include "contractcad/service.hpp"

#include "contractcad/cases.hpp"
#include "contractcad/error.hpp"

#include <algorithm>
#include <cctype>

namespace ccad::service {

namespace {

struct HttpError {
    int status;
    std::string message;
};

std::vector<std::string> segments(std::string_view path) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        const std::size_t j = path.find('/', i);
        if (i < path.size()) out.emplace_back(path.substr(i, j == std::string_view::npos ? j : j - i));
        if (j == std::string_view::npos) break;
        i = j;
    }
    return out;
}

std::string query_param(const std::string& query, const std::string& key) {
    std::size_t i = 0;
    while (i < query.size()) {
        std::size_t amp = query.find('&', i);
        if (amp == std::string::npos) amp = query.size();
        const std::string pair = query.substr(i, amp - i);
        const std::size_t eq = pair.find('=');
        if (pair.substr(0, eq) == key) return eq == std::string::npos ? "" : pair.substr(eq + 1);
        i = amp + 1;
    }
    return {};
}

std::optional<std::string> header(const Headers& headers, std::string_view name) {
    for (const auto& [k, v] : headers) {
        if (k.size() != name.size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < k.size() && same; ++i)
            same = std::tolower(static_cast<unsigned char>(k[i])) == std::tolower(static_cast<unsigned char>(name[i]));
        if (same) return v;
    }
    return std::nullopt;
}

void check_revision(const Headers& headers, std::uint64_t current) {
    const auto expected = header(headers, "If-Revision");
    if (!expected) return;
    std::uint64_t value = 0;
    try {
        std::size_t used = 0;
        value = std::stoull(*expected, &used);
        if (used != expected->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw HttpError{400, "If-Revision must be a revision number"};
    }
    if (value != current)
        throw HttpError{409, "stale revision " + *expected + "; the session is at revision " + std::to_string(current)};
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw HttpError{400, "request body must be a JSON object"};
        return j;
    } catch (const json::parse_error& e) {
        throw HttpError{400, std::string("malformed JSON: ") + e.what()};
    }
}

std::string required_string(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) throw HttpError{400, std::string("missing string field '") + key + "'"};
    return it->get<std::string>();
}

int status_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Finalized: return 409;
    case ErrorKind::Io:
    case ErrorKind::HashMismatch:
    case ErrorKind::ManifestParse:
    case ErrorKind::UnsupportedSchema: return 500;
    default: return 400;
    }
}

json blocked_json(const Blocked& b) {
    json j{{"blocked", true}, {"reason", b.reason}};
    if (b.contradiction) {
        j["constraintId"] = b.contradiction->constraint_id;
        j["chain"] = chain_json(b.contradiction->chain);
    }
    return j;
}

json applied_json(const Applied& a) {
    return {{"blocked", false}, {"sideEffects", a.side_effects}, {"report", report_json(a.report)}};
}

} // namespace

Service::Service(std::optional<Repository> repo) : repo_(std::move(repo)) {}

void Service::add_generic(GenericDocument doc) {
    const auto faults = validate_structure(doc);
    if (!faults.empty()) throw Error(ErrorKind::StructuralFault, "generic document " + doc.id + " is not valid");
    std::lock_guard lock(registry_mutex_);
    const std::string id = doc.id;
    generics_[id] = CheckContext::build(std::move(doc));
}

Response Service::handle_request(const std::string& method, const std::string& path, const std::string& body,
                                 const Headers& headers) {
    try {
        return route(method, path, body, headers);
    } catch (const HttpError& e) {
        return {e.status, {{"error", e.message}}};
    } catch (const Error& e) {
        return {status_for(e.kind()), {{"error", e.what()}, {"kind", to_string(e.kind())}}};
    } catch (const json::exception& e) {
        return {400, {{"error", e.what()}}};
    } catch (const std::exception& e) {
        return {500, {{"error", e.what()}}};
    }
}

Response Service::route(const std::string& method, const std::string& full_path, const std::string& body,
                        const Headers& headers) {
    const std::size_t q = full_path.find('?');
    const std::string path = full_path.substr(0, q);
    const std::string query = q == std::string::npos ? "" : full_path.substr(q + 1);
    const auto seg = segments(path);
    const bool get = method == "GET", post = method == "POST";

    if (seg.size() == 1 && seg[0] == "generics" && get) return list_generics();
    if (seg.size() == 2 && seg[0] == "generics" && get) return get_generic(seg[1]);
    if (seg.size() == 3 && seg[0] == "generics" && seg[2] == "versions" && post)
        return promote(seg[1], parse_body(body), headers);
    if (seg.size() == 1 && seg[0] == "sessions" && post) return create_session(parse_body(body));
    if (seg.size() == 1 && seg[0] == "case-checks" && post) return case_check(parse_body(body));
    if (!seg.empty() && seg[0] == "sessions" && seg.size() >= 2) {
        const std::string& id = seg[1];
        if (seg.size() == 2 && get) return get_session(id);
        if (seg.size() == 3) {
            const std::string& what = seg[2];
            if (post && what == "edits") return edit(id, parse_body(body), headers);
            if (post && what == "preview") return preview(id, parse_body(body));
            if (post && what == "finalize") return finalize(id, headers);
            if (post && what == "undo") return undo(id, headers);
            if (post && what == "mode") return set_mode(id, parse_body(body), headers);
            if (post && what == "save") return save(id);
            if (get && what == "render") return render(id, query);
            if (get && what == "report") return report(id);
        }
        if (seg.size() == 5 && get && seg[2] == "violations" && seg[4] == "explanation") return explain(id, seg[3]);
    }
    throw HttpError{404, "no route for " + method + " " + path};
}

std::shared_ptr<Service::Slot> Service::slot(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw HttpError{404, "unknown session '" + id + "'"};
    return it->second;
}

std::shared_ptr<const CheckContext> Service::generic(const std::string& id) {
    {
        std::lock_guard lock(registry_mutex_);
        if (auto it = generics_.find(id); it != generics_.end()) return it->second;
    }
    if (!repo_) throw HttpError{404, "unknown generic document '" + id + "'"};
    auto ctx = CheckContext::build(repo_->load_generic(id));
    std::lock_guard lock(registry_mutex_);
    return generics_.emplace(id, std::move(ctx)).first->second;
}

std::vector<std::string> Service::generic_ids() const {
    std::set<std::string> ids;
    {
        std::lock_guard lock(registry_mutex_);
        for (const auto& [id, ctx] : generics_) ids.insert(id);
    }
    if (repo_)
        for (auto& id : repo_->list_generics()) ids.insert(std::move(id));
    return {ids.begin(), ids.end()};
}

Response Service::list_generics() {
    json list = json::array();
    for (const auto& id : generic_ids()) {
        const auto ctx = generic(id);
        list.push_back({{"id", id}, {"title", ctx->doc().title}, {"sha256", generic_digest(ctx->doc())}});
    }
    return {200, {{"generics", list}, {"revision", 0}}};
}

Response Service::get_generic(const std::string& id) {
    const auto ctx = generic(id);
    json sources = json::object();
    for (const auto& [unit, versions] : ctx->doc().versions)
        for (const auto& v : versions) sources[v.id] = v.source;
    json derived = json::array();
    for (const auto& c : ctx->constraints())
        if (c.origin == Origin::DerivedTextual) derived.push_back(constraint_json(c));
    return {200,
            {{"manifest", manifest_json(ctx->doc())},
             {"sources", sources},
             {"derivedConstraints", derived},
             {"sha256", generic_digest(ctx->doc())},
             {"revision", 0}}};
}

Response Service::promote(const std::string& id, const json& body, const Headers& headers) {
    const auto s = slot(required_string(body, "session"));
    std::unique_lock lock(s->mutex);
    if (s->session.doc().id != id) throw HttpError{400, "session is not drafting generic document '" + id + "'"};
    if (s->finalized) throw Error(ErrorKind::Finalized, "the session is finalized");
    check_revision(headers, s->session.revision());
    const std::string provenance = body.contains("provenance") ? body.at("provenance").get<std::string>() : "drafting";
    const std::string created = body.contains("createdAt") ? body.at("createdAt").get<std::string>() : "";
    const std::string rationale = body.contains("rationale") ? body.at("rationale").get<std::string>() : "";
    auto [version, outcome] = s->session.promote_version(required_string(body, "unit"), required_string(body, "text"),
                                                         rationale, provenance, created);
    json out;
    int status = 200;
    if (const auto* b = std::get_if<Blocked>(&outcome)) {
        out = blocked_json(*b);
        out["report"] = report_json(s->session.report());
    } else {
        out = applied_json(std::get<Applied>(outcome));
    }
    out["versionId"] = version;
    out["revision"] = s->session.revision();
    return {status, out};
}

Response Service::create_session(const json& body) {
    std::shared_ptr<Slot> created;
    if (body.contains("instance")) {
        if (!repo_) throw HttpError{400, "no repository to load instances from"};
        const auto loaded = repo_->load_instance(required_string(body, "instance"));
        auto ctx = generic(loaded.instance.generic_id);
        if (generic_digest(ctx->doc()) != loaded.generic_sha256)
            ctx = CheckContext::build(repo_->load_generic(loaded.instance.generic_id));
        created = std::make_shared<Slot>(AssemblySession::resume(ctx, loaded.instance));
        if (loaded.finalized) created->finalized.emplace(ctx, loaded.instance, loaded.generic_sha256);
    } else {
        const auto ctx = generic(required_string(body, "generic"));
        Mode mode = Mode::Notify;
        if (body.contains("mode")) {
            auto m = mode_from_string(body.at("mode").get<std::string>());
            if (!m) throw HttpError{400, "mode must be notify or enforce"};
            mode = *m;
        }
        std::string instance_id = body.contains("instanceId") ? body.at("instanceId").get<std::string>() : "draft";
        if (!is_valid_id(instance_id)) throw HttpError{400, "bad instance id '" + instance_id + "'"};
        created = std::make_shared<Slot>(
            AssemblySession::resume(ctx, DocumentInstance::create(ctx->doc(), std::move(instance_id), mode)));
    }
    std::string id;
    {
        std::lock_guard lock(registry_mutex_);
        id = "s" + std::to_string(next_session_++);
        sessions_.emplace(id, created);
    }
    Response r = get_session(id);
    r.status = 201;
    return r;
}

Response Service::get_session(const std::string& id) {
    const auto s = slot(id);
    std::shared_lock lock(s->mutex);
    const auto& session = s->session;
    return {200,
            {{"session", id},
             {"genericId", session.doc().id},
             {"mode", to_string(session.mode())},
             {"finalized", s->finalized.has_value()},
             {"instance", instance_json(session.instance(), generic_digest(session.doc()), s->finalized.has_value())},
             {"report", report_json(session.report())},
             {"undoDepth", session.undo_log().size()},
             {"revision", session.revision()}}};
}

Response Service::edit(const std::string& id, const json& body, const Headers& headers) {
    const auto s = slot(id);
    std::unique_lock lock(s->mutex);
    if (s->finalized) throw Error(ErrorKind::Finalized, "the session is finalized");
    check_revision(headers, s->session.revision());
    const Delta delta = delta_from_json(body, s->session.doc());
    const auto outcome = s->session.apply_edit(delta);
    if (const auto* b = std::get_if<Blocked>(&outcome)) {
        json out = blocked_json(*b);
        out["revision"] = s->session.revision();
        return {422, out};
    }
    json out = applied_json(std::get<Applied>(outcome));
    out["revision"] = s->session.revision();
    return {200, out};
}

Response Service::preview(const std::string& id, const json& body) {
    const auto s = slot(id);
    std::shared_lock lock(s->mutex);
    const Delta delta = delta_from_json(body, s->session.doc());
    const auto outcome = s->session.preview_edit(delta);
    json out = std::holds_alternative<Blocked>(outcome) ? blocked_json(std::get<Blocked>(outcome))
                                                         : applied_json(std::get<Applied>(outcome));
    out["revision"] = s->session.revision();
    return {200, out};
}

Response Service::finalize(const std::string& id, const Headers& headers) {
    const auto s = slot(id);
    std::unique_lock lock(s->mutex);
    check_revision(headers, s->session.revision());
    if (s->finalized) return {200, {{"finalized", true}, {"blockers", json::array()}, {"revision", s->session.revision()}}};
    auto outcome = s->session.finalize();
    json out{{"finalized", outcome.finalized.has_value()},
             {"blockers", outcome.blockers},
             {"report", report_json(outcome.report)},
             {"revision", s->session.revision()}};
    if (!outcome.finalized) return {422, out};
    s->finalized = std::move(outcome.finalized);
    out["sha256"] = s->finalized->generic_sha256();
    return {200, out};
}

Response Service::undo(const std::string& id, const Headers& headers) {
    const auto s = slot(id);
    std::unique_lock lock(s->mutex);
    if (s->finalized) throw Error(ErrorKind::Finalized, "the session is finalized");
    check_revision(headers, s->session.revision());
    if (s->session.undo_log().empty()) throw HttpError{409, "nothing to undo"};
    s->session.undo();
    return {200, {{"report", report_json(s->session.report())}, {"revision", s->session.revision()}}};
}

Response Service::set_mode(const std::string& id, const json& body, const Headers& headers) {
    const auto s = slot(id);
    std::unique_lock lock(s->mutex);
    if (s->finalized) throw Error(ErrorKind::Finalized, "the session is finalized");
    check_revision(headers, s->session.revision());
    const auto mode = mode_from_string(required_string(body, "mode"));
    if (!mode) throw HttpError{400, "mode must be notify or enforce"};
    s->session.set_mode(*mode);
    return {200, {{"mode", to_string(*mode)}, {"revision", s->session.revision()}}};
}

Response Service::save(const std::string& id) {
    if (!repo_) throw HttpError{400, "the service has no repository"};
    const auto s = slot(id);
    std::shared_lock lock(s->mutex);
    RepoLock repo_lock(repo_->root());
    const auto& doc = s->session.doc();
    repo_->save_generic(doc);
    if (s->finalized)
        repo_->save_instance(*s->finalized);
    else
        repo_->save_instance(s->session.instance(), doc);
    {
        std::lock_guard reg(registry_mutex_);
        generics_[doc.id] = s->session.context_ptr();
    }
    return {200, {{"saved", s->session.instance().id}, {"revision", s->session.revision()}}};
}

Response Service::render(const std::string& id, const std::string& query) {
    const auto s = slot(id);
    std::shared_lock lock(s->mutex);
    RenderOptions options;
    if (auto sep = query_param(query, "separator"); !sep.empty()) options.scheme.separator = sep;
    const RenderedDocument doc =
        s->finalized ? ccad::render(*s->finalized, options) : ccad::render(s->session, options);
    json spans = json::array();
    for (const auto& sp : doc.spans) spans.push_back({{"unit", sp.unit_id}, {"begin", sp.begin}, {"end", sp.end}});
    return {200, {{"text", doc.text}, {"spans", spans}, {"draft", !s->finalized}, {"revision", s->session.revision()}}};
}

Response Service::report(const std::string& id) {
    const auto s = slot(id);
    std::shared_lock lock(s->mutex);
    return {200, {{"report", report_json(s->session.report())}, {"revision", s->session.revision()}}};
}

Response Service::explain(const std::string& id, const std::string& index) {
    const auto s = slot(id);
    std::shared_lock lock(s->mutex);
    std::size_t n = 0;
    try {
        std::size_t used = 0;
        n = std::stoul(index, &used);
        if (used != index.size()) throw std::invalid_argument("index");
    } catch (const std::exception&) {
        throw HttpError{400, "violation index must be a number"};
    }
    if (n >= s->session.report().violations.size()) throw HttpError{404, "no violation " + index};
    return {200,
            {{"explanation", ccad::explain(s->session.context(), s->session.instance(), s->session.report(), n)},
             {"revision", s->session.revision()}}};
}

Response Service::case_check(const json& body) {
    const CaseSet set = parse_case_rules(required_string(body, "rules"));
    const auto completeness = check_completeness(set);
    const auto consistency = check_consistency(set);
    json uncovered = json::array(), conflicts = json::array();
    for (const auto& c : completeness.uncovered) uncovered.push_back(describe_case(set.factors, c));
    for (const auto& c : consistency.conflicts)
        conflicts.push_back({{"case", describe_case(set.factors, c.c)}, {"rules", c.rules}});
    return {200,
            {{"universe", completeness.universe},
             {"uncoveredTotal", completeness.uncovered_total},
             {"uncovered", uncovered},
             {"conflictTotal", consistency.conflict_total},
             {"conflicts", conflicts},
             {"revision", 0}}};
}

} // namespace ccad::service
