#include "contractcad/cli.hpp"

#include "contractcad/assembler.hpp"
#include "contractcad/cases.hpp"
#include "contractcad/codec.hpp"
#include "contractcad/error.hpp"
#include "contractcad/store.hpp"

#include <CLI11.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace ccad::cli {

namespace {

struct Args {
    std::string repo = "contracts";
    std::string format = "text";

    std::string doc, title, instance, against, unit, parent, kind = "section", heading, id, tags;
    std::optional<std::size_t> position;
    std::string text, file, rationale, provenance = "cli", derived_from, created_at;
    std::string antecedent, consequent, a, b, group, expr, message;
    std::string name, type, values, description;
    std::string mode = "notify", version, param, value, out, separator = "-", rules;
    bool none = false, unset = false;
};

class Runner {
public:
    Runner(const Args& args, std::ostream& out, std::ostream& err) : a_(args), out_(out), err_(err) {}

    int init();
    int add_unit();
    int add_version();
    int add_constraint();
    int declare_param();
    int new_instance();
    int edit(Delta delta);
    int enforce_include();
    int check();
    int finalize();
    int render();
    int diff();
    int promote();
    int satisfiable();
    int check_cases();

private:
    bool json_out() const { return a_.format == "json"; }
    Repository repo() const {
        Repository r(a_.repo);
        if (!r.exists()) throw Error(ErrorKind::NotFound, "no repository at " + a_.repo + " (run init)");
        return r;
    }

    struct Loaded {
        std::shared_ptr<const CheckContext> ctx;
        LoadedInstance li;
    };
    Loaded load(const Repository& r, const std::string& id) const;
    Loaded load_draft(const Repository& r, const std::string& id) const;
    std::string source_text() const;
    void print_report(const CheckReport& report) const;
    int edit_result(const AssemblySession& session, const EditOutcome& outcome) const;
    int mutate_generic(const std::function<void(GenericDocument&)>& fn);

    const Args& a_;
    std::ostream& out_;
    std::ostream& err_;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

Atom parse_atom(const std::string& text) {
    if (auto atom = Atom::parse(text)) return *atom;
    // bare ids name units
    if (is_valid_id(text)) return Atom::unit(text);
    throw Error(ErrorKind::InvalidArgument, "bad atom '" + text + "' (expected unit:<id> or version:<id>)");
}

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

Runner::Loaded Runner::load(const Repository& r, const std::string& id) const {
    Loaded l;
    l.li = r.load_instance(id);
    for (const auto& w : l.li.warnings) err_ << "warning: " << w << "\n";
    l.ctx = CheckContext::build(r.load_generic(l.li.instance.generic_id));
    return l;
}

Runner::Loaded Runner::load_draft(const Repository& r, const std::string& id) const {
    Loaded l = load(r, id);
    if (l.li.finalized) throw Error(ErrorKind::Finalized, "instance " + id + " is finalized and cannot be edited");
    return l;
}

std::string Runner::source_text() const {
    if (!a_.file.empty()) return read_file(a_.file);
    return a_.text;
}

void Runner::print_report(const CheckReport& report) const {
    if (report.clean()) {
        out_ << "no pathological features\n";
        return;
    }
    for (const auto& v : report.violations) {
        out_ << "violation " << v.constraint_id;
        if (!v.params.empty()) {
            out_ << " [";
            for (std::size_t i = 0; i < v.params.size(); ++i) out_ << (i ? ", " : "") << v.params[i];
            out_ << "]";
        }
        out_ << ": " << v.message << "\n";
    }
    for (const auto& g : report.gaps) out_ << "gap " << to_string(g.kind) << " " << g.subject << ": " << g.message << "\n";
}

int Runner::edit_result(const AssemblySession& session, const EditOutcome& outcome) const {
    if (const auto* blocked = std::get_if<Blocked>(&outcome)) {
        if (json_out()) {
            json j{{"applied", false}, {"reason", blocked->reason}, {"revision", session.revision()}};
            if (blocked->contradiction) {
                j["constraintId"] = blocked->contradiction->constraint_id;
                j["chain"] = chain_json(blocked->contradiction->chain);
            }
            out_ << j.dump(2) << "\n";
        } else {
            out_ << "blocked: " << blocked->reason << "\n";
        }
        return kFindings;
    }
    const auto& applied = std::get<Applied>(outcome);
    const auto& report = applied.report;
    if (json_out()) {
        out_ << json{{"applied", true},
                     {"revision", session.revision()},
                     {"sideEffects", applied.side_effects},
                     {"report", report_json(report)}}
                    .dump(2)
             << "\n";
    } else {
        out_ << "revision " << session.revision() << ": " << report.violations.size() << " violation(s), "
             << report.gaps.size() << " gap(s)\n";
        if (!applied.side_effects.empty()) out_ << "also included: " << join(applied.side_effects) << "\n";
    }
    return report.violations.empty() ? kOk : kFindings;
}

int Runner::mutate_generic(const std::function<void(GenericDocument&)>& fn) {
    const Repository r = repo();
    RepoLock lock(r.root());
    GenericDocument doc = r.load_generic(a_.doc);
    fn(doc);
    r.save_generic(doc);
    return kOk;
}

int Runner::init() {
    const Repository r = Repository::init(a_.repo);
    if (a_.doc.empty()) {
        out_ << "initialized " << a_.repo << "\n";
        return kOk;
    }
    RepoLock lock(r.root());
    if (r.has_generic(a_.doc)) throw Error(ErrorKind::DuplicateId, "generic document " + a_.doc + " already exists");
    r.save_generic(GenericDocument::create(a_.doc, a_.title.empty() ? a_.doc : a_.title));
    out_ << "created generic document " << a_.doc << "\n";
    return kOk;
}

int Runner::add_unit() {
    const auto kind = unit_kind_from_string(a_.kind);
    if (!kind) throw Error(ErrorKind::InvalidArgument, "unknown unit kind '" + a_.kind + "'");
    std::set<RoleTag> roles;
    for (const auto& t : split_list(a_.tags)) {
        auto tag = role_tag_from_string(t);
        if (!tag) throw Error(ErrorKind::InvalidArgument, "unknown role tag '" + t + "'");
        roles.insert(*tag);
    }
    std::string id;
    mutate_generic([&](GenericDocument& doc) {
        id = a_.position ? ccad::add_unit(doc, a_.parent, *kind, a_.heading, *a_.position, a_.id, roles)
                         : ccad::append_unit(doc, a_.parent, *kind, a_.heading, a_.id, roles);
    });
    out_ << id << "\n";
    return kOk;
}

int Runner::add_version() {
    VersionSpec spec{source_text(), a_.rationale, a_.provenance, {}, a_.id, a_.created_at};
    if (!a_.derived_from.empty()) spec.derived_from = a_.derived_from;
    std::string id;
    mutate_generic([&](GenericDocument& doc) { id = ccad::add_version(doc, a_.unit, spec); });
    out_ << id << "\n";
    return kOk;
}

int Runner::add_constraint() {
    const auto kind = constraint_kind_from_string(a_.kind);
    if (!kind) throw Error(ErrorKind::InvalidArgument, "unknown constraint kind '" + a_.kind + "'");
    Constraint c;
    switch (*kind) {
    case ConstraintKind::Requires:
        c = Constraint::requires_rule(a_.id, parse_atom(a_.antecedent), a_.consequent, a_.message);
        break;
    case ConstraintKind::Excludes:
        c = Constraint::excludes(a_.id, parse_atom(a_.a), parse_atom(a_.b), a_.message);
        break;
    case ConstraintKind::ExactlyOne:
        c = Constraint::exactly_one(a_.id, split_list(a_.group), a_.message);
        break;
    case ConstraintKind::ParamRule:
        c = Constraint::param_rule(a_.id, ParamExpr::parse(a_.expr), a_.message);
        break;
    }
    std::string id;
    mutate_generic([&](GenericDocument& doc) { id = ccad::add_constraint(doc, c); });
    out_ << id << "\n";
    return kOk;
}

int Runner::declare_param() {
    const auto kind = param_kind_from_string(a_.type);
    if (!kind) throw Error(ErrorKind::InvalidArgument, "unknown parameter type '" + a_.type + "'");
    ParameterDecl decl{a_.name, {*kind, split_list(a_.values)}, a_.description};
    mutate_generic([&](GenericDocument& doc) { declare_parameter(doc, decl); });
    out_ << a_.name << "\n";
    return kOk;
}

int Runner::new_instance() {
    const Repository r = repo();
    RepoLock lock(r.root());
    const auto mode = mode_from_string(a_.mode);
    if (!mode) throw Error(ErrorKind::InvalidArgument, "unknown mode '" + a_.mode + "'");
    if (!is_valid_id(a_.instance)) throw Error(ErrorKind::InvalidArgument, "bad instance id '" + a_.instance + "'");
    const auto existing = r.list_instances();
    if (std::find(existing.begin(), existing.end(), a_.instance) != existing.end())
        throw Error(ErrorKind::DuplicateId, "instance " + a_.instance + " already exists");
    const GenericDocument doc = r.load_generic(a_.doc);
    const auto session = AssemblySession::create(doc, *mode, a_.instance);
    r.save_instance(session.instance(), doc);
    out_ << a_.instance << "\n";
    return kOk;
}

int Runner::edit(Delta delta) {
    const Repository r = repo();
    RepoLock lock(r.root());
    const Loaded l = load_draft(r, a_.instance);
    if (delta.op == Delta::Op::Bind) {
        const auto* decl = l.ctx->doc().find_parameter(delta.target);
        if (!decl) throw Error(ErrorKind::UnknownId, "unknown parameter '" + delta.target + "'");
        auto value = parse_value(decl->type, a_.value);
        if (!value)
            throw Error(ErrorKind::TypeMismatch,
                        "'" + a_.value + "' is not a valid " + std::string(to_string(decl->type.kind)));
        delta.value = std::move(*value);
    }
    auto session = AssemblySession::resume(l.ctx, l.li.instance);
    const auto outcome = session.apply_edit(delta);
    if (std::holds_alternative<Applied>(outcome)) r.save_instance(session.instance(), session.doc());
    return edit_result(session, outcome);
}

int Runner::enforce_include() {
    const Repository r = repo();
    RepoLock lock(r.root());
    const Loaded l = load_draft(r, a_.instance);
    const Mode original = l.li.instance.mode;
    auto session = AssemblySession::resume(l.ctx, l.li.instance);
    session.set_mode(Mode::Enforce);
    const auto outcome = session.apply_edit(Delta::include(a_.unit));
    session.set_mode(original);
    if (std::holds_alternative<Applied>(outcome)) r.save_instance(session.instance(), session.doc());
    return edit_result(session, outcome);
}

int Runner::check() {
    const Repository r = repo();
    const Loaded l = load(r, a_.instance);
    const CheckReport report = check_full(*l.ctx, l.li.instance);
    if (json_out())
        out_ << report_json(report).dump(2) << "\n";
    else
        print_report(report);
    return report.clean() ? kOk : kFindings;
}

int Runner::finalize() {
    const Repository r = repo();
    RepoLock lock(r.root());
    const Loaded l = load(r, a_.instance);
    if (l.li.finalized) {
        out_ << "instance " << a_.instance << " is already finalized\n";
        return kOk;
    }
    const auto session = AssemblySession::resume(l.ctx, l.li.instance);
    const auto outcome = session.finalize();
    if (json_out()) {
        out_ << json{{"finalized", outcome.finalized.has_value()},
                     {"blockers", outcome.blockers},
                     {"revision", session.revision()}}
                    .dump(2)
             << "\n";
    } else if (outcome.finalized) {
        out_ << "finalized " << a_.instance << "\n";
    } else {
        for (const auto& b : outcome.blockers) out_ << "blocker " << b << "\n";
    }
    if (!outcome.finalized) return kFindings;
    r.save_instance(*outcome.finalized);
    return kOk;
}

int Runner::render() {
    const Repository r = repo();
    const Loaded l = load(r, a_.instance);
    const RenderOptions options{{a_.separator}};
    RenderedDocument doc;
    if (l.li.finalized)
        doc = ccad::render(FinalizedInstance(l.ctx, l.li.instance, l.li.generic_sha256), options);
    else
        doc = ccad::render(*l.ctx, l.li.instance, true, options);
    if (a_.out.empty())
        out_ << doc.text;
    else
        write_file_atomic(a_.out, doc.text);
    return kOk;
}

int Runner::diff() {
    const Repository r = repo();
    const Loaded x = load(r, a_.instance);
    const Loaded y = load(r, a_.against);
    const auto entries = ccad::diff(x.li.instance, y.li.instance);
    if (json_out()) {
        json j = json::array();
        for (const auto& e : entries) j.push_back(describe(e));
        out_ << j.dump(2) << "\n";
    } else if (entries.empty()) {
        out_ << "no differences\n";
    } else {
        for (const auto& e : entries) out_ << describe(e) << "\n";
    }
    return kOk;
}

int Runner::promote() {
    const Repository r = repo();
    RepoLock lock(r.root());
    const Loaded l = load_draft(r, a_.instance);
    auto session = AssemblySession::resume(l.ctx, l.li.instance);
    auto [id, outcome] = session.promote_version(a_.unit, source_text(), a_.rationale, a_.provenance, a_.created_at);
    r.save_generic(session.doc());
    r.save_instance(session.instance(), session.doc());
    if (!json_out()) out_ << "created " << id << "\n";
    return edit_result(session, outcome);
}

int Runner::satisfiable() {
    const Repository r = repo();
    const auto ctx = CheckContext::build(r.load_generic(a_.doc));
    const SatResult result = ccad::satisfiable(*ctx);
    static const char* names[] = {"satisfiable", "unsatisfiable", "too large"};
    const char* status = names[static_cast<int>(result.status)];
    if (json_out()) {
        json j{{"status", status}};
        if (result.witness) {
            j["included"] = result.witness->included;
            j["selections"] = result.witness->selections;
        }
        out_ << j.dump(2) << "\n";
    } else {
        out_ << status << "\n";
        if (result.witness) {
            for (const auto& u : ctx->preorder()) {
                if (!result.witness->includes(u) || u == ctx->root()) continue;
                auto sel = result.witness->selections.find(u);
                out_ << "  include " << u;
                if (sel != result.witness->selections.end()) out_ << " select " << sel->second;
                out_ << "\n";
            }
        }
    }
    switch (result.status) {
    case SatResult::Status::Satisfiable: return kOk;
    case SatResult::Status::Unsatisfiable: return kFindings;
    case SatResult::Status::TooLarge: return kFailure;
    }
    return kFailure;
}

int Runner::check_cases() {
    const CaseSet set = parse_case_rules(read_file(a_.rules));
    const auto completeness = check_completeness(set);
    const auto consistency = check_consistency(set);
    if (json_out()) {
        json j{{"universe", completeness.universe},
               {"uncoveredTotal", completeness.uncovered_total},
               {"conflictTotal", consistency.conflict_total},
               {"uncovered", json::array()},
               {"conflicts", json::array()}};
        for (const auto& c : completeness.uncovered) j["uncovered"].push_back(describe_case(set.factors, c));
        for (const auto& c : consistency.conflicts)
            j["conflicts"].push_back({{"case", describe_case(set.factors, c.c)}, {"rules", c.rules}});
        out_ << j.dump(2) << "\n";
    } else {
        out_ << "cases: " << completeness.universe << "\n";
        out_ << "uncovered: " << completeness.uncovered_total << "\n";
        for (const auto& c : completeness.uncovered) out_ << "  " << describe_case(set.factors, c) << "\n";
        if (completeness.uncovered_total > completeness.uncovered.size())
            out_ << "  ... " << completeness.uncovered_total - completeness.uncovered.size() << " more\n";
        out_ << "conflicts: " << consistency.conflict_total << "\n";
        for (const auto& c : consistency.conflicts) {
            out_ << "  " << describe_case(set.factors, c.c) << ":";
            for (std::size_t i = 0; i < c.rules.size(); ++i) out_ << (i ? ", " : " ") << c.rules[i];
            out_ << "\n";
        }
        if (consistency.conflict_total > consistency.conflicts.size())
            out_ << "  ... " << consistency.conflict_total - consistency.conflicts.size() << " more\n";
    }
    return completeness.uncovered_total == 0 && consistency.conflict_total == 0 ? kOk : kFindings;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Args a;
    CLI::App app{"Contract drafting workbench", "contractcad"};
    app.require_subcommand(1);
    app.add_option("--repo", a.repo, "repository directory")->capture_default_str();
    app.add_option("--format", a.format, "report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    std::function<int(Runner&)> action;
    auto cmd = [&](const char* name, const char* help, std::function<int(Runner&)> fn) {
        auto* sub = app.add_subcommand(name, help);
        sub->callback([&action, fn] { action = fn; });
        return sub;
    };

    auto* init = cmd("init", "create a repository, optionally with a new generic document",
                     [](Runner& r) { return r.init(); });
    init->add_option("--doc", a.doc, "generic document id");
    init->add_option("--title", a.title, "document title");

    auto* add_unit = cmd("add-unit", "add a unit to a generic document", [](Runner& r) { return r.add_unit(); });
    add_unit->add_option("--doc", a.doc)->required();
    add_unit->add_option("--parent", a.parent)->required();
    add_unit->add_option("--heading", a.heading)->required();
    add_unit->add_option("--kind", a.kind, "document|part|section|provision|sentence")->capture_default_str();
    add_unit->add_option("--id", a.id, "unit id (default derived from the heading)");
    add_unit->add_option("--position", a.position, "index among the parent's children");
    add_unit->add_option("--tags", a.tags, "comma separated role tags");

    auto* add_version = cmd("add-version", "add a version of a unit", [](Runner& r) { return r.add_version(); });
    add_version->add_option("--doc", a.doc)->required();
    add_version->add_option("--unit", a.unit)->required();
    auto* text_opt = add_version->add_option("--text", a.text, "template text");
    add_version->add_option("--file", a.file, "read the template from a file")->excludes(text_opt);
    add_version->add_option("--rationale", a.rationale);
    add_version->add_option("--provenance", a.provenance)->capture_default_str();
    add_version->add_option("--derived-from", a.derived_from);
    add_version->add_option("--id", a.id);
    add_version->add_option("--created-at", a.created_at);

    auto* add_constraint =
        cmd("add-constraint", "add an authored constraint", [](Runner& r) { return r.add_constraint(); });
    add_constraint->add_option("--doc", a.doc)->required();
    add_constraint->add_option("--kind", a.kind, "requires|excludes|exactly-one|param-rule")->required();
    add_constraint->add_option("--id", a.id);
    add_constraint->add_option("--if", a.antecedent, "requires: antecedent atom");
    add_constraint->add_option("--then", a.consequent, "requires: consequent unit");
    add_constraint->add_option("--a", a.a, "excludes: first atom");
    add_constraint->add_option("--b", a.b, "excludes: second atom");
    add_constraint->add_option("--group", a.group, "exactly-one: comma separated units");
    add_constraint->add_option("--expr", a.expr, "param-rule: expression");
    add_constraint->add_option("--message", a.message);

    auto* declare = cmd("declare-param", "declare a parameter", [](Runner& r) { return r.declare_param(); });
    declare->add_option("--doc", a.doc)->required();
    declare->add_option("--name", a.name)->required();
    declare->add_option("--type", a.type, "text|integer|decimal|date|money|party|enum")->required();
    declare->add_option("--values", a.values, "enum: comma separated values");
    declare->add_option("--description", a.description);

    auto* new_instance = cmd("new-instance", "start a document instance", [](Runner& r) { return r.new_instance(); });
    new_instance->add_option("--doc", a.doc)->required();
    new_instance->add_option("--instance", a.instance)->required();
    new_instance->add_option("--mode", a.mode, "notify|enforce")->capture_default_str();

    auto* include = cmd("include", "include a unit", [&a](Runner& r) { return r.edit(Delta::include(a.unit)); });
    include->add_option("--instance", a.instance)->required();
    include->add_option("--unit", a.unit)->required();

    auto* exclude = cmd("exclude", "exclude a unit", [&a](Runner& r) { return r.edit(Delta::exclude(a.unit)); });
    exclude->add_option("--instance", a.instance)->required();
    exclude->add_option("--unit", a.unit)->required();

    auto* select = cmd("select", "select a version", [&a](Runner& r) {
        if (a.none) return r.edit(Delta::deselect(a.unit));
        if (a.version.empty()) throw Error(ErrorKind::InvalidArgument, "select needs --version or --none");
        return r.edit(Delta::select(a.unit, a.version));
    });
    select->add_option("--instance", a.instance)->required();
    select->add_option("--unit", a.unit)->required();
    auto* version_opt = select->add_option("--version", a.version);
    select->add_flag("--none", a.none, "clear the selection")->excludes(version_opt);

    auto* bind = cmd("bind", "bind a parameter", [&a](Runner& r) {
        if (a.unset) return r.edit(Delta::unbind(a.param));
        return r.edit(Delta{Delta::Op::Bind, a.param, {}, {}});
    });
    bind->add_option("--instance", a.instance)->required();
    bind->add_option("--param", a.param)->required();
    auto* value_opt = bind->add_option("--value", a.value);
    bind->add_flag("--unset", a.unset, "remove the binding")->excludes(value_opt);

    auto* enforce = cmd("enforce-include", "include a unit and everything it requires",
                        [](Runner& r) { return r.enforce_include(); });
    enforce->add_option("--instance", a.instance)->required();
    enforce->add_option("--unit", a.unit)->required();

    auto* check = cmd("check", "report violations and gaps", [](Runner& r) { return r.check(); });
    check->add_option("--instance", a.instance)->required();

    auto* finalize = cmd("finalize", "finalize a complete, consistent instance", [](Runner& r) { return r.finalize(); });
    finalize->add_option("--instance", a.instance)->required();

    auto* render = cmd("render", "render an instance", [](Runner& r) { return r.render(); });
    render->add_option("--instance", a.instance)->required();
    render->add_option("--out", a.out, "write to a file instead of standard output");
    render->add_option("--separator", a.separator, "label separator")->capture_default_str();

    auto* diff = cmd("diff", "compare two instances", [](Runner& r) { return r.diff(); });
    diff->add_option("--instance", a.instance)->required();
    diff->add_option("--against", a.against)->required();

    auto* promote = cmd("promote", "add a version from a drafting session and select it",
                        [](Runner& r) { return r.promote(); });
    promote->add_option("--instance", a.instance)->required();
    promote->add_option("--unit", a.unit)->required();
    auto* ptext = promote->add_option("--text", a.text);
    promote->add_option("--file", a.file)->excludes(ptext);
    promote->add_option("--rationale", a.rationale)->required();
    promote->add_option("--provenance", a.provenance)->capture_default_str();
    promote->add_option("--created-at", a.created_at);

    auto* sat = cmd("satisfiable", "search for a complete consistent instance", [](Runner& r) { return r.satisfiable(); });
    sat->add_option("--doc", a.doc)->required();

    auto* cases = cmd("check-cases", "completeness and consistency of a rule table",
                      [](Runner& r) { return r.check_cases(); });
    cases->add_option("rules", a.rules, "rule file")->required();

    std::vector<std::string> argv_store{"contractcad"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kFailure;
    }

    Runner runner(a, out, err);
    try {
        return action(runner);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kFailure;
}

} // namespace ccad::cli
