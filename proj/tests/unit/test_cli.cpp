#include <doctest.h>

#include "contractcad/assembler.hpp"
#include "contractcad/cli.hpp"
#include "contractcad/codec.hpp"
#include "contractcad/store.hpp"
#include "fixtures.hpp"

#include <sstream>

using namespace ccad;
namespace fs = std::filesystem;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = ccad::cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

struct Workspace {
    fs::path path;
    Workspace() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("ccad-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~Workspace() { fs::remove_all(path); }

    std::string copy_repo(const std::string& name) const {
        const auto target = path / name;
        fs::copy(fixtures::dir() / "repos" / name, target, fs::copy_options::recursive);
        return target.string();
    }
};

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != ".lock")
            out.emplace(fs::relative(e.path(), dir).string(), read_file(e.path()));
    return out;
}

} // namespace

TEST_CASE("check exit statuses on the committed repositories") {
    Workspace ws;
    const auto compliant = invoke({"--repo", ws.copy_repo("compliant"), "check", "--instance", "i1"});
    CHECK(compliant.status == 0);
    CHECK(compliant.out == "no pathological features\n");

    const auto breach = invoke({"--repo", ws.copy_repo("breach"), "check", "--instance", "i2"});
    CHECK(breach.status == 1);
    CHECK(breach.out.find("buyer") != std::string::npos);
    CHECK(breach.out.find("seller") != std::string::npos);
    CHECK(breach.out == "violation distinct-parties [buyer, seller]: buyer and seller must be different parties\n");

    const auto tampered = invoke({"--repo", ws.copy_repo("tampered"), "check", "--instance", "i1"});
    CHECK(tampered.status == 2);
    CHECK(tampered.err.find("price:v2") != std::string::npos);
}

TEST_CASE("check prints one line per report entry") {
    Workspace ws;
    const auto repo = ws.copy_repo("compliant");
    CHECK(invoke({"--repo", repo, "new-instance", "--doc", "sale", "--instance", "blank"}).status == 0);
    const auto r = invoke({"--repo", repo, "check", "--instance", "blank"});
    CHECK(r.status == 1);
    const Repository store(repo);
    const auto loaded = store.load_instance("blank");
    const auto ctx = CheckContext::build(store.load_generic("sale"));
    const auto report = check_full(*ctx, loaded.instance);
    CHECK(static_cast<std::size_t>(std::count(r.out.begin(), r.out.end(), '\n')) ==
          report.violations.size() + report.gaps.size());

    const auto j = invoke({"--repo", repo, "--format", "json", "check", "--instance", "blank"});
    CHECK(j.status == 1);
    CHECK(same_findings(report_from_json(json::parse(j.out)), report));
}

TEST_CASE("read-only commands leave the repository alone") {
    Workspace ws;
    const auto repo = ws.copy_repo("breach");
    const auto before = snapshot(repo);
    invoke({"--repo", repo, "check", "--instance", "i2"});
    invoke({"--repo", repo, "render", "--instance", "i2"});
    invoke({"--repo", repo, "satisfiable", "--doc", "sale"});
    invoke({"--repo", repo, "diff", "--instance", "i2", "--against", "i2"});
    CHECK(snapshot(repo) == before);
}

TEST_CASE("usage errors") {
    CHECK(invoke({}).status == 2);
    CHECK(invoke({"frobnicate"}).status == 2);
    CHECK(invoke({"check"}).status == 2);
    CHECK(invoke({"--format", "xml", "check", "--instance", "i"}).status == 2);
    Workspace ws;
    const auto missing = invoke({"--repo", (ws.path / "none").string(), "check", "--instance", "i1"});
    CHECK(missing.status == 2);
    CHECK(missing.err.find("no repository") != std::string::npos);
}

TEST_CASE("drafting from scratch") {
    Workspace ws;
    const std::string repo = (ws.path / "contracts").string();
    auto run = [&](std::vector<std::string> args) {
        args.insert(args.begin(), {"--repo", repo});
        return invoke(args);
    };
    REQUIRE(run({"init", "--doc", "nda", "--title", "Mutual Non-Disclosure"}).status == 0);
    CHECK(run({"add-unit", "--doc", "nda", "--parent", "root", "--kind", "part", "--heading", "Parties", "--id", "parties"})
              .out == "parties\n");
    run({"add-unit", "--doc", "nda", "--parent", "root", "--kind", "part", "--heading", "Term", "--id", "term"});
    run({"add-unit", "--doc", "nda", "--parent", "root", "--kind", "part", "--heading", "Remedies", "--id", "remedies"});
    CHECK(run({"declare-param", "--doc", "nda", "--name", "discloser", "--type", "party"}).status == 0);
    run({"declare-param", "--doc", "nda", "--name", "recipient", "--type", "party"});
    CHECK(run({"add-version", "--doc", "nda", "--unit", "parties", "--text",
               "Between {{param discloser}} and {{param recipient}}."})
              .out == "parties:v1\n");
    run({"add-version", "--doc", "nda", "--unit", "term", "--text", "Two years. See {{ref remedies}}."});
    run({"add-version", "--doc", "nda", "--unit", "remedies", "--text", "Injunctive relief."});
    CHECK(run({"add-version", "--doc", "nda", "--unit", "term", "--text", "{{param", "--rationale", "x"}).status == 2);
    CHECK(run({"add-constraint", "--doc", "nda", "--kind", "param-rule", "--id", "distinct",
               "--expr", "distinct(discloser,recipient)", "--message", "the parties must differ"})
              .status == 0);
    CHECK(run({"add-constraint", "--doc", "nda", "--kind", "requires", "--id", "need-parties", "--if", "unit:root",
               "--then", "parties"})
              .status == 0);

    CHECK(run({"new-instance", "--doc", "nda", "--instance", "d1", "--mode", "enforce"}).status == 0);
    CHECK(run({"new-instance", "--doc", "nda", "--instance", "d1"}).status == 2);
    CHECK(run({"include", "--instance", "d1", "--unit", "parties"}).status == 0);
    CHECK(run({"select", "--instance", "d1", "--unit", "parties", "--version", "parties:v1"}).status == 0);
    run({"include", "--instance", "d1", "--unit", "term"});
    const auto sel = run({"select", "--instance", "d1", "--unit", "term", "--version", "term:v1"});
    CHECK(sel.out.find("also included: remedies") != std::string::npos);
    run({"select", "--instance", "d1", "--unit", "remedies", "--version", "remedies:v1"});
    CHECK(run({"bind", "--instance", "d1", "--param", "discloser", "--value", "Acme"}).status == 0);
    CHECK(run({"bind", "--instance", "d1", "--param", "recipient", "--value", ""}).status == 2);
    CHECK(run({"bind", "--instance", "d1", "--param", "recipient", "--value", "Acme"}).status == 1);
    CHECK(run({"finalize", "--instance", "d1"}).status == 1);
    CHECK(run({"bind", "--instance", "d1", "--param", "recipient", "--value", "Globex"}).status == 0);
    CHECK(run({"check", "--instance", "d1"}).status == 0);

    const auto draft = run({"render", "--instance", "d1"});
    CHECK(draft.out.starts_with(std::string(kDraftWatermark)));
    CHECK(draft.out.find("Two years. See 3.") != std::string::npos);

    CHECK(run({"promote", "--instance", "d1", "--unit", "term", "--text", "Three years. See {{ref remedies}}."})
              .status == 2);
    const auto promoted = run({"promote", "--instance", "d1", "--unit", "term", "--text",
                               "Three years. See {{ref remedies}}.", "--rationale", "longer protection"});
    CHECK(promoted.status == 0);
    CHECK(promoted.out.starts_with("created term:v2\n"));

    CHECK(run({"finalize", "--instance", "d1"}).status == 0);
    CHECK(run({"exclude", "--instance", "d1", "--unit", "term"}).status == 2);
    const auto out = ws.path / "nda.txt";
    CHECK(run({"render", "--instance", "d1", "--out", out.string()}).status == 0);
    CHECK(read_file(out) ==
          "# Mutual Non-Disclosure\n\n1 Parties\n\nBetween Acme and Globex.\n\n2 Term\n\nThree years. See 3.\n\n"
          "3 Remedies\n\nInjunctive relief.\n");

    run({"new-instance", "--doc", "nda", "--instance", "d2"});
    const auto d = run({"diff", "--instance", "d1", "--against", "d2"});
    CHECK(d.status == 0);
    CHECK(std::count(d.out.begin(), d.out.end(), '\n') == 8);  // 3 units in and selected, 2 bindings
    CHECK(run({"enforce-include", "--instance", "d2", "--unit", "term"}).out.find("also included: remedies") ==
          std::string::npos);  // requirements fire on selection, not inclusion

    CHECK(run({"satisfiable", "--doc", "nda"}).status == 0);
    run({"add-constraint", "--doc", "nda", "--kind", "excludes", "--id", "no-remedies", "--a", "unit:root", "--b",
         "unit:remedies"});
    run({"add-constraint", "--doc", "nda", "--kind", "requires", "--id", "need-term", "--if", "unit:root", "--then",
         "term"});
    CHECK(run({"satisfiable", "--doc", "nda"}).status == 1);
}

TEST_CASE("golden render through the command line") {
    Workspace ws;
    const auto root = ws.path / "iee";
    const auto repo = Repository::init(root);
    const auto ctx = CheckContext::build(fixtures::iee_document());
    repo.save_generic(ctx->doc());
    const auto fin = AssemblySession::resume(ctx, fixtures::iee_golden_instance(ctx->doc())).finalize();
    REQUIRE(fin.finalized);
    repo.save_instance(*fin.finalized);
    const auto out = ws.path / "c.txt";
    CHECK(invoke({"--repo", root.string(), "render", "--instance", "golden", "--out", out.string()}).status == 0);
    CHECK(read_file(out) == fixtures::read_text(fixtures::dir() / "iee_golden.txt"));
}

TEST_CASE("case tables") {
    const auto rules = (fixtures::dir() / "pricing.rules").string();
    const auto r = invoke({"check-cases", rules});
    CHECK(r.status == 1);
    CHECK(r.out == fixtures::read_text(fixtures::dir() / "pricing.expected"));
    const auto j = invoke({"--format", "json", "check-cases", rules});
    const auto body = json::parse(j.out);
    CHECK(body["uncoveredTotal"] == 5);
    CHECK(body["conflictTotal"] == 2);
    Workspace ws;
    const auto complete = ws.path / "ok.rules";
    write_file_atomic(complete, "factor a = x | y\nrule r: a in * -> fine\n");
    CHECK(invoke({"check-cases", complete.string()}).status == 0);
    write_file_atomic(complete, "factor a = x | y\nrule r a in * -> fine\n");
    const auto bad = invoke({"check-cases", complete.string()});
    CHECK(bad.status == 2);
    CHECK(bad.err.find("line 2") != std::string::npos);
}
