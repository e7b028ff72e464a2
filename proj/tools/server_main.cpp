#include "contractcad/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Drafting session server", "contractcad-server"};
    std::string repo = "contracts", host = "127.0.0.1";
    int port = 8080;
    app.add_option("--repo", repo, "repository directory")->capture_default_str();
    app.add_option("--host", host)->capture_default_str();
    app.add_option("--port", port)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    ccad::Repository repository(repo);
    if (!repository.exists()) {
        std::cerr << "error: no repository at " << repo << "\n";
        return 2;
    }
    ccad::service::Service service(repository);

    httplib::Server server;
    const auto forward = [&](const httplib::Request& req, httplib::Response& res) {
        ccad::service::Headers headers(req.headers.begin(), req.headers.end());
        std::string path = req.path;
        if (!req.params.empty()) {
            path += '?';
            bool first = true;
            for (const auto& [k, v] : req.params) {
                path += (first ? "" : "&") + k + "=" + v;
                first = false;
            }
        }
        const auto out = service.handle_request(req.method, path, req.body, headers);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    server.Get(".*", forward);
    server.Post(".*", forward);

    std::cerr << "listening on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return 2;
    }
    return 0;
}
