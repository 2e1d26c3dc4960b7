#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nim/builtin/builtins.hpp"
#include "nim/service/http.hpp"
#include "nim/service/registry.hpp"
#include "nim/service/service.hpp"
#include "nim/store/store.hpp"

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kClientError = 1, kServerError = 2, kUnreachable = 3 };

struct Options {
    std::string server = "http://127.0.0.1:8080";
    std::vector<std::string> roles;
    std::string format = "table";
};

bool read_input(const std::string& path, std::string& out) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        out = ss.str();
        return true;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::stringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

std::string cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    return v.dump();
}

void print_table(const json& body) {
    if (body.is_array() && std::all_of(body.begin(), body.end(), [](const json& r) { return r.is_object(); })) {
        std::vector<std::string> cols;
        std::set<std::string> seen;
        for (const auto& row : body)
            for (const auto& [k, _] : row.items())
                if (k != "$meta" && seen.insert(k).second) cols.push_back(k);
        std::vector<std::size_t> width(cols.size());
        std::vector<std::vector<std::string>> cells;
        for (std::size_t c = 0; c < cols.size(); ++c) width[c] = cols[c].size();
        for (const auto& row : body) {
            auto& r = cells.emplace_back();
            for (std::size_t c = 0; c < cols.size(); ++c) {
                r.push_back(row.contains(cols[c]) ? cell(row.at(cols[c])) : "");
                width[c] = std::max(width[c], r.back().size());
            }
        }
        auto line = [&](const std::vector<std::string>& v) {
            for (std::size_t c = 0; c < v.size(); ++c)
                std::cout << v[c] << std::string(c + 1 < v.size() ? width[c] - v[c].size() + 2 : 0, ' ');
            std::cout << '\n';
        };
        line(cols);
        for (const auto& r : cells) line(r);
        if (body.empty()) std::cout << "(no rows)\n";
        return;
    }
    if (body.is_object()) {
        if (auto it = body.find("values"); it != body.end() && it->is_array()) return print_table(*it);
        for (const auto& [k, v] : body.items()) {
            if (v.is_object() || (v.is_array() && v.empty())) continue;
            if (v.is_array()) {
                std::cout << k << ":\n";
                for (const auto& item : v) std::cout << "  " << cell(item) << '\n';
            } else {
                std::cout << k << ": " << cell(v) << '\n';
            }
        }
        return;
    }
    std::cout << body.dump(2) << '\n';
}

int exit_for(int status) {
    if (status >= 200 && status < 300) return kOk;
    if (status >= 400 && status < 500) return kClientError;
    return kServerError;
}

int report(const Options& opt, const httplib::Result& res) {
    if (!res) {
        std::cerr << "nim: cannot reach " << opt.server << ": " << httplib::to_string(res.error()) << '\n';
        return kUnreachable;
    }
    const int code = exit_for(res->status);
    const bool isJson = res->get_header_value("Content-Type").rfind("application/json", 0) == 0;
    if (!isJson) {
        (code == kOk ? std::cout : std::cerr) << res->body;
        if (!res->body.empty() && res->body.back() != '\n') (code == kOk ? std::cout : std::cerr) << '\n';
        return code;
    }
    const json body = json::parse(res->body, nullptr, false);
    if (opt.format == "json") {
        (code == kOk ? std::cout : std::cerr) << body.dump(2) << '\n';
    } else if (code != kOk) {
        std::cerr << "nim: HTTP " << res->status;
        if (body.is_object() && body.contains("error")) std::cerr << ": " << cell(body.at("error"));
        std::cerr << '\n';
        if (body.is_object() && body.contains("diagnostics"))
            for (const auto& d : body.at("diagnostics"))
                std::cerr << d.value("line", 0) << ':' << d.value("column", 0) << ": " << d.value("severity", "")
                          << ' ' << d.value("code", "") << ": " << d.value("message", "") << '\n';
        if (body.is_object() && body.contains("reason")) std::cerr << "reason: " << cell(body.at("reason")) << '\n';
    } else {
        print_table(body);
    }
    return code;
}

httplib::Headers headers(const Options& opt) {
    httplib::Headers h;
    if (!opt.roles.empty()) {
        std::string joined;
        for (const auto& r : opt.roles) joined += (joined.empty() ? "" : ",") + r;
        h.emplace("X-NIM-Principals", joined);
    }
    return h;
}

std::unique_ptr<httplib::Client> client(const Options& opt) {
    auto c = std::make_unique<httplib::Client>(opt.server);
    c->set_connection_timeout(5);
    c->set_read_timeout(60);
    return c;
}

std::string query_string(const std::vector<std::pair<std::string, std::string>>& params) {
    std::string q;
    for (const auto& [k, v] : params) {
        if (v.empty()) continue;
        q += (q.empty() ? "?" : "&") + k + "=" + httplib::detail::encode_query_param(v);
    }
    return q;
}

int cmd_validate(const Options& opt, const std::string& file, bool noBuiltins) {
    std::string source;
    if (!read_input(file, source)) {
        std::cerr << "nim: cannot read " << file << '\n';
        return kClientError;
    }
    nim::store::Store store({});
    nim::service::ModelRegistry registry(store);
    if (!noBuiltins) nim::builtin::load_builtins(registry);
    const auto prepared = nim::service::prepare_model(source, *registry.snapshot(), "m-local");
    if (opt.format == "json") {
        json diags = json::array();
        for (const auto& d : prepared.diagnostics)
            diags.push_back({{"severity", d.severity == nim::ndf::Severity::Error ? "error" : "warning"},
                             {"code", d.code},
                             {"message", d.message},
                             {"line", d.line},
                             {"column", d.column}});
        std::cout << json{{"valid", prepared.ok()}, {"diagnostics", diags}}.dump(2) << '\n';
    } else {
        for (const auto& d : prepared.diagnostics) std::cerr << file << ':' << d.str() << '\n';
    }
    return prepared.ok() ? kOk : kClientError;
}

int cmd_serve(const std::string& host, int port, const std::string& location, const std::string& dataDir,
              bool noBuiltins) {
    sigset_t sigs;
    sigemptyset(&sigs);
    sigaddset(&sigs, SIGINT);
    sigaddset(&sigs, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &sigs, nullptr);

    nim::store::StoreConfig cfg;
    cfg.nodeLocation = location;
    cfg.dataDir = dataDir;
    nim::store::Store store(cfg);
    if (const auto& w = store.replay_report().warning) std::cerr << "nim: journal: " << *w << '\n';
    nim::service::ModelRegistry registry(store);
    for (const auto& w : registry.restore_warnings()) std::cerr << "nim: " << w << '\n';
    if (!noBuiltins && !registry.snapshot()->find(std::string(nim::builtin::kGridConnectionType))) {
        for (const auto& r : nim::builtin::load_builtins(registry))
            if (!r.accepted())
                for (const auto& d : r.diagnostics) std::cerr << "nim: builtin: " << d.str() << '\n';
    }
    nim::service::NimService service(store, registry);
    nim::builtin::install_hooks(service);
    nim::service::HttpServer server(service);

    int bound = 0;
    try {
        bound = server.bind(host, port);
    } catch (const std::exception& e) {
        std::cerr << "nim: " << e.what() << '\n';
        return kServerError;
    }
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&sigs, &sig);
        server.stop();
    });
    std::cout << "nim: serving on " << host << ':' << bound << " (" << store.replay_report().records
              << " journal records replayed)" << std::endl;
    server.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighbourhood information model engine"};
    app.require_subcommand(1);
    Options opt;

    auto remote = [&](CLI::App* sub) {
        sub->add_option("--server", opt.server, "Server base URL")->capture_default_str();
        sub->add_option("--role", opt.roles, "Principal to act as (repeatable)");
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "table"}));
    };

    std::string file, type, iid, field, at, from, to, now, dataDir, host = "127.0.0.1", location = "local";
    int port = 8080;
    bool noBuiltins = false;

    auto* validate = app.add_subcommand("validate", "Check an NDF file offline");
    validate->add_option("file", file, "NDF file ('-' for stdin)")->required();
    validate->add_option("--format", opt.format)->check(CLI::IsMember({"json", "table"}));
    validate->add_flag("--no-builtins", noBuiltins, "Check against an empty registry");

    auto* serve = app.add_subcommand("serve", "Run the server");
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--location", location, "Storage location of this node")->capture_default_str();
    serve->add_option("--data", dataDir, "Data directory holding the journal");
    serve->add_flag("--no-builtins", noBuiltins, "Do not register the shipped models");

    auto* reg = app.add_subcommand("register", "Upload an NDF model");
    reg->add_option("file", file)->required();
    remote(reg);

    auto* ingest = app.add_subcommand("ingest", "Store a JSON document of a type");
    ingest->add_option("type", type)->required();
    ingest->add_option("file", file, "JSON document ('-' for stdin)")->required();
    remote(ingest);

    auto* query = app.add_subcommand("query", "List instances of a type");
    query->add_option("type", type)->required();
    query->add_option("--id", iid, "Single instance");
    query->add_option("--at", at, "Evaluate at this instant");
    remote(query);

    auto* history = app.add_subcommand("history", "Value history of one entry");
    history->add_option("type", type)->required();
    history->add_option("instance", iid)->required();
    history->add_option("field", field)->required();
    history->add_option("--from", from);
    history->add_option("--to", to);
    history->add_option("--at", at);
    remote(history);

    auto* purge = app.add_subcommand("purge", "Delete expired values");
    purge->add_option("--now", now, "Purge as of this instant");
    remote(purge);

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return cmd_validate(opt, file, noBuiltins);
    if (serve->parsed()) return cmd_serve(host, port, location, dataDir, noBuiltins);

    auto c = client(opt);
    const auto h = headers(opt);
    if (reg->parsed() || ingest->parsed()) {
        std::string body;
        if (!read_input(file, body)) {
            std::cerr << "nim: cannot read " << file << '\n';
            return kClientError;
        }
        if (reg->parsed()) return report(opt, c->Post("/v1/models", h, body, "text/plain"));
        return report(opt, c->Post("/v1/types/" + type + "/instances", h, body, "application/json"));
    }
    const std::string base = "/v1/types/" + type + "/instances";
    if (query->parsed())
        return report(opt, c->Get(base + (iid.empty() ? "" : "/" + iid) + query_string({{"at", at}}), h));
    if (history->parsed())
        return report(opt, c->Get(base + "/" + iid + "/entries/" + field + "/history" +
                                      query_string({{"from", from}, {"to", to}, {"at", at}}),
                                  h));
    if (purge->parsed()) return report(opt, c->Post("/v1/admin/purge" + query_string({{"now", now}}), h, "", "text/plain"));
    return kClientError;
}
