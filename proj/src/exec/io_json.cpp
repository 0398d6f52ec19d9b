#include "gsyn/exec/io_json.hpp"

#include <functional>

namespace gsyn::exec {

using nlohmann::json;

namespace {

// Nested array (or scalar) for cells [d.first, d.first + d.count).
json encode_decl(const ir::DeclRange& d, const std::function<int(int)>& value) {
    if (d.shape.empty()) return value(d.first);
    std::function<json(std::size_t, int)> rec = [&](std::size_t dim, int base) -> json {
        json arr = json::array();
        int stride = 1;
        for (std::size_t k = dim + 1; k < d.shape.size(); ++k) stride *= d.shape[k];
        for (int i = 0; i < d.shape[dim]; ++i) {
            if (dim + 1 == d.shape.size())
                arr.push_back(value(base + i));
            else
                arr.push_back(rec(dim + 1, base + i * stride));
        }
        return arr;
    };
    return rec(0, d.first);
}

// Flattens a nested array for `d`; returns an error message on shape mismatch.
std::string decode_decl(const ir::DeclRange& d, const json& j, std::vector<CellValue>& out) {
    std::function<std::string(const json&, std::size_t, int)> rec = [&](const json& x, std::size_t dim,
                                                                       int base) -> std::string {
        if (dim == d.shape.size()) {
            if (!x.is_number_integer()) return "expected an integer for " + d.name;
            const long long v = x.get<long long>();
            if (v < 0 || v >= d.domain)
                return "value " + std::to_string(v) + " for " + d.name + " outside domain " +
                       std::to_string(d.domain);
            out.push_back({base, static_cast<int>(v)});
            return {};
        }
        if (!x.is_array() || static_cast<int>(x.size()) != d.shape[dim])
            return "expected an array of length " + std::to_string(d.shape[dim]) + " for " + d.name;
        int stride = 1;
        for (std::size_t k = dim + 1; k < d.shape.size(); ++k) stride *= d.shape[k];
        for (int i = 0; i < d.shape[dim]; ++i) {
            auto msg = rec(x[static_cast<std::size_t>(i)], dim + 1, base + i * stride);
            if (!msg.empty()) return msg;
        }
        return {};
    };
    return rec(j, 0, d.first);
}

std::string decode_side(const Graph& g, const json& obj, ir::VarKind kind, std::vector<CellValue>& out) {
    const char* what = kind == ir::VarKind::Input ? "inputs" : "outputs";
    if (!obj.is_object()) return std::string("'") + what + "' must be an object";
    for (const auto& [name, value] : obj.items()) {
        const auto* d = g.find_decl(name);
        if (!d) return "unknown name '" + name + "' in " + what;
        if (d->kind != kind)
            return "'" + name + "' is a " + frontend::to_string(d->kind) + ", not listed under " + what;
        auto msg = decode_decl(*d, value, out);
        if (!msg.empty()) return msg;
    }
    for (const auto& d : g.decls)
        if (d.kind == kind && !obj.contains(d.name)) return "missing " + d.name + " in " + what;
    return {};
}

}  // namespace

Checked<IoFile> parse_io_file(std::string_view text) {
    Checked<IoFile> r;
    auto fail = [&](const std::string& msg) {
        r.diagnostics.push_back(make_error({}, "io", msg));
        return r;
    };
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return fail("IO file is not valid JSON");
    if (!j.is_object()) return fail("IO file must be a JSON object");
    IoFile f;
    if (j.contains("model")) {
        if (!j["model"].is_string()) return fail("'model' must be a string");
        f.model = j["model"].get<std::string>();
    }
    if (j.contains("constants")) {
        if (!j["constants"].is_object()) return fail("'constants' must be an object");
        for (const auto& [k, v] : j["constants"].items()) {
            if (!v.is_number_integer()) return fail("constant " + k + " must be an integer");
            f.constants[k] = v.get<long long>();
        }
    }
    if (!j.contains("examples") || !j["examples"].is_array()) return fail("'examples' must be an array");
    f.examples = j["examples"];
    r.value = std::move(f);
    return r;
}

Checked<IOExamples> decode_examples(const Graph& g, const json& examples) {
    Checked<IOExamples> r;
    if (!examples.is_array() || examples.empty()) {
        r.diagnostics.push_back(make_error({}, "io", "at least one example is required"));
        return r;
    }
    IOExamples io;
    for (std::size_t e = 0; e < examples.size(); ++e) {
        const auto& ex = examples[e];
        IOExample out;
        std::string msg;
        if (!ex.is_object())
            msg = "must be an object";
        else {
            msg = decode_side(g, ex.value("inputs", json::object()), ir::VarKind::Input, out.inputs);
            if (msg.empty())
                msg = decode_side(g, ex.value("outputs", json::object()), ir::VarKind::Output, out.outputs);
        }
        if (!msg.empty()) {
            r.diagnostics.push_back(make_error({}, "io", "example " + std::to_string(e) + ": " + msg));
            return r;
        }
        io.push_back(std::move(out));
    }
    r.value = std::move(io);
    return r;
}

json encode_examples(const Graph& g, const IOExamples& io) {
    json arr = json::array();
    for (const auto& ex : io) {
        std::vector<int> values(g.vars.size(), 0);
        for (const auto& c : ex.inputs) values[static_cast<std::size_t>(c.var)] = c.value;
        for (const auto& c : ex.outputs) values[static_cast<std::size_t>(c.var)] = c.value;
        json in = json::object(), out = json::object();
        for (const auto& d : g.decls) {
            auto lookup = [&](int v) { return values[static_cast<std::size_t>(v)]; };
            if (d.kind == ir::VarKind::Input) in[d.name] = encode_decl(d, lookup);
            if (d.kind == ir::VarKind::Output) out[d.name] = encode_decl(d, lookup);
        }
        arr.push_back(json{{"inputs", in}, {"outputs", out}});
    }
    return arr;
}

std::string write_io_file(const std::string& model, const std::map<std::string, long long>& constants,
                          const Graph& g, const IOExamples& io) {
    json j;
    j["model"] = model;
    j["constants"] = constants;
    j["examples"] = encode_examples(g, io);
    return j.dump(1) + "\n";
}

json encode_assignment(const Graph& g, const ParamAssignment& p) {
    json j = json::object();
    for (const auto& d : g.decls)
        if (d.kind == ir::VarKind::Param)
            j[d.name] = encode_decl(d, [&](int v) { return p.value_of(g, v); });
    return j;
}

Checked<ParamAssignment> decode_assignment(const Graph& g, const json& j) {
    Checked<ParamAssignment> r;
    std::vector<CellValue> cells;
    auto msg = decode_side(g, j, ir::VarKind::Param, cells);
    if (!msg.empty()) {
        r.diagnostics.push_back(make_error({}, "io", msg));
        return r;
    }
    std::vector<int> by_var(g.vars.size(), 0);
    for (const auto& c : cells) by_var[static_cast<std::size_t>(c.var)] = c.value;
    ParamAssignment p;
    for (int id : g.param_ids) p.values.push_back(by_var[static_cast<std::size_t>(id)]);
    r.value = std::move(p);
    return r;
}

}  // namespace gsyn::exec
