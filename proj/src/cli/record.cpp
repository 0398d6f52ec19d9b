#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>

#include "gsyn/cli/cli.hpp"

namespace gsyn::cli {

using nlohmann::json;

json to_json(const RunRecord& r) {
    return json{{"schema", r.schema},   {"task", r.task},       {"backend", r.backend},
                {"status", r.status},   {"message", r.message}, {"wall_time_s", r.wall_time_s},
                {"stats", r.stats},     {"program", r.program}, {"seed", r.seed},
                {"version", r.version}, {"timestamp", r.timestamp}};
}

Checked<RunRecord> record_from_json(const json& j) {
    Checked<RunRecord> out;
    auto bad = [&](const std::string& msg) {
        out.diagnostics.push_back(make_error({}, "record", msg));
        return out;
    };
    if (!j.is_object()) return bad("record is not an object");
    try {
        RunRecord r;
        r.schema = j.at("schema").get<int>();
        if (r.schema != kRecordSchema) return bad("unsupported record schema " + std::to_string(r.schema));
        r.task = j.at("task").get<std::string>();
        r.backend = j.at("backend").get<std::string>();
        r.status = j.at("status").get<std::string>();
        r.message = j.value("message", "");
        r.wall_time_s = j.at("wall_time_s").get<double>();
        r.stats = j.value("stats", json::object());
        r.program = j.value("program", json());
        r.seed = j.value("seed", std::uint64_t{0});
        r.version = j.value("version", "");
        r.timestamp = j.value("timestamp", "");
        out.value = std::move(r);
    } catch (const json::exception& e) {
        return bad(e.what());
    }
    return out;
}

json without_clock(const RunRecord& r) {
    json j = to_json(r);
    j.erase("wall_time_s");
    j.erase("timestamp");
    if (j["stats"].is_object()) {
        json kept = json::object();
        for (auto it = j["stats"].begin(); it != j["stats"].end(); ++it) {
            const std::string& k = it.key();
            if (k.size() >= 6 && k.compare(k.size() - 6, 6, "time_s") == 0) continue;
            kept[k] = it.value();
        }
        j["stats"] = kept;
    }
    return j;
}

std::string append_record(const std::string& path, const RunRecord& r) {
    const std::string line = to_json(r).dump() + "\n";
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) return "cannot open " + path + ": " + std::strerror(errno);
    const ssize_t n = ::write(fd, line.data(), line.size());
    const int saved = errno;
    ::close(fd);
    if (n != static_cast<ssize_t>(line.size()))
        return "short write to " + path + (n < 0 ? std::string(": ") + std::strerror(saved) : "");
    return {};
}

std::vector<RunRecord> read_records(const std::string& text, std::vector<std::string>& warnings) {
    std::vector<RunRecord> out;
    std::istringstream in(text);
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            warnings.push_back("line " + std::to_string(no) + ": not JSON, skipped");
            continue;
        }
        auto r = record_from_json(j);
        if (!r.ok()) {
            warnings.push_back("line " + std::to_string(no) + ": " + r.diagnostics.front().message + ", skipped");
            continue;
        }
        out.push_back(std::move(*r));
    }
    return out;
}

std::string render_report(const std::vector<RunRecord>& records) {
    std::vector<std::string> backends{"fmgd", "smt", "ilp", "enum"};
    for (const auto& r : records)
        if (std::find(backends.begin(), backends.end(), r.backend) == backends.end()) backends.push_back(r.backend);

    std::vector<std::string> tasks;
    std::map<std::pair<std::string, std::string>, double> best;  // negative: run without success
    for (const auto& r : records) {
        if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
        auto key = std::make_pair(r.task, r.backend);
        auto it = best.find(key);
        if (r.status == "Success") {
            if (it == best.end() || it->second < 0 || r.wall_time_s < it->second) best[key] = r.wall_time_s;
        } else if (it == best.end()) {
            best[key] = -1.0;
        }
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"task"};
    header.insert(header.end(), backends.begin(), backends.end());
    rows.push_back(header);
    for (const auto& t : tasks) {
        std::vector<std::string> row{t};
        for (const auto& b : backends) {
            auto it = best.find({t, b});
            if (it == best.end()) row.push_back("");
            else if (it->second < 0) row.push_back("-");
            else {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f", it->second);
                row.push_back(buf);
            }
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    std::ostringstream os;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == 0) line += row[c] + std::string(width[c] - row[c].size(), ' ');
            else line += "  " + std::string(width[c] - row[c].size(), ' ') + row[c];
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        os << line << '\n';
    }
    return os.str();
}

}  // namespace gsyn::cli
