#include "lp_reader.hpp"

#include <sstream>
#include <stdexcept>

namespace gsyn::testing {

namespace {

bool is_number(const std::string& t, double& v) {
    try {
        std::size_t used = 0;
        v = std::stod(t, &used);
        return used == t.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> tokens(const std::vector<std::string>& lines) {
    std::vector<std::string> out;
    for (const auto& l : lines) {
        std::istringstream in(l);
        for (std::string t; in >> t;) out.push_back(t);
    }
    return out;
}

}  // namespace

LpFile read_lp(const std::string& text) {
    std::istringstream in(text);
    std::map<std::string, std::vector<std::string>> sections;
    std::string current;
    LpFile f;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '\\') continue;
        if (line[0] != ' ') {
            if (f.ended) throw std::runtime_error("content after End");
            current = line;
            if (current == "End") f.ended = true;
            else if (current != "Minimize" && current != "Subject To" && current != "Bounds" && current != "Generals")
                throw std::runtime_error("unknown section " + line);
            sections[current];
            continue;
        }
        sections[current].push_back(line);
    }
    for (const auto& l : sections["Minimize"]) f.objective += l;

    const auto rt = tokens(sections["Subject To"]);
    for (std::size_t i = 0; i < rt.size();) {
        LpRow row;
        if (rt[i].back() != ':') throw std::runtime_error("row without name at " + rt[i]);
        row.name = rt[i].substr(0, rt[i].size() - 1);
        ++i;
        double sign = 1.0;
        double coef = 1.0;
        while (i < rt.size() && rt[i] != "<=" && rt[i] != ">=" && rt[i] != "=") {
            double v = 0.0;
            if (rt[i] == "+") sign = 1.0;
            else if (rt[i] == "-") sign = -1.0;
            else if (is_number(rt[i], v)) coef = v;
            else {
                row.terms[rt[i]] += sign * coef;
                sign = 1.0;
                coef = 1.0;
            }
            ++i;
        }
        if (i + 1 >= rt.size()) throw std::runtime_error("row " + row.name + " lacks a right-hand side");
        row.sense = rt[i];
        if (!is_number(rt[i + 1], row.rhs)) throw std::runtime_error("bad rhs in " + row.name);
        i += 2;
        f.rows.push_back(std::move(row));
    }
    for (const auto& l : sections["Bounds"]) {
        std::istringstream ls(l);
        std::string lo, le1, name, le2, hi;
        ls >> lo >> le1 >> name >> le2 >> hi;
        double a = 0.0, b = 0.0;
        if (le1 != "<=" || le2 != "<=" || !is_number(lo, a) || !is_number(hi, b))
            throw std::runtime_error("bad bound: " + l);
        f.bounds[name] = {a, b};
    }
    for (const auto& t : tokens(sections["Generals"])) f.generals.insert(t);
    return f;
}

}  // namespace gsyn::testing
