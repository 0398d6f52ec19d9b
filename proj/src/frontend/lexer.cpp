#include "lexer.hpp"

#include <array>
#include <cctype>
#include <limits>

namespace gsyn::frontend {
namespace {

constexpr std::array<std::string_view, 10> kTwoCharOps = {
    "//", "==", "!=", "<=", ">=", "->", "**", "+=", "-=", "*="};
constexpr std::string_view kOneCharOps = "+-*/%<>=()[],:.";

}  // namespace

std::vector<Token> tokenize(std::string_view src, Diagnostics& diags) {
    std::vector<Token> out;
    std::vector<int> indents{0};
    int depth = 0;
    int line = 1;
    std::size_t pos = 0;
    bool at_line_start = true;
    std::size_t line_start = 0;

    auto fail = [&](int col, std::string msg) {
        diags.push_back(make_error({line, col, col + 1}, "syntax", std::move(msg)));
    };

    while (pos < src.size()) {
        if (at_line_start && depth == 0) {
            int width = 0;
            std::size_t p = pos;
            while (p < src.size() && (src[p] == ' ' || src[p] == '\t')) {
                width = src[p] == '\t' ? (width / 8 + 1) * 8 : width + 1;
                ++p;
            }
            if (p >= src.size()) {
                pos = p;
                break;
            }
            if (src[p] == '\n' || src[p] == '#' || src[p] == '\r') {
                while (p < src.size() && src[p] != '\n') ++p;
                pos = p + 1;
                line_start = pos;
                ++line;
                continue;
            }
            Span sp{line, 1, width + 1};
            if (width > indents.back()) {
                indents.push_back(width);
                out.push_back({Tok::Indent, "", 0, sp});
            } else {
                while (width < indents.back()) {
                    indents.pop_back();
                    out.push_back({Tok::Dedent, "", 0, sp});
                }
                if (width != indents.back()) {
                    fail(width + 1, "inconsistent dedent");
                    return out;
                }
            }
            pos = p;
            at_line_start = false;
        }

        const int column = static_cast<int>(pos - line_start) + 1;
        char c = src[pos];
        if (c == '\n') {
            ++line;
            ++pos;
            line_start = pos;
            if (depth == 0) {
                out.push_back({Tok::Newline, "", 0, {line - 1, column, column + 1}});
                at_line_start = true;
            }
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++pos;
            continue;
        }
        if (c == '#') {
            while (pos < src.size() && src[pos] != '\n') ++pos;
            continue;
        }
        if (c == '\\' && pos + 1 < src.size() && src[pos + 1] == '\n') {
            pos += 2;
            line_start = pos;
            ++line;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t b = pos;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                ++pos;
            int len = static_cast<int>(pos - b);
            out.push_back({Tok::Name, std::string(src.substr(b, pos - b)), 0,
                           {line, column, column + len}});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t b = pos;
            long long v = 0;
            bool overflow = false;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                int digit = src[pos] - '0';
                if (v > (std::numeric_limits<long long>::max() - digit) / 10) overflow = true;
                else v = v * 10 + digit;
                ++pos;
            }
            int len = static_cast<int>(pos - b);
            if (pos < src.size() &&
                (std::isalpha(static_cast<unsigned char>(src[pos])) || src[pos] == '.')) {
                fail(column, "malformed integer literal (only decimal integers are supported)");
                return out;
            }
            if (overflow) {
                fail(column, "integer literal too large");
                return out;
            }
            out.push_back({Tok::Int, std::string(src.substr(b, pos - b)), v,
                           {line, column, column + len}});
            continue;
        }
        bool matched = false;
        if (pos + 1 < src.size()) {
            std::string_view two = src.substr(pos, 2);
            for (auto op : kTwoCharOps) {
                if (two == op) {
                    out.push_back({Tok::Op, std::string(op), 0, {line, column, column + 2}});
                    pos += 2;
                    matched = true;
                    break;
                }
            }
        }
        if (matched) continue;
        if (kOneCharOps.find(c) != std::string_view::npos) {
            if (c == '(' || c == '[') ++depth;
            if (c == ')' || c == ']') depth = depth > 0 ? depth - 1 : 0;
            out.push_back({Tok::Op, std::string(1, c), 0, {line, column, column + 1}});
            ++pos;
            continue;
        }
        if (c == '"' || c == '\'') {
            fail(column, "string literals are not supported");
            return out;
        }
        fail(column, std::string("unexpected character '") + c + "'");
        return out;
    }
    if (!out.empty() && out.back().kind != Tok::Newline && out.back().kind != Tok::Dedent)
        out.push_back({Tok::Newline, "", 0, {line, 1, 2}});
    while (indents.size() > 1) {
        indents.pop_back();
        out.push_back({Tok::Dedent, "", 0, {line, 1, 1}});
    }
    out.push_back({Tok::End, "", 0, {line, 1, 1}});
    return out;
}

}  // namespace gsyn::frontend
