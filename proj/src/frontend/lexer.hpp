#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gsyn/diagnostics.hpp"

namespace gsyn::frontend {

enum class Tok { Name, Int, Op, Newline, Indent, Dedent, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    long long value = 0;
    Span span;
};

// Python-style tokenizer: emits Indent/Dedent around indented blocks, drops
// comments and blank lines, and joins lines inside brackets.
std::vector<Token> tokenize(std::string_view src, Diagnostics& diags);

}  // namespace gsyn::frontend
