#include "billprep/json_path.hpp"

#include "billprep/error.hpp"

#include <charconv>

namespace billprep {

namespace {

[[noreturn]] void fail(std::string_view text, const std::string& what)
{
    throw ParseError("invalid path '" + std::string(text) + "': " + what);
}

}  // namespace

JsonPath parse_json_path(std::string_view text)
{
    if (text.empty()) fail(text, "empty path");

    JsonPath path;
    bool seen_wildcard = false;
    std::size_t pos = 0;
    for (;;) {
        // A segment is a key followed by zero or more bracket steps.
        const std::size_t key_end = text.find_first_of(".[]", pos);
        const std::string_view key =
            text.substr(pos, (key_end == std::string_view::npos ? text.size() : key_end) - pos);
        if (key.empty()) fail(text, "empty segment");
        if (key.find_first_of("|;") != std::string_view::npos) fail(text, "reserved character in key");
        path.steps.push_back(PathStep::make_key(std::string(key)));
        pos = key_end == std::string_view::npos ? text.size() : key_end;

        while (pos < text.size() && text[pos] == '[') {
            const std::size_t close = text.find(']', pos);
            if (close == std::string_view::npos) fail(text, "unclosed bracket");
            const std::string_view inner = text.substr(pos + 1, close - pos - 1);
            if (inner == "*") {
                if (seen_wildcard) fail(text, "more than one wildcard");
                seen_wildcard = true;
                path.steps.push_back(PathStep::make_wildcard());
            } else {
                if (inner.empty()) fail(text, "empty index");
                if (inner.front() == '-') fail(text, "negative index");
                std::size_t index = 0;
                auto [end, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), index);
                if (ec != std::errc{} || end != inner.data() + inner.size())
                    fail(text, "index is not a non-negative integer");
                path.steps.push_back(PathStep::make_index(index));
            }
            pos = close + 1;
        }

        if (pos == text.size()) break;
        if (text[pos] == ']') fail(text, "unmatched ']'");
        if (text[pos] != '.') fail(text, "expected '.' after ']'");
        ++pos;
        if (pos == text.size()) fail(text, "empty segment");
    }
    return path;
}

std::string JsonPath::to_string() const
{
    std::string out;
    for (const auto& step : steps) {
        switch (step.kind) {
        case PathStep::Kind::key:
            if (!out.empty()) out.push_back('.');
            out += step.key;
            break;
        case PathStep::Kind::index:
            out += '[' + std::to_string(step.index) + ']';
            break;
        case PathStep::Kind::wildcard:
            out += "[*]";
            break;
        }
    }
    return out;
}

}  // namespace billprep
