#include "succor/csv.hpp"

#include "succor/error.hpp"

namespace succor::csv {

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool row_open = false;

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty())
                fail(ErrorCode::Validation, "stray quote inside unquoted CSV field");
            quoted = true;
            row_open = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            row_open = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n')
                break;
            [[fallthrough]];
        case '\n':
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            row_open = false;
            break;
        default:
            field.push_back(c);
            row_open = true;
        }
    }
    if (quoted)
        fail(ErrorCode::Validation, "unterminated quoted CSV field");
    if (row_open) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

void append_row(std::string& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
            out.push_back(',');
        const auto& f = row[i];
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            out += f;
            continue;
        }
        out.push_back('"');
        for (char c : f) {
            if (c == '"')
                out.push_back('"');
            out.push_back(c);
        }
        out.push_back('"');
    }
    out.push_back('\n');
}

}  // namespace succor::csv
