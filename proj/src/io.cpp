#include "ldscreen/io.hpp"

#include "ldscreen/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace ldscreen {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x)) return std::nullopt;
    return x;
}

std::string format_number(double x) { return fmt::format("{}", x); }

// ---------------------------------------------------------------- ARFF

struct Token {
    std::string text;
    bool quoted = false;
};

class LineLexer {
public:
    LineLexer(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

    void skip_space() {
        while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_space();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(fmt::format("expected '{}'", c));
        ++pos_;
    }
    std::string_view rest() {
        skip_space();
        return trim(s_.substr(pos_));
    }

    // A bare word ends at whitespace or one of the structural characters.
    Token word() {
        skip_space();
        if (pos_ >= s_.size()) fail("unexpected end of line");
        const char c = s_[pos_];
        if (c == '\'' || c == '"') return quoted(c);
        const auto start = pos_;
        while (pos_ < s_.size() && !is_space(s_[pos_]) && s_[pos_] != ',' && s_[pos_] != '{' && s_[pos_] != '}')
            ++pos_;
        if (pos_ == start) fail(fmt::format("unexpected '{}'", c));
        return Token{std::string(s_.substr(start, pos_ - start)), false};
    }

    // A list item or data cell: quoted, or everything up to the next ',' or
    // '}' with surrounding whitespace removed.
    Token cell() {
        skip_space();
        if (pos_ < s_.size() && (s_[pos_] == '\'' || s_[pos_] == '"')) return quoted(s_[pos_]);
        const auto start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '}') ++pos_;
        return Token{std::string(trim(s_.substr(start, pos_ - start))), false};
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no_); }

private:
    Token quoted(char q) {
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != q) {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
            out.push_back(s_[pos_++]);
        }
        if (pos_ >= s_.size()) fail("unterminated quoted string");
        ++pos_;
        return Token{std::move(out), true};
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_no_;
};

// Removes a '%' comment that starts outside of quotes.
std::string_view strip_comment(std::string_view line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == '\\') ++i;
            else if (c == quote) quote = 0;
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == '%') {
            return line.substr(0, i);
        }
    }
    return line;
}

bool needs_arff_quotes(std::string_view s) {
    if (s.empty() || s == "?") return true;
    return std::any_of(s.begin(), s.end(), [](char c) {
        return is_space(c) || c == ',' || c == '{' || c == '}' || c == '\'' || c == '"' || c == '%' || c == '\\';
    });
}

std::string arff_quote(std::string_view s) {
    if (!needs_arff_quotes(s)) return std::string(s);
    std::string out = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

Value parse_cell(const Token& tok, const AttributeSpec& spec, std::size_t line_no) {
    if (!tok.quoted && tok.text == "?") return Value::missing();
    if (spec.is_numeric()) {
        const auto x = parse_number(tok.text);
        if (!x) throw ParseError("non-numeric value '" + tok.text + "' for attribute '" + spec.name + "'", line_no);
        return Value::of_number(*x);
    }
    const auto idx = spec.find_value(tok.text);
    if (!idx) throw ParseError("undeclared value '" + tok.text + "' for attribute '" + spec.name + "'", line_no);
    return Value::of_symbol(*idx);
}

// ---------------------------------------------------------------- CSV

struct CsvField {
    std::string text;
    bool quoted = false;
};

struct CsvRecord {
    std::vector<CsvField> fields;
    std::size_t line = 0;
};

std::vector<CsvRecord> split_csv(std::string_view text) {
    std::vector<CsvRecord> records;
    CsvRecord rec;
    CsvField field;
    std::size_t line = 1;
    rec.line = line;
    bool in_quotes = false;
    bool after_quote = false;

    auto end_field = [&] {
        if (!field.quoted) field.text = std::string(trim(field.text));
        rec.fields.push_back(std::move(field));
        field = CsvField{};
        after_quote = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = rec.fields.size() == 1 && !rec.fields[0].quoted && rec.fields[0].text.empty();
        if (!blank) records.push_back(std::move(rec));
        rec = CsvRecord{};
        rec.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.text.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field.text.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            ++line;
            end_record();
        } else if (c == '"' && !after_quote && trim(field.text).empty()) {
            field.text.clear();
            field.quoted = true;
            in_quotes = true;
        } else if (after_quote) {
            if (!is_space(c)) throw ParseError("unexpected character after closing quote", line);
        } else {
            field.text.push_back(c);
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line);
    if (!field.text.empty() || field.quoted || !rec.fields.empty()) end_record();
    return records;
}

bool csv_missing(const CsvField& f) { return !f.quoted && (f.text.empty() || f.text == "?"); }

std::string csv_quote(std::string_view s) {
    const bool plain = !s.empty() && s != "?" && !is_space(s.front()) && !is_space(s.back()) &&
                       s.find_first_of(",\"\r\n") == std::string_view::npos;
    if (plain) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<Instance> csv_rows(const std::vector<CsvRecord>& records, std::size_t first, const Schema& schema) {
    std::vector<Instance> out;
    for (std::size_t r = first; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != schema.size()) {
            throw ParseError(fmt::format("row has {} fields, expected {}", rec.fields.size(), schema.size()), rec.line);
        }
        Instance x;
        x.values.reserve(schema.size());
        for (std::size_t a = 0; a < schema.size(); ++a) {
            const auto& f = rec.fields[a];
            const auto& spec = schema.attribute(a);
            if (csv_missing(f)) {
                x.values.push_back(Value::missing());
            } else if (spec.is_numeric()) {
                const auto v = parse_number(f.text);
                if (!v) throw ParseError("non-numeric token '" + f.text + "' in column '" + spec.name + "'", rec.line);
                x.values.push_back(Value::of_number(*v));
            } else {
                const auto idx = spec.find_value(f.text);
                if (!idx) throw ParseError("undeclared value '" + f.text + "' in column '" + spec.name + "'", rec.line);
                x.values.push_back(Value::of_symbol(*idx));
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

} // namespace

Dataset parse_arff(std::string_view text) {
    std::string relation;
    bool seen_relation = false;
    bool in_data = false;
    std::vector<AttributeSpec> attrs;
    std::vector<Instance> rows;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        LineLexer lex(line, line_no);

        if (!in_data) {
            if (line.front() != '@') lex.fail("expected a declaration");
            const auto keyword = lex.word().text;
            if (iequals(keyword, "@relation")) {
                if (seen_relation) lex.fail("duplicate @relation");
                if (!attrs.empty()) lex.fail("@relation must precede @attribute");
                relation = lex.word().text;
                seen_relation = true;
            } else if (iequals(keyword, "@attribute")) {
                if (!seen_relation) lex.fail("@attribute before @relation");
                auto name = lex.word().text;
                if (lex.peek() == '{') {
                    lex.expect('{');
                    std::vector<std::string> values;
                    if (lex.peek() != '}') {
                        while (true) {
                            auto v = lex.cell();
                            if (v.text.empty() && !v.quoted) lex.fail("empty nominal value");
                            values.push_back(std::move(v.text));
                            if (lex.peek() == ',') {
                                lex.expect(',');
                                continue;
                            }
                            break;
                        }
                    }
                    lex.expect('}');
                    if (!lex.at_end()) lex.fail("trailing text after nominal value list");
                    attrs.push_back(AttributeSpec::categorical(std::move(name), std::move(values)));
                } else {
                    const auto type = lex.word().text;
                    if (iequals(type, "numeric") || iequals(type, "real") || iequals(type, "integer")) {
                        attrs.push_back(AttributeSpec::numeric(std::move(name)));
                    } else {
                        lex.fail("unsupported attribute type '" + type + "'");
                    }
                    if (!lex.at_end()) lex.fail("trailing text after attribute type");
                }
            } else if (iequals(keyword, "@data")) {
                if (attrs.empty()) lex.fail("@data before any @attribute");
                if (!lex.at_end()) lex.fail("trailing text after @data");
                in_data = true;
            } else {
                lex.fail("unknown declaration '" + keyword + "'");
            }
            continue;
        }

        if (line.front() == '{') lex.fail("sparse rows are not supported");
        Instance x;
        x.values.reserve(attrs.size());
        while (true) {
            const auto tok = lex.cell();
            if (x.values.size() >= attrs.size()) {
                lex.fail(fmt::format("row has more than {} values", attrs.size()));
            }
            x.values.push_back(parse_cell(tok, attrs[x.values.size()], line_no));
            if (lex.at_end()) break;
            lex.expect(',');
        }
        if (x.values.size() != attrs.size()) {
            lex.fail(fmt::format("row has {} values, expected {}", x.values.size(), attrs.size()));
        }
        rows.push_back(std::move(x));
    }

    if (!seen_relation) throw ParseError("missing @relation", 0);
    if (!in_data) throw ParseError("missing @data section", 0);

    std::optional<std::size_t> class_index;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (attrs[i].is_categorical()) class_index = i;
    }
    if (!class_index) throw ParseError("no nominal attribute to use as class", 0);
    try {
        Schema schema(std::move(attrs), *class_index);
        return Dataset(std::move(relation), std::move(schema), std::move(rows));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), 0);
    }
}

std::string write_arff(const Dataset& d) {
    std::string out = "@relation " + arff_quote(d.relation()) + "\n\n";
    for (const auto& a : d.schema().attributes()) {
        out += "@attribute " + arff_quote(a.name) + " ";
        if (a.is_numeric()) {
            out += "numeric";
        } else {
            out += "{";
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                if (i) out += ",";
                out += arff_quote(a.values[i]);
            }
            out += "}";
        }
        out += "\n";
    }
    out += "\n@data\n";
    for (const auto& x : d.instances()) {
        for (std::size_t i = 0; i < x.values.size(); ++i) {
            if (i) out += ",";
            const auto& v = x.values[i];
            if (v.is_missing()) out += "?";
            else if (v.is_number()) out += format_number(v.number());
            else out += arff_quote(d.schema().attribute(i).values[v.symbol()]);
        }
        out += "\n";
    }
    return out;
}

Dataset parse_csv(std::string_view text, const Schema& schema, bool has_header) {
    const auto records = split_csv(text);
    std::size_t first = 0;
    if (has_header) {
        if (records.empty()) throw ParseError("missing header row", 1);
        const auto& header = records.front();
        if (header.fields.size() != schema.size()) {
            throw ParseError(fmt::format("header has {} columns, schema has {}", header.fields.size(), schema.size()),
                             header.line);
        }
        for (std::size_t a = 0; a < schema.size(); ++a) {
            if (header.fields[a].text != schema.attribute(a).name) {
                throw ParseError("header column '" + header.fields[a].text + "' does not match attribute '" +
                                     schema.attribute(a).name + "'",
                                 header.line);
            }
        }
        first = 1;
    }
    return Dataset("data", schema, csv_rows(records, first, schema));
}

Dataset parse_csv(std::string_view text, bool has_header) {
    const auto records = split_csv(text);
    if (records.empty()) throw ParseError("empty CSV input", 1);
    const std::size_t width = records.front().fields.size();
    for (const auto& rec : records) {
        if (rec.fields.size() != width) {
            throw ParseError(fmt::format("row has {} fields, expected {}", rec.fields.size(), width), rec.line);
        }
    }
    const std::size_t first = has_header ? 1 : 0;

    std::vector<AttributeSpec> attrs;
    std::optional<std::size_t> class_index;
    for (std::size_t a = 0; a < width; ++a) {
        std::string name = has_header ? records.front().fields[a].text : fmt::format("attr{}", a + 1);
        bool numeric = true;
        std::vector<std::string> symbols;
        for (std::size_t r = first; r < records.size(); ++r) {
            const auto& f = records[r].fields[a];
            if (csv_missing(f)) continue;
            if (f.quoted || !parse_number(f.text)) numeric = false;
            if (std::find(symbols.begin(), symbols.end(), f.text) == symbols.end()) symbols.push_back(f.text);
        }
        if (numeric) {
            attrs.push_back(AttributeSpec::numeric(std::move(name)));
        } else {
            attrs.push_back(AttributeSpec::categorical(std::move(name), std::move(symbols)));
            class_index = a;
        }
    }
    if (!class_index) throw ParseError("no categorical column to use as class", 0);
    try {
        Schema schema(std::move(attrs), *class_index);
        auto rows = csv_rows(records, first, schema);
        return Dataset("data", std::move(schema), std::move(rows));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), 0);
    }
}

std::string write_csv(const Dataset& d, bool header) {
    std::string out;
    const auto& schema = d.schema();
    if (header) {
        for (std::size_t a = 0; a < schema.size(); ++a) {
            if (a) out += ",";
            out += csv_quote(schema.attribute(a).name);
        }
        out += "\n";
    }
    for (const auto& x : d.instances()) {
        for (std::size_t a = 0; a < x.values.size(); ++a) {
            if (a) out += ",";
            const auto& v = x.values[a];
            if (v.is_missing()) out += "?";
            else if (v.is_number()) out += format_number(v.number());
            else out += csv_quote(schema.attribute(a).values[v.symbol()]);
        }
        out += "\n";
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

} // namespace ldscreen
