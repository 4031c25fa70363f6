#include "stackreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace stackreg {

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& msg) {
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_line(const std::string& raw, const std::string& source,
                                    std::size_t line_no) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty()) parse_fail(source, line_no, "stray quote in field");
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) parse_fail(source, line_no, "unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& source, std::size_t line,
                    const std::string& column) {
    const std::string t = trim(field);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last) {
        parse_fail(source, line, "column '" + column + "': not a number: '" + t + "'");
    }
    if (!std::isfinite(v)) parse_fail(source, line, "column '" + column + "': non-finite value");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

PredictionsFile read_predictions_csv(std::istream& in, TargetColumn target_rule,
                                     const std::string& source) {
    std::string raw;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!trim(raw).empty() && trim(raw) != "\r") {
            header = split_line(raw, source, line_no);
            break;
        }
    }
    if (header.empty()) parse_fail(source, line_no, "empty file");
    for (auto& h : header) h = trim(h);
    if (header.front() != "id") parse_fail(source, line_no, "first column must be 'id'");

    const bool has_target = header.size() > 1 && header[1] == "target";
    if (!has_target && target_rule == TargetColumn::Required) {
        throw Error(ErrorKind::Parse, source + ": target column required");
    }
    if (has_target && target_rule == TargetColumn::Forbidden) {
        throw Error(ErrorKind::Parse, source + ": test file must not contain a target column");
    }
    const std::size_t first_model = has_target ? 2 : 1;
    std::set<std::string> seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty()) parse_fail(source, line_no, "empty column name");
        if (!seen.insert(header[c]).second) {
            parse_fail(source, line_no, "duplicate column '" + header[c] + "'");
        }
    }
    if (header.size() <= first_model) {
        throw Error(ErrorKind::Selection, source + ": no model columns");
    }

    PredictionsFile out;
    const std::size_t K = header.size() - first_model;
    std::vector<std::vector<double>> cols(K);
    std::vector<double> target;
    while (std::getline(in, raw)) {
        ++line_no;
        if (trim(raw).empty() || raw == "\r") continue;
        auto f = split_line(raw, source, line_no);
        if (f.size() != header.size()) {
            parse_fail(source, line_no, "expected " + std::to_string(header.size()) +
                                            " fields, found " + std::to_string(f.size()));
        }
        out.ids.push_back(trim(f[0]));
        if (has_target) target.push_back(parse_number(f[1], source, line_no, "target"));
        for (std::size_t k = 0; k < K; ++k) {
            cols[k].push_back(parse_number(f[first_model + k], source, line_no, header[first_model + k]));
        }
    }
    if (out.ids.empty()) parse_fail(source, line_no, "no data rows");
    std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(first_model),
                                   header.end());
    out.predictions = PredictionMatrix(std::move(names), cols);
    if (has_target) out.target = std::move(target);
    return out;
}

PredictionsFile read_predictions_csv(const std::string& path, TargetColumn target_rule) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
    return read_predictions_csv(in, target_rule, path);
}

void write_predictions_csv(std::ostream& out, const PredictionsFile& file) {
    const auto& p = file.predictions;
    require_same_length(file.ids.size(), p.n_rows(), "ids vs prediction rows");
    if (file.target) require_same_length(file.target->size(), p.n_rows(), "target vs prediction rows");
    out << "id";
    if (file.target) out << ",target";
    for (const auto& n : p.names()) out << ',' << csv_field(n);
    out << '\n';
    for (std::size_t i = 0; i < p.n_rows(); ++i) {
        out << csv_field(file.ids[i]);
        if (file.target) out << ',' << format_double((*file.target)[i]);
        for (std::size_t k = 0; k < p.n_models(); ++k) out << ',' << format_double(p.column(k)[i]);
        out << '\n';
    }
}

void write_predictions_csv(const std::string& path, const PredictionsFile& file) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path + "'");
    write_predictions_csv(out, file);
    if (!out) throw Error(ErrorKind::Parse, "write failed for '" + path + "'");
}

}  // namespace stackreg
