#include "ballidx/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

namespace ballidx {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    for (;;) {
        const auto comma = line.find(',', begin);
        out.push_back(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin));
        if (comma == std::string_view::npos) break;
        begin = comma + 1;
    }
    return out;
}

} // namespace

Dataset parse_csv(std::istream& in, std::string_view source_name) {
    const std::string where(source_name);
    std::vector<double> flat;
    std::size_t dim = 0;
    bool seen_content = false;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) continue;

        const auto tokens = split_commas(body);
        std::vector<double> row;
        row.reserve(tokens.size());
        std::optional<std::size_t> bad_token;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (auto v = parse_real(tokens[i]))
                row.push_back(*v);
            else if (!bad_token)
                bad_token = i;
        }

        if (bad_token) {
            if (!seen_content) {  // header line
                seen_content = true;
                continue;
            }
            throw data_error(where + ":" + std::to_string(line_no) + ": non-numeric value '" +
                             std::string(trim(tokens[*bad_token])) + "' in column " + std::to_string(*bad_token + 1));
        }
        seen_content = true;
        for (std::size_t i = 0; i < row.size(); ++i)
            if (!std::isfinite(row[i]))
                throw data_error(where + ":" + std::to_string(line_no) + ": non-finite value in column " +
                                 std::to_string(i + 1));
        if (dim == 0) dim = row.size();
        if (row.size() != dim)
            throw data_error(where + ":" + std::to_string(line_no) + ": row has " + std::to_string(row.size()) +
                             " values, expected " + std::to_string(dim));
        flat.insert(flat.end(), row.begin(), row.end());
    }
    if (dim == 0) throw data_error(where + ": no data rows");
    return Dataset(dim, std::move(flat));
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "' for reading");
    return parse_csv(in, path);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw internal_error("failed to format a double");
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& ds) {
    for (ObjectId id = 0; id < ds.size(); ++id) {
        auto c = ds.coords(id);
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (j) out << ',';
            out << format_double(c[j]);
        }
        out << '\n';
    }
}

void write_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    write_csv(out, ds);
}

} // namespace ballidx
