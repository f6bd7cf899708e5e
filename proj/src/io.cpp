#include "kgcascade/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "kgcascade/errors.hpp"

namespace kgc {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    return out;
}

void check_written(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

void check_shape(const Series& s, const std::string& path) {
    for (const auto& r : s.rows)
        if (r.size() != s.columns.size()) throw IoError(path, "row width does not match the column count");
}

std::string json_value(double v) {
    if (std::isnan(v)) return "\"NaN\"";
    if (std::isinf(v)) return v > 0 ? "\"Infinity\"" : "\"-Infinity\"";
    // A bare "-0" would be read back as the integer 0.
    if (v == 0.0 && std::signbit(v)) return "-0.0";
    return format_double(v);
}

double parse_number(const std::string& text, const std::string& path) {
    if (text == "nan" || text == "-nan" || text == "NaN") return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::out_of_range&) {
        // Subnormals: stod reports ERANGE though the parsed value is exact.
        v = std::strtod(text.c_str(), nullptr);
        pos = text.size();
    } catch (const std::exception&) {
        throw IoError(path, "cannot parse number '" + text + "'");
    }
    if (pos != text.size()) throw IoError(path, "cannot parse number '" + text + "'");
    return v;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const Series& s) {
    check_shape(s, path);
    auto out = open_out(path);
    for (std::size_t i = 0; i < s.columns.size(); ++i) out << (i ? "," : "") << s.columns[i];
    out << '\n';
    for (const auto& r : s.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
        out << '\n';
    }
    check_written(out, path);
}

Series read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    Series s;
    std::string line;
    if (!std::getline(in, line)) return s;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) s.columns.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(parse_number(cell, path));
        if (row.size() != s.columns.size()) throw IoError(path, "row width does not match the header");
        s.rows.push_back(std::move(row));
    }
    return s;
}

void write_ndjson(const std::string& path, const Series& s) {
    check_shape(s, path);
    auto out = open_out(path);
    for (const auto& r : s.rows) {
        out << '{';
        for (std::size_t i = 0; i < r.size(); ++i)
            out << (i ? "," : "") << nlohmann::json(s.columns[i]).dump() << ':' << json_value(r[i]);
        out << "}\n";
    }
    check_written(out, path);
}

Series read_ndjson(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    Series s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::ordered_json obj;
        try {
            obj = nlohmann::ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw IoError(path, std::string("malformed NDJSON line: ") + e.what());
        }
        if (!obj.is_object()) throw IoError(path, "NDJSON line is not an object");
        if (s.columns.empty() && s.rows.empty())
            for (const auto& [k, v] : obj.items()) s.columns.push_back(k);
        std::vector<double> row;
        for (const auto& c : s.columns) {
            if (!obj.contains(c)) throw IoError(path, "NDJSON row lacks column '" + c + "'");
            const auto& v = obj[c];
            if (v.is_number()) {
                row.push_back(v.get<double>());
            } else if (v.is_string()) {
                const auto t = v.get<std::string>();
                if (t == "NaN") row.push_back(std::numeric_limits<double>::quiet_NaN());
                else if (t == "Infinity") row.push_back(std::numeric_limits<double>::infinity());
                else if (t == "-Infinity") row.push_back(-std::numeric_limits<double>::infinity());
                else throw IoError(path, "unexpected string value '" + t + "'");
            } else {
                throw IoError(path, "NDJSON value for '" + c + "' is not a number");
            }
        }
        s.rows.push_back(std::move(row));
    }
    return s;
}

void emit_spectrum_series(const std::string& path, const Series& s, const std::string& format) {
    if (format == "csv") write_csv(path, s);
    else if (format == "ndjson") write_ndjson(path, s);
    else throw IoError(path, "unknown output format '" + format + "'");
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError(path, "SHA-256 init failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0 && EVP_DigestUpdate(ctx.get(), buf, std::size_t(in.gcount())) != 1)
            throw IoError(path, "SHA-256 update failed");
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw IoError(path, "SHA-256 final failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

} // namespace kgc
