#include "tmx/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tmx/errors.hpp"

namespace tmx {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    fs::path tmp = dir / (target.filename().string() + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open for writing: " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void JsonWriter::comma() {
    if (!first_.empty()) {
        if (!first_.back()) out_ += ",";
        first_.back() = false;
    }
}

void JsonWriter::key(const std::string& k) {
    comma();
    if (!k.empty()) out_ += "\"" + k + "\":";
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += "{";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += "}";
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& k) {
    key(k);
    first_.back() = false;
    out_ += "[";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += "]";
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& k, double v) {
    key(k);
    out_ += std::isfinite(v) ? fmt17(v) : "null";
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& k, int v) {
    key(k);
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& k, long v) {
    key(k);
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& k, bool v) {
    key(k);
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& k, const std::string& v) {
    key(k);
    out_ += "\"" + v + "\"";
    return *this;
}

JsonWriter& JsonWriter::element(double v) {
    comma();
    out_ += std::isfinite(v) ? fmt17(v) : "null";
    return *this;
}

}  // namespace tmx
