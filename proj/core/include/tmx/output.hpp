#pragma once

#include <string>
#include <vector>

namespace tmx {

/// Decimal with 17 significant digits (lossless for double round-trips).
std::string fmt17(double x);

/// Write content to path atomically (temp file in the same directory + rename).
void atomic_write(const std::string& path, const std::string& content);

/// Minimal ordered JSON emitter. Doubles are printed with fmt17 so outputs are
/// byte-deterministic; non-finite values become null.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key = "");
    JsonWriter& end_array();
    JsonWriter& field(const std::string& key, double v);
    JsonWriter& field(const std::string& key, int v);
    JsonWriter& field(const std::string& key, long v);
    JsonWriter& field(const std::string& key, bool v);
    JsonWriter& field(const std::string& key, const std::string& v);
    JsonWriter& element(double v);
    std::string str() const { return out_; }

private:
    void comma();
    void key(const std::string& k);
    std::string out_;
    std::vector<bool> first_;
};

}  // namespace tmx
