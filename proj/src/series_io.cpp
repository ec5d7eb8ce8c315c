#include "vatom/series_io.hpp"

#include "vatom/errors.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace vatom {

namespace {

class ByteWriter {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
    void bytes(const char* p, std::size_t n) { out_.append(p, n); }
    void text(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_ += s;
    }
    const std::string& str() const noexcept { return out_; }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
    std::string out_;
};

class ByteReader {
public:
    explicit ByteReader(const std::string& data) : data_(data) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(get(8)); }
    std::string text(std::size_t limit) {
        const std::uint32_t n = u32();
        if (n > limit) fail("string length " + std::to_string(n) + " is implausible");
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void expect(const char* p, std::size_t n) {
        need(n);
        if (std::memcmp(data_.data() + pos_, p, n) != 0) fail("bad magic bytes");
        pos_ += n;
    }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    [[noreturn]] void fail(const std::string& what) const { throw FormatError(what, 1, pos_); }

private:
    void need(std::size_t n) const {
        if (remaining() < n) fail("truncated series file");
    }
    std::uint64_t get(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)]))
                 << (8 * i);
        }
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    const std::string& data_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw InvalidInput("write failed for " + path.string());
}

double parse_number(const std::string& field, std::size_t line, std::size_t offset) {
    if (field.empty()) throw FormatError("empty number", line, offset);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) throw FormatError("malformed number '" + field + "'", line, offset);
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void save_series_binary(const std::filesystem::path& path, const ObservableSeries& series) {
    ByteWriter w;
    w.bytes(series_magic, sizeof series_magic);
    w.u32(series_version);
    w.u32(series.partial ? 1u : 0u);
    w.u64(series.values.size());
    w.f64(series.dt);
    w.f64(series.t0);
    w.text(series.label);
    w.text(series.origin);
    for (double v : series.values) w.f64(v);
    write_file(path, w.str());
}

ObservableSeries load_series_binary(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    ByteReader r(data);
    r.expect(series_magic, sizeof series_magic);
    const std::uint32_t version = r.u32();
    if (version != series_version) r.fail("unsupported series version " + std::to_string(version));
    ObservableSeries s;
    s.partial = (r.u32() & 1u) != 0;
    const std::uint64_t count = r.u64();
    s.dt = r.f64();
    s.t0 = r.f64();
    s.label = r.text(1u << 20);
    s.origin = r.text(1u << 20);
    if (r.remaining() != count * 8) r.fail("payload holds " + std::to_string(r.remaining()) + " bytes, expected " +
                                           std::to_string(count * 8));
    s.values.resize(count);
    for (auto& v : s.values) v = r.f64();
    return s;
}

void save_series_csv(const std::filesystem::path& path, const ObservableSeries& series) {
    std::string out;
    out.reserve(series.values.size() * 48 + 256);
    out += "# label=" + series.label + "\n";
    out += "# origin=" + series.origin + "\n";
    out += "# dt=" + format_double(series.dt) + "\n";
    out += "# t0=" + format_double(series.t0) + "\n";
    if (series.partial) out += "# partial=1\n";
    out += "t,value\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out += format_double(series.time(i));
        out += ',';
        out += format_double(series.values[i]);
        out += '\n';
    }
    write_file(path, out);
}

ObservableSeries load_series_csv(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    ObservableSeries s;
    std::vector<double> times;
    bool have_dt = false;
    bool have_t0 = false;
    bool header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < data.size()) {
        const std::size_t start = pos;
        std::size_t eol = data.find('\n', pos);
        if (eol == std::string::npos) eol = data.size();
        std::string line = data.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            if (key == "label") s.label = value;
            else if (key == "origin") s.origin = value;
            else if (key == "dt") s.dt = parse_number(value, line_no, start + eq + 1), have_dt = true;
            else if (key == "t0") s.t0 = parse_number(value, line_no, start + eq + 1), have_t0 = true;
            else if (key == "partial") s.partial = value == "1";
            continue;
        }
        if (!header) {
            if (line != "t,value") throw FormatError("expected header 't,value'", line_no, start);
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("expected two comma-separated fields", line_no, start);
        times.push_back(parse_number(line.substr(0, comma), line_no, start));
        s.values.push_back(parse_number(line.substr(comma + 1), line_no, start + comma + 1));
    }
    if (!header) throw FormatError("missing 't,value' header", line_no, data.size());
    if (!have_t0 && !times.empty()) s.t0 = times[0];
    if (!have_dt && times.size() >= 2) s.dt = times[1] - times[0];
    return s;
}

ObservableSeries load_series(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    char head[sizeof series_magic] = {};
    in.read(head, sizeof head);
    if (in.gcount() == static_cast<std::streamsize>(sizeof head) && std::memcmp(head, series_magic, sizeof head) == 0) {
        return load_series_binary(path);
    }
    return load_series_csv(path);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

}  // namespace vatom
