#include "qlidar/io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <variant>

namespace qlidar {

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using RealField = double ProtocolConfig::*;
using SizeField = std::size_t ProtocolConfig::*;
static_assert(std::is_same_v<std::size_t, std::uint64_t>, "config integers share one type");

struct Field {
    const char* name;
    std::variant<RealField, SizeField> member;
};

const Field kFields[] = {
    {"modulation_variance", &ProtocolConfig::modulation_variance},
    {"frame_length", &ProtocolConfig::frame_length},
    {"receive_window_length", &ProtocolConfig::receive_window_length},
    {"ranging_length", &ProtocolConfig::ranging_length},
    {"channel_transmittance", &ProtocolConfig::channel_transmittance},
    {"target_reflectivity", &ProtocolConfig::target_reflectivity},
    {"detector_efficiency", &ProtocolConfig::detector_efficiency},
    {"detector_noise", &ProtocolConfig::detector_noise},
    {"excess_noise", &ProtocolConfig::excess_noise},
    {"spoofer_gain", &ProtocolConfig::spoofer_gain},
    {"phase_drift", &ProtocolConfig::phase_drift},
    {"true_delay", &ProtocolConfig::true_delay},
    {"correlation_threshold_sigma", &ProtocolConfig::correlation_threshold_sigma},
    {"excess_noise_threshold", &ProtocolConfig::excess_noise_threshold},
    {"rng_seed", &ProtocolConfig::rng_seed},
};

template <typename Int>
Int parse_unsigned(const std::string& text) {
    Int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("not a non-negative integer: '" + text + "'");
    return v;
}

}  // namespace

ProtocolConfig parse_config(std::istream& in) {
    auto config = ProtocolConfig::paper_defaults();
    std::vector<std::string> errors;
    std::set<std::string> seen;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) {
            errors.push_back(where + "expected key = value");
            continue;
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const Field* field = nullptr;
        for (const auto& f : kFields)
            if (key == f.name) field = &f;
        if (!field) {
            errors.push_back(where + "unknown key '" + key + "'");
            continue;
        }
        if (!seen.insert(key).second) {
            errors.push_back(where + "duplicate key '" + key + "'");
            continue;
        }
        try {
            std::visit(
                [&](auto member) {
                    using T = std::remove_cvref_t<decltype(config.*member)>;
                    if constexpr (std::is_same_v<T, double>)
                        config.*member = parse_number(value);
                    else
                        config.*member = parse_unsigned<T>(value);
                },
                field->member);
        } catch (const std::exception& e) {
            errors.push_back(where + key + ": " + e.what());
        }
    }
    if (!seen.count("receive_window_length")) fit_receive_window(config);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return config;
}

ProtocolConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file " + path.string()});
    return parse_config(in);
}

std::string format_config(const ProtocolConfig& config) {
    std::ostringstream out;
    for (const auto& f : kFields) {
        out << f.name << " = ";
        std::visit(
            [&](auto member) {
                using T = std::remove_cvref_t<decltype(config.*member)>;
                if constexpr (std::is_same_v<T, double>)
                    out << format_number(config.*member);
                else
                    out << config.*member;
            },
            f.member);
        out << '\n';
    }
    return out.str();
}

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what) {}

CsvText::CsvText(std::string header) : text_(std::move(header) + "\n") {}

void CsvText::add_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    ++rows_;
}

CsvText roc_csv(const std::vector<RocRecord>& records) {
    CsvText csv(kRocHeader);
    for (const auto& r : records)
        csv.add_row({format_number(r.threshold), format_number(r.p_fa), format_number(r.p_d),
                     r.scenario, r.source});
    return csv;
}

std::vector<RocRecord> parse_roc_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRocHeader)
        throw std::invalid_argument("missing ROC header line");
    std::vector<RocRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 5) throw std::invalid_argument("ROC row needs 5 columns: " + line);
        out.push_back({parse_number(cells[0]), parse_number(cells[1]), parse_number(cells[2]),
                       cells[3], cells[4]});
    }
    return out;
}

CsvText table_csv(const Table& table) {
    CsvText csv(kTableHeader);
    for (const auto& r : table.rows) csv.add_row({format_number(r.x), format_number(r.y), r.series});
    return csv;
}

CsvText profile_csv(const CorrelationProfile& profile) {
    CsvText csv(kProfileHeader);
    for (std::size_t d = 0; d < profile.size(); ++d)
        csv.add_row({std::to_string(d), format_number(profile.c1[d]), format_number(profile.c2[d])});
    return csv;
}

CsvText frame_csv(const TransmitFrame& frame, const ReceiveFrame& receive) {
    CsvText csv(kFrameHeader);
    const std::size_t n = std::max(frame.size(), receive.measurements.size());
    for (std::size_t j = 0; j < n; ++j) {
        const bool tx = j < frame.size();
        const bool rx = j < receive.measurements.size();
        csv.add_row({std::to_string(j), tx ? format_number(frame.x[j]) : "",
                     tx ? format_number(frame.p[j]) : "",
                     j < frame.basis.size() ? std::to_string(frame.basis[j]) : "",
                     rx ? format_number(receive.measurements[j]) : ""});
    }
    return csv;
}

OutputDirectory::OutputDirectory(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError(dir_, "cannot create directory: " + ec.message());
}

void OutputDirectory::write(const std::string& name, const CsvText& csv) {
    write_text(name, csv.text(), csv.rows());
}

void OutputDirectory::write_text(const std::string& name, const std::string& text,
                                 std::size_t rows) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << text;
    out.close();
    if (!out) throw IoError(path, "write failed");
    entries_.push_back({name, rows});
}

void OutputDirectory::write_manifest() {
    std::string text = "# file rows\n";
    for (const auto& e : entries_) text += e.name + " " + std::to_string(e.rows) + "\n";
    const auto path = dir_ / "manifest.txt";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << text;
    if (!out) throw IoError(path, "write failed");
}

}  // namespace qlidar
