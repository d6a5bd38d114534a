// Config files and the columnar text formats written by the harness.

#pragma once

#include "qlidar/core.hpp"
#include "qlidar/optics.hpp"
#include "qlidar/ranging.hpp"
#include "qlidar/sweep.hpp"

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlidar {

/// Flat `key = value` text, one ProtocolConfig field per line, `#` comments.
/// Unknown or repeated keys are errors; absent keys keep paper_defaults(), and
/// an absent receive_window_length is sized by default_receive_window().
/// Throws ConfigError.
ProtocolConfig parse_config(std::istream& in);
ProtocolConfig load_config(const std::filesystem::path& path);
std::string format_config(const ProtocolConfig& config);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
double parse_number(const std::string& text);

class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what);
};

struct RocRecord {
    double threshold;
    double p_fa;
    double p_d;
    std::string scenario;  // "target" or "security"
    std::string source;    // "analytic" or "montecarlo"

    bool operator==(const RocRecord&) const = default;
};

inline constexpr const char* kRocHeader = "threshold,p_fa,p_d,scenario,source";
inline constexpr const char* kTableHeader = "x,y,series";
inline constexpr const char* kProfileHeader = "lag,c1,c2";
inline constexpr const char* kFrameHeader = "index,X_T,P_T,B,R";

/// A CSV body with its header line; rows() counts data lines.
class CsvText {
public:
    explicit CsvText(std::string header);
    void add_row(const std::vector<std::string>& cells);
    const std::string& text() const noexcept { return text_; }
    std::size_t rows() const noexcept { return rows_; }

private:
    std::string text_;
    std::size_t rows_ = 0;
};

CsvText roc_csv(const std::vector<RocRecord>& records);
std::vector<RocRecord> parse_roc_csv(std::istream& in);
CsvText table_csv(const Table& table);
CsvText profile_csv(const CorrelationProfile& profile);
/// Rows over max(M, M'); X_T and P_T are blank past the frame.
CsvText frame_csv(const TransmitFrame& frame, const ReceiveFrame& receive);

/// Writes files into one directory and records them for manifest.txt.
class OutputDirectory {
public:
    explicit OutputDirectory(std::filesystem::path dir);

    void write(const std::string& name, const CsvText& csv);
    void write_text(const std::string& name, const std::string& text, std::size_t rows);
    /// Writes manifest.txt listing every file written so far with its rows.
    void write_manifest();

    const std::filesystem::path& path() const noexcept { return dir_; }

private:
    struct Entry {
        std::string name;
        std::size_t rows;
    };
    std::filesystem::path dir_;
    std::vector<Entry> entries_;
};

}  // namespace qlidar
