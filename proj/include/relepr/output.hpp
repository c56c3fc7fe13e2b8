#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "relepr/sampling.hpp"
#include "relepr/search.hpp"

namespace relepr {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kDefaultDigits = 9;

/// Shortest decimal that round-trips after rounding to `digits` significant
/// digits; "." separator, no locale. NaN gives "".
std::string format_number(double value, int digits = kDefaultDigits);

/// Value after rounding to `digits` significant digits.
double round_digits(double value, int digits);

/// One output row, schema `v,param,model,C,delta,extra`.
struct DataRow {
    std::optional<double> v;
    std::optional<double> param;
    std::string model;
    std::optional<double> c;
    std::optional<double> delta;
    std::optional<double> extra;
};

struct Dataset {
    /// Written as "# key: value" lines (CSV) or a "header" object (JSON).
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<DataRow> rows;
};

enum class Format { csv, json };

Format parse_format(std::string_view name);
std::string_view extension(Format format);

void write_csv(std::ostream& out, const Dataset& data, int digits = kDefaultDigits);
/// {"header": {...}, "rows": [{"v":..,"param":..,"model":..,"C":..,"delta":..,"extra":..}]}
void write_json(std::ostream& out, const Dataset& data, int digits = kDefaultDigits);
void write_dataset(std::ostream& out, const Dataset& data, Format format,
                   int digits = kDefaultDigits);

/// Converts scan rows; "v" and the preset angle fill the v/param columns.
Dataset to_dataset(const ScanSpec& spec, const ScanTable& table);

/// {model, geometry, seed, N, counts, C_hat, stderr, prng}
std::string batch_record_json(const SampleBatch& batch, int digits = kDefaultDigits);

}  // namespace relepr
