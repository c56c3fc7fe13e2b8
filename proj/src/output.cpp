#include "relepr/output.hpp"

#include <charconv>
#include <cmath>
#include "json.hpp"

#include "relepr/errors.hpp"

namespace relepr {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json number_or_null(const std::optional<double>& v, int digits)
{
    if (!v || std::isnan(*v)) return nullptr;
    return round_digits(*v, digits);
}

std::string cell(const std::optional<double>& v, int digits) { return v ? format_number(*v, digits) : ""; }

}  // namespace

std::string format_number(double value, int digits)
{
    if (std::isnan(value)) return "";
    if (value == 0.0) value = 0.0;  // no "-0"
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (digits < 1 || digits > 17) throw UsageError("digits must lie in [1, 17]");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

double round_digits(double value, int digits)
{
    if (!std::isfinite(value)) return value;
    if (value == 0.0) return 0.0;
    const std::string text = format_number(value, digits);
    double out = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), out);
    return out;
}

Format parse_format(std::string_view name)
{
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw UsageError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

std::string_view extension(Format format) { return format == Format::csv ? ".csv" : ".json"; }

void write_csv(std::ostream& out, const Dataset& data, int digits)
{
    for (const auto& [key, value] : data.header) out << "# " << key << ": " << value << '\n';
    out << "v,param,model,C,delta,extra\n";
    for (const DataRow& r : data.rows) {
        out << cell(r.v, digits) << ',' << cell(r.param, digits) << ',' << r.model << ','
            << cell(r.c, digits) << ',' << cell(r.delta, digits) << ',' << cell(r.extra, digits) << '\n';
    }
}

void write_json(std::ostream& out, const Dataset& data, int digits)
{
    ordered_json doc;
    ordered_json header = ordered_json::object();
    for (const auto& [key, value] : data.header) header[key] = value;
    doc["header"] = std::move(header);
    ordered_json rows = ordered_json::array();
    for (const DataRow& r : data.rows) {
        ordered_json row;
        row["v"] = number_or_null(r.v, digits);
        row["param"] = number_or_null(r.param, digits);
        row["model"] = r.model;
        row["C"] = number_or_null(r.c, digits);
        row["delta"] = number_or_null(r.delta, digits);
        row["extra"] = number_or_null(r.extra, digits);
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(1) << '\n';
}

void write_dataset(std::ostream& out, const Dataset& data, Format format, int digits)
{
    if (format == Format::csv) {
        write_csv(out, data, digits);
    } else {
        write_json(out, data, digits);
    }
}

Dataset to_dataset(const ScanSpec& spec, const ScanTable& table)
{
    Dataset data;
    const std::string_view angle = preset_angle_name(spec.problem.preset);
    std::optional<std::size_t> v_col;
    std::optional<std::size_t> param_col;
    for (std::size_t i = 0; i < table.param_names.size(); ++i) {
        if (table.param_names[i] == "v") v_col = i;
        else if (!angle.empty() && table.param_names[i] == angle) param_col = i;
    }
    const auto fixed = [&](std::string_view name) -> std::optional<double> {
        if (name.empty()) return std::nullopt;
        if (auto it = spec.problem.fixed.find(name); it != spec.problem.fixed.end()) return it->second;
        return std::nullopt;
    };

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const ScanRow& row = table.rows[i];
        DataRow out;
        out.v = v_col ? std::optional(row.params[*v_col]) : fixed("v");
        out.param = param_col ? std::optional(row.params[*param_col]) : fixed(angle);
        out.model = row.series;
        if (row.ok()) {
            out.c = row.eval.c;
            out.delta = row.eval.delta;
            out.extra = row.eval.extra;
        } else {
            data.header.emplace_back("error row " + std::to_string(i), row.error);
        }
        data.rows.push_back(std::move(out));
    }
    return data;
}

std::string batch_record_json(const SampleBatch& batch, int digits)
{
    const CorrelationEstimate est = estimate_correlation(batch.counts);
    const auto vec = [&](const Vec3& v) {
        return ordered_json::array({round_digits(v.x, digits), round_digits(v.y, digits), round_digits(v.z, digits)});
    };
    ordered_json geometry;
    geometry["a"] = vec(batch.geometry.a);
    geometry["b"] = vec(batch.geometry.b);
    geometry["vA"] = vec(batch.geometry.frames.v_a);
    geometry["vB"] = vec(batch.geometry.frames.v_b);
    geometry["uA"] = vec(batch.geometry.frames.u_a);
    geometry["vrel"] = vec(batch.geometry.frames.v_rel);

    ordered_json doc;
    doc["model"] = batch.model.name();
    doc["geometry"] = std::move(geometry);
    doc["seed"] = batch.seed;
    doc["N"] = batch.events;
    doc["counts"] = batch.counts;
    doc["C"] = round_digits(batch.correlation, digits);
    doc["C_hat"] = round_digits(est.value, digits);
    doc["stderr"] = round_digits(est.standard_error, digits);
    doc["prng"] = std::string(kPrngAlgorithm);
    return doc.dump(1);
}

}  // namespace relepr
