#include "ineq/microdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "ineq/errors.hpp"
#include "ineq/numeric.hpp"
#include "csv_fields.hpp"

namespace ineq {

using namespace detail;

// ---------------------------------------------------------------------------
// ImplicateView

std::size_t ImplicateView::size() const noexcept { return data_->size(); }
std::span<const std::int64_t> ImplicateView::ids() const noexcept { return data_->ids(); }
std::span<const double> ImplicateView::weights() const noexcept { return data_->weights(m_); }
std::span<const double> ImplicateView::values(std::string_view variable) const {
    return data_->values(m_, variable);
}
std::span<const double> ImplicateView::values(std::size_t variable) const noexcept {
    return data_->values(m_, variable);
}
double ImplicateView::population_total() const noexcept { return data_->population_total(m_); }

// ---------------------------------------------------------------------------
// MicrodataSet

MicrodataSet MicrodataSet::from_records(std::vector<MicrodataRecord> records,
                                        std::vector<std::string> variables,
                                        bool stratified) {
    if (records.empty()) throw ValidationError("microdata has no rows");

    for (const auto& r : records) {
        const auto where = r.source_row ? "row " + std::to_string(r.source_row) : "id " + std::to_string(r.id);
        if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
            throw ValidationError("nonpositive or nonfinite weight at " + where);
        }
        if (r.implicate < 1) throw ValidationError("implicate index must be >= 1 at " + where);
        if (stratified && !r.stratum) throw ValidationError("missing stratum at " + where);
        if (r.values.size() != variables.size()) {
            throw ValidationError("value count mismatch at " + where);
        }
    }

    int max_implicate = 0;
    for (const auto& r : records) max_implicate = std::max(max_implicate, r.implicate);
    const auto M = static_cast<std::size_t>(max_implicate);

    std::vector<std::vector<const MicrodataRecord*>> groups(M);
    for (const auto& r : records) groups[static_cast<std::size_t>(r.implicate - 1)].push_back(&r);
    for (std::size_t m = 0; m < M; ++m) {
        if (groups[m].empty()) {
            throw ValidationError("implicate indices must form 1..M; implicate " + std::to_string(m + 1) +
                                  " is empty");
        }
        if (groups[m].size() != groups[0].size()) {
            throw ValidationError("unequal implicate sizes: implicate 1 has " + std::to_string(groups[0].size()) +
                                  " rows, implicate " + std::to_string(m + 1) + " has " +
                                  std::to_string(groups[m].size()));
        }
        std::stable_sort(groups[m].begin(), groups[m].end(),
                         [](const auto* a, const auto* b) { return a->id < b->id; });
        for (std::size_t i = 1; i < groups[m].size(); ++i) {
            if (groups[m][i]->id == groups[m][i - 1]->id) {
                throw ValidationError("duplicate id " + std::to_string(groups[m][i]->id) + " in implicate " +
                                      std::to_string(m + 1));
            }
        }
    }

    MicrodataSet out;
    const std::size_t n = groups[0].size();
    out.variables_ = std::move(variables);
    out.ids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.ids_[i] = groups[0][i]->id;
    if (stratified) {
        out.strata_.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.strata_[i] = *groups[0][i]->stratum;
    }
    out.weights_.assign(M, std::vector<double>(n));
    out.columns_.assign(M, std::vector<std::vector<double>>(out.variables_.size(), std::vector<double>(n)));
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& r = *groups[m][i];
            if (r.id != out.ids_[i]) {
                throw ValidationError("implicate " + std::to_string(m + 1) +
                                      " does not contain the same respondent ids as implicate 1");
            }
            if (stratified && *r.stratum != out.strata_[i]) {
                throw ValidationError("stratum of id " + std::to_string(r.id) + " differs across implicates");
            }
            out.weights_[m][i] = r.weight;
            for (std::size_t v = 0; v < r.values.size(); ++v) out.columns_[m][v][i] = r.values[v];
        }
    }
    out.validate();
    return out;
}

MicrodataSet MicrodataSet::from_columns(std::vector<std::int64_t> ids,
                                        std::vector<double> weights,
                                        std::vector<int> strata,
                                        std::vector<std::string> variables,
                                        std::vector<std::vector<double>> columns) {
    const std::size_t n = ids.size();
    if (weights.size() != n || (!strata.empty() && strata.size() != n) || columns.size() != variables.size()) {
        throw ValidationError("column length mismatch");
    }
    for (const auto& c : columns) {
        if (c.size() != n) throw ValidationError("column length mismatch");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ids[a] < ids[b]; });
    const bool sorted = std::is_sorted(ids.begin(), ids.end());

    MicrodataSet out;
    auto permute = [&](auto& v) {
        if (sorted) return std::move(v);
        std::remove_reference_t<decltype(v)> p(v.size());
        for (std::size_t i = 0; i < n; ++i) p[i] = v[order[i]];
        return p;
    };
    out.ids_ = permute(ids);
    out.strata_ = strata.empty() ? std::vector<int>{} : permute(strata);
    out.weights_.push_back(permute(weights));
    out.columns_.emplace_back();
    for (auto& c : columns) out.columns_[0].push_back(permute(c));
    out.variables_ = std::move(variables);
    for (std::size_t i = 1; i < n; ++i) {
        if (out.ids_[i] == out.ids_[i - 1]) throw ValidationError("duplicate id " + std::to_string(out.ids_[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(out.weights_[0][i] > 0.0) || !std::isfinite(out.weights_[0][i])) {
            throw ValidationError("nonpositive or nonfinite weight for id " + std::to_string(out.ids_[i]));
        }
    }
    out.validate();
    return out;
}

void MicrodataSet::validate() {
    if (ids_.empty()) throw ValidationError("microdata has no rows");
    totals_.clear();
    for (const auto& w : weights_) totals_.push_back(compensated_sum(w));
    if (!(totals_.front() > 0.0)) throw ValidationError("population total N must be positive");
    for (std::size_t m = 1; m < totals_.size(); ++m) {
        if (std::abs(totals_[m] - totals_[0]) > 1e-9 * std::abs(totals_[0])) {
            throw ValidationError("weight total of implicate " + std::to_string(m + 1) +
                                  " differs from implicate 1 beyond relative 1e-9");
        }
    }
}

std::optional<std::size_t> MicrodataSet::find_variable(std::string_view name) const noexcept {
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (variables_[v] == name) return v;
    }
    return std::nullopt;
}

std::size_t MicrodataSet::variable_index(std::string_view name) const {
    if (auto v = find_variable(name)) return *v;
    throw ValidationError("unknown variable '" + std::string(name) + "'");
}

std::span<const double> MicrodataSet::values(std::size_t m, std::string_view variable) const {
    return columns_[m][variable_index(variable)];
}

Observation MicrodataSet::observation(std::size_t m, std::size_t i) const {
    Observation o;
    o.id = ids_[i];
    o.weight = weights_[m][i];
    if (stratified()) o.stratum = strata_[i];
    for (std::size_t v = 0; v < variables_.size(); ++v) o.values[variables_[v]] = columns_[m][v][i];
    return o;
}

MicrodataSet MicrodataSet::with_column(std::string name, std::vector<std::vector<double>> per_implicate) const {
    if (per_implicate.size() != implicate_count()) {
        throw ValidationError("with_column: expected one column per implicate");
    }
    for (const auto& c : per_implicate) {
        if (c.size() != size()) throw ValidationError("with_column: column length mismatch");
    }
    MicrodataSet out = *this;
    const auto existing = find_variable(name);
    for (std::size_t m = 0; m < implicate_count(); ++m) {
        if (existing) {
            out.columns_[m][*existing] = std::move(per_implicate[m]);
        } else {
            out.columns_[m].push_back(std::move(per_implicate[m]));
        }
    }
    if (!existing) out.variables_.push_back(std::move(name));
    return out;
}

MicrodataSet MicrodataSet::select(std::span<const std::string> variables) const {
    MicrodataSet out = *this;
    out.variables_.assign(variables.begin(), variables.end());
    for (std::size_t m = 0; m < implicate_count(); ++m) {
        out.columns_[m].clear();
        for (const auto& name : variables) out.columns_[m].push_back(columns_[m][variable_index(name)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

MicrodataSet parse_microdata(std::string_view text, const CsvSchema& schema) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto next_line = [&](std::string_view& out) {
        while (pos < text.size()) {
            const auto nl = text.find('\n', pos);
            const auto end = nl == std::string_view::npos ? text.size() : nl;
            out = trim(text.substr(pos, end - pos));
            pos = end + 1;
            ++line_no;
            if (!out.empty()) return true;
        }
        return false;
    };

    std::string_view header_line;
    if (!next_line(header_line)) throw ValidationError("empty CSV: no header");
    const auto header = split_fields(header_line);

    auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return c;
        }
        return std::nullopt;
    };

    const auto id_col = find_col(schema.id_column);
    const auto weight_col = find_col(schema.weight_column);
    if (!id_col) throw ValidationError("CSV header lacks id column '" + schema.id_column + "'");
    if (!weight_col) throw ValidationError("CSV header lacks weight column '" + schema.weight_column + "'");
    std::optional<std::size_t> implicate_col;
    std::optional<std::size_t> stratum_col;
    if (!schema.implicate_column.empty()) implicate_col = find_col(schema.implicate_column);
    if (!schema.stratum_column.empty()) stratum_col = find_col(schema.stratum_column);
    if (schema.require_stratum && !stratum_col) {
        throw ValidationError("CSV header lacks stratum column '" + schema.stratum_column + "'");
    }

    std::vector<std::string> variables;
    std::vector<std::size_t> value_cols;
    if (schema.value_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == *id_col || c == *weight_col || c == implicate_col.value_or(header.size()) ||
                c == stratum_col.value_or(header.size())) {
                continue;
            }
            variables.emplace_back(header[c]);
            value_cols.push_back(c);
        }
    } else {
        for (const auto& name : schema.value_columns) {
            const auto c = find_col(name);
            if (!c) throw ValidationError("CSV header lacks value column '" + name + "'");
            variables.push_back(name);
            value_cols.push_back(*c);
        }
    }

    std::vector<MicrodataRecord> records;
    std::string_view line;
    std::size_t row = 0;
    while (next_line(line)) {
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ValidationError("parse error at " + row_context(row, line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
        }
        MicrodataRecord r;
        r.source_row = row;
        r.id = parse_int(fields[*id_col], schema.id_column, row, line_no);
        r.weight = parse_double(fields[*weight_col], schema.weight_column, row, line_no);
        if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
            throw ValidationError("nonpositive weight at " + row_context(row, line_no) + ": " +
                                  std::string(fields[*weight_col]));
        }
        if (implicate_col) {
            r.implicate = static_cast<int>(parse_int(fields[*implicate_col], schema.implicate_column, row, line_no));
            if (r.implicate < 1) {
                throw ValidationError("implicate index must be >= 1 at " + row_context(row, line_no));
            }
        }
        if (stratum_col) {
            r.stratum = static_cast<int>(parse_int(fields[*stratum_col], schema.stratum_column, row, line_no));
        }
        r.values.reserve(value_cols.size());
        for (std::size_t v = 0; v < value_cols.size(); ++v) {
            const double x = parse_double(fields[value_cols[v]], variables[v], row, line_no);
            if (!std::isfinite(x)) {
                throw ValidationError("nonfinite value at " + row_context(row, line_no) + " in column '" +
                                      variables[v] + "'");
            }
            r.values.push_back(x);
        }
        records.push_back(std::move(r));
    }
    return MicrodataSet::from_records(std::move(records), std::move(variables), stratum_col.has_value());
}

MicrodataSet load_microdata(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open microdata file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_microdata(buf.str(), schema);
}

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_microdata(const MicrodataSet& data) {
    std::string out = "id,implicate,weight";
    if (data.stratified()) out += ",stratum";
    for (const auto& v : data.variables()) out += "," + v;
    out += '\n';
    for (std::size_t m = 0; m < data.implicate_count(); ++m) {
        const auto w = data.weights(m);
        for (std::size_t i = 0; i < data.size(); ++i) {
            out += std::to_string(data.ids()[i]);
            out += ',';
            out += std::to_string(m + 1);
            out += ',';
            out += format_number(w[i]);
            if (data.stratified()) {
                out += ',';
                out += std::to_string(data.strata()[i]);
            }
            for (std::size_t v = 0; v < data.variables().size(); ++v) {
                out += ',';
                out += format_number(data.values(m, v)[i]);
            }
            out += '\n';
        }
    }
    return out;
}

void write_microdata(const MicrodataSet& data, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write microdata file: " + path.string());
    out << format_microdata(data);
}

}  // namespace ineq
