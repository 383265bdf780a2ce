#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ineq {

/// One respondent/taxpayer record within a single implicate.
struct Observation {
    std::int64_t id = 0;
    double weight = 0.0;
    std::optional<int> stratum;
    std::map<std::string, double> values;
};

/// A row as read from disk, before grouping into implicates.
struct MicrodataRecord {
    std::int64_t id = 0;
    int implicate = 1;  // 1-based, as stored in files
    double weight = 0.0;
    std::optional<int> stratum;
    std::vector<double> values;  // aligned with the dataset's variable list
    std::size_t source_row = 0;  // 1-based data row, 0 if synthetic
};

class MicrodataSet;

/// Read-only view of one implicate. Rows are ordered by id and aligned
/// across implicates, so index i refers to the same respondent in every view.
class ImplicateView {
public:
    ImplicateView(const MicrodataSet& data, std::size_t implicate) : data_(&data), m_(implicate) {}

    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] std::size_t implicate() const noexcept { return m_; }
    [[nodiscard]] std::span<const std::int64_t> ids() const noexcept;
    [[nodiscard]] std::span<const double> weights() const noexcept;
    [[nodiscard]] std::span<const double> values(std::string_view variable) const;
    [[nodiscard]] std::span<const double> values(std::size_t variable) const noexcept;
    [[nodiscard]] double population_total() const noexcept;

private:
    const MicrodataSet* data_;
    std::size_t m_;
};

/// Weighted, optionally stratified, multiply-imputed microdata.
///
/// Immutable after construction. Invariants enforced by from_records():
/// weights positive and finite, every implicate holds the same respondent
/// ids, implicate weight totals agree to 1e-9 relative, N > 0.
class MicrodataSet {
public:
    static MicrodataSet from_records(std::vector<MicrodataRecord> records,
                                     std::vector<std::string> variables,
                                     bool stratified);

    /// Single-implicate convenience constructor.
    static MicrodataSet from_columns(std::vector<std::int64_t> ids,
                                     std::vector<double> weights,
                                     std::vector<int> strata,
                                     std::vector<std::string> variables,
                                     std::vector<std::vector<double>> columns);

    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] std::size_t implicate_count() const noexcept { return weights_.size(); }
    [[nodiscard]] std::size_t row_count() const noexcept { return size() * implicate_count(); }
    [[nodiscard]] double population_total() const noexcept { return totals_.front(); }
    [[nodiscard]] double population_total(std::size_t m) const noexcept { return totals_[m]; }
    [[nodiscard]] bool stratified() const noexcept { return !strata_.empty(); }

    [[nodiscard]] std::span<const std::int64_t> ids() const noexcept { return ids_; }
    [[nodiscard]] std::span<const int> strata() const noexcept { return strata_; }
    [[nodiscard]] std::span<const double> weights(std::size_t m) const noexcept { return weights_[m]; }
    [[nodiscard]] std::span<const double> values(std::size_t m, std::size_t variable) const noexcept {
        return columns_[m][variable];
    }
    [[nodiscard]] std::span<const double> values(std::size_t m, std::string_view variable) const;

    [[nodiscard]] const std::vector<std::string>& variables() const noexcept { return variables_; }
    [[nodiscard]] std::optional<std::size_t> find_variable(std::string_view name) const noexcept;
    [[nodiscard]] std::size_t variable_index(std::string_view name) const;

    [[nodiscard]] ImplicateView implicate(std::size_t m) const { return ImplicateView(*this, m); }
    [[nodiscard]] Observation observation(std::size_t m, std::size_t i) const;

    /// Copy with one more value column (one vector per implicate), or with
    /// an existing column replaced.
    [[nodiscard]] MicrodataSet with_column(std::string name,
                                           std::vector<std::vector<double>> per_implicate) const;

    /// Keep only the named value columns.
    [[nodiscard]] MicrodataSet select(std::span<const std::string> variables) const;

private:
    MicrodataSet() = default;
    void validate();

    std::vector<std::int64_t> ids_;
    std::vector<int> strata_;
    std::vector<std::string> variables_;
    std::vector<std::vector<double>> weights_;               // [m][i]
    std::vector<std::vector<std::vector<double>>> columns_;  // [m][v][i]
    std::vector<double> totals_;                             // [m]
};

/// Column mapping for CSV ingestion. Optional columns are used when they are
/// present in the header; a declared-but-absent implicate column means M = 1.
struct CsvSchema {
    std::string id_column = "id";
    std::string weight_column = "weight";
    std::string implicate_column = "implicate";
    std::string stratum_column = "stratum";
    /// Empty selects every remaining column as a value column.
    std::vector<std::string> value_columns;
    bool require_stratum = false;
};

MicrodataSet load_microdata(const std::filesystem::path& path, const CsvSchema& schema = {});
MicrodataSet parse_microdata(std::string_view csv_text, const CsvSchema& schema = {});

/// Writes id, implicate, weight, [stratum], value columns with shortest
/// round-trip number formatting, so load(write(x)) == x.
void write_microdata(const MicrodataSet& data, const std::filesystem::path& path);
std::string format_microdata(const MicrodataSet& data);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

}  // namespace ineq
