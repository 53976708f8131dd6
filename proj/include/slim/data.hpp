#ifndef SLIM_DATA_HPP_
#define SLIM_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace slim {

// Raised for malformed user input (CSV files, configs, feature references).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kInterceptName = "(Intercept)";

// Labeled design matrix. Column 0 is the intercept column (all ones), labels
// are +1/-1. Immutable once constructed.
class Dataset {
 public:
  Dataset() = default;

  // `rows` excludes the intercept column; it is prepended here.
  // `feature_names` has one entry per column of `rows`.
  static Dataset FromRows(const std::vector<std::vector<double>>& rows,
                          std::vector<int> labels,
                          std::vector<std::string> feature_names);

  std::size_t num_examples() const { return labels_.size(); }
  // P: number of non-intercept features.
  std::size_t num_features() const { return names_.empty() ? 0 : names_.size() - 1; }
  std::size_t num_columns() const { return names_.size(); }

  double x(std::size_t i, std::size_t j) const { return values_[i * names_.size() + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * names_.size(), names_.size()};
  }
  int y(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<std::size_t>& positive_indices() const { return positives_; }
  const std::vector<std::size_t>& negative_indices() const { return negatives_; }
  std::size_t n_pos() const { return positives_.size(); }
  std::size_t n_neg() const { return negatives_.size(); }

  // Column index for a feature name; throws InputError when absent.
  std::size_t column(const std::string& name) const;

  // True when every entry of every non-intercept column is an integer.
  bool integral() const { return integral_; }
  // True when every non-intercept column only takes values in {0, 1}.
  bool binary() const { return binary_; }

  // Number of imputed cells per column (index 0 is always 0).
  const std::vector<std::size_t>& missing_counts() const { return missing_; }
  // Category labels for columns loaded from non-numeric CSV cells; the column
  // then holds category codes 0..K-1. Empty for numeric columns.
  const std::vector<std::vector<std::string>>& category_levels() const { return levels_; }

  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset with_metadata(std::vector<std::size_t> missing,
                        std::vector<std::vector<std::string>> levels) const;

 private:
  void finalize();

  std::vector<double> values_;  // row-major N x (P+1)
  std::vector<int> labels_;
  std::vector<std::string> names_;
  std::vector<std::size_t> positives_;
  std::vector<std::size_t> negatives_;
  std::vector<std::size_t> missing_;
  std::vector<std::vector<std::string>> levels_;
  bool integral_ = true;
  bool binary_ = true;
};

// RFC-4180 reader: returns header plus data records. Errors carry the line
// number of the offending record.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> line_numbers;
};
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

// Loads a CSV with a header row. Labels may be {0,1} or {-1,+1}; 0 maps to -1.
// Cells that are empty, "NA" or "?" are mean-imputed (most frequent level for
// categorical columns) and counted per column.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);
Dataset parse_csv(std::istream& in, const std::string& label_column);

// Writes features (without the intercept column) and labels as +1/-1, with
// round-trip exact number formatting.
void write_csv(const Dataset& data, const std::string& label_column, std::ostream& out);
void save_csv(const Dataset& data, const std::string& label_column,
              const std::filesystem::path& path);

// ---- binarization ---------------------------------------------------------

struct Passthrough {};
struct Categories {};
struct Thresholds {
  std::vector<double> values;
};
struct Midpoints {};
using BinarizationDirective = std::variant<Passthrough, Categories, Thresholds, Midpoints>;

// Feature name -> directive. Features without an entry pass through, except
// category-coded columns which default to Categories.
using BinarizationSpec = std::map<std::string, BinarizationDirective>;

// Parses {"age": {"thresholds": [25, 60]}, "bmi": "midpoints", ...}.
BinarizationSpec parse_binarization_spec(const std::string& json_text);

struct BinaryRule {
  enum class Kind { kPassthrough, kThreshold, kCategory };
  std::string name;           // output column name, e.g. "age>=25"
  std::size_t source = 0;     // column in the input dataset
  std::string source_name;
  Kind kind = Kind::kPassthrough;
  double threshold = 0.0;     // kThreshold
  std::string category;       // kCategory
  bool constant = false;      // column takes a single value on the data
};

struct BinaryRuleSet {
  std::vector<BinaryRule> rules;  // one per output column after the intercept
  // Output column indices (1-based, intercept excluded) grouped by source.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::string> warnings;
};

struct Binarized {
  Dataset data;
  BinaryRuleSet rules;
};

inline constexpr std::size_t kMaxCategories = 64;

Binarized binarize(const Dataset& data, const BinarizationSpec& spec);

// ---- class weights --------------------------------------------------------

struct ClassWeights {
  double w_pos = 1.0;
  double w_neg = 1.0;
};

enum class WeightMode { kUniform, kBalanced, kMaxSensitivity, kCustom };

WeightMode parse_weight_mode(const std::string& text);
std::string to_string(WeightMode mode);

// kUniform gives (1, 1), i.e. the plain error rate. kCustom normalizes
// (custom.w_pos, custom.w_neg) to sum to one.
ClassWeights class_weights(const Dataset& data, WeightMode mode,
                           ClassWeights custom = {});

}  // namespace slim

#endif  // SLIM_DATA_HPP_
