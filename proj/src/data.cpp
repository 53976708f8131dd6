#include "slim/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace slim {

namespace {

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "?" || cell == "NaN";
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

// ---- Dataset ----------------------------------------------------------------

Dataset Dataset::FromRows(const std::vector<std::vector<double>>& rows,
                          std::vector<int> labels,
                          std::vector<std::string> feature_names) {
  if (rows.size() != labels.size()) {
    throw InputError("dataset has " + std::to_string(rows.size()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (rows.empty()) throw InputError("dataset is empty");
  Dataset d;
  d.names_.reserve(feature_names.size() + 1);
  d.names_.push_back(kInterceptName);
  for (auto& n : feature_names) d.names_.push_back(std::move(n));
  const std::size_t cols = d.names_.size();
  {
    std::set<std::string> seen;
    for (const auto& n : d.names_) {
      if (!seen.insert(n).second) throw InputError("duplicate feature name '" + n + "'");
    }
  }
  d.values_.reserve(rows.size() * cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() + 1 != cols) {
      throw InputError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                       " features, expected " + std::to_string(cols - 1));
    }
    d.values_.push_back(1.0);
    for (double v : rows[i]) {
      if (!std::isfinite(v)) throw InputError("non-finite feature value in row " + std::to_string(i));
      d.values_.push_back(v);
    }
  }
  for (int label : labels) {
    if (label != 1 && label != -1) {
      throw InputError("label " + std::to_string(label) + " is not in {-1, +1}");
    }
  }
  d.labels_ = std::move(labels);
  d.missing_.assign(cols, 0);
  d.levels_.assign(cols, {});
  d.finalize();
  return d;
}

void Dataset::finalize() {
  positives_.clear();
  negatives_.clear();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    (labels_[i] > 0 ? positives_ : negatives_).push_back(i);
  }
  integral_ = true;
  binary_ = true;
  const std::size_t cols = names_.size();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = 1; j < cols; ++j) {
      const double v = values_[i * cols + j];
      if (v != std::floor(v)) integral_ = false;
      if (v != 0.0 && v != 1.0) binary_ = false;
    }
  }
}

std::size_t Dataset::column(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InputError("unknown feature '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset d;
  d.names_ = names_;
  d.missing_ = missing_;
  d.levels_ = levels_;
  const std::size_t cols = names_.size();
  d.values_.reserve(indices.size() * cols);
  d.labels_.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= labels_.size()) throw InputError("subset index out of range");
    d.values_.insert(d.values_.end(), values_.begin() + i * cols, values_.begin() + (i + 1) * cols);
    d.labels_.push_back(labels_[i]);
  }
  d.finalize();
  return d;
}

Dataset Dataset::with_metadata(std::vector<std::size_t> missing,
                               std::vector<std::vector<std::string>> levels) const {
  Dataset d = *this;
  if (missing.size() != names_.size() || levels.size() != names_.size()) {
    throw InputError("metadata size does not match column count");
  }
  d.missing_ = std::move(missing);
  d.levels_ = std::move(levels);
  return d;
}

// ---- CSV --------------------------------------------------------------------

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool quoted_field = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool have_header = false;

  auto end_record = [&]() {
    record.push_back(quoted_field ? field : trim(field));
    field.clear();
    quoted_field = false;
    field_started = false;
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      if (!have_header) {
        table.header = record;
        have_header = true;
      } else {
        if (record.size() != table.header.size()) {
          throw InputError("malformed CSV record at line " + std::to_string(record_line) + ": " +
                           std::to_string(record.size()) + " fields, expected " +
                           std::to_string(table.header.size()));
        }
        table.records.push_back(record);
        table.line_numbers.push_back(record_line);
      }
    }
    record.clear();
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      if (field_started && !trim(field).empty()) {
        throw InputError("malformed CSV record at line " + std::to_string(line) +
                         ": quote inside unquoted field");
      }
      field.clear();
      in_quotes = true;
      quoted_field = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(quoted_field ? field : trim(field));
      field.clear();
      quoted_field = false;
      field_started = false;
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else if (c == '\r') {
      // CRLF line endings
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) {
    throw InputError("malformed CSV record at line " + std::to_string(record_line) +
                     ": unterminated quoted field");
  }
  if (field_started || !record.empty()) end_record();
  if (!have_header) throw InputError("CSV input is empty");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_csv(in);
}

Dataset parse_csv(std::istream& in, const std::string& label_column) {
  CsvTable table = read_csv(in);
  auto label_it = std::find(table.header.begin(), table.header.end(), label_column);
  if (label_it == table.header.end()) {
    throw InputError("label column '" + label_column + "' not found in header");
  }
  const std::size_t label_idx = static_cast<std::size_t>(label_it - table.header.begin());
  if (table.records.empty()) throw InputError("dataset is empty");

  const std::size_t n = table.records.size();
  std::vector<int> labels(n);
  std::set<int> raw_labels;
  for (std::size_t i = 0; i < n; ++i) {
    double v;
    const std::string& cell = table.records[i][label_idx];
    if (!parse_double(cell, v) || (v != 0.0 && v != 1.0 && v != -1.0)) {
      throw InputError("line " + std::to_string(table.line_numbers[i]) + ": label '" + cell +
                       "' is not one of 0, 1, -1, +1");
    }
    raw_labels.insert(static_cast<int>(v));
    labels[i] = v > 0 ? 1 : -1;
  }
  if (raw_labels.count(0) && raw_labels.count(-1)) {
    throw InputError("label column mixes 0 and -1; use either {0,1} or {-1,+1}");
  }

  std::vector<std::string> names;
  std::vector<std::size_t> source_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == label_idx) continue;
    names.push_back(table.header[c]);
    source_cols.push_back(c);
  }
  const std::size_t p = names.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(p, 0.0));
  std::vector<std::size_t> missing(p + 1, 0);
  std::vector<std::vector<std::string>> levels(p + 1);

  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t c = source_cols[j];
    bool numeric = true;
    for (std::size_t i = 0; i < n && numeric; ++i) {
      double v;
      const std::string& cell = table.records[i][c];
      if (!is_missing(cell) && !parse_double(cell, v)) numeric = false;
    }
    if (numeric) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = table.records[i][c];
        if (is_missing(cell)) continue;
        parse_double(cell, rows[i][j]);
        sum += rows[i][j];
        ++count;
      }
      if (count == 0) throw InputError("column '" + names[j] + "' has no observed values");
      const double mean = sum / static_cast<double>(count);
      for (std::size_t i = 0; i < n; ++i) {
        if (is_missing(table.records[i][c])) {
          rows[i][j] = mean;
          ++missing[j + 1];
        }
      }
    } else {
      std::vector<std::string>& lv = levels[j + 1];
      std::unordered_map<std::string, std::size_t> code;
      std::vector<std::size_t> freq;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = table.records[i][c];
        if (is_missing(cell)) continue;
        auto [it, inserted] = code.emplace(cell, lv.size());
        if (inserted) {
          lv.push_back(cell);
          freq.push_back(0);
        }
        ++freq[it->second];
      }
      const std::size_t mode =
          static_cast<std::size_t>(std::max_element(freq.begin(), freq.end()) - freq.begin());
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = table.records[i][c];
        if (is_missing(cell)) {
          rows[i][j] = static_cast<double>(mode);
          ++missing[j + 1];
        } else {
          rows[i][j] = static_cast<double>(code.at(cell));
        }
      }
    }
  }
  return Dataset::FromRows(rows, std::move(labels), std::move(names))
      .with_metadata(std::move(missing), std::move(levels));
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_csv(in, label_column);
}

void write_csv(const Dataset& data, const std::string& label_column, std::ostream& out) {
  const auto& names = data.feature_names();
  for (std::size_t j = 1; j < names.size(); ++j) out << quote_csv(names[j]) << ',';
  out << quote_csv(label_column) << '\n';
  const auto& levels = data.category_levels();
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    for (std::size_t j = 1; j < names.size(); ++j) {
      const double v = data.x(i, j);
      if (!levels[j].empty()) {
        out << quote_csv(levels[j][static_cast<std::size_t>(v)]);
      } else {
        out << format_double(v);
      }
      out << ',';
    }
    out << (data.y(i) > 0 ? "1" : "-1") << '\n';
  }
}

void save_csv(const Dataset& data, const std::string& label_column,
              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_csv(data, label_column, out);
}

// ---- binarization -------------------------------------------------------------

BinarizationSpec parse_binarization_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("binarization spec: ") + e.what());
  }
  if (!j.is_object()) throw InputError("binarization spec must be a JSON object");
  BinarizationSpec spec;
  for (auto& [name, value] : j.items()) {
    if (value.is_string()) {
      const std::string s = value.get<std::string>();
      if (s == "passthrough") {
        spec[name] = Passthrough{};
      } else if (s == "categories") {
        spec[name] = Categories{};
      } else if (s == "midpoints") {
        spec[name] = Midpoints{};
      } else {
        throw InputError("unknown binarization directive '" + s + "' for feature '" + name + "'");
      }
    } else if (value.is_object() && value.contains("thresholds")) {
      Thresholds t;
      for (const auto& v : value.at("thresholds")) {
        if (!v.is_number()) throw InputError("threshold for '" + name + "' is not a number");
        t.values.push_back(v.get<double>());
      }
      spec[name] = std::move(t);
    } else if (value.is_array()) {
      Thresholds t;
      for (const auto& v : value) t.values.push_back(v.get<double>());
      spec[name] = std::move(t);
    } else {
      throw InputError("malformed binarization directive for feature '" + name + "'");
    }
  }
  return spec;
}

Binarized binarize(const Dataset& data, const BinarizationSpec& spec) {
  for (const auto& [name, directive] : spec) {
    (void)directive;
    data.column(name);  // throws on unknown names
  }
  const std::size_t n = data.num_examples();
  const auto& names = data.feature_names();
  const auto& levels = data.category_levels();

  Binarized out;
  std::vector<std::vector<double>> columns;
  std::vector<std::string> out_names;
  std::vector<std::size_t> out_missing{0};

  auto add_column = [&](BinaryRule rule, std::vector<double> values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    rule.constant = *lo == *hi;
    if (rule.constant) out.rules.warnings.push_back("rule '" + rule.name + "' is constant");
    out_missing.push_back(data.missing_counts()[rule.source]);
    out_names.push_back(rule.name);
    columns.push_back(std::move(values));
    out.rules.groups.back().push_back(columns.size());
    out.rules.rules.push_back(std::move(rule));
  };

  for (std::size_t j = 1; j < names.size(); ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = data.x(i, j);

    BinarizationDirective directive = levels[j].empty() ? BinarizationDirective{Passthrough{}}
                                                        : BinarizationDirective{Categories{}};
    if (auto it = spec.find(names[j]); it != spec.end()) directive = it->second;
    out.rules.groups.emplace_back();

    if (std::holds_alternative<Passthrough>(directive)) {
      if (!levels[j].empty()) {
        throw InputError("categorical feature '" + names[j] + "' cannot pass through");
      }
      add_column({names[j], j, names[j], BinaryRule::Kind::kPassthrough, 0.0, {}, false}, col);
    } else if (std::holds_alternative<Categories>(directive)) {
      std::vector<std::string> cats;
      std::vector<double> codes;
      if (!levels[j].empty()) {
        cats = levels[j];
        for (std::size_t k = 0; k < cats.size(); ++k) codes.push_back(static_cast<double>(k));
      } else {
        std::set<double> distinct(col.begin(), col.end());
        for (double v : distinct) {
          codes.push_back(v);
          cats.push_back(format_double(v));
        }
      }
      if (cats.size() > kMaxCategories) {
        throw InputError("feature '" + names[j] + "' has " + std::to_string(cats.size()) +
                         " categories (limit " + std::to_string(kMaxCategories) + ")");
      }
      for (std::size_t k = 0; k < cats.size(); ++k) {
        std::vector<double> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = col[i] == codes[k] ? 1.0 : 0.0;
        add_column({names[j] + "=" + cats[k], j, names[j], BinaryRule::Kind::kCategory, 0.0,
                    cats[k], false},
                   std::move(h));
      }
    } else {
      if (!levels[j].empty()) {
        throw InputError("categorical feature '" + names[j] + "' cannot be thresholded");
      }
      std::vector<double> thresholds;
      if (const auto* t = std::get_if<Thresholds>(&directive)) {
        thresholds = t->values;
        for (double v : thresholds) {
          if (!std::isfinite(v)) throw InputError("non-finite threshold for '" + names[j] + "'");
        }
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
      } else {
        std::set<double> distinct(col.begin(), col.end());
        std::vector<double> d(distinct.begin(), distinct.end());
        for (std::size_t k = 0; k + 1 < d.size(); ++k) thresholds.push_back(0.5 * (d[k] + d[k + 1]));
      }
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      for (double v : thresholds) {
        if (v <= *lo || v > *hi) {
          out.rules.warnings.push_back("threshold " + format_double(v) + " for '" + names[j] +
                                       "' is outside the observed range");
        }
        std::vector<double> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = col[i] >= v ? 1.0 : 0.0;
        add_column({names[j] + ">=" + format_double(v), j, names[j], BinaryRule::Kind::kThreshold,
                    v, {}, false},
                   std::move(h));
      }
    }
  }

  std::vector<std::vector<double>> rows(n, std::vector<double>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) rows[i][c] = columns[c][i];
  }
  out.data = Dataset::FromRows(rows, data.labels(), out_names)
                 .with_metadata(std::move(out_missing),
                                std::vector<std::vector<std::string>>(columns.size() + 1));
  return out;
}

// ---- class weights --------------------------------------------------------------

WeightMode parse_weight_mode(const std::string& text) {
  if (text == "uniform") return WeightMode::kUniform;
  if (text == "balanced") return WeightMode::kBalanced;
  if (text == "max_sensitivity") return WeightMode::kMaxSensitivity;
  if (text == "custom") return WeightMode::kCustom;
  throw InputError("unknown weight mode '" + text + "'");
}

std::string to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::kUniform: return "uniform";
    case WeightMode::kBalanced: return "balanced";
    case WeightMode::kMaxSensitivity: return "max_sensitivity";
    case WeightMode::kCustom: return "custom";
  }
  return "uniform";
}

ClassWeights class_weights(const Dataset& data, WeightMode mode, ClassWeights custom) {
  const double n = static_cast<double>(data.num_examples());
  const double n_pos = static_cast<double>(data.n_pos());
  const double n_neg = static_cast<double>(data.n_neg());
  switch (mode) {
    case WeightMode::kUniform:
      return {1.0, 1.0};
    case WeightMode::kBalanced:
      if (n_pos == 0 || n_neg == 0) throw InputError("balanced weights need both classes");
      return {n_neg / n, n_pos / n};
    case WeightMode::kMaxSensitivity: {
      if (n_pos == 0 || n_neg == 0) throw InputError("max_sensitivity weights need both classes");
      const double w_pos = n_neg / (1.0 + n_neg);
      return {w_pos, 1.0 - w_pos};
    }
    case WeightMode::kCustom: {
      if (custom.w_pos < 0 || custom.w_neg < 0 || custom.w_pos + custom.w_neg <= 0) {
        throw InputError("custom class weights must be nonnegative and not both zero");
      }
      const double total = custom.w_pos + custom.w_neg;
      return {custom.w_pos / total, custom.w_neg / total};
    }
  }
  return {1.0, 1.0};
}

}  // namespace slim
