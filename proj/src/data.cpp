#include "ordac/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ordac/errors.hpp"
#include "ordac/rng.hpp"

namespace ordac {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no,
                    const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw DataError("line " + std::to_string(line_no) + ": bad " + what +
                    " value '" + s + "'");
  }
  return v;
}

int parse_label(const std::string& s, std::size_t line_no,
                const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw DataError("line " + std::to_string(line_no) + ": " + what +
                    " must be an integer rank, got '" + s + "'");
  }
  if (v < 0) {
    throw DataError("line " + std::to_string(line_no) + ": " + what +
                    " must be non-negative, got '" + s + "'");
  }
  return static_cast<int>(v);
}

struct ColumnLayout {
  int id = -1;
  int label = -1;
  int label_true = -1;
  int mu = -1;
  int sigma = -1;
  std::vector<int> features;  // column indices in header order
};

ColumnLayout parse_header(const std::string& header_line, bool corrected) {
  ColumnLayout layout;
  const std::vector<std::string> names = split_row(header_line);
  for (int col = 0; col < static_cast<int>(names.size()); ++col) {
    const std::string& name = names[static_cast<std::size_t>(col)];
    if (name == "id") {
      layout.id = col;
    } else if (name == "label" || name == "label_noisy" ||
               (corrected && name == "label_original")) {
      if (layout.label >= 0) throw DataError("header: duplicate label column");
      layout.label = col;
    } else if (name == "label_true") {
      layout.label_true = col;
    } else if (corrected && name == "mu") {
      layout.mu = col;
    } else if (corrected && name == "sigma") {
      layout.sigma = col;
    } else {
      layout.features.push_back(col);
    }
  }
  if (layout.label < 0) {
    throw DataError("header: missing label column (expected 'label'" +
                    std::string(corrected ? ", 'label_original'" : "") +
                    " or 'label_noisy')");
  }
  if (layout.features.empty()) {
    throw DataError("header: no feature columns");
  }
  if (corrected && (layout.mu < 0 || layout.sigma < 0)) {
    throw DataError("header: corrected CSV needs 'mu' and 'sigma' columns");
  }
  return layout;
}

Dataset load_csv_impl(const std::string& path, int class_count_hint,
                      bool corrected) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const ColumnLayout layout = parse_header(line, corrected);
  const std::size_t expected_fields =
      layout.features.size() + (layout.id >= 0 ? 1 : 0) + 1 +
      (layout.label_true >= 0 ? 1 : 0) + (corrected ? 2 : 0);

  Dataset ds;
  ds.feature_dim = static_cast<int>(layout.features.size());
  ds.provenance = path;

  std::size_t line_no = 1;
  int max_rank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_row(line);
    if (fields.size() != expected_fields) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected_fields) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Sample s;
    const int row_index = static_cast<int>(ds.samples.size());
    if (layout.id >= 0) {
      const int id = parse_label(fields[static_cast<std::size_t>(layout.id)],
                                 line_no, "id");
      if (id != row_index) {
        throw DataError("line " + std::to_string(line_no) + ": id " +
                        std::to_string(id) + " breaks dense ordering (want " +
                        std::to_string(row_index) + ")");
      }
      s.id = id;
    } else {
      s.id = row_index;
    }
    s.features.reserve(layout.features.size());
    for (const int col : layout.features) {
      s.features.push_back(parse_double(
          fields[static_cast<std::size_t>(col)], line_no, "feature"));
    }
    s.label_original = parse_label(
        fields[static_cast<std::size_t>(layout.label)], line_no, "label");
    max_rank = std::max(max_rank, s.label_original);
    if (layout.label_true >= 0) {
      const std::string& cell = fields[static_cast<std::size_t>(layout.label_true)];
      if (!cell.empty()) {
        s.label_true = parse_label(cell, line_no, "label_true");
        max_rank = std::max(max_rank, *s.label_true);
      }
    }
    if (corrected) {
      s.dist.mu = parse_double(fields[static_cast<std::size_t>(layout.mu)],
                               line_no, "mu");
      s.dist.sigma = parse_double(
          fields[static_cast<std::size_t>(layout.sigma)], line_no, "sigma");
    } else {
      s.dist = LabelDistribution{static_cast<double>(s.label_original),
                                 kDefaultStdInit};
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw DataError(path + ": no data rows");

  ds.class_count = class_count_hint > 0 ? class_count_hint : max_rank + 1;
  if (ds.class_count < 2) ds.class_count = 2;
  if (class_count_hint > 0 && max_rank >= class_count_hint) {
    throw DataError(path + ": label " + std::to_string(max_rank) +
                    " outside 0.." + std::to_string(class_count_hint - 1));
  }
  return ds;
}

bool all_have_truth(const Dataset& ds) {
  return std::all_of(ds.samples.begin(), ds.samples.end(),
                     [](const Sample& s) { return s.label_true.has_value(); });
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.class_count < 2) {
    throw ConfigError("generate_synthetic: class_count must be >= 2");
  }
  if (spec.feature_dim < 1) {
    throw ConfigError("generate_synthetic: feature_dim must be >= 1");
  }
  if (!(spec.separation > 0.0) || !(spec.spread > 0.0)) {
    throw ConfigError("generate_synthetic: separation and spread must be > 0");
  }
  std::vector<int> counts = spec.per_class;
  if (counts.empty()) {
    counts.assign(static_cast<std::size_t>(spec.class_count), spec.n_per_class);
  }
  if (static_cast<int>(counts.size()) != spec.class_count) {
    throw ConfigError("generate_synthetic: per_class needs one count per class");
  }
  for (const int n : counts) {
    if (n < 1) throw ConfigError("generate_synthetic: class counts must be >= 1");
  }

  const double unit = 1.0 / std::sqrt(static_cast<double>(spec.feature_dim));
  Rng rng(spec.seed);
  Dataset ds;
  ds.class_count = spec.class_count;
  ds.feature_dim = spec.feature_dim;
  {
    std::ostringstream p;
    p << "synthetic(C=" << spec.class_count << ",d=" << spec.feature_dim
      << ",n=[";
    for (std::size_t i = 0; i < counts.size(); ++i) {
      p << (i ? "," : "") << counts[i];
    }
    p << "],sep=" << spec.separation << ",spread=" << spec.spread
      << ",seed=" << spec.seed << ")";
    ds.provenance = p.str();
  }

  int id = 0;
  for (int c = 0; c < spec.class_count; ++c) {
    const double center = static_cast<double>(c) * spec.separation * unit;
    for (int n = 0; n < counts[static_cast<std::size_t>(c)]; ++n) {
      std::vector<double> x(static_cast<std::size_t>(spec.feature_dim));
      for (double& xi : x) xi = center + spec.spread * rng.next_gaussian();
      ds.samples.push_back(make_sample(id++, std::move(x), c, c));
    }
  }
  return ds;
}

Dataset load_csv(const std::string& path, int class_count_hint) {
  return load_csv_impl(path, class_count_hint, /*corrected=*/false);
}

void write_csv(const Dataset& ds, const std::string& path,
               const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  const bool truth = all_have_truth(ds);
  out << "id";
  for (int i = 0; i < ds.feature_dim; ++i) out << ",f" << i;
  out << ',' << label_column;
  if (truth) out << ",label_true";
  out << "\n";
  for (const Sample& s : ds.samples) {
    out << s.id;
    for (const double f : s.features) out << ',' << format_double(f);
    out << ',' << s.label_original;
    if (truth) out << ',' << *s.label_true;
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

void write_corrected_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  const bool truth = all_have_truth(ds);
  out << "id";
  for (int i = 0; i < ds.feature_dim; ++i) out << ",f" << i;
  out << ",mu,sigma,label_original";
  if (truth) out << ",label_true";
  out << "\n";
  for (const Sample& s : ds.samples) {
    out << s.id;
    for (const double f : s.features) out << ',' << format_double(f);
    out << ',' << format_double(s.dist.mu) << ',' << format_double(s.dist.sigma)
        << ',' << s.label_original;
    if (truth) out << ',' << *s.label_true;
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

Dataset load_corrected_csv(const std::string& path, int class_count_hint) {
  return load_csv_impl(path, class_count_hint, /*corrected=*/true);
}

FoldPlan split_folds(const Dataset& ds, int fold_count, std::uint64_t seed) {
  const int n = static_cast<int>(ds.size());
  if (fold_count < 2) {
    throw ConfigError("split_folds: fold count must be >= 2, got " +
                      std::to_string(fold_count));
  }
  if (fold_count > n) {
    throw ConfigError("split_folds: fold count " + std::to_string(fold_count) +
                      " exceeds sample count " + std::to_string(n));
  }

  std::vector<std::vector<int>> by_class(
      static_cast<std::size_t>(ds.class_count));
  for (const Sample& s : ds.samples) {
    if (s.label_original < 0 || s.label_original >= ds.class_count) {
      throw DataError("split_folds: label " + std::to_string(s.label_original) +
                      " of sample " + std::to_string(s.id) + " out of range");
    }
    by_class[static_cast<std::size_t>(s.label_original)].push_back(s.id);
  }

  FoldPlan plan;
  plan.fold_count = fold_count;
  plan.assignment.assign(ds.size(), 0);
  Rng rng(seed);
  // Round-robin within each class; the rotating offset keeps overall fold
  // sizes balanced as well.
  int offset = 0;
  for (std::vector<int>& ids : by_class) {
    rng.shuffle(ids);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      plan.assignment[static_cast<std::size_t>(ids[i])] =
          (offset + static_cast<int>(i)) % fold_count;
    }
    offset = (offset + static_cast<int>(ids.size())) % fold_count;
  }
  return plan;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const Dataset& ds, double held_out_fraction, std::uint64_t seed) {
  if (!(held_out_fraction >= 0.0 && held_out_fraction < 1.0)) {
    throw ConfigError("stratified_split: fraction must lie in [0, 1)");
  }
  std::vector<std::vector<int>> by_class(
      static_cast<std::size_t>(ds.class_count));
  for (const Sample& s : ds.samples) {
    by_class[static_cast<std::size_t>(s.label_original)].push_back(s.id);
  }
  Rng rng(seed);
  std::vector<int> rest, held;
  for (std::vector<int>& ids : by_class) {
    rng.shuffle(ids);
    const std::size_t take = static_cast<std::size_t>(
        std::llround(held_out_fraction * static_cast<double>(ids.size())));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < take ? held : rest).push_back(ids[i]);
    }
  }
  std::sort(rest.begin(), rest.end());
  std::sort(held.begin(), held.end());
  return {std::move(rest), std::move(held)};
}

Dataset subset(const Dataset& ds, std::span<const int> ids) {
  Dataset out;
  out.class_count = ds.class_count;
  out.feature_dim = ds.feature_dim;
  out.provenance = ds.provenance;
  out.samples.reserve(ids.size());
  int next_id = 0;
  for (const int id : ids) {
    if (id < 0 || id >= static_cast<int>(ds.size())) {
      throw DataError("subset: id " + std::to_string(id) + " out of range");
    }
    Sample s = ds.samples[static_cast<std::size_t>(id)];
    s.id = next_id++;
    out.samples.push_back(std::move(s));
  }
  return out;
}

void reset_distributions(Dataset& ds, double std_init) {
  for (Sample& s : ds.samples) {
    s.dist =
        LabelDistribution{static_cast<double>(s.label_original), std_init};
  }
}

bool datasets_equal(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size() || a.class_count != b.class_count ||
      a.feature_dim != b.feature_dim) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Sample& x = a.samples[i];
    const Sample& y = b.samples[i];
    if (x.id != y.id || x.label_original != y.label_original ||
        x.label_true != y.label_true || x.features != y.features) {
      return false;
    }
  }
  return true;
}

}  // namespace ordac
