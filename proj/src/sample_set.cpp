#include "driftbound/sample_set.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace driftbound {

void SampleSet::validate() const {
  if (points.rows() < 1 || points.cols() < 1) throw InvalidArgument("SampleSet '" + label + "' is empty");
  if (!points.allFinite()) throw InvalidArgument("SampleSet '" + label + "' has non-finite entries");
}

SampleSet SampleSet::rows(const std::vector<Eigen::Index>& idx, std::string new_label) const {
  SampleSet out{Matrix(static_cast<Eigen::Index>(idx.size()), dim()), std::move(new_label), seed};
  for (std::size_t r = 0; r < idx.size(); ++r) out.points.row(static_cast<Eigen::Index>(r)) = points.row(idx[r]);
  return out;
}

void write_csv(const SampleSet& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "index";
  for (Eigen::Index j = 0; j < s.dim(); ++j) out << ",x" << j;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < s.dim(); ++j) out << ',' << s.points(i, j);
    out << '\n';
  }
}

SampleSet read_sample_csv(const std::filesystem::path& path, std::string label) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sample file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty sample file " + path.string());

  // The first column is an index or time stamp; the rest are coordinates.
  // Trailing velocity columns (v0, v1, ...) from trace exports are ignored.
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<std::size_t> coord_cols;
  for (std::size_t c = 1; c < header.size(); ++c)
    if (!header[c].empty() && header[c][0] == 'x') coord_cols.push_back(c);
  if (coord_cols.empty()) throw ConfigError("no coordinate columns in " + path.string());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> all;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        all.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("unparseable value '" + cell + "' in " + path.string());
      }
    }
    if (all.size() != header.size()) throw ConfigError("ragged row in " + path.string());
    std::vector<double> r;
    for (auto c : coord_cols) r.push_back(all[c]);
    rows.push_back(std::move(r));
  }
  SampleSet s{Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(coord_cols.size())),
              label.empty() ? path.stem().string() : std::move(label), 0};
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < coord_cols.size(); ++j)
      s.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  s.validate();
  return s;
}

}  // namespace driftbound
