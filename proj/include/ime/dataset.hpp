#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ime/common.hpp"

namespace ime {

// One descriptor per row; ids, when present, parallel the rows.
struct DescriptorSet {
  Matrix vectors;
  std::vector<std::string> ids;

  Index rows() const { return vectors.rows(); }
  Index dim() const { return vectors.cols(); }
  bool has_ids() const { return !ids.empty(); }
};

struct GroundTruth {
  // (query_id, relevant ids) in file order.
  std::vector<std::pair<std::string, std::vector<std::string>>> queries;
};

enum class DescriptorFormat { binary, csv };

inline void validate_descriptor_set(const DescriptorSet& set) {
  if (set.rows() < 1 || set.dim() < 1)
    throw InvalidArgument("empty descriptor set");
  if (!set.vectors.allFinite())
    throw InvalidArgument("descriptor set contains non-finite values");
  if (set.has_ids()) {
    if (Index(set.ids.size()) != set.rows())
      throw InvalidArgument("id count " + std::to_string(set.ids.size()) +
                            " does not match row count " + std::to_string(set.rows()));
    std::unordered_set<std::string> seen;
    for (const auto& id : set.ids)
      if (!seen.insert(id).second)
        throw InvalidArgument("duplicate id '" + id + "'");
  }
}

namespace detail {

inline constexpr char kDescriptorMagic[6] = {'I', 'M', 'E', 'V', '1', '\0'};

inline void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

inline void put_f32_le(std::string& out, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(char((bits >> (8 * i)) & 0xff));
}

inline float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= std::uint32_t(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path + "'");
  return std::move(buf).str();
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), std::streamsize(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed on '" + path + "'");
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& token, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + token + "'");
  }
  if (used != token.size())
    throw ParseError("line " + std::to_string(line_no) + ": trailing junk in '" + token + "'");
  if (!std::isfinite(v))
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" + token + "'");
  return v;
}

}  // namespace detail

inline std::string ids_sidecar_path(const std::string& path) { return path + ".ids"; }

inline void save_descriptors(const DescriptorSet& set, const std::string& path,
                             DescriptorFormat format = DescriptorFormat::binary) {
  validate_descriptor_set(set);
  if (format == DescriptorFormat::binary) {
    std::string bytes;
    bytes.reserve(22 + std::size_t(set.rows()) * std::size_t(set.dim()) * 4);
    bytes.append(detail::kDescriptorMagic, sizeof(detail::kDescriptorMagic));
    detail::put_u64_le(bytes, std::uint64_t(set.rows()));
    detail::put_u64_le(bytes, std::uint64_t(set.dim()));
    for (Index i = 0; i < set.rows(); ++i)
      for (Index j = 0; j < set.dim(); ++j)
        detail::put_f32_le(bytes, float(set.vectors(i, j)));
    detail::write_file_bytes(path, bytes);
    if (set.has_ids()) {
      std::string lines;
      for (const auto& id : set.ids) {
        lines += id;
        lines += '\n';
      }
      detail::write_file_bytes(ids_sidecar_path(path), lines);
    }
    return;
  }
  // CSV: header with id column only when ids are present.
  std::ostringstream out;
  out.precision(17);
  if (set.has_ids()) {
    out << "id";
    for (Index j = 0; j < set.dim(); ++j) out << ",c" << j;
    out << '\n';
  }
  for (Index i = 0; i < set.rows(); ++i) {
    if (set.has_ids()) {
      if (set.ids[std::size_t(i)].find(',') != std::string::npos)
        throw InvalidArgument("id '" + set.ids[std::size_t(i)] + "' contains a comma");
      out << set.ids[std::size_t(i)] << ',';
    }
    for (Index j = 0; j < set.dim(); ++j) {
      if (j) out << ',';
      out << set.vectors(i, j);
    }
    out << '\n';
  }
  detail::write_file_bytes(path, std::move(out).str());
}

inline DescriptorSet load_descriptors(const std::string& path,
                                      DescriptorFormat format = DescriptorFormat::binary) {
  if (format == DescriptorFormat::binary) {
    std::string bytes = detail::read_file_bytes(path);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 22)
      throw ParseError("'" + path + "': truncated header (" + std::to_string(bytes.size()) +
                       " bytes, need 22)");
    if (std::memcmp(p, detail::kDescriptorMagic, sizeof(detail::kDescriptorMagic)) != 0)
      throw ParseError("'" + path + "': bad magic at byte 0");
    std::uint64_t d = detail::get_u64_le(p + 6);
    std::uint64_t n = detail::get_u64_le(p + 14);
    if (d == 0 || n == 0) throw ParseError("'" + path + "': empty descriptor set (header at byte 6)");
    if (d > (std::uint64_t(1) << 31) || n > (std::uint64_t(1) << 31) ||
        d * n > (std::uint64_t(1) << 34))
      throw ParseError("'" + path + "': implausible dimensions " + std::to_string(d) + "x" +
                       std::to_string(n));
    std::size_t expect = 22 + std::size_t(d * n) * 4;
    if (bytes.size() != expect)
      throw ParseError("'" + path + "': payload is " + std::to_string(bytes.size() - 22) +
                       " bytes at byte 22, expected " + std::to_string(expect - 22));
    DescriptorSet set;
    set.vectors.resize(Index(d), Index(n));
    std::size_t off = 22;
    for (Index i = 0; i < Index(d); ++i)
      for (Index j = 0; j < Index(n); ++j, off += 4) {
        float f = detail::get_f32_le(p + off);
        if (!std::isfinite(f))
          throw ParseError("'" + path + "': non-finite value at byte " + std::to_string(off));
        set.vectors(i, j) = double(f);
      }
    std::ifstream ids_in(ids_sidecar_path(path));
    if (ids_in) {
      std::string line;
      while (std::getline(ids_in, line)) {
        line = detail::trim(line);
        if (!line.empty()) set.ids.push_back(line);
      }
      if (Index(set.ids.size()) != set.rows())
        throw ParseError("'" + ids_sidecar_path(path) + "': " + std::to_string(set.ids.size()) +
                         " ids for " + std::to_string(set.rows()) + " rows");
    }
    validate_descriptor_set(set);
    return set;
  }
  // CSV
  std::string text = detail::read_file_bytes(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool with_ids = false;
  Index ncols = -1;
  DescriptorSet set;
  std::vector<double> values;
  Index nrows = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (first_content_line) {
      first_content_line = false;
      if (line.rfind("id,", 0) == 0) {
        with_ids = true;
        continue;  // header row
      }
    }
    auto parts = detail::split(line, ',');
    std::size_t value_start = 0;
    if (with_ids) {
      set.ids.push_back(detail::trim(parts[0]));
      value_start = 1;
    }
    Index row_cols = Index(parts.size() - value_start);
    if (row_cols < 1) throw ParseError("line " + std::to_string(line_no) + ": no values");
    if (ncols < 0)
      ncols = row_cols;
    else if (row_cols != ncols)
      throw ParseError("line " + std::to_string(line_no) + ": " + std::to_string(row_cols) +
                       " columns, expected " + std::to_string(ncols));
    for (std::size_t t = value_start; t < parts.size(); ++t)
      values.push_back(detail::parse_double(detail::trim(parts[t]), line_no));
    ++nrows;
  }
  if (nrows == 0) throw ParseError("'" + path + "': empty descriptor set");
  set.vectors.resize(nrows, ncols);
  for (Index i = 0; i < nrows; ++i)
    for (Index j = 0; j < ncols; ++j) set.vectors(i, j) = values[std::size_t(i * ncols + j)];
  validate_descriptor_set(set);
  return set;
}

struct NormalizeResult {
  DescriptorSet set;
  std::vector<Index> zero_rows;  // rows left untouched because their norm is 0
};

inline NormalizeResult l2_normalize(const DescriptorSet& input) {
  NormalizeResult r;
  r.set = input;
  for (Index i = 0; i < r.set.rows(); ++i) {
    double norm = r.set.vectors.row(i).norm();
    if (norm == 0.0)
      r.zero_rows.push_back(i);
    else
      r.set.vectors.row(i) /= norm;
  }
  return r;
}

inline void validate_ground_truth(const GroundTruth& gt, const std::vector<std::string>& ids) {
  std::unordered_set<std::string> known(ids.begin(), ids.end());
  std::unordered_set<std::string> seen_queries;
  for (const auto& [query, relevant] : gt.queries) {
    if (!known.count(query))
      throw GroundTruthError("query '" + query + "' is not a database id");
    if (!seen_queries.insert(query).second)
      throw GroundTruthError("query '" + query + "' listed twice");
    if (relevant.empty())
      throw GroundTruthError("query '" + query + "' has an empty relevant set");
    for (const auto& rel : relevant)
      if (!known.count(rel))
        throw GroundTruthError("query '" + query + "' references unknown id '" + rel + "'");
  }
}

inline GroundTruth load_ground_truth(const std::string& path,
                                     const std::vector<std::string>& database_ids) {
  std::string text = detail::read_file_bytes(path);
  std::istringstream in(text);
  GroundTruth gt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'query_id: rel ...'");
    std::string query = detail::trim(line.substr(0, colon));
    if (query.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty query id");
    std::istringstream rest(line.substr(colon + 1));
    std::vector<std::string> relevant;
    std::string tok;
    while (rest >> tok) relevant.push_back(tok);
    gt.queries.emplace_back(std::move(query), std::move(relevant));
  }
  validate_ground_truth(gt, database_ids);
  return gt;
}

inline void save_ground_truth(const GroundTruth& gt, const std::string& path) {
  std::string out;
  for (const auto& [query, relevant] : gt.queries) {
    out += query;
    out += ':';
    for (const auto& rel : relevant) {
      out += ' ';
      out += rel;
    }
    out += '\n';
  }
  detail::write_file_bytes(path, out);
}

}  // namespace ime
