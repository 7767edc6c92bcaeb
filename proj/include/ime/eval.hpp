#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ime/common.hpp"
#include "ime/dataset.hpp"

namespace ime {

// Full ranking of the database for one query, nearest first. When the query
// is itself a database row it is excluded from its own ranking.
struct RankedList {
  std::string query_id;
  std::vector<std::string> ids;
  std::vector<double> distances;
};

inline RankedList rank_by_distance(const Matrix& database, const std::vector<std::string>& ids,
                                   const Vector& query, const std::string& query_id = "") {
  if (Index(ids.size()) != database.rows())
    throw InvalidArgument("id count " + std::to_string(ids.size()) + " does not match " +
                          std::to_string(database.rows()) + " database rows");
  if (query.size() != database.cols())
    throw InvalidArgument("query dimension " + std::to_string(query.size()) +
                          " does not match database dimension " + std::to_string(database.cols()));
  Vector dist = (database.rowwise() - query.transpose()).rowwise().norm();
  std::vector<Index> order;
  order.reserve(std::size_t(database.rows()));
  for (Index i = 0; i < database.rows(); ++i)
    if (query_id.empty() || ids[std::size_t(i)] != query_id) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (dist(a) != dist(b)) return dist(a) < dist(b);
    return ids[std::size_t(a)] < ids[std::size_t(b)];  // ties: ascending id
  });
  RankedList out;
  out.query_id = query_id;
  out.ids.reserve(order.size());
  out.distances.reserve(order.size());
  for (Index i : order) {
    out.ids.push_back(ids[std::size_t(i)]);
    out.distances.push_back(dist(i));
  }
  return out;
}

// AP over the full ranking: mean over relevant items of precision at each
// relevant hit; relevant items missing from the ranking contribute 0.
inline double average_precision(const RankedList& ranked,
                                const std::vector<std::string>& relevant) {
  if (relevant.empty()) throw InvalidArgument("relevant set is empty");
  std::unordered_set<std::string> wanted(relevant.begin(), relevant.end());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < ranked.ids.size(); ++r)
    if (wanted.count(ranked.ids[r])) {
      ++hits;
      sum += double(hits) / double(r + 1);
    }
  return sum / double(wanted.size());
}

inline double mean_average_precision(const std::vector<RankedList>& lists,
                                     const GroundTruth& gt) {
  if (gt.queries.empty()) throw InvalidArgument("ground truth has no queries");
  std::unordered_map<std::string, const RankedList*> by_query;
  for (const auto& list : lists) by_query[list.query_id] = &list;
  double sum = 0.0;
  for (const auto& [query, relevant] : gt.queries) {
    auto it = by_query.find(query);
    if (it == by_query.end())
      throw GroundTruthError("no ranked list for query '" + query + "'");
    sum += average_precision(*it->second, relevant);
  }
  return sum / double(gt.queries.size());
}

}  // namespace ime
