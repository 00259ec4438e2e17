#include "mapcore/dedup_match.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "mapcore/error.hpp"
#include "mapcore/eval.hpp"

namespace mapcore {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    // smaller root index wins, keeping roots deterministic
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Canonical member order so results do not depend on input order.
bool member_less(const ObjectRecord& a, const ObjectRecord& b) {
  return std::tie(a.id, a.point.lat, a.point.lon) < std::tie(b.id, b.point.lat, b.point.lon);
}

GeoPoint centroid(const std::vector<const ObjectRecord*>& members, const EarthModel& em) {
  const GeoPoint anchor = members.front()->point;
  double east = 0.0, north = 0.0;
  for (const ObjectRecord* m : members) {
    const EnuDisplacement d = geo_to_displacement(m->point, anchor, em);
    east += d.d_east;
    north += d.d_north;
  }
  const auto n = static_cast<double>(members.size());
  east /= n;
  north /= n;
  return displacement_to_geo({east, north, std::hypot(east, north)}, anchor, em);
}

ObjectRecord merge(std::vector<const ObjectRecord*> members, const EarthModel& em) {
  std::sort(members.begin(), members.end(),
            [](const ObjectRecord* a, const ObjectRecord* b) { return member_less(*a, *b); });
  if (members.size() == 1) return *members.front();
  const GeoPoint c = centroid(members, em);
  const ObjectRecord* nearest = members.front();
  double best = geo_distance(nearest->point, c, em);
  for (const ObjectRecord* m : members) {
    const double d = geo_distance(m->point, c, em);
    if (d < best) {
      best = d;
      nearest = m;
    }
  }
  ObjectRecord out = *nearest;
  out.id = members.front()->id;
  out.point = c;
  out.extent.reset();
  std::vector<std::string> images;
  for (const ObjectRecord* m : members) {
    images.insert(images.end(), m->image_ids.begin(), m->image_ids.end());
  }
  std::sort(images.begin(), images.end());
  images.erase(std::unique(images.begin(), images.end()), images.end());
  // keep the representative's source image first
  if (!nearest->image_ids.empty()) {
    const auto it = std::find(images.begin(), images.end(), nearest->image_ids.front());
    std::rotate(images.begin(), it, it + 1);
  }
  out.image_ids = std::move(images);
  return out;
}

using Clusters = std::vector<std::vector<std::size_t>>;

Clusters collect(UnionFind& uf, std::size_t n) {
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  Clusters out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  return out;
}

std::vector<ObjectRecord> transitive_dedup(const std::vector<ObjectRecord>& records, double radius,
                                           const EarthModel& em) {
  const std::size_t n = records.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (records[i].class_id == records[j].class_id &&
          geo_distance(records[i].point, records[j].point, em) <= radius) {
        uf.unite(i, j);
      }
    }
  }
  Clusters clusters = collect(uf, n);
  // Repeat over centroids until no two same-class clusters are within reach.
  while (true) {
    std::vector<ObjectRecord> centres;
    for (const auto& c : clusters) {
      std::vector<const ObjectRecord*> members;
      for (std::size_t i : c) members.push_back(&records[i]);
      centres.push_back(merge(members, em));
    }
    UnionFind outer(clusters.size());
    bool merged = false;
    for (std::size_t i = 0; i < centres.size(); ++i) {
      for (std::size_t j = i + 1; j < centres.size(); ++j) {
        if (centres[i].class_id == centres[j].class_id &&
            geo_distance(centres[i].point, centres[j].point, em) <= radius) {
          merged |= outer.unite(i, j);
        }
      }
    }
    if (!merged) return centres;
    Clusters next;
    for (const auto& group : collect(outer, clusters.size())) {
      std::vector<std::size_t> members;
      for (std::size_t ci : group) members.insert(members.end(), clusters[ci].begin(), clusters[ci].end());
      next.push_back(std::move(members));
    }
    clusters = std::move(next);
  }
}

std::vector<ObjectRecord> strict_dedup(const std::vector<ObjectRecord>& records, double radius,
                                       const EarthModel& em) {
  const std::size_t n = records.size();
  struct Candidate {
    double distance;
    std::size_t a, b;
  };
  std::vector<Candidate> candidates;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i][j] = dist[j][i] = geo_distance(records[i].point, records[j].point, em);
      if (records[i].class_id == records[j].class_id && dist[i][j] <= radius) {
        candidates.push_back({dist[i][j], i, j});
      }
    }
  }
  auto key = [&](const Candidate& c) {
    const auto& ra = records[c.a];
    const auto& rb = records[c.b];
    const bool swap = member_less(rb, ra);
    return std::make_tuple(c.distance, swap ? rb.id : ra.id, swap ? ra.id : rb.id);
  };
  std::sort(candidates.begin(), candidates.end(),
            [&](const Candidate& x, const Candidate& y) { return key(x) < key(y); });
  UnionFind uf(n);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  for (const Candidate& c : candidates) {
    const std::size_t ra = uf.find(c.a), rb = uf.find(c.b);
    if (ra == rb) continue;
    bool ok = true;
    for (std::size_t i : members[ra]) {
      for (std::size_t j : members[rb]) ok = ok && dist[i][j] <= radius;
    }
    if (!ok) continue;
    uf.unite(ra, rb);
    const std::size_t root = uf.find(ra);
    const std::size_t other = root == ra ? rb : ra;
    members[root].insert(members[root].end(), members[other].begin(), members[other].end());
    members[other].clear();
  }
  std::vector<ObjectRecord> out;
  for (const auto& c : collect(uf, n)) {
    std::vector<const ObjectRecord*> ms;
    for (std::size_t i : c) ms.push_back(&records[i]);
    out.push_back(merge(ms, em));
  }
  return out;
}

struct CandidatePair {
  double distance;
  std::size_t pred;
  std::size_t ref;
};

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

// One-to-one greedy assignment over candidate pairs in ascending distance.
MatchResult assign(const std::vector<ObjectRecord>& preds, const std::vector<Reference>& refs,
                   std::vector<CandidatePair> candidates, const std::vector<double>& edges,
                   const EarthModel& em, std::vector<std::string> diagnostics) {
  std::sort(candidates.begin(), candidates.end(), [&](const CandidatePair& a, const CandidatePair& b) {
    return std::tie(a.distance, preds[a.pred].id, refs[a.ref].id) <
           std::tie(b.distance, preds[b.pred].id, refs[b.ref].id);
  });
  std::vector<bool> pred_used(preds.size(), false), ref_used(refs.size(), false);
  MatchResult result;
  result.diagnostics = std::move(diagnostics);
  for (const CandidatePair& c : candidates) {
    if (pred_used[c.pred] || ref_used[c.ref]) continue;
    pred_used[c.pred] = ref_used[c.ref] = true;
    const ObjectRecord& p = preds[c.pred];
    MatchPair pair;
    pair.prediction_id = p.id;
    pair.reference_id = refs[c.ref].id;
    pair.distance_m = c.distance;
    pair.estimated_distance_m = p.distance_m;
    if (p.camera) pair.true_camera_distance_m = geo_distance(*p.camera, refs[c.ref].point, em);
    result.pairs.push_back(std::move(pair));
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pred_used[i]) result.unmatched_predictions.push_back(preds[i].id);
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!ref_used[i]) result.unmatched_references.push_back(refs[i].id);
  }
  MatchSummary& s = result.summary;
  s.predictions = preds.size();
  s.references = refs.size();
  s.matched = result.pairs.size();
  s.found_fraction = refs.empty() ? 0.0 : double(s.matched) / double(refs.size());
  std::vector<double> distances;
  for (const auto& p : result.pairs) distances.push_back(p.distance_m);
  if (!distances.empty()) {
    s.mean_distance_m = std::accumulate(distances.begin(), distances.end(), 0.0) /
                        static_cast<double>(distances.size());
    s.median_distance_m = median_of(distances);
  }
  s.by_interval = coord_error_stats(result, edges).intervals;
  return result;
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kConfig, std::string(what) + " must be positive");
  }
}

}  // namespace

std::vector<ObjectRecord> dedup(const std::vector<ObjectRecord>& records, double radius_m,
                                const DedupOptions& opts) {
  check_positive(radius_m, "dedup radius");
  std::vector<ObjectRecord> out = opts.mode == ClusterMode::kTransitive
                                      ? transitive_dedup(records, radius_m, opts.earth)
                                      : strict_dedup(records, radius_m, opts.earth);
  std::sort(out.begin(), out.end(), member_less);
  return out;
}

MatchResult match_annotations(const std::vector<ObjectRecord>& preds,
                              const std::vector<Reference>& refs, const MatchOptions& opts) {
  check_positive(opts.max_distance_m, "maximum match distance");
  std::vector<CandidatePair> candidates;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < refs.size(); ++j) {
      if (preds[i].class_id != refs[j].class_id) continue;
      const double d = geo_distance(preds[i].point, refs[j].point, opts.earth);
      if (d <= opts.max_distance_m) candidates.push_back({d, i, j});
    }
  }
  return assign(preds, refs, std::move(candidates), opts.interval_edges, opts.earth, {});
}

MatchResult match_database(const std::vector<ObjectRecord>& records,
                           const std::vector<Reference>& entries,
                           const DatabaseMatchOptions& opts) {
  check_positive(opts.radius_m, "database match radius");
  check_positive(opts.bearing_tolerance_deg, "bearing tolerance");
  std::vector<CandidatePair> candidates;
  std::vector<std::string> diagnostics;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ObjectRecord& r = records[i];
    if (!r.camera) {
      diagnostics.push_back("record " + r.id + " has no camera position; skipped");
      continue;
    }
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (r.class_id != entries[j].class_id) continue;
      const double d = geo_distance(r.point, entries[j].point, opts.earth);
      if (d > opts.radius_m) continue;
      const double seen_at = local_bearing(*r.camera, entries[j].point, opts.earth);
      if (std::abs(bearing_difference(seen_at, r.bearing_eff_deg)) > opts.bearing_tolerance_deg) {
        continue;
      }
      candidates.push_back({d, i, j});
    }
  }
  return assign(records, entries, std::move(candidates), opts.interval_edges, opts.earth,
                std::move(diagnostics));
}

}  // namespace mapcore
