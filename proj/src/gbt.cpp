#include "tabcop/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace tabcop {

namespace {

std::string fmt(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ModelError(std::string("bad ") + what + ": '" + s + "'");
  }
  return v;
}

// Column-major view of the training rows: for each feature, the rows in which
// it is present, sorted by value.
struct Columns {
  std::vector<std::uint32_t> features;
  std::vector<std::vector<std::pair<double, std::size_t>>> entries;

  Columns(const std::vector<Row>& rows, const std::vector<std::size_t>& idx) {
    std::map<std::uint32_t, std::vector<std::pair<double, std::size_t>>> by_feature;
    for (std::size_t r : idx) {
      for (const auto& [f, v] : rows[r].x.entries) by_feature[f].emplace_back(v, r);
    }
    for (auto& [f, col] : by_feature) {
      std::sort(col.begin(), col.end());
      features.push_back(f);
      entries.push_back(std::move(col));
    }
  }
};

struct NodeStats {
  double G = 0;
  double H = 0;
  std::size_t count = 0;
};

double score(double G, double H, double lambda) { return G * G / (H + lambda); }

Tree grow(const std::vector<Row>& rows, const std::vector<std::size_t>& idx, const Columns& cols,
          const std::vector<double>& g, const std::vector<double>& h, double lambda,
          std::size_t max_depth, Split* root_split) {
  Tree tree;
  tree.nodes.emplace_back();
  // node of each row within the level being split; -1 once in a final leaf
  std::vector<int> node_of(rows.size(), -1);
  NodeStats root;
  for (std::size_t r : idx) {
    node_of[r] = 0;
    root.G += g[r];
    root.H += h[r];
    ++root.count;
  }
  std::vector<int> level{0};
  std::map<int, NodeStats> stats{{0, root}};

  for (std::size_t depth = 0; !level.empty(); ++depth) {
    std::map<int, Split> best;
    if (depth < max_depth) {
      // slot of each level node in the scan arrays
      std::vector<std::size_t> slot(tree.nodes.size());
      for (std::size_t i = 0; i < level.size(); ++i) slot[static_cast<std::size_t>(level[i])] = i;
      std::vector<NodeStats> present(level.size()), prefix(level.size());
      std::vector<double> last(level.size());
      std::vector<char> seen(level.size());
      std::vector<Split> found(level.size());
      std::vector<std::size_t> touched;

      for (std::size_t c = 0; c < cols.features.size(); ++c) {
        const auto& col = cols.entries[c];
        touched.clear();
        for (const auto& [v, r] : col) {
          if (node_of[r] < 0) continue;
          const std::size_t k = slot[static_cast<std::size_t>(node_of[r])];
          if (!seen[k]) {
            seen[k] = 1;
            touched.push_back(k);
            present[k] = NodeStats{};
          }
          present[k].G += g[r];
          present[k].H += h[r];
          ++present[k].count;
        }
        for (std::size_t k : touched) {
          seen[k] = 0;
          prefix[k] = NodeStats{};
        }

        auto consider = [&](std::size_t k, double thr, const NodeStats& left_present) {
          const NodeStats& total = stats.at(level[k]);
          const NodeStats missing{total.G - present[k].G, total.H - present[k].H,
                                  total.count - present[k].count};
          const double parent = score(total.G, total.H, lambda);
          for (int dl = 0; dl < 2; ++dl) {
            NodeStats L = left_present;
            if (dl) {
              L.G += missing.G;
              L.H += missing.H;
              L.count += missing.count;
            }
            const std::size_t right_count = total.count - L.count;
            if (L.count == 0 || right_count == 0) continue;
            const double gain = score(L.G, L.H, lambda) +
                                score(total.G - L.G, total.H - L.H, lambda) - parent;
            if (gain > found[k].gain) {
              found[k] = Split{cols.features[c], thr, dl == 1, gain};
            }
          }
        };

        for (const auto& [v, r] : col) {
          if (node_of[r] < 0) continue;
          const std::size_t k = slot[static_cast<std::size_t>(node_of[r])];
          if (!seen[k]) {
            seen[k] = 1;
            consider(k, v, NodeStats{});
          } else if (v != last[k]) {
            consider(k, 0.5 * (last[k] + v), prefix[k]);
          }
          last[k] = v;
          prefix[k].G += g[r];
          prefix[k].H += h[r];
          ++prefix[k].count;
        }
        for (std::size_t k : touched) seen[k] = 0;
      }
      for (std::size_t k = 0; k < level.size(); ++k) {
        if (found[k].gain > 0) best[level[k]] = found[k];
      }
    }

    std::vector<int> next;
    std::map<int, NodeStats> next_stats;
    for (int id : level) {
      const NodeStats& st = stats.at(id);
      auto it = best.find(id);
      if (it == best.end()) {
        tree.nodes[id].leaf = true;
        tree.nodes[id].weight = -st.G / (st.H + lambda);
        continue;
      }
      if (id == 0 && root_split) *root_split = it->second;
      const int l = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& n = tree.nodes[id];
      n.leaf = false;
      n.feature = it->second.feature;
      n.threshold = it->second.threshold;
      n.default_left = it->second.default_left;
      n.left = l;
      n.right = l + 1;
      next.push_back(l);
      next.push_back(l + 1);
      next_stats[l];
      next_stats[l + 1];
    }
    for (std::size_t r : idx) {
      const int id = node_of[r];
      if (id < 0) continue;
      const TreeNode& n = tree.nodes[id];
      if (n.leaf) {
        node_of[r] = -1;
        continue;
      }
      const double v = rows[r].x.get(n.feature);
      const bool go_left = v == 0.0 ? n.default_left : v < n.threshold;
      const int child = go_left ? n.left : n.right;
      node_of[r] = child;
      NodeStats& cs = next_stats[child];
      cs.G += g[r];
      cs.H += h[r];
      ++cs.count;
    }
    level = std::move(next);
    stats = std::move(next_stats);
  }
  return tree;
}

double weighted_rmse(const std::vector<Row>& rows, const std::vector<std::size_t>& idx,
                     const std::vector<double>& pred) {
  double se = 0, w = 0;
  for (std::size_t r : idx) {
    const double d = pred[r] - rows[r].y;
    se += rows[r].w * d * d;
    w += rows[r].w;
  }
  return w > 0 ? std::sqrt(se / w) : 0.0;
}

} // namespace

double Tree::leaf_value(const FeatureVector& x) const {
  std::size_t i = 0;
  while (!nodes[i].leaf) {
    const TreeNode& n = nodes[i];
    const double v = x.get(n.feature);
    const bool go_left = v == 0.0 ? n.default_left : v < n.threshold;
    i = static_cast<std::size_t>(go_left ? n.left : n.right);
  }
  return nodes[i].weight;
}

double GbtModel::predict(const FeatureVector& x) const {
  if (x.dim != dim) {
    throw ModelError("feature dimension " + std::to_string(x.dim) + " does not match model " +
                     std::to_string(dim));
  }
  double s = 0;
  for (const Tree& t : trees) s += t.leaf_value(x);
  return base + eta * s;
}

void GbtModel::save(std::ostream& out) const {
  out << "GBT v1 dim=" << dim << " eta=" << fmt(eta) << " base=" << fmt(base) << '\n';
  for (const Tree& t : trees) {
    std::string line;
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const TreeNode& n = t.nodes[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (!line.empty()) line += ' ';
      if (n.leaf) {
        line += "L " + fmt(n.weight);
      } else {
        line += "N " + std::to_string(n.feature) + " " + fmt(n.threshold) + " " +
                (n.default_left ? "L" : "R");
        stack.push_back(n.right);
        stack.push_back(n.left);
      }
    }
    out << line << '\n';
  }
  out << "END\n";
}

GbtModel GbtModel::load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ModelError("empty model file");
  std::istringstream hs(header);
  std::string magic, version, dim_s, eta_s, base_s;
  hs >> magic >> version >> dim_s >> eta_s >> base_s;
  if (magic != "GBT") throw ModelError("not a model file");
  if (version != "v1") throw ModelError("unsupported model version '" + version + "'");
  auto field = [](const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0) throw ModelError("malformed header field '" + tok + "'");
    return tok.substr(key.size() + 1);
  };
  GbtModel m;
  const std::string d = field(dim_s, "dim");
  if (d.empty() || d.find_first_not_of("0123456789") != std::string::npos) {
    throw ModelError("bad dim '" + d + "'");
  }
  m.dim = std::stoull(d);
  m.eta = parse_double(field(eta_s, "eta"), "eta");
  m.base = parse_double(field(base_s, "base"), "base");

  std::string line;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "END") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    Tree t;
    // returns the index of the node just read
    std::function<int()> read_node = [&]() -> int {
      std::string kind;
      if (!(ls >> kind)) throw ModelError("truncated tree");
      const int id = static_cast<int>(t.nodes.size());
      t.nodes.emplace_back();
      if (kind == "L") {
        std::string w;
        if (!(ls >> w)) throw ModelError("truncated leaf");
        t.nodes[id].weight = parse_double(w, "leaf weight");
        return id;
      }
      if (kind != "N") throw ModelError("unknown node kind '" + kind + "'");
      std::string f, thr, dir;
      if (!(ls >> f >> thr >> dir)) throw ModelError("truncated split");
      if (f.empty() || f.find_first_not_of("0123456789") != std::string::npos) {
        throw ModelError("bad feature index '" + f + "'");
      }
      const unsigned long long fi = std::stoull(f);
      if (fi >= m.dim) throw ModelError("feature index out of range");
      if (dir != "L" && dir != "R") throw ModelError("bad default direction '" + dir + "'");
      t.nodes[id].leaf = false;
      t.nodes[id].feature = static_cast<std::uint32_t>(fi);
      t.nodes[id].threshold = parse_double(thr, "threshold");
      t.nodes[id].default_left = dir == "L";
      const int l = read_node();
      const int r = read_node();
      t.nodes[id].left = l;
      t.nodes[id].right = r;
      return id;
    };
    read_node();
    std::string extra;
    if (ls >> extra) throw ModelError("trailing tokens in tree line");
    m.trees.push_back(std::move(t));
  }
  if (!ended) throw ModelError("model file is truncated");
  return m;
}

void GbtModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file: " + path);
  save(out);
}

GbtModel GbtModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file: " + path);
  return load(in);
}

void dedupe_max(std::vector<Row>& rows) {
  std::map<std::vector<std::pair<std::uint32_t, double>>, std::size_t> first;
  std::vector<Row> out;
  for (Row& r : rows) {
    auto [it, fresh] = first.emplace(r.x.entries, out.size());
    if (fresh) {
      out.push_back(std::move(r));
    } else {
      out[it->second].y = std::max(out[it->second].y, r.y);
    }
  }
  rows = std::move(out);
}

void write_dataset(std::ostream& out, const Dataset& d) {
  for (const Row& r : d.rows) {
    out << fmt(r.y);
    for (const auto& [i, v] : r.x.entries) out << ' ' << i << ':' << fmt(v);
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in, std::size_t dim) {
  Dataset d;
  d.dim = dim;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    auto where = [&] { return "dataset line " + std::to_string(line_no) + ": "; };
    Row r;
    try {
      r.y = parse_double(tok, "target");
    } catch (const ModelError& e) {
      throw ModelError(where() + e.what());
    }
    r.x.dim = dim;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0) throw ModelError(where() + "bad entry '" + tok + "'");
      const std::string idx = tok.substr(0, colon);
      if (idx.find_first_not_of("0123456789") != std::string::npos) {
        throw ModelError(where() + "bad index '" + idx + "'");
      }
      const unsigned long long i = std::stoull(idx);
      if (i >= dim) throw ModelError(where() + "index out of range");
      if (!r.x.entries.empty() && r.x.entries.back().first >= i) {
        throw ModelError(where() + "indices must be strictly ascending");
      }
      double v;
      try {
        v = parse_double(tok.substr(colon + 1), "value");
      } catch (const ModelError& e) {
        throw ModelError(where() + e.what());
      }
      if (v != 0.0) r.x.entries.emplace_back(static_cast<std::uint32_t>(i), v);
    }
    d.rows.push_back(std::move(r));
  }
  return d;
}

void save_dataset(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write dataset: " + path);
  write_dataset(out, d);
}

Dataset load_dataset(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open dataset: " + path);
  return read_dataset(in, dim);
}

Tree fit_tree(const std::vector<Row>& rows, const std::vector<std::size_t>& idx,
              const std::vector<double>& g, const std::vector<double>& h, double lambda,
              std::size_t max_depth) {
  const Columns cols(rows, idx);
  return grow(rows, idx, cols, g, h, lambda, max_depth, nullptr);
}

GbtModel train(const Dataset& data, const LearnerParams& params, std::uint64_t seed,
               TrainLog* log) {
  if (data.rows.empty()) throw ModelError("cannot train on an empty dataset");
  std::vector<Row> rows = data.rows;
  const std::size_t n = rows.size();

  if (params.sign_balance) {
    std::size_t neg = 0;
    for (const Row& r : rows) neg += r.y < 0;
    const std::size_t pos = n - neg;
    if (neg > 0 && pos > 0 && neg != pos) {
      const bool neg_minority = neg < pos;
      const double factor = neg_minority ? double(pos) / double(neg) : double(neg) / double(pos);
      for (Row& r : rows) {
        if ((r.y < 0) == neg_minority) r.w *= factor;
      }
    }
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t n_hold = n / 10;
  std::vector<std::size_t> hold(perm.begin(), perm.begin() + static_cast<long>(n_hold));
  std::vector<std::size_t> fit(perm.begin() + static_cast<long>(n_hold), perm.end());
  std::sort(hold.begin(), hold.end());
  std::sort(fit.begin(), fit.end());

  GbtModel m;
  m.dim = data.dim;
  m.eta = params.eta;
  double sw = 0, swy = 0;
  for (std::size_t r : fit) {
    sw += rows[r].w;
    swy += rows[r].w * rows[r].y;
  }
  m.base = swy / sw;

  const Columns cols(rows, fit);
  std::vector<double> pred(n, m.base), g(n, 0.0), h(n, 0.0);
  double best_hold = n_hold ? weighted_rmse(rows, hold, pred) : 0.0;
  std::size_t best_round = 0, since_best = 0;
  TrainLog local;

  for (std::size_t round = 0; round < params.rounds; ++round) {
    for (std::size_t r : fit) {
      g[r] = rows[r].w * (pred[r] - rows[r].y);
      h[r] = rows[r].w;
    }
    Split root{};
    Tree t = grow(rows, fit, cols, g, h, params.lambda, params.max_depth, &root);
    for (std::size_t r = 0; r < n; ++r) pred[r] += m.eta * t.leaf_value(rows[r].x);
    m.trees.push_back(std::move(t));
    local.root_splits.push_back(root);
    local.train_rmse.push_back(weighted_rmse(rows, fit, pred));
    if (n_hold) {
      const double hr = weighted_rmse(rows, hold, pred);
      local.holdout_rmse.push_back(hr);
      if (hr < best_hold) {
        best_hold = hr;
        best_round = m.trees.size();
        since_best = 0;
      } else if (++since_best >= params.patience) {
        break;
      }
    } else {
      best_round = m.trees.size();
    }
  }
  m.trees.resize(best_round);
  local.best_round = best_round;
  if (log) *log = std::move(local);
  return m;
}

} // namespace tabcop
