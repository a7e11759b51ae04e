#include "mtlplan/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

namespace mtlplan::encoder {

namespace {

// Cap on disjunctive parts per atom; fixes the satisfaction-variable
// index layout so node, part and until indices never collide.
constexpr int kMaxParts = 64;

int k_stride(int N) { return 1 + kMaxParts + N + 2; }

std::string istr(int v) { return std::to_string(v); }

// Largest |h^T x - offset| over the corners of the box.  The extremes
// of a linear function over a box separate per coordinate.
double face_defect(const workspace::Halfspace& h, const workspace::Box& box) {
  double mx = -h.offset, mn = -h.offset;
  for (int i = 0; i < h.dim(); ++i) {
    mx += std::max(h.normal[i] * box.lo[i], h.normal[i] * box.hi[i]);
    mn += std::min(h.normal[i] * box.lo[i], h.normal[i] * box.hi[i]);
  }
  return std::max(std::abs(mx), std::abs(mn));
}

}  // namespace

void EncodingConfig::validate() const {
  if (N < 1) throw EncodeError("encoding horizon must be at least one step");
  if (!(eps > 0.0)) throw EncodeError("eps must be positive");
  if (M < 0.0) throw EncodeError("big-M must be nonnegative");
  if (M > 0.0 && !(eps < M)) throw EncodeError("eps must stay below big-M");
}

double default_big_m(const workspace::Workspace& ws) {
  double worst = 0.0;
  for (const auto& region : ws.regions)
    for (const auto& part : region.parts)
      for (const auto& face : part.halfspaces)
        worst = std::max(worst, face_defect(face, ws.bounds));
  return 2.0 * worst + 1.0;
}

void VarMap::add(VarRole role, int time, int index, int var) {
  auto key = std::make_tuple(static_cast<int>(role), time, index);
  if (!ids_.emplace(key, var).second) throw EncodeError("duplicate variable key");
}

int VarMap::at(VarRole role, int time, int index) const {
  auto it = ids_.find(std::make_tuple(static_cast<int>(role), time, index));
  if (it == ids_.end())
    throw EncodeError("no variable for role " + istr(static_cast<int>(role)) + " at t=" +
                      istr(time) + " index " + istr(index));
  return it->second;
}

bool VarMap::has(VarRole role, int time, int index) const {
  return ids_.count(std::make_tuple(static_cast<int>(role), time, index)) > 0;
}

Encoder::Encoder(const dynamics::LinearMode& mode, const workspace::Workspace& ws,
                 EncodingConfig cfg)
    : mode_(mode), ws_(ws), cfg_(cfg) {
  cfg_.validate();
  if (cfg_.M == 0.0) cfg_.M = default_big_m(ws);
  if (!(cfg_.eps < cfg_.M)) throw EncodeError("eps must stay below big-M");

  const int n = mode.state_dim();
  const int m = mode.input_dim();
  const int d = static_cast<int>(ws.bounds.lo.size());
  if (static_cast<int>(mode.position_dims.size()) != d)
    throw EncodeError("mode position dims do not match the workspace dimension");
  if (mode.Ad.rows() != n || mode.Ad.cols() != n)
    throw EncodeError("discrete state matrix has the wrong shape");
  if (mode.Bd.rows() != n || mode.Bd.cols() != m)
    throw EncodeError("discrete input matrix has the wrong shape");
  if (mode.cd.size() != n) throw EncodeError("discrete drift has the wrong dimension");
  if (mode.x_star.size() != n) throw EncodeError("operating point has the wrong dimension");
  if (static_cast<int>(mode.state_bounds.size()) != n)
    throw EncodeError("state bounds have the wrong dimension");
  if (static_cast<int>(mode.input_bounds.size()) != m)
    throw EncodeError("input bounds have the wrong dimension");
  for (int k : mode.position_dims) {
    if (k < 0 || k >= n) throw EncodeError("position dim out of range");
    if (std::abs(mode.x_star[k]) > 1e-12)
      throw EncodeError("operating point must be zero on position dims");
  }

  out_.position_dims = mode.position_dims;
  out_.state_dim = n;
  out_.input_dim = m;
  out_.N = cfg_.N;
  out_.eps = cfg_.eps;
  out_.regions = ws.regions;
  out_.model.name = mode.name.empty() ? std::string("subtask") : mode.name;
}

void Encoder::encode_dynamics(const Eigen::VectorXd& x0_hat) {
  if (dynamics_done_) throw EncodeError("dynamics already encoded");
  if (x0_hat.size() != out_.state_dim)
    throw EncodeError("initial state has the wrong dimension");

  const int n = out_.state_dim;
  const int m = out_.input_dim;
  const int N = cfg_.N;

  std::vector<int> pos_of(n, -1);
  for (int k = 0; k < static_cast<int>(out_.position_dims.size()); ++k)
    pos_of[out_.position_dims[k]] = k;

  for (int t = 0; t <= N; ++t)
    for (int i = 0; i < n; ++i) {
      double lo, hi;
      if (pos_of[i] >= 0) {
        lo = ws_.bounds.lo[pos_of[i]];
        hi = ws_.bounds.hi[pos_of[i]];
      } else {
        lo = mode_.state_bounds[i].lo - mode_.x_star[i];
        hi = mode_.state_bounds[i].hi - mode_.x_star[i];
      }
      int v = out_.model.add_var("x_t" + istr(t) + "_" + istr(i), milp::VarKind::Continuous,
                                 lo, hi);
      out_.map.add(VarRole::State, t, i, v);
    }

  for (int t = 0; t < N; ++t)
    for (int i = 0; i < m; ++i) {
      int v = out_.model.add_var("u_t" + istr(t) + "_" + istr(i), milp::VarKind::Continuous,
                                 mode_.input_bounds[i].lo, mode_.input_bounds[i].hi);
      out_.map.add(VarRole::Input, t, i, v);
    }

  for (int i = 0; i < n; ++i)
    out_.model.add_constraint("init_" + istr(i),
                              {{out_.map.at(VarRole::State, 0, i), 1.0}},
                              milp::Relation::Equal, x0_hat[i]);

  for (int t = 0; t < N; ++t)
    for (int i = 0; i < n; ++i) {
      std::vector<milp::Term> terms;
      terms.push_back({out_.map.at(VarRole::State, t + 1, i), 1.0});
      for (int j = 0; j < n; ++j)
        if (mode_.Ad(i, j) != 0.0)
          terms.push_back({out_.map.at(VarRole::State, t, j), -mode_.Ad(i, j)});
      for (int k = 0; k < m; ++k)
        if (mode_.Bd(i, k) != 0.0)
          terms.push_back({out_.map.at(VarRole::Input, t, k), -mode_.Bd(i, k)});
      out_.model.add_constraint("dyn_t" + istr(t) + "_" + istr(i), std::move(terms),
                                milp::Relation::Equal, mode_.cd[i]);
    }

  dynamics_done_ = true;
}

void Encoder::encode_objective() {
  if (!dynamics_done_) throw EncodeError("encode dynamics before the objective");
  if (objective_done_) throw EncodeError("objective already encoded");

  const int m = out_.input_dim;
  for (int t = 0; t < cfg_.N; ++t)
    for (int i = 0; i < m; ++i) {
      int s = out_.model.add_var("s_t" + istr(t) + "_" + istr(i), milp::VarKind::Continuous,
                                 0.0, milp::kInf);
      out_.map.add(VarRole::InputAbs, t, i, s);
      out_.model.add_objective_term(s, 1.0);
    }
  for (int t = 0; t < cfg_.N; ++t)
    for (int i = 0; i < m; ++i) {
      int u = out_.map.at(VarRole::Input, t, i);
      int s = out_.map.at(VarRole::InputAbs, t, i);
      out_.model.add_constraint("abs_p_t" + istr(t) + "_" + istr(i), {{u, 1.0}, {s, -1.0}},
                                milp::Relation::LessEq, 0.0);
      out_.model.add_constraint("abs_n_t" + istr(t) + "_" + istr(i), {{u, -1.0}, {s, -1.0}},
                                milp::Relation::LessEq, 0.0);
    }

  objective_done_ = true;
}

std::vector<int> Encoder::encode_halfspace_bits(const workspace::ConvexPolytope& poly) {
  if (!dynamics_done_) throw EncodeError("encode dynamics before halfspace bits");
  if (formula_done_) throw EncodeError("model is closed after the root pin");
  if (poly.halfspaces.empty()) throw EncodeError("polytope has no halfspaces");

  const int d = static_cast<int>(out_.position_dims.size());
  std::vector<int> ids;
  for (const auto& face : poly.halfspaces) {
    if (face.dim() != d) throw EncodeError("halfspace dimension does not match positions");
    double defect = face_defect(face, ws_.bounds);
    if (!(cfg_.M > defect))
      throw EncodeError("big-M " + std::to_string(cfg_.M) +
                        " does not cover face defect " + std::to_string(defect));
    ids.push_back(static_cast<int>(out_.faces.size()));
    out_.faces.push_back(face);
  }

  for (int t = 0; t <= cfg_.N; ++t)
    for (int f : ids) {
      int b = out_.model.add_binary("b_t" + istr(t) + "_f" + istr(f));
      out_.map.add(VarRole::HalfspaceBit, t, f, b);
    }

  for (int t = 0; t <= cfg_.N; ++t)
    for (int f : ids) {
      const auto& face = out_.faces[f];
      int b = out_.map.at(VarRole::HalfspaceBit, t, f);
      std::vector<milp::Term> in, outr;
      for (int k = 0; k < d; ++k)
        if (face.normal[k] != 0.0) {
          int x = out_.map.at(VarRole::State, t, out_.position_dims[k]);
          in.push_back({x, face.normal[k]});
          outr.push_back({x, -face.normal[k]});
        }
      in.push_back({b, cfg_.M});
      outr.push_back({b, -cfg_.M});
      out_.model.add_constraint("hs_in_t" + istr(t) + "_f" + istr(f), std::move(in),
                                milp::Relation::LessEq, face.offset + cfg_.M);
      out_.model.add_constraint("hs_out_t" + istr(t) + "_f" + istr(f), std::move(outr),
                                milp::Relation::LessEq, -face.offset - cfg_.eps);
    }

  return ids;
}

int Encoder::encode_atom(const workspace::Region& region) {
  if (!dynamics_done_) throw EncodeError("encode dynamics before atoms");
  if (formula_done_) throw EncodeError("model is closed after the root pin");
  if (region.label.empty()) throw EncodeError("atom region needs a label");
  if (auto it = atom_nodes_.find(region.label); it != atom_nodes_.end()) return it->second;
  if (region.parts.empty()) throw EncodeError("atom region has no parts");
  if (static_cast<int>(region.parts.size()) > kMaxParts)
    throw EncodeError("atom region has too many parts");

  int ridx = -1;
  for (int i = 0; i < static_cast<int>(out_.regions.size()); ++i)
    if (out_.regions[i].label == region.label) {
      ridx = i;
      break;
    }
  if (ridx < 0) {
    ridx = static_cast<int>(out_.regions.size());
    out_.regions.push_back(region);
  }

  const int node = static_cast<int>(out_.nodes.size());
  EncNode enc;
  enc.op = mtl::Op::Atom;
  enc.region = ridx;
  for (const auto& part : region.parts) enc.part_faces.push_back(encode_halfspace_bits(part));
  for (int t = 0; t <= cfg_.N; ++t) enc.times.push_back(t);
  out_.nodes.push_back(std::move(enc));

  const auto& parts = out_.nodes[node].part_faces;
  const int np = static_cast<int>(parts.size());
  for (int t = 0; t <= cfg_.N; ++t) {
    int K = out_.model.add_var("K_n" + istr(node) + "_t" + istr(t), milp::VarKind::Continuous,
                               0.0, 1.0);
    out_.map.add(VarRole::K, t, k_index(node), K);
    if (np > 1 && region.active_at(t))
      for (int p = 0; p < np; ++p) {
        int Kp = out_.model.add_var("Kp_n" + istr(node) + "_p" + istr(p) + "_t" + istr(t),
                                    milp::VarKind::Continuous, 0.0, 1.0);
        out_.map.add(VarRole::K, t, part_index(node, p), Kp);
      }
  }

  for (int t = 0; t <= cfg_.N; ++t) {
    int K = kvar(node, t);
    if (!region.active_at(t)) {
      out_.model.add_constraint("atw_n" + istr(node) + "_t" + istr(t), {{K, 1.0}},
                                milp::Relation::Equal, 0.0);
      continue;
    }
    if (np == 1) {
      std::vector<milp::Term> lower{{K, -1.0}};
      for (int f : parts[0]) {
        int b = out_.map.at(VarRole::HalfspaceBit, t, f);
        out_.model.add_constraint(
            "atc_n" + istr(node) + "_t" + istr(t) + "_f" + istr(f),
            {{K, 1.0}, {b, -1.0}}, milp::Relation::LessEq, 0.0);
        lower.push_back({b, 1.0});
      }
      out_.model.add_constraint("atl_n" + istr(node) + "_t" + istr(t), std::move(lower),
                                milp::Relation::LessEq,
                                static_cast<double>(parts[0].size()) - 1.0);
      continue;
    }
    for (int p = 0; p < np; ++p) {
      int Kp = out_.map.at(VarRole::K, t, part_index(node, p));
      std::vector<milp::Term> lower{{Kp, -1.0}};
      for (int f : parts[p]) {
        int b = out_.map.at(VarRole::HalfspaceBit, t, f);
        out_.model.add_constraint(
            "apc_n" + istr(node) + "_p" + istr(p) + "_t" + istr(t) + "_f" + istr(f),
            {{Kp, 1.0}, {b, -1.0}}, milp::Relation::LessEq, 0.0);
        lower.push_back({b, 1.0});
      }
      out_.model.add_constraint("apl_n" + istr(node) + "_p" + istr(p) + "_t" + istr(t),
                                std::move(lower), milp::Relation::LessEq,
                                static_cast<double>(parts[p].size()) - 1.0);
    }
    std::vector<milp::Term> upper{{K, 1.0}};
    for (int p = 0; p < np; ++p) {
      int Kp = out_.map.at(VarRole::K, t, part_index(node, p));
      out_.model.add_constraint("aor_n" + istr(node) + "_t" + istr(t) + "_p" + istr(p),
                                {{Kp, 1.0}, {K, -1.0}}, milp::Relation::LessEq, 0.0);
      upper.push_back({Kp, -1.0});
    }
    out_.model.add_constraint("aou_n" + istr(node) + "_t" + istr(t), std::move(upper),
                              milp::Relation::LessEq, 0.0);
  }

  atom_nodes_[region.label] = node;
  return node;
}

int Encoder::ensure_atom(const mtl::Formula& f) {
  const std::string& label = f.label();
  if (auto it = atom_nodes_.find(label); it != atom_nodes_.end()) return it->second;
  const workspace::Region* region = ws_.find(label);
  if (!region) throw EncodeError("formula references unknown region '" + label + "'");
  return encode_atom(*region);
}

int Encoder::collect(const mtl::Formula& f) {
  if (auto it = node_ids_.find(f.id()); it != node_ids_.end()) return it->second;
  if (f.op() == mtl::Op::Atom) {
    int node = ensure_atom(f);
    node_ids_[f.id()] = node;
    return node;
  }

  const int node = static_cast<int>(out_.nodes.size());
  EncNode enc;
  enc.op = f.op();
  switch (f.op()) {
    case mtl::Op::Eventually:
    case mtl::Op::Always:
    case mtl::Op::Until:
      enc.ivl = f.interval();
      break;
    default:
      break;
  }
  out_.nodes.push_back(std::move(enc));
  node_ids_[f.id()] = node;

  std::vector<int> kids;
  for (const auto& k : f.children()) kids.push_back(collect(k));
  out_.nodes[node].kids = std::move(kids);
  return node;
}

void Encoder::mark_times(int node, int t) {
  EncNode& nd = out_.nodes[node];
  auto it = std::lower_bound(nd.times.begin(), nd.times.end(), t);
  if (it != nd.times.end() && *it == t) return;
  nd.times.insert(it, t);
  switch (nd.op) {
    case mtl::Op::True:
    case mtl::Op::Atom:
      return;
    case mtl::Op::Not:
    case mtl::Op::And:
    case mtl::Op::Or: {
      std::vector<int> kids = nd.kids;
      for (int k : kids) mark_times(k, t);
      return;
    }
    case mtl::Op::Eventually:
    case mtl::Op::Always: {
      int kid = nd.kids[0];
      int lo = nd.ivl.lo, hi = *nd.ivl.hi;
      for (int tau = lo; tau <= hi; ++tau) mark_times(kid, t + tau);
      return;
    }
    case mtl::Op::Until: {
      int p = nd.kids[0], q = nd.kids[1];
      int lo = nd.ivl.lo, hi = *nd.ivl.hi;
      for (int j = lo; j <= hi; ++j) mark_times(q, t + j);
      for (int l = 0; l < hi; ++l) mark_times(p, t + l);
      return;
    }
    case mtl::Op::Next:
      throw EncodeError("next operator is not supported by the encoding");
  }
}

void Encoder::emit_node_rows(int node) {
  const EncNode& nd = out_.nodes[node];
  const std::string tag = "_n" + istr(node) + "_t";
  switch (nd.op) {
    case mtl::Op::Atom:
      return;
    case mtl::Op::True:
      for (int t : nd.times)
        out_.model.add_constraint("tru" + tag + istr(t), {{kvar(node, t), 1.0}},
                                  milp::Relation::Equal, 1.0);
      return;
    case mtl::Op::Not:
      for (int t : nd.times)
        out_.model.add_constraint("not" + tag + istr(t),
                                  {{kvar(node, t), 1.0}, {kvar(nd.kids[0], t), 1.0}},
                                  milp::Relation::Equal, 1.0);
      return;
    case mtl::Op::And:
      for (int t : nd.times) {
        int K = kvar(node, t);
        std::vector<milp::Term> lower;
        for (int i = 0; i < static_cast<int>(nd.kids.size()); ++i) {
          int Kc = kvar(nd.kids[i], t);
          out_.model.add_constraint("and" + tag + istr(t) + "_k" + istr(i),
                                    {{K, 1.0}, {Kc, -1.0}}, milp::Relation::LessEq, 0.0);
          lower.push_back({Kc, 1.0});
        }
        lower.push_back({K, -1.0});
        out_.model.add_constraint("andl" + tag + istr(t), std::move(lower),
                                  milp::Relation::LessEq,
                                  static_cast<double>(nd.kids.size()) - 1.0);
      }
      return;
    case mtl::Op::Or:
      for (int t : nd.times) {
        int K = kvar(node, t);
        std::vector<milp::Term> upper{{K, 1.0}};
        for (int i = 0; i < static_cast<int>(nd.kids.size()); ++i) {
          int Kc = kvar(nd.kids[i], t);
          out_.model.add_constraint("or" + tag + istr(t) + "_k" + istr(i),
                                    {{Kc, 1.0}, {K, -1.0}}, milp::Relation::LessEq, 0.0);
          upper.push_back({Kc, -1.0});
        }
        out_.model.add_constraint("oru" + tag + istr(t), std::move(upper),
                                  milp::Relation::LessEq, 0.0);
      }
      return;
    case mtl::Op::Eventually:
      for (int t : nd.times) {
        int K = kvar(node, t);
        std::vector<milp::Term> upper{{K, 1.0}};
        for (int tau = nd.ivl.lo; tau <= *nd.ivl.hi; ++tau) {
          int Kc = kvar(nd.kids[0], t + tau);
          out_.model.add_constraint("evl" + tag + istr(t) + "_s" + istr(tau),
                                    {{Kc, 1.0}, {K, -1.0}}, milp::Relation::LessEq, 0.0);
          upper.push_back({Kc, -1.0});
        }
        out_.model.add_constraint("evu" + tag + istr(t), std::move(upper),
                                  milp::Relation::LessEq, 0.0);
      }
      return;
    case mtl::Op::Always:
      for (int t : nd.times) {
        int K = kvar(node, t);
        std::vector<milp::Term> lower;
        int count = 0;
        for (int tau = nd.ivl.lo; tau <= *nd.ivl.hi; ++tau) {
          int Kc = kvar(nd.kids[0], t + tau);
          out_.model.add_constraint("alu" + tag + istr(t) + "_s" + istr(tau),
                                    {{K, 1.0}, {Kc, -1.0}}, milp::Relation::LessEq, 0.0);
          lower.push_back({Kc, 1.0});
          ++count;
        }
        lower.push_back({K, -1.0});
        out_.model.add_constraint("all" + tag + istr(t), std::move(lower),
                                  milp::Relation::LessEq, static_cast<double>(count) - 1.0);
      }
      return;
    case mtl::Op::Until:
      for (int t : nd.times) {
        int K = kvar(node, t);
        int p = nd.kids[0], q = nd.kids[1];
        for (int j = nd.ivl.lo; j <= *nd.ivl.hi; ++j) {
          int c = cvar(node, t, j);
          if (j == 0) {
            out_.model.add_constraint("unq" + tag + istr(t) + "_j0",
                                      {{c, 1.0}, {kvar(q, t), -1.0}}, milp::Relation::Equal,
                                      0.0);
            continue;
          }
          out_.model.add_constraint("unq" + tag + istr(t) + "_j" + istr(j),
                                    {{c, 1.0}, {kvar(q, t + j), -1.0}},
                                    milp::Relation::LessEq, 0.0);
          std::vector<milp::Term> lower{{kvar(q, t + j), 1.0}};
          for (int l = 0; l < j; ++l) {
            out_.model.add_constraint(
                "unp" + tag + istr(t) + "_j" + istr(j) + "_l" + istr(l),
                {{c, 1.0}, {kvar(p, t + l), -1.0}}, milp::Relation::LessEq, 0.0);
            lower.push_back({kvar(p, t + l), 1.0});
          }
          lower.push_back({c, -1.0});
          out_.model.add_constraint("unl" + tag + istr(t) + "_j" + istr(j), std::move(lower),
                                    milp::Relation::LessEq, static_cast<double>(j));
        }
        std::vector<milp::Term> upper{{K, 1.0}};
        for (int j = nd.ivl.lo; j <= *nd.ivl.hi; ++j) {
          int c = cvar(node, t, j);
          out_.model.add_constraint("unk" + tag + istr(t) + "_j" + istr(j),
                                    {{c, 1.0}, {K, -1.0}}, milp::Relation::LessEq, 0.0);
          upper.push_back({c, -1.0});
        }
        out_.model.add_constraint("unu" + tag + istr(t), std::move(upper),
                                  milp::Relation::LessEq, 0.0);
      }
      return;
    case mtl::Op::Next:
      throw EncodeError("next operator is not supported by the encoding");
  }
}

int Encoder::encode_formula(const mtl::Formula& f) {
  if (!dynamics_done_) throw EncodeError("encode dynamics before the formula");
  if (formula_done_) throw EncodeError("formula already encoded");
  if (!f.valid()) throw EncodeError("formula handle is empty");

  mtl::Formula clipped = mtl::clip_unbounded(f, cfg_.N);
  int h = mtl::horizon(clipped);
  if (h > cfg_.N)
    throw EncodeError("formula horizon " + istr(h) + " exceeds encoding horizon " +
                      istr(cfg_.N));
  if (!mtl::is_nnf(clipped)) throw EncodeError("formula must be in negation normal form");

  const int root = collect(clipped);
  mark_times(root, 0);

  for (int n = 0; n < static_cast<int>(out_.nodes.size()); ++n) {
    const EncNode& nd = out_.nodes[n];
    if (nd.op == mtl::Op::Atom) continue;
    for (int t : nd.times) {
      int K = out_.model.add_var("K_n" + istr(n) + "_t" + istr(t),
                                 milp::VarKind::Continuous, 0.0, 1.0);
      out_.map.add(VarRole::K, t, k_index(n), K);
      if (nd.op == mtl::Op::Until)
        for (int j = nd.ivl.lo; j <= *nd.ivl.hi; ++j) {
          int c = out_.model.add_var("c_n" + istr(n) + "_t" + istr(t) + "_j" + istr(j),
                                     milp::VarKind::Continuous, 0.0, 1.0);
          out_.map.add(VarRole::K, t, c_index(n, j), c);
        }
    }
  }

  for (int n = 0; n < static_cast<int>(out_.nodes.size()); ++n) emit_node_rows(n);

  out_.model.add_constraint("root_pin", {{kvar(root, 0), 1.0}}, milp::Relation::Equal, 1.0);
  out_.root = root;
  out_.clipped = clipped;
  formula_done_ = true;
  return root;
}

BuildResult Encoder::finish() {
  BuildResult r = std::move(out_);
  out_ = BuildResult{};
  dynamics_done_ = objective_done_ = formula_done_ = true;
  return r;
}

int Encoder::kvar(int node, int t) const { return out_.map.at(VarRole::K, t, k_index(node)); }

int Encoder::cvar(int node, int t, int j) const {
  return out_.map.at(VarRole::K, t, c_index(node, j));
}

int Encoder::k_index(int node) const { return node * k_stride(cfg_.N); }

int Encoder::part_index(int node, int part) const {
  return node * k_stride(cfg_.N) + 1 + part;
}

int Encoder::c_index(int node, int j) const {
  return node * k_stride(cfg_.N) + 1 + kMaxParts + j;
}

BuildResult build(const dynamics::LinearMode& mode, const Eigen::VectorXd& x0_hat,
                  const mtl::Formula& formula, const workspace::Workspace& ws,
                  EncodingConfig cfg) {
  Encoder enc(mode, ws, cfg);
  enc.encode_dynamics(x0_hat);
  enc.encode_objective();
  enc.encode_formula(formula);
  return enc.finish();
}

std::vector<Eigen::VectorXd> decode_states(const BuildResult& enc,
                                           const Eigen::VectorXd& assignment) {
  std::vector<Eigen::VectorXd> out;
  for (int t = 0; t <= enc.N; ++t) {
    Eigen::VectorXd x(enc.state_dim);
    for (int i = 0; i < enc.state_dim; ++i) {
      int v = enc.map.at(VarRole::State, t, i);
      if (v >= assignment.size()) throw EncodeError("assignment is too short");
      x[i] = assignment[v];
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Eigen::VectorXd> decode_inputs(const BuildResult& enc,
                                           const Eigen::VectorXd& assignment) {
  std::vector<Eigen::VectorXd> out;
  for (int t = 0; t < enc.N; ++t) {
    Eigen::VectorXd u(enc.input_dim);
    for (int i = 0; i < enc.input_dim; ++i) {
      int v = enc.map.at(VarRole::Input, t, i);
      if (v >= assignment.size()) throw EncodeError("assignment is too short");
      u[i] = assignment[v];
    }
    out.push_back(std::move(u));
  }
  return out;
}

milp::IncumbentHint rounding_hint(const BuildResult& enc) {
  struct Data {
    VarMap map;
    std::vector<workspace::Halfspace> faces;
    std::vector<EncNode> nodes;
    std::vector<workspace::Region> regions;
    std::vector<int> position_dims;
    int state_dim, input_dim, N, root, stride;
  };
  auto d = std::make_shared<Data>(Data{enc.map, enc.faces, enc.nodes, enc.regions,
                                       enc.position_dims, enc.state_dim, enc.input_dim,
                                       enc.N, enc.root, k_stride(enc.N)});

  return [d](const milp::MilpModel& model,
             const Eigen::VectorXd& relax) -> std::optional<Eigen::VectorXd> {
    if (d->root < 0) return std::nullopt;
    if (relax.size() != model.num_vars()) return std::nullopt;
    Eigen::VectorXd x = relax;
    const int P = static_cast<int>(d->position_dims.size());
    const int F = static_cast<int>(d->faces.size());

    std::vector<Eigen::VectorXd> pos(d->N + 1, Eigen::VectorXd(P));
    for (int t = 0; t <= d->N; ++t)
      for (int k = 0; k < P; ++k)
        pos[t][k] = x[d->map.at(VarRole::State, t, d->position_dims[k])];

    std::vector<std::vector<char>> bit(d->N + 1, std::vector<char>(F, 0));
    for (int t = 0; t <= d->N; ++t)
      for (int f = 0; f < F; ++f) {
        bool in = d->faces[f].normal.dot(pos[t]) <=
                  d->faces[f].offset + workspace::kMembershipTol;
        bit[t][f] = in ? 1 : 0;
        x[d->map.at(VarRole::HalfspaceBit, t, f)] = in ? 1.0 : 0.0;
      }

    auto kidx = [&](int n) { return n * d->stride; };
    auto pidx = [&](int n, int p) { return n * d->stride + 1 + p; };
    auto cidx = [&](int n, int j) { return n * d->stride + 1 + kMaxParts + j; };

    std::vector<std::map<int, double>> memo(d->nodes.size());
    std::function<double(int, int)> val = [&](int n, int t) -> double {
      auto& m = memo[n];
      if (auto it = m.find(t); it != m.end()) return it->second;
      const EncNode& nd = d->nodes[n];
      double v = 0.0;
      switch (nd.op) {
        case mtl::Op::True:
          v = 1.0;
          break;
        case mtl::Op::Atom: {
          const workspace::Region& r = d->regions[nd.region];
          if (!r.active_at(t)) break;
          for (int p = 0; p < static_cast<int>(nd.part_faces.size()); ++p) {
            double pv = 1.0;
            for (int f : nd.part_faces[p]) pv = std::min(pv, bit[t][f] ? 1.0 : 0.0);
            if (d->map.has(VarRole::K, t, pidx(n, p)))
              x[d->map.at(VarRole::K, t, pidx(n, p))] = pv;
            v = std::max(v, pv);
          }
          break;
        }
        case mtl::Op::Not:
          v = 1.0 - val(nd.kids[0], t);
          break;
        case mtl::Op::And: {
          v = 1.0;
          for (int k : nd.kids) v = std::min(v, val(k, t));
          break;
        }
        case mtl::Op::Or: {
          for (int k : nd.kids) v = std::max(v, val(k, t));
          break;
        }
        case mtl::Op::Eventually: {
          for (int tau = nd.ivl.lo; tau <= *nd.ivl.hi; ++tau)
            v = std::max(v, val(nd.kids[0], t + tau));
          break;
        }
        case mtl::Op::Always: {
          v = 1.0;
          for (int tau = nd.ivl.lo; tau <= *nd.ivl.hi; ++tau)
            v = std::min(v, val(nd.kids[0], t + tau));
          break;
        }
        case mtl::Op::Until: {
          for (int j = nd.ivl.lo; j <= *nd.ivl.hi; ++j) {
            double c = val(nd.kids[1], t + j);
            for (int l = 0; l < j; ++l) c = std::min(c, val(nd.kids[0], t + l));
            x[d->map.at(VarRole::K, t, cidx(n, j))] = c;
            v = std::max(v, c);
          }
          break;
        }
        case mtl::Op::Next:
          return 0.0;
      }
      m.emplace(t, v);
      return v;
    };

    for (int n = 0; n < static_cast<int>(d->nodes.size()); ++n)
      for (int t : d->nodes[n].times) x[d->map.at(VarRole::K, t, kidx(n))] = val(n, t);

    for (int t = 0; t < d->N; ++t)
      for (int i = 0; i < d->input_dim; ++i)
        if (d->map.has(VarRole::InputAbs, t, i))
          x[d->map.at(VarRole::InputAbs, t, i)] =
              std::abs(x[d->map.at(VarRole::Input, t, i)]);

    if (val(d->root, 0) != 1.0) return std::nullopt;
    return x;
  };
}

}  // namespace mtlplan::encoder
