#include "ppgsmc/dsl/compiler.hpp"

#include <deque>
#include <map>
#include <sstream>

#include "ppgsmc/errors.hpp"

namespace ppgsmc::dsl {

namespace {

struct Node {
  enum class Kind { Action, Observe, Branch, End };
  Kind kind = Kind::End;
  KernelStep step;
  ScoreSpec score;
  Expr cond;
  int next = -1;
  int alt = -1;
  int line = 0, column = 0;
};

class Cfg {
 public:
  std::vector<Node> nodes;

  explicit Cfg(const ProgramAst& ast) {
    nodes.push_back(Node{});  // 0 = End
    entry = lower_block(ast.body, 0);
  }

  int entry = 0;

 private:
  int add(Node n) {
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  }

  int lower_block(const std::vector<Stmt>& b, int next) {
    for (auto it = b.rbegin(); it != b.rend(); ++it) next = lower(*it, next);
    return next;
  }

  int lower(const Stmt& s, int next) {
    Node n;
    n.line = s.line;
    n.column = s.column;
    switch (s.kind) {
      case Stmt::Kind::Skip: return next;
      case Stmt::Kind::Block: return lower_block(s.body, next);
      case Stmt::Kind::Assign:
        n.kind = Node::Kind::Action;
        n.step = assign(s.target, s.expr);
        n.next = next;
        return add(std::move(n));
      case Stmt::Kind::Sample:
        n.kind = Node::Kind::Action;
        n.step = sample_into(s.target, s.dist);
        n.next = next;
        return add(std::move(n));
      case Stmt::Kind::Observe:
      case Stmt::Kind::Score:
        n.kind = Node::Kind::Observe;
        n.score = s.score;
        n.next = next;
        return add(std::move(n));
      case Stmt::Kind::If: {
        int t = lower_block(s.body, next);
        int e = lower_block(s.orelse, next);
        n.kind = Node::Kind::Branch;
        n.cond = s.expr;
        n.next = t;
        n.alt = e;
        return add(std::move(n));
      }
      case Stmt::Kind::While: {
        n.kind = Node::Kind::Branch;
        n.cond = s.expr;
        n.alt = next;
        int head = add(std::move(n));
        int body = lower_block(s.body, head);
        nodes[head].next = body;
        return head;
      }
    }
    return next;
  }
};

// Checkpoint identity: a CFG position plus the score paid on arrival there.
struct Key {
  int node;  // -1 = nil
  ScoreSpec score;
  bool operator==(const Key& o) const { return node == o.node && score == o.score; }
};

struct Emitted {
  std::vector<Expr> conj;
  KernelAction kernel;
  Key target;
  std::string target_name;
};

class Explorer {
 public:
  explicit Explorer(const Cfg& cfg) : cfg_(cfg) {}

  std::vector<Emitted> from(int node) {
    out_.clear();
    walk(node, {}, {}, {}, {});
    return std::move(out_);
  }

 private:
  const Cfg& cfg_;
  std::vector<Emitted> out_;

  static std::string loc(const Node& n, const char* what) {
    return std::string(what) + "@" + std::to_string(n.line) + ":" + std::to_string(n.column);
  }

  void walk(int at, std::vector<Expr> conj, KernelAction kernel, std::set<int> written, std::set<int> folded) {
    for (;;) {
      const Node& n = cfg_.nodes[at];
      switch (n.kind) {
        case Node::Kind::End:
          out_.push_back({std::move(conj), std::move(kernel), Key{-1, score_one()}, "nil"});
          return;
        case Node::Kind::Action:
          written.insert(n.step.target);
          kernel.steps.push_back(n.step);
          at = n.next;
          continue;
        case Node::Kind::Observe: {
          std::vector<ScoreSpec> factors;
          std::string name = loc(n, "observe");
          int p = at;
          while (cfg_.nodes[p].kind == Node::Kind::Observe) {
            factors.push_back(cfg_.nodes[p].score);
            p = cfg_.nodes[p].next;
          }
          out_.push_back({std::move(conj), std::move(kernel), Key{p, score_product(std::move(factors))}, name});
          return;
        }
        case Node::Kind::Branch: {
          bool stale = false;
          for (int v : vars_read(n.cond)) stale = stale || written.count(v);
          if (stale || folded.count(at)) {
            out_.push_back({std::move(conj), std::move(kernel), Key{at, score_one()}, loc(n, "branch")});
            return;
          }
          folded.insert(at);
          auto yes = conj, no = conj;
          yes.push_back(n.cond);
          no.push_back(!n.cond);
          walk(n.next, std::move(yes), kernel, written, folded);
          walk(n.alt, std::move(no), std::move(kernel), std::move(written), std::move(folded));
          return;
        }
      }
    }
  }
};

Expr conjunction(const std::vector<Expr>& conj) {
  if (conj.empty()) return truth();
  Expr e = conj[0];
  for (std::size_t i = 1; i < conj.size(); ++i) e = std::move(e) && conj[i];
  return e;
}

struct Built {
  PPG graph;
  std::vector<Key> keys;  // by checkpoint id; nil has node -1
};

struct Redirect {
  Key from, to;
};

Built build(const Cfg& cfg, const ProgramAst& ast, const std::vector<Redirect>& redirects) {
  Built b;
  PPG& g = b.graph;
  g.var_count = static_cast<int>(ast.var_names.size());
  g.var_names = ast.var_names;
  std::deque<int> queue;
  int nil = -1;

  auto id_of = [&](Key k, const std::string& name) {
    for (const auto& r : redirects)
      if (r.from == k) k = r.to;
    for (std::size_t i = 0; i < b.keys.size(); ++i)
      if (b.keys[i] == k) return static_cast<int>(i);
    int id = static_cast<int>(b.keys.size());
    b.keys.push_back(k);
    g.checkpoints.push_back(name);
    g.scores.push_back(k.node < 0 ? score_one() : k.score);
    if (k.node < 0)
      nil = id;
    else
      queue.push_back(id);
    return id;
  };

  id_of(Key{cfg.entry, score_one()}, "start");
  Explorer ex(cfg);
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (auto& e : ex.from(b.keys[s].node)) {
      int t = id_of(e.target, e.target_name);
      g.transitions.push_back({s, conjunction(e.conj), std::move(e.kernel), t});
    }
  }
  if (nil < 0) id_of(Key{-1, score_one()}, "nil");
  g.nil = nil;
  g.transitions.push_back({nil, truth(), {}, nil});
  return b;
}

// Values a kernel leaves in variables regardless of its input store.
std::map<int, double> constants_after(const KernelAction& k) {
  std::map<int, double> known;
  for (const auto& st : k.steps) {
    const Expr* e = nullptr;
    if (st.kind == KernelStep::Kind::Assign)
      e = &st.value;
    else if (st.dist.kind == DistKind::Dirac)
      e = &st.dist.params[0];
    bool fixed = e != nullptr;
    if (fixed)
      for (int v : vars_read(*e)) fixed = fixed && known.count(v);
    if (!fixed) {
      known.erase(st.target);
      continue;
    }
    int width = st.target + 1;
    for (auto& [v, x] : known) width = std::max(width, v + 1);
    Store tmp = Store::Zero(width);
    for (auto& [v, x] : known) tmp[v] = x;
    known[st.target] = evaluate(*e, tmp);
  }
  return known;
}

// A loop-head checkpoint reached with score 1 can share the checkpoint that
// carries the loop's observe when every way in fixes the observed variables
// to values scoring exactly 1 (the first check is then vacuous).
std::vector<Redirect> elisions(const Built& b) {
  std::vector<Redirect> out;
  const PPG& g = b.graph;
  for (int c = 1; c < g.size(); ++c) {
    const Key& kc = b.keys[c];
    if (kc.node < 0 || kc.score.kind != ScoreSpec::Kind::One) continue;
    for (int o = 0; o < g.size(); ++o) {
      const Key& ko = b.keys[o];
      if (o == c || ko.node != kc.node || ko.score.kind == ScoreSpec::Kind::One) continue;
      auto reads = vars_read(ko.score);
      bool ok = true;
      bool any = false;
      for (const auto& t : g.transitions) {
        if (t.target != c) continue;
        any = true;
        auto known = constants_after(t.kernel);
        Store v = Store::Zero(g.var_count);
        for (int r : reads) {
          if (!known.count(r)) ok = false;
          else v[r] = known[r];
        }
        if (ok && score_raw(ko.score, v) != 1.0) ok = false;
        if (!ok) break;
      }
      if (ok && any) {
        out.push_back({kc, ko});
        break;
      }
    }
  }
  return out;
}

}  // namespace

PPG compile(const ProgramAst& ast) {
  Cfg cfg(ast);
  Built first = build(cfg, ast, {});
  auto redirects = elisions(first);
  if (redirects.empty()) return std::move(first.graph);
  return build(cfg, ast, redirects).graph;
}

PPG compile_source(std::string_view source, const ParamMap& overrides) { return compile(parse(source, overrides)); }

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const PPG& g, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n  rankdir=TB;\n";
  for (int s = 0; s < g.size(); ++s) {
    os << "  n" << s << " [label=\"" << s << ": " << escape(g.checkpoints[s]);
    if (g.scores[s].kind != ScoreSpec::Kind::One) os << "\\nsc = " << escape(to_string(g.scores[s], g.var_names));
    os << "\"";
    if (s == g.nil) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& t : g.transitions) {
    std::string label = to_string(t.guard, g.var_names);
    if (!t.kernel.empty()) label += " / " + to_string(t.kernel, g.var_names);
    os << "  n" << t.source << " -> n" << t.target << " [label=\"" << escape(label) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ppgsmc::dsl
