#include "ultra/commands.hpp"

#include "ultra/relations.hpp"
#include "ultra/rep.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

namespace ultra {

namespace {

CheckRecord record(std::string name, std::string anchor, std::string subject, Verdict v,
                   std::string scope = {}) {
  CheckRecord r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.subject = std::move(subject);
  r.verdict = v;
  r.scope = std::move(scope);
  return r;
}

Verdict verdict_of(bool ok) { return ok ? Verdict::Holds : Verdict::Fails; }

std::string horizon_scope(Index n) { return "indices <= " + std::to_string(n); }

/// Lazily derived objects shared by the commands of one run.
class Context {
public:
  explicit Context(const Workspace& ws) : ws_(ws) {}

  const RunParameters& run() const { return ws_.run; }
  bool has_map() const { return ws_.map.has_value(); }
  bool has_graph() const { return ws_.graph.has_value() || ws_.map.has_value(); }

  const MarkovMap& map() const {
    if (!ws_.map)
      throw InputError("this command needs a [map] section");
    return *ws_.map;
  }

  const Certification& certification() {
    if (!cert_)
      cert_ = validate_markov(map(), run().horizon);
    return *cert_;
  }

  const Ultragraph& graph() {
    if (ws_.graph)
      return *ws_.graph;
    if (!graph_) {
      if (!ws_.map)
        throw InputError("this command needs an [ultragraph] or [map] section");
      try {
        graph_ = induced_ultragraph(transition_matrix(map(), run().horizon), map());
      } catch (const std::exception& e) {
        throw InputError(std::string("the map does not induce an ultragraph: ") + e.what());
      }
    }
    return *graph_;
  }

  /// X from the workspace, or every regular vertex.
  VertexSet X() {
    return run().X ? *run().X : graph().regular_vertices();
  }

  const RelativeUltragraph& relative() {
    if (!rg_) {
      try {
        rg_.emplace(graph(), X());
      } catch (const std::exception& e) {
        throw InputError(e.what());
      }
    }
    return *rg_;
  }

  const EscapeData& escape() {
    if (!escape_) {
      if (!run().x)
        throw InputError("this command needs 'x' in the [run] section");
      EscapeResult r = escape_data(map(), *run().x, run().escape_bound);
      if (!r.data)
        throw InputError("x = " + to_string(*run().x) + " does not escape within " +
                         std::to_string(r.bound) + " steps");
      escape_ = *r.data;
    }
    return *escape_;
  }

  const BranchingSystem& branching() {
    if (!bs_)
      bs_ = branching_from_markov(map(), escape(), run().depth, run().horizon);
    return *bs_;
  }

  RelationScope scope() { return default_scope(relative(), run().scope); }

  /// Commands on the Markov representation need a certified map.
  void require_certified() {
    if (!certification().certified)
      throw InputError("the map is not in the Markov class; run 'validate' for the violations");
  }

private:
  const Workspace& ws_;
  std::optional<Certification> cert_;
  std::optional<Ultragraph> graph_;
  std::optional<RelativeUltragraph> rg_;
  std::optional<EscapeData> escape_;
  std::optional<BranchingSystem> bs_;
};

Report cmd_validate(Context& c) {
  Report out;
  const MarkovMap& m = c.map();
  const Certification& cert = c.certification();
  std::string scope = horizon_scope(cert.horizon);
  if (cert.certified) {
    CheckRecord r = record("markov.certified", "Markov class conditions (1)-(3)", "g", Verdict::Holds, scope);
    for (const std::string& n : cert.notes)
      r.note += (r.note.empty() ? "" : "; ") + n;
    out.add(r);
  }
  for (const Violation& v : cert.violations) {
    CheckRecord r = record("markov.condition" + std::to_string(v.condition),
                           "Markov class condition (" + std::to_string(v.condition) + ")",
                           "I" + std::to_string(v.interval), Verdict::Fails, scope);
    r.index = v.interval;
    r.witnesses.push_back({"x", to_string(v.witness)});
    r.note = v.message;
    out.add(r);
  }
  if (!cert.certified)
    return out;

  TransitionMatrix t = transition_matrix(m, c.run().horizon);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CheckRecord r = record("markov.row", "A(i,j) = 1 iff I_j lies in g(I_i)", "v" + std::to_string(i + 1),
                           Verdict::Holds, scope);
    r.index = i + 1;
    r.witnesses.push_back({"row", t.rows[i].to_string()});
    out.add(r);
  }
  {
    const Ultragraph& g = c.graph();
    CheckRecord r = record("markov.ultragraph", "induced ultragraph G_A", "G", Verdict::Holds, scope);
    r.witnesses.push_back({"vertices", g.vertices().to_string()});
    for (const EdgeFamily& f : g.families()) {
      std::string offs;
      for (std::size_t k = 0; k < f.offsets.size(); ++k)
        offs += (k ? "," : "") + std::to_string(f.offsets[k]);
      r.witnesses.push_back({"family n>=" + std::to_string(f.first) + " step " + std::to_string(f.step),
                             "offsets{" + offs + "}" + (f.constant.empty() ? "" : " | " + f.constant.to_string())});
    }
    out.add(r);
  }

  if (!c.run().x)
    return out;
  EscapeResult er = escape_data(m, *c.run().x, c.run().escape_bound);
  if (!er.data) {
    CheckRecord r = record("markov.escape", "x lies in the escape set", "x", Verdict::Undetermined,
                           "at most " + std::to_string(er.bound) + " iterations");
    r.witnesses.push_back({"x", to_string(*c.run().x)});
    out.add(r);
    return out;
  }
  const EscapeData& ed = *er.data;
  CheckRecord r = record("markov.escape", "x lies in the escape set", "x", Verdict::Holds);
  r.witnesses = {{"x", to_string(ed.x)},
                 {"tau", std::to_string(ed.tau)},
                 {"J", std::to_string(ed.J)},
                 {"target", to_string(ed.target)}};
  out.add(r);

  if (c.run().X) {
    HypothesisResult h = x_hypothesis_check(m, ed, *c.run().X, c.run().horizon);
    for (const HypothesisEntry& e : h.entries) {
      CheckRecord hr = record("markov.hypothesis", "int(I_i) misses g^-1(E_J) for i in X",
                              "v" + std::to_string(e.vertex), verdict_of(e.holds), scope);
      hr.index = e.vertex;
      if (e.witness)
        hr.witnesses.push_back({"y", to_string(*e.witness)});
      out.add(hr);
    }
    CheckRecord br = record("markov.hypothesis", "int(I_i) misses g^-1(E_J) for i in X", "beyond",
                            verdict_of(h.beyond_holds), "X beyond the horizon");
    br.index = c.run().horizon + 1;
    if (h.beyond_failure) {
      br.witnesses.push_back({"vertex", std::to_string(h.beyond_failure->vertex)});
      if (h.beyond_failure->witness)
        br.witnesses.push_back({"y", to_string(*h.beyond_failure->witness)});
    }
    out.add(br);
  }

  OrbitTree tree = backward_orbit(m, ed.target, c.run().depth, c.run().horizon);
  CheckRecord tr = record("orbit.tree", "R_g(x) truncated at depth D", "target", Verdict::Holds,
                          "depth <= " + std::to_string(c.run().depth) + ", " + scope);
  tr.witnesses = {{"target", to_string(tree.target)},
                  {"nodes", std::to_string(tree.nodes.size())},
                  {"complete_depth", std::to_string(tree.complete_depth)},
                  {"overflows", std::to_string(tree.overflows.size())}};
  out.add(tr);
  std::vector<std::string> bad = orbit_invariant_failures(m, tree);
  CheckRecord ir = record("orbit.invariants", "nodes are interior, off Gamma and reach the target",
                          "tree", verdict_of(bad.empty()), tr.scope);
  for (const std::string& b : bad)
    ir.witnesses.push_back({"node", b});
  out.add(ir);
  return out;
}

CheckRecord cycle_record(const std::string& name, const std::string& anchor, const ConditionLVerdict& v) {
  CheckRecord r = record(name, anchor, "G", verdict_of(v.holds), v.scope.to_string());
  for (std::size_t k = 0; k < v.exitless.size(); ++k) {
    std::string w = v.exitless[k].to_string();
    if (k < v.meets_Y.size())
      w += v.meets_Y[k] ? " (meets Y)" : " (misses Y)";
    r.witnesses.push_back({"exitless", w});
  }
  return r;
}

Report cmd_ultragraph(Context& c) {
  Report out;
  const Ultragraph& g = c.graph();
  CycleScope cs = c.run().cycles;
  CheckRecord reg = record("ultragraph.regular", "Reg(G)", "G", Verdict::Holds);
  reg.witnesses.push_back({"Reg", g.regular_vertices().to_string()});
  out.add(reg);
  for (Index e : g.edges_up_to(cs.horizon)) {
    CheckRecord r = record("ultragraph.edge", "s(e), r(e)", "e" + std::to_string(e), Verdict::Holds,
                           horizon_scope(cs.horizon));
    r.index = e;
    r.witnesses = {{"source", std::to_string(g.source(EdgeId{e, false}))},
                   {"range", g.edge_range(e).to_string()}};
    out.add(r);
  }
  out.add(cycle_record("ultragraph.condition_L", "every cycle has an exit", condition_L(g, cs)));
  if (c.run().X) {
    const RelativeUltragraph& rg = c.relative();
    out.add(cycle_record("ultragraph.relative_condition_L",
                         "every exitless cycle has an edge whose range meets Y",
                         relative_condition_L(rg, cs)));
  }
  return out;
}

Report cmd_lift(Context& c) {
  Report out;
  const RelativeUltragraph& rg = c.relative();
  CycleScope cs = c.run().cycles;
  LiftedUltragraph gx(rg);

  CheckRecord added = record("lift.vertices", "vertices of G_X are E^0 u Y'", "G_X", Verdict::Holds);
  added.witnesses = {{"X", rg.X().to_string()}, {"Y", rg.Y().to_string()},
                     {"added", gx.added_vertices().to_string()}};
  out.add(added);
  for (const EdgeId& e : gx.added_edges_up_to(cs.horizon)) {
    CheckRecord r = record("lift.edge", "e' with r(e') = (r(e) n Y)'", e.name(), Verdict::Holds,
                           horizon_scope(cs.horizon));
    r.index = e.index;
    r.witnesses = {{"source", std::to_string(gx.source(e))}, {"range", gx.range(e).to_string()}};
    out.add(r);
  }
  for (const EdgeFiniteness& f : range_Y_finiteness(rg)) {
    CheckRecord r = record("lift.range_finite", "r(e) n Y is finite", f.edge, verdict_of(f.finite));
    r.witnesses.push_back({"r(e) n Y", f.intersection.to_string()});
    out.add(r);
  }
  {
    bool same = gx.regular_vertices() == rg.graph().regular_vertices();
    CheckRecord r = record("lift.regular", "Reg(G_X) = Reg(G)", "G_X", verdict_of(same));
    r.witnesses.push_back({"Reg(G_X)", gx.regular_vertices().to_string()});
    out.add(r);
  }
  {
    CheckRecord r = record("lift.decompose", "Z = A u (B n Y)'", "scope sets", Verdict::Holds,
                           "default scope, k = " + std::to_string(c.run().scope));
    for (const VertexSet& a : c.scope().sets) {
      for (const EXSet& z : {EXSet(a), EXSet(a, intersect(a, rg.Y()))}) {
        bool ok = false;
        try {
          ok = recompose(decompose(z, rg)) == z;
        } catch (const std::exception&) {
        }
        if (!ok) {
          r.verdict = Verdict::Fails;
          r.witnesses.push_back({"Z", z.to_string()});
        }
      }
    }
    out.add(r);
  }
  EquivalenceVerdict eq = lift_condition_L_equivalence_check(rg, cs);
  CheckRecord r = record("lift.condition_L_equivalence",
                         "(G, X) satisfies relative (L) iff G_X satisfies (L)", "G_X",
                         verdict_of(eq.agree && eq.same_cycles && eq.item_one_agrees), cs.to_string());
  r.witnesses = {{"relative", eq.relative_holds ? "true" : "false"},
                 {"lifted", eq.lifted_holds ? "true" : "false"}};
  for (const std::string& d : eq.disagreements)
    r.witnesses.push_back({"disagreement", d});
  out.add(r);
  return out;
}

MatrixRep markov_rep(Context& c) {
  c.require_certified();
  try {
    return build_markov_rep(c.map(), c.escape(), c.X(), c.run().depth, c.run().horizon);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

Report cmd_relations(Context& c) {
  MatrixRep rep = markov_rep(c);
  RelationScope scope = c.scope();
  Report out = relation_suite(rep, c.relative(), scope);
  out.merge(psi_phi_identity_check(rep, c.relative(), scope));
  return out;
}

void export_matrices(const MatrixRep& rep, const RelationScope& scope, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream o(fs::path(dir) / "basis.txt");
    o << "# index point depth interval\n";
    for (std::size_t k = 0; k < rep.size(); ++k) {
      const BasisPoint& b = rep.basis()[k];
      o << k << ' ' << to_string(b.point) << ' ' << b.depth << ' ' << b.interval << '\n';
    }
  }
  auto write = [&](const std::string& file, const GeneratorSymbol& g) {
    SparseMatrix m = rep.matrix(g);
    std::ofstream o(fs::path(dir) / file);
    o << "# " << g.to_string() << ": row col value\n";
    for (std::size_t col = 0; col < m.size(); ++col)
      for (const auto& [row, v] : m.column(col))
        o << row << ' ' << col << ' ' << to_string(v) << '\n';
  };
  for (Index v : scope.vertices)
    write("p_v" + std::to_string(v) + ".coo", GeneratorSymbol::p(VertexSet::singleton(v)));
  for (Index e : scope.edges) {
    write("s_e" + std::to_string(e) + ".coo", GeneratorSymbol::s(e));
    write("s_e" + std::to_string(e) + "_star.coo", GeneratorSymbol::s_star(e));
  }
}

Report cmd_markov_rep(Context& c, const std::optional<std::string>& export_dir) {
  c.require_certified();
  Report out = check_nu_equals_pi(c.map(), c.escape(), c.X(), c.run().depth, c.run().horizon,
                                  c.run().scope);
  out.merge(validate_branching(c.branching(), c.relative()));
  if (export_dir) {
    MatrixRep rep = markov_rep(c);
    export_matrices(rep, c.scope(), *export_dir);
    CheckRecord r = record("export.matrices", "coordinate lists with basis manifest", *export_dir,
                           Verdict::Holds);
    r.witnesses.push_back({"basis", std::to_string(rep.size())});
    out.add(r);
  }
  return out;
}

Report cmd_diagram(Context& c) {
  c.require_certified();
  std::optional<LiftedBranchingSystem> lbs;
  try {
    lbs.emplace(c.branching(), c.relative());
  } catch (const std::domain_error& e) {
    throw InputError(e.what());
  }
  RelationScope scope = c.scope();
  Report out = lbs->disjointness_checks(scope.sets);
  out.merge(check_diagram(*lbs, scope));
  return out;
}

Report cmd_injectivity(Context& c) {
  c.require_certified();
  InjectivityScope s;
  s.cycles = c.run().cycles;
  s.witness_bound = c.run().witness_bound;
  return injectivity_markov(c.map(), c.escape(), c.X(), c.run().depth, c.run().horizon, s).report;
}

} // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate", "ultragraph", "lift",        "relations",
                                              "markov-rep", "diagram",  "injectivity", "all"};
  return names;
}

Report run_command(const std::string& command, const Workspace& ws,
                   const std::optional<std::string>& export_dir) {
  Context c(ws);
  if (command == "validate")
    return cmd_validate(c);
  if (command == "ultragraph")
    return cmd_ultragraph(c);
  if (command == "lift")
    return cmd_lift(c);
  if (command == "relations")
    return cmd_relations(c);
  if (command == "markov-rep")
    return cmd_markov_rep(c, export_dir);
  if (command == "diagram")
    return cmd_diagram(c);
  if (command == "injectivity")
    return cmd_injectivity(c);
  if (command != "all")
    throw InputError("unknown command '" + command + "'");

  Report out;
  if (c.has_map()) {
    out.merge(cmd_validate(c));
    if (!c.certification().certified)
      return out;
  }
  out.merge(cmd_ultragraph(c));
  out.merge(cmd_lift(c));
  if (c.has_map() && ws.run.x) {
    out.merge(cmd_relations(c));
    out.merge(cmd_markov_rep(c, export_dir));
    out.merge(cmd_diagram(c));
    out.merge(cmd_injectivity(c));
  }
  return out;
}

} // namespace ultra
