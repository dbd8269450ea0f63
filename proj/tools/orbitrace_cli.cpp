// Command-line front end: loads model/chain/argument files, runs the star
// product, correlation maps, trace, and characteristic-class evaluators, and
// hosts the self-check suites.
#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "orbitrace/chains.hpp"
#include "orbitrace/charclass.hpp"
#include "orbitrace/correlate.hpp"
#include "orbitrace/parse.hpp"
#include "orbitrace/render.hpp"
#include "orbitrace/simplex.hpp"
#include "orbitrace/testgen.hpp"

namespace orb {
namespace cli {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw error(path + ": " + e.what());
  }
  return j;
}

struct Options {
  std::string model_path, chain_path, args_path;
  int hbar_trunc = 0, weight_trunc = 0;  // 0 = keep the model file's value
  std::string format = "text";
  long seed = 1;
};

void add_common(CLI::App* cmd, Options& o, bool model_required) {
  auto* mf = cmd->add_option("--model", o.model_path, "model JSON file");
  if (model_required) mf->required();
  cmd->add_option("--hbar-trunc", o.hbar_trunc,
                  "override the model's hbar truncation");
  cmd->add_option("--weight-trunc", o.weight_trunc,
                  "override the model's weight truncation");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
}

Model load_model(const Options& o) {
  Model m = model_from_json(read_json_file(o.model_path));
  int htr = o.hbar_trunc > 0 ? o.hbar_trunc : m.hbar_trunc;
  int wtr = o.weight_trunc > 0 ? o.weight_trunc : m.weight_trunc;
  return Model(m.n, m.k, m.r, m.N, m.perp_eigs, m.e_twist, htr, wtr);
}

// Inputs are parsed without a weight bound, then rebuilt under the model's
// truncation; anything dropped in the rebuild earns a warning.
Model unbounded(const Model& m) {
  return Model(m.n, m.k, m.r, m.N, m.perp_eigs, m.e_twist, m.hbar_trunc,
               kExact);
}

MatrixWeyl rebound(const Model& m, const MatrixWeyl& a, const char* what) {
  MatrixWeyl out(m, a.r);
  bool dropped = false;
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < a.r; ++j) {
      for (const auto& [mono, h] : a.at(i, j).terms())
        out.at(i, j).add_term(mono, h);
      if (!(out.at(i, j) == a.at(i, j))) dropped = true;
    }
  if (dropped)
    std::cerr << "warning: " << what << " exceeds weight truncation "
              << m.weight_trunc << "; truncated\n";
  return out;
}

Chain load_chain(const Model& m, const std::string& path) {
  Chain c = chain_from_json(unbounded(m), read_json_file(path));
  Chain out;
  for (auto& t : c.terms) {
    std::vector<MatrixWeyl> slots;
    for (const auto& s : t.slots) slots.push_back(rebound(m, s, "chain slot"));
    out.push(t.coef, std::move(slots));
  }
  return out;
}

std::vector<MatrixWeyl> load_args(const Model& m, const std::string& path) {
  std::vector<MatrixWeyl> raw =
      args_from_json(unbounded(m), read_json_file(path));
  std::vector<MatrixWeyl> out;
  for (const auto& a : raw) out.push_back(rebound(m, a, "argument"));
  return out;
}

// ---- output ----

std::vector<std::string> split_terms(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = text.find(" + ", start);
    if (p == std::string::npos) break;
    out.push_back(text.substr(start, p - start));
    start = p + 3;
  }
  out.push_back(text.substr(start));
  return out;
}

json value_json(const std::string& text) {
  return json{{"text", text}, {"terms", split_terms(text)}};
}

json matrix_json(const Model& m, const MatrixWeyl& a) {
  json rows = json::array();
  for (int i = 0; i < a.r; ++i) {
    json row = json::array();
    for (int j = 0; j < a.r; ++j)
      row.push_back(value_json(render_weyl(m, a.at(i, j))));
    rows.push_back(std::move(row));
  }
  return json{{"r", a.r}, {"entries", std::move(rows)}};
}

void emit(const Options& o, const std::string& text, const json& j) {
  if (o.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text << "\n";
}

std::string cyclo_str(const CycloScalar& c) {
  return render_hbar(HbarSeries::term(c, 0));
}

// ---- self-check harness ----

struct Report {
  std::string suite;
  long seed;
  std::string format;
  int checks = 0, fails = 0;
  json items = json::array();

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    ++checks;
    if (!ok) ++fails;
    if (format != "json") {
      std::cout << (ok ? "ok   " : "FAIL ") << name;
      if (!detail.empty()) std::cout << "  [" << detail << "]";
      std::cout << "\n";
    }
    json item{{"name", name}, {"pass", ok}};
    if (!detail.empty()) item["detail"] = detail;
    items.push_back(std::move(item));
  }

  int finish() {
    if (format == "json") {
      json out{{"suite", suite},
               {"seed", seed},
               {"checks", items},
               {"pass", fails == 0}};
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "seed: " << seed << "\n"
                << (fails ? "FAIL " : "PASS ") << suite << " (" << checks
                << " checks, " << fails << " failed)\n";
    }
    return fails ? 1 : 0;
  }
};

MatrixWeyl diag_slot(const Model& m, const WeylElement& w) {
  MatrixWeyl out(m, m.r);
  for (int i = 0; i < m.r; ++i) out.at(i, i) = w;
  return out;
}

void suite_arith(Report& rep) {
  {
    CycloScalar z3 = CycloScalar::zeta(3, 1);
    CycloScalar one(Rat(1), 3);
    CycloScalar lhs = (one - z3).inverse();
    CycloScalar rhs = (CycloScalar(Rat(2), 3) + z3) / CycloScalar(Rat(3), 3);
    rep.check("inv(1 - zeta3) = (2 + zeta3)/3", lhs == rhs);
  }
  {
    CycloScalar z4 = CycloScalar::zeta(4, 1);
    rep.check("zeta4^2 = -1", z4 * z4 == CycloScalar(Rat(-1), 4));
  }
  {
    CycloScalar z6 = CycloScalar::zeta(6, 1);
    CycloScalar one(Rat(1), 6);
    rep.check("zeta6^2 - zeta6 + 1 = 0", z6 * z6 - z6 + one ==
                                             CycloScalar(Rat(0), 6));
  }
  Gen gen(rep.seed);
  bool inv_ok = true, dist_ok = true, assoc_ok = true;
  for (int N : {2, 3, 4, 5, 6, 8, 12}) {
    Model mc(1, 0, 1, N, {1});
    for (int t = 0; t < 6; ++t) {
      CycloScalar c = gen.root_coef(mc);
      if (c == CycloScalar(Rat(0), N)) continue;
      if (!(c * c.inverse() == CycloScalar(Rat(1), N))) inv_ok = false;
    }
  }
  Model m(1, 0, 1, 3, {1});
  for (int t = 0; t < 8; ++t) {
    HbarSeries a = gen.series(m, 3), b = gen.series(m, 3),
               c = gen.series(m, 3);
    if (!((a * b) * c == a * (b * c))) assoc_ok = false;
    if (!((a + b) * c == a * c + b * c)) dist_ok = false;
  }
  rep.check("random c * inv(c) = 1 over N in {2,...,12}", inv_ok);
  rep.check("series multiplication associates", assoc_ok);
  rep.check("series multiplication distributes", dist_ok);
  bool star_ok = true, auto_ok = true, deriv_ok = true;
  for (const Model& mm : reference_models(4, 6)) {
    if (mm.r != 1) continue;
    for (int t = 0; t < 8; ++t) {
      WeylElement a = gen.weyl(mm, 2, 1, 2), b = gen.weyl(mm, 2, 1, 2),
                  c = gen.weyl(mm, 2, 1, 2);
      if (!(moyal(mm, moyal(mm, a, b), c) == moyal(mm, a, moyal(mm, b, c))))
        star_ok = false;
      if (!(g_act_plain(mm, moyal(mm, a, b)) ==
            moyal(mm, g_act_plain(mm, a), g_act_plain(mm, b))))
        auto_ok = false;
      if (!(gm_nabla(moyal(mm, a, b)) ==
            moyal(mm, gm_nabla(a), b) + moyal(mm, a, gm_nabla(b))))
        deriv_ok = false;
    }
  }
  rep.check("star product associates", star_ok);
  rep.check("g acts by star automorphisms", auto_ok);
  rep.check("grading connection is a star derivation", deriv_ok);
}

void suite_wheels(Report& rep) {
  rep.check("pairing weight of a single edge is 0",
            pairing_weight(2, {{0, 1}}) == Rat(0), "w((0,1)) = 0");
  rep.check("doubled edge integrates to 1/12",
            pairing_weight(2, {{0, 1}, {0, 1}}) == Rat(1, 12));
  rep.check("opposed pair integrates to -1/12",
            pairing_weight(2, {{0, 1}, {1, 0}}) == Rat(-1, 12));
  rep.check("empty edge set on 4 positions gives 1/3!",
            pairing_weight(4, {}) == Rat(1, 6));
  struct Expect {
    int k;
    Rat value;
  };
  for (const Expect& e : {Expect{1, Rat(0)}, Expect{2, Rat(-1, 24)},
                          Expect{3, Rat(0)}, Expect{4, Rat(1, 2880)},
                          Expect{5, Rat(0)}, Expect{6, Rat(-1, 181440)},
                          Expect{7, Rat(0)}}) {
    Rat got = wheel_coefficient(e.k);
    rep.check("C(" + std::to_string(e.k) + ") = " + rat_str(e.value),
              got == e.value, "got " + rat_str(got));
  }
}

std::vector<Model> cyclicity_models() {
  std::vector<Model> out = reference_models(4, 6);
  CycloScalar o2(Rat(1), 2), z2 = CycloScalar::zeta(2, 1),
              nil2(Rat(0), 2);
  out.push_back(Model(1, 0, 3, 2, {1},
                      {{o2, nil2, nil2}, {nil2, z2, nil2}, {nil2, nil2, z2}},
                      4, 6));
  CycloScalar o3(Rat(1), 3), z3 = CycloScalar::zeta(3, 1),
              z32 = CycloScalar::zeta(3, 2), nil3(Rat(0), 3);
  out.push_back(Model(2, 1, 3, 3, {1},
                      {{o3, nil3, nil3}, {nil3, z3, nil3}, {nil3, nil3, z32}},
                      4, 6));
  return out;
}

void suite_chains(Report& rep) {
  Gen gen(rep.seed);
  for (const Model& m : reference_models(4, 6)) {
    std::string tag = " n=" + std::to_string(m.n) + " k=" +
                      std::to_string(m.k) + " N=" + std::to_string(m.N) +
                      " r=" + std::to_string(m.r);
    bool b2 = true, B2 = true, mix = true, square = true;
    for (int arity : {1, 2, 3}) {
      Chain c = gen.invariant_chain(m, arity, 2, 1);
      if (!chain_is_zero(m, b_twisted(m, b_twisted(m, c)))) b2 = false;
      Chain Bc = B_twisted(m, c);
      if (!chain_is_zero(m, B_twisted(m, Bc))) B2 = false;
      Chain anti = b_twisted(m, Bc) + B_twisted(m, b_twisted(m, c));
      if (!chain_is_zero(m, anti)) mix = false;
      // (b + uB)^2 on the total complex: components live at distinct
      // arities, so the element is an arity-indexed family of chains
      using Total = std::map<int, Chain>;
      auto add_into = [](Total& tot, const Chain& x, int du) {
        for (const auto& t : x.terms)
          tot[int(t.slots.size())].push(t.coef.shifted(du), t.slots);
      };
      auto buB = [&](const Total& x) {
        Total out;
        for (const auto& [a, ch] : x) {
          add_into(out, b_twisted(m, ch), 0);
          add_into(out, B_twisted(m, ch), 1);
        }
        for (auto& [a, ch] : out) ch = canonicalize(m, ch);
        return out;
      };
      Total tot;
      add_into(tot, c, 0);
      for (const auto& [a, ch] : buB(buB(tot)))
        if (!chain_is_zero(m, ch)) square = false;
    }
    rep.check("b^2 = 0" + tag, b2);
    rep.check("B^2 = 0" + tag, B2);
    rep.check("bB + Bb = 0" + tag, mix);
    rep.check("(b + uB)^2 = 0" + tag, square);
  }
  for (const Model& m : cyclicity_models()) {
    std::string tag = " n=" + std::to_string(m.n) + " N=" +
                      std::to_string(m.N) + " r=" + std::to_string(m.r);
    bool ok = true;
    for (int arity : {2, 3, 4}) {
      for (int t = 0; t < 4; ++t) {
        std::vector<MatrixWeyl> slots;
        for (int i = 0; i < arity; ++i)
          slots.push_back(gen.matrix(m, 2, 1, 1));
        // tr_g(M0 (x) M1 (x) ...) = tr_g(E M1 E^-1 (x) M2 (x) ... (x) M0)
        std::vector<MatrixWeyl> rot;
        rot.push_back(cmat_apply(
            m.e_twist, cmat_apply(m.e_twist_inv, slots[1], false), true));
        for (int i = 2; i < arity; ++i) rot.push_back(slots[i]);
        rot.push_back(slots[0]);
        if (!(tr_twisted(m, slots) == tr_twisted(m, rot))) ok = false;
      }
    }
    rep.check("twisted trace is g-cyclic" + tag, ok);
  }
}

void suite_intertwine(Report& rep) {
  Gen gen(rep.seed);
  for (const Model& m : reference_models(4, 6)) {
    std::string tag = " n=" + std::to_string(m.n) + " k=" +
                      std::to_string(m.k) + " N=" + std::to_string(m.N) +
                      " r=" + std::to_string(m.r);
    bool delta_ok = true, d_ok = true;
    for (int arity : {1, 2, 3}) {
      Chain c = gen.invariant_chain(m, arity, 2, 1);
      FormElement lhs1 = bv_delta(m, free_correlation(m, c)).shifted(0, 1);
      if (!(lhs1 == free_correlation(m, b_twisted(m, c)))) delta_ok = false;
      FormElement lhs2 = d_fixed(m, free_correlation(m, c));
      if (!(lhs2 == free_correlation(m, B_twisted(m, c)))) d_ok = false;
    }
    rep.check("h Delta <c> = <b c>" + tag, delta_ok);
    rep.check("d <c> = <B c>" + tag, d_ok);
    bool gm_chain_ok = true, gm_ber_ok = true;
    for (int arity : {1, 2, 3}) {
      Chain c = gen.invariant_chain(m, arity, 2, 1);
      FormElement f = free_correlation(m, c);
      if (!(gm_nabla(f) == free_correlation(m, gm_nabla(c))))
        gm_chain_ok = false;
      if (!(gm_nabla(berezin(m, f)) == berezin(m, gm_nabla(f))))
        gm_ber_ok = false;
    }
    rep.check("nabla <c> = <nabla c>" + tag, gm_chain_ok);
    rep.check("nabla berezin = berezin nabla" + tag, gm_ber_ok);
  }
}

void suite_trace(Report& rep) {
  for (int N : {2, 3, 4}) {
    Model m(1, 0, 1, N, {1});
    WeylElement z1 = WeylElement::coord(m, 0), z2 = WeylElement::coord(m, 1);
    bool ok = true;
    for (auto word : std::vector<std::vector<WeylElement>>{
             {z1, z2},
             {z2, z1},
             {mul_plain(z1, z2)},
             {WeylElement::one(m), z1, z2},
             {mul_plain(z1, z1), mul_plain(z2, z2)}}) {
      HbarSeries a = tau1_direct(m, word);
      if (!(a == tau1_word_hat(m, word)) || !(a == tau1_word_perp(m, word)))
        ok = false;
    }
    rep.check("cyclic cochain routes agree at N=" + std::to_string(N), ok);
  }
  {
    Model m(1, 0, 1, 2, {1});
    WeylElement z1 = WeylElement::coord(m, 0), z2 = WeylElement::coord(m, 1);
    HbarSeries t = tau1_direct(m, {z1, z2});
    rep.check("tau1(z1 (x) z2) = -h/8 at N=2",
              t == HbarSeries::term(CycloScalar(Rat(-1, 8), 2), 1),
              render_hbar(t));
  }
  for (const Model& m : reference_models(4, 6)) {
    Chain unit = chain_single(m, {MatrixWeyl::identity(m)});
    ScalarK tr = universal_trace(m, unit, {});
    CycloScalar trg = tr_e_twist(m);
    ScalarK expect =
        ScalarK::from_hbar(HbarSeries::term(m.vacuum() * trg, 0), m.k);
    rep.check("Tr(1) = u^k tr(E) vac  n=" + std::to_string(m.n) + " k=" +
                  std::to_string(m.k) + " N=" + std::to_string(m.N) + " r=" +
                  std::to_string(m.r),
              tr == expect, render_scalar(tr));
  }
  {
    Model m(1, 0, 1, 3, {1});
    Chain unit = chain_single(m, {MatrixWeyl::identity(m)});
    ScalarK tr = universal_trace(m, unit, {});
    ScalarK expect =
        ScalarK::from_hbar(HbarSeries::term(CycloScalar(Rat(1, 3), 3), 0), 0);
    rep.check("Tr(1) = 1/3 at the order-3 point", tr == expect,
              render_scalar(tr));
  }
  {
    Model m(2, 1, 1, 3, {1}, {}, 4, 6);
    Chain unit = chain_single(m, {MatrixWeyl::identity(m)});
    WeylElement y1 = WeylElement::coord(m, 0), y2 = WeylElement::coord(m, 1);
    ScalarK tr = universal_trace(m, unit, {diag_slot(m, y1), diag_slot(m, y2)});
    ScalarK expect = ScalarK::from_hbar(HbarSeries::term(m.vacuum(), -1), 0);
    rep.check("Tr(1)(y1, y2) = vac/h at (2,1,3)", tr == expect,
              render_scalar(tr));
  }
  for (const Model& m : reference_models(4, 6)) {
    // single arguments from the trace-kernel subalgebra: fixed-block
    // quadratics, invariant moving-block quadratics, hbar times a
    // twist-commuting constant matrix, and plain constants
    Chain unit = chain_single(m, {MatrixWeyl::identity(m)});
    auto dies = [&](const MatrixWeyl& f) {
      return universal_trace(m, unit, {f}) == ScalarK();
    };
    bool ok = true;
    for (int i = 0; i < 2 * m.n; ++i)
      for (int j = i; j < 2 * m.n; ++j) {
        bool fixed = i < 2 * m.k && j < 2 * m.k;
        bool moving = i >= 2 * m.k &&
                      (m.g_exp(i) + m.g_exp(j)) % m.N == 0;
        if (!fixed && !moving) continue;
        WeylElement q = mul_plain(WeylElement::coord(m, i),
                                  WeylElement::coord(m, j));
        if (!dies(MatrixWeyl::scalar_mat(m, q))) ok = false;
      }
    for (int a = 0; a < m.r; ++a) {
      MatrixWeyl f(m, m.r);
      f.at(a, a) = WeylElement::one(m).hbar_shifted(1);
      if (!dies(f)) ok = false;
    }
    if (!dies(MatrixWeyl::scalar_mat(
            m, WeylElement::one(m).scaled(CycloScalar(Rat(5, 3), m.N)))))
      ok = false;
    rep.check("trace kills single kernel-subalgebra arguments n=" +
                  std::to_string(m.n) + " k=" + std::to_string(m.k) + " N=" +
                  std::to_string(m.N) + " r=" + std::to_string(m.r),
              ok);
  }
}

void suite_oneloop(Report& rep) {
  std::vector<Model> models = reference_models(4, 6);
  models.push_back(Model(1, 0, 1, 3, {1}, {}, 4, 6));
  for (const Model& m : models) {
    OneloopReport r0 = oneloop_compare(m, {});
    rep.check("one-loop degree 0  n=" + std::to_string(m.n) + " k=" +
                  std::to_string(m.k) + " N=" + std::to_string(m.N) + " r=" +
                  std::to_string(m.r),
              r0.match, render_scalar(r0.lhs));
  }
  {
    Model m(2, 1, 1, 3, {1}, {}, 4, 6);
    WeylElement y1 = WeylElement::coord(m, 0), y2 = WeylElement::coord(m, 1);
    OneloopReport r2 = oneloop_compare(m, {diag_slot(m, y1), diag_slot(m, y2)});
    rep.check("one-loop (y1, y2) at (2,1,3)", r2.match);
    WeylElement arg2 = mul_plain(
        WeylElement::coord(m, 1),
        mul_plain(WeylElement::coord(m, 2), WeylElement::coord(m, 3)));
    OneloopReport r4 = oneloop_compare(m, {diag_slot(m, y1), diag_slot(m, arg2)});
    rep.check("one-loop (y1, y2 z3 z4) at (2,1,3)", r4.match);
  }
}

int run_verify(const std::string& suite, const Options& o) {
  Report rep{suite, o.seed, o.format};
  if (suite == "arith" || suite == "all") suite_arith(rep);
  if (suite == "wheels" || suite == "all") suite_wheels(rep);
  if (suite == "chains" || suite == "all") suite_chains(rep);
  if (suite == "intertwine" || suite == "all") suite_intertwine(rep);
  if (suite == "trace" || suite == "all") suite_trace(rep);
  if (suite == "oneloop" || suite == "all") suite_oneloop(rep);
  return rep.finish();
}

// ---- edge-list parsing for the weight subcommand ----

std::vector<std::pair<int, int>> parse_edges(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  if (text.empty()) return out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t dash = item.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
      throw error("edge '" + item + "' is not of the form a-b");
    int a = std::stoi(item.substr(0, dash));
    int b = std::stoi(item.substr(dash + 1));
    if (a < 0 || b < 0) throw error("edge positions must be nonnegative");
    out.emplace_back(a, b);
  }
  return out;
}

}  // namespace cli
}  // namespace orb

int main(int argc, char** argv) {
  using namespace orb;
  using namespace orb::cli;

  CLI::App app{"exact trace and correlation engine for twisted deformation "
               "quantization"};
  app.require_subcommand(1);

  Options o;

  auto* cmd_moyal = app.add_subcommand(
      "moyal", "star product of two or more observables");
  std::vector<std::string> moyal_exprs;
  add_common(cmd_moyal, o, true);
  cmd_moyal->add_option("--args", o.args_path,
                        "JSON file with the factors, in order");
  cmd_moyal->add_option("expr", moyal_exprs,
                        "observable expressions, multiplied left to right");

  auto* cmd_cfree = app.add_subcommand(
      "correlate-free", "free correlation map of a Hochschild chain");
  add_common(cmd_cfree, o, true);
  cmd_cfree->add_option("--chain", o.chain_path, "chain JSON file")->required();

  auto* cmd_cint = app.add_subcommand(
      "correlate-int", "correlation with interaction insertions");
  add_common(cmd_cint, o, true);
  cmd_cint->add_option("--chain", o.chain_path, "chain JSON file")->required();
  cmd_cint->add_option("--args", o.args_path, "insertion arguments JSON file")
      ->required();

  auto* cmd_trace = app.add_subcommand(
      "trace", "universal trace of a chain against insertion arguments");
  add_common(cmd_trace, o, true);
  cmd_trace->add_option("--chain", o.chain_path, "chain JSON file")->required();
  cmd_trace->add_option("--args", o.args_path, "insertion arguments JSON file");

  auto* cmd_wheel =
      app.add_subcommand("wheel", "wheel coefficient C(k), exact rational");
  int wheel_k = 0;
  cmd_wheel->add_option("k", wheel_k, "cycle length")->required();
  cmd_wheel->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* cmd_weight = app.add_subcommand(
      "weight", "exact circle integral of a propagator edge set");
  std::string weight_edges;
  int weight_slots = 0;
  cmd_weight->add_option("edges", weight_edges,
                         "comma-separated a-b pairs of 0-based positions");
  cmd_weight->add_option("--slots", weight_slots,
                         "number of marked positions (default: max index + 1)");
  cmd_weight->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* cmd_cc = app.add_subcommand(
      "charclass", "curvature classes and the one-loop comparison");
  add_common(cmd_cc, o, true);
  cmd_cc->add_option("--args", o.args_path,
                     "JSON file with 0 or 2 Lie-algebra arguments");

  auto* cmd_verify =
      app.add_subcommand("verify", "run a self-check suite");
  std::string suite;
  cmd_verify
      ->add_option("suite", suite,
                   "one of arith, chains, intertwine, trace, wheels, oneloop, "
                   "all")
      ->required()
      ->check(CLI::IsMember(
          {"arith", "chains", "intertwine", "trace", "wheels", "oneloop",
           "all"}));
  cmd_verify->add_option("--seed", o.seed, "PRNG seed for random corpora");
  cmd_verify->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_moyal->parsed()) {
      Model m = load_model(o);
      std::vector<MatrixWeyl> factors;
      Model free = unbounded(m);
      for (const auto& src : moyal_exprs)
        factors.push_back(rebound(m, slot_from_json(free, json(src)), "factor"));
      if (!o.args_path.empty())
        for (const auto& a : load_args(m, o.args_path)) factors.push_back(a);
      if (factors.size() < 2)
        throw error("the star product needs at least two factors");
      MatrixWeyl acc = factors[0];
      for (size_t i = 1; i < factors.size(); ++i)
        acc = mat_moyal(m, acc, factors[i]);
      emit(o, render_weyl_matrix(m, acc), matrix_json(m, acc));
    } else if (cmd_cfree->parsed()) {
      Model m = load_model(o);
      FormElement f = free_correlation(m, load_chain(m, o.chain_path));
      emit(o, render_form(m, f), value_json(render_form(m, f)));
    } else if (cmd_cint->parsed()) {
      Model m = load_model(o);
      FormElement f = interactive_correlation(m, load_chain(m, o.chain_path),
                                              load_args(m, o.args_path));
      emit(o, render_form(m, f), value_json(render_form(m, f)));
    } else if (cmd_trace->parsed()) {
      Model m = load_model(o);
      std::vector<MatrixWeyl> args;
      if (!o.args_path.empty()) args = load_args(m, o.args_path);
      ScalarK tr = universal_trace(m, load_chain(m, o.chain_path), args);
      emit(o, render_scalar(tr), value_json(render_scalar(tr)));
    } else if (cmd_wheel->parsed()) {
      Rat c = wheel_coefficient(wheel_k);
      emit(o, rat_str(c), json{{"k", wheel_k}, {"value", rat_str(c)}});
    } else if (cmd_weight->parsed()) {
      auto edges = parse_edges(weight_edges);
      int slots = weight_slots;
      if (slots == 0) {
        for (const auto& [a, b] : edges)
          slots = std::max(slots, std::max(a, b) + 1);
        slots = std::max(slots, 1);
      }
      json je = json::array();
      for (const auto& [a, b] : edges) je.push_back(json::array({a, b}));
      Rat w = pairing_weight(slots, edges);
      emit(o, rat_str(w),
           json{{"slots", slots}, {"edges", je}, {"value", rat_str(w)}});
    } else if (cmd_cc->parsed()) {
      Model m = load_model(o);
      std::vector<MatrixWeyl> args;
      if (!o.args_path.empty()) args = load_args(m, o.args_path);
      if (!args.empty() && args.size() != 2)
        throw error("charclass takes 0 or 2 arguments");
      OneloopReport r = oneloop_compare(m, args);
      json j{{"oneloop",
              json{{"lhs", value_json(render_scalar(r.lhs))},
                   {"rhs", value_json(render_scalar(r.rhs))},
                   {"match", r.match}}}};
      std::ostringstream text;
      if (args.size() == 2) {
        WeylElement r1 = curv_r1(m, args[0], args[1]);
        WeylElement r2 = curv_r2(m, args[0], args[1]);
        MatrixWeyl r3 = curv_r3(m, args[0], args[1]);
        HbarSeries r4 = curv_r4(m, args[0], args[1]);
        CycloScalar w0 = omega0(m, args[0], args[1]);
        text << "R1: " << render_weyl(m, r1) << "\n"
             << "R2: " << render_weyl(m, r2) << "\n"
             << "R3: " << render_weyl_matrix(m, r3) << "\n"
             << "R4: " << render_hbar(r4) << "\n"
             << "omega0: " << cyclo_str(w0) << "\n";
        j["classes"] = json{{"r1", value_json(render_weyl(m, r1))},
                            {"r2", value_json(render_weyl(m, r2))},
                            {"r3", matrix_json(m, r3)},
                            {"r4", value_json(render_hbar(r4))},
                            {"omega0", cyclo_str(w0)}};
      }
      text << "oneloop lhs: " << render_scalar(r.lhs) << "\n"
           << "oneloop rhs: " << render_scalar(r.rhs) << "\n"
           << "oneloop match: " << (r.match ? "yes" : "no");
      emit(o, text.str(), j);
      return r.match ? 0 : 1;
    } else if (cmd_verify->parsed()) {
      return run_verify(suite, o);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
