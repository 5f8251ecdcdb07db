#include "shrinklab/scenario.hpp"

#include <cctype>
#include <chrono>
#include <random>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "shrinklab/cohom.hpp"
#include "shrinklab/corpus.hpp"
#include "shrinklab/error.hpp"
#include "shrinklab/profree.hpp"
#include "shrinklab/shrink.hpp"
#include "shrinklab/suites.hpp"

namespace shrinklab {

  using nlohmann::json;

  namespace {

    class ModuleParser {
     public:
      ModuleParser(std::string_view text, GroupPtr group, Residue p)
          : _s(text), _group(std::move(group)), _p(p) {}

      FpGModule parse() {
        auto m = expr();
        skip();
        if (_pos != _s.size()) {
          fail("trailing text");
        }
        return m;
      }

     private:
      [[noreturn]] void fail(std::string const& what) const {
        SHRINKLAB_THROW(ParseError, "module expression '" + std::string(_s) + "' at " + std::to_string(_pos) + ": " + what);
      }
      void skip() {
        while (_pos < _s.size() && std::isspace(static_cast<unsigned char>(_s[_pos]))) {
          ++_pos;
        }
      }
      bool accept(char c) {
        skip();
        if (_pos < _s.size() && _s[_pos] == c) {
          ++_pos;
          return true;
        }
        return false;
      }
      void expect(char c) {
        if (!accept(c)) {
          fail(std::string("expected '") + c + "'");
        }
      }
      std::string ident() {
        skip();
        std::size_t const start = _pos;
        while (_pos < _s.size() && (std::isalnum(static_cast<unsigned char>(_s[_pos])) || _s[_pos] == '_')) {
          ++_pos;
        }
        if (start == _pos) {
          fail("expected a name");
        }
        return std::string(_s.substr(start, _pos - start));
      }
      std::int64_t integer() {
        skip();
        std::size_t const start = _pos;
        if (_pos < _s.size() && _s[_pos] == '-') {
          ++_pos;
        }
        while (_pos < _s.size() && std::isdigit(static_cast<unsigned char>(_s[_pos]))) {
          ++_pos;
        }
        if (start == _pos || (_pos == start + 1 && _s[start] == '-')) {
          fail("expected an integer");
        }
        return std::stoll(std::string(_s.substr(start, _pos - start)));
      }

      FpGModule expr() {
        auto m = term();
        while (accept('^')) {
          auto const n = integer();
          if (n < 1) {
            fail("exponent must be positive");
          }
          m = direct_sum(m, std::size_t(n));
        }
        return m;
      }

      FpGModule term() {
        auto const name = ident();
        if (name == "trivial") {
          std::int64_t d = 1;
          if (accept('(')) {
            d = integer();
            expect(')');
          }
          if (d < 0) {
            fail("negative dimension");
          }
          return trivial_module(_group, _p, std::size_t(d));
        }
        if (name == "regular") {
          return regular_module(_group, _p);
        }
        if (name == "aug") {
          return augmentation_ideal(_group, _p);
        }
        if (name == "dual") {
          expect('(');
          auto m = expr();
          expect(')');
          return dual_module(m);
        }
        if (name == "tensor" || name == "sum") {
          expect('(');
          auto a = expr();
          expect(',');
          auto b = expr();
          expect(')');
          return name == "tensor" ? tensor_module(a, b) : direct_sum(a, b);
        }
        if (name == "ind") {
          expect('(');
          auto const h = ident();
          expect(')');
          return induced_trivial(_group, subgroup_named(h), _p);
        }
        if (name == "twist") {
          expect('(');
          auto m = expr();
          expect(',');
          expect('[');
          std::vector<Residue> values;
          if (!accept(']')) {
            do {
              auto const v = integer();
              values.push_back(Residue(((v % std::int64_t(_p)) + _p) % _p));
            } while (accept(','));
            expect(']');
          }
          expect(')');
          return twist(m, character_from_generators(m.group(), _p, values));
        }
        if (name == "layer") {
          expect('(');
          auto const d = integer();
          expect(',');
          skip();
          auto const close = _s.find(')', _pos);
          if (close == std::string_view::npos) {
            fail("expected (i,j)");
          }
          auto const nu = parse_filter_index(_s.substr(_pos, close + 1 - _pos));
          _pos          = close + 1;
          expect(')');
          if (d < 1) {
            fail("layer needs d >= 1");
          }
          auto const t = build_truncation(_p, std::size_t(d), _group, nu.succ());
          return layer_module(*t, nu);
        }
        fail("unknown module '" + name + "'");
      }

      Subgroup subgroup_named(std::string const& name) const {
        auto const want = signature(load_group(name));
        for (auto const& h : all_subgroups(*_group)) {
          if (signature(as_group(*_group, h).group) == want) {
            return h;
          }
        }
        SHRINKLAB_THROW(ParseError, "no subgroup isomorphic to " + name);
      }

      std::string_view _s;
      std::size_t      _pos = 0;
      GroupPtr         _group;
      Residue          _p;
    };

    ////////////////////////////////////////////////////////////////////////
    // strict JSON access

    void allow_keys(json const& j, std::initializer_list<char const*> keys) {
      if (!j.is_object()) {
        SHRINKLAB_THROW(ParseError, "scenario must be a JSON object");
      }
      for (auto const& [key, value] : j.items()) {
        bool known = false;
        for (auto const* k : keys) {
          known = known || key == k;
        }
        if (!known) {
          SHRINKLAB_THROW(ParseError, "unknown key '" + key + "'");
        }
      }
    }

    json const& need(json const& j, char const* key) {
      if (!j.contains(key)) {
        SHRINKLAB_THROW(ParseError, std::string("missing key '") + key + "'");
      }
      return j.at(key);
    }

    std::int64_t need_int(json const& j, char const* key) {
      auto const& v = need(j, key);
      if (!v.is_number_integer()) {
        SHRINKLAB_THROW(ParseError, std::string("'") + key + "' must be an integer");
      }
      return v.get<std::int64_t>();
    }

    std::size_t need_count(json const& j, char const* key) {
      auto const v = need_int(j, key);
      if (v < 0) {
        SHRINKLAB_THROW(ParseError, std::string("'") + key + "' must be non-negative");
      }
      return std::size_t(v);
    }

    std::string need_string(json const& j, char const* key) {
      auto const& v = need(j, key);
      if (!v.is_string()) {
        SHRINKLAB_THROW(ParseError, std::string("'") + key + "' must be a string");
      }
      return v.get<std::string>();
    }

    Residue need_prime(json const& j) {
      auto const p = need_int(j, "p");
      if (p < 2 || p > 65521) {
        SHRINKLAB_THROW(ParseError, "'p' out of range");
      }
      for (std::int64_t q = 2; q * q <= p; ++q) {
        if (p % q == 0) {
          SHRINKLAB_THROW(ParseError, "'p' must be prime");
        }
      }
      return Residue(p);
    }

    FilterIndex need_index(json const& j, char const* key) {
      try {
        return parse_filter_index(need_string(j, key));
      } catch (Error const& e) {
        SHRINKLAB_THROW(ParseError, std::string("'") + key + "': " + e.what());
      }
    }

    GroupPtr need_group(json const& j) {
      auto const& v = need(j, "group");
      if (v.is_string()) {
        return share(load_group(v.get<std::string>()));
      }
      allow_keys(v, {"degree", "generators", "name"});
      std::size_t const        degree = need_count(v, "degree");
      std::vector<Permutation> perms;
      auto const&              gens = need(v, "generators");
      if (!gens.is_array()) {
        SHRINKLAB_THROW(ParseError, "'generators' must be a list of cycle strings");
      }
      for (auto const& g : gens) {
        if (!g.is_string()) {
          SHRINKLAB_THROW(ParseError, "'generators' must be a list of cycle strings");
        }
        perms.push_back(parse_cycles(g.get<std::string>(), degree));
      }
      auto g = from_permutations(degree, perms);
      g.set_name(v.contains("name") ? v.at("name").get<std::string>() : describe(g));
      return share(std::move(g));
    }

    std::uint64_t scenario_seed(json const& j, RunOptions const& options) {
      if (options.seed) {
        return *options.seed;
      }
      if (j.contains("seed")) {
        auto const s = need_int(j, "seed");
        if (s < 0) {
          SHRINKLAB_THROW(ParseError, "'seed' must be non-negative");
        }
        return std::uint64_t(s);
      }
      return 1;
    }

    SolverOptions solver_options(json const& j, std::uint64_t seed) {
      SolverOptions out;
      out.seed = seed;
      if (j.contains("solver")) {
        auto const& s = j.at("solver");
        allow_keys(s, {"budget", "escalation_cap"});
        if (s.contains("budget")) {
          out.budget = need_count(s, "budget");
        }
        if (s.contains("escalation_cap")) {
          out.escalation_cap = need_count(s, "escalation_cap");
        }
      }
      return out;
    }

    // explicit coordinate lists, or "random(seed, count)"
    struct TargetSpec {
      std::vector<FpVector>        explicit_targets;
      std::optional<std::uint64_t> random_seed;
      std::size_t                  count = 0;

      std::vector<FpVector> make(std::size_t len, Residue p, bool nonzero) const {
        if (!random_seed) {
          for (auto const& v : explicit_targets) {
            if (v.size() != len) {
              SHRINKLAB_THROW(ParseError,
                              "target has " + std::to_string(v.size()) + " coordinates, expected " + std::to_string(len));
            }
          }
          return explicit_targets;
        }
        std::mt19937_64       rng(*random_seed);
        std::vector<FpVector> out;
        for (std::size_t i = 0; i < count; ++i) {
          FpVector v(len);
          do {
            for (auto& x : v) {
              x = Residue(rng() % p);
            }
          } while (nonzero && len > 0 && fp::is_zero(v));
          out.push_back(std::move(v));
        }
        return out;
      }
    };

    TargetSpec need_targets(json const& j, char const* key, Residue p) {
      auto const& v = need(j, key);
      TargetSpec  out;
      if (v.is_string()) {
        static std::regex const re(R"(\s*random\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
        std::smatch             m;
        auto const              text = v.get<std::string>();
        if (!std::regex_match(text, m, re)) {
          SHRINKLAB_THROW(ParseError, std::string("'") + key + "' must be a list or random(seed, count)");
        }
        out.random_seed = std::stoull(m[1].str());
        out.count       = std::stoull(m[2].str());
        return out;
      }
      if (!v.is_array()) {
        SHRINKLAB_THROW(ParseError, std::string("'") + key + "' must be a list or random(seed, count)");
      }
      for (auto const& row : v) {
        if (!row.is_array()) {
          SHRINKLAB_THROW(ParseError, std::string("'") + key + "' entries must be coordinate lists");
        }
        FpVector t;
        for (auto const& x : row) {
          if (!x.is_number_integer()) {
            SHRINKLAB_THROW(ParseError, "coordinates must be integers");
          }
          auto const c = x.get<std::int64_t>();
          t.push_back(Residue(((c % std::int64_t(p)) + p) % p));
        }
        out.explicit_targets.push_back(std::move(t));
      }
      out.count = out.explicit_targets.size();
      return out;
    }

    ////////////////////////////////////////////////////////////////////////

    CommandOutput run_witt(json const& j) {
      allow_keys(j, {"command", "letters", "max_weight"});
      auto const d = need_int(j, "letters");
      auto const w = need_int(j, "max_weight");
      if (d < 1 || w < 1 || w > 64) {
        SHRINKLAB_THROW(ParseError, "'letters' and 'max_weight' must be positive");
      }
      return {cmd_witt(int(d), int(w)) + "\n", true};
    }

    CommandOutput run_truncate(json const& j) {
      allow_keys(j, {"command", "group", "p", "d", "nu_plus_1"});
      auto const        g   = need_group(j);
      Residue const     p   = need_prime(j);
      std::size_t const d   = need_count(j, "d");
      auto const        top = need_index(j, "nu_plus_1");
      auto const        t   = build_truncation(p, d, g, top);
      std::ostringstream out;
      out << t->dump();
      std::size_t const e = t->log_order();
      double            n = 1;
      for (std::size_t k = 0; k < e; ++k) {
        n *= p;
      }
      if (n < 1.8e19) {
        std::uint64_t v = 1;
        for (std::size_t k = 0; k < e; ++k) {
          v *= p;
        }
        out << "order " << v << "\n";
      }
      out << "layers\n";
      for (FilterIndex nu{1, 1}; nu.succ() <= top; nu = nu.succ()) {
        out << "  " << to_string(nu) << " " << layer_module(*t, nu).dim() << "\n";
      }
      return {out.str(), true};
    }

    CommandOutput run_cohomology(json const& j) {
      allow_keys(j, {"command", "group", "p", "module"});
      auto const    g    = need_group(j);
      Residue const p    = need_prime(j);
      auto const    text = need_string(j, "module");
      auto const    m    = parse_module(text, g, p);
      std::ostringstream out;
      out << "group " << g->name() << " p=" << p << " module " << text << " dim " << m.dim() << "\n";
      out << "dims";
      std::vector<CohGroupPtr> hs;
      for (int k = -2; k <= 2; ++k) {
        hs.push_back(tate(m, k));
        out << " " << hs.back()->dim();
      }
      out << "\n";
      // one shifting step per degree, so the modules stay small
      bool ok = true;
      for (int k = -2; k <= 2; ++k) {
        auto const& src = hs[std::size_t(k + 2)];
        std::size_t other = 0;
        bool        bijective = true;
        int         to = 0;
        if (k == -1) {
          to    = -2;
          other = tate(tensor_module(m, dual_module(augmentation_ideal(g, p))), -2)->dim();
        } else {
          auto const step = k >= 0 ? shift_down(src) : shift_up(src);
          to              = step.to->degree();
          other           = step.to->dim();
          bijective       = rank(step.coords) == src->dim();
        }
        bool const agree = other == src->dim() && bijective;
        ok               = ok && agree;
        out << "shift " << k << " -> " << to << ": " << src->dim() << " -> " << other << (agree ? " ok" : " MISMATCH")
            << "\n";
      }
      return {out.str(), ok};
    }

    CommandOutput run_shrink_tensor(json const& j, RunOptions const& options) {
      allow_keys(j, {"command", "mode", "group", "p", "m", "n", "s", "r", "targets", "seed", "solver"});
      auto const        g = need_group(j);
      Residue const     p = need_prime(j);
      ShrinkProblem     prob{p,
                         parse_module(need_string(j, "m"), g, p),
                         parse_module(need_string(j, "n"), g, p),
                         need_count(j, "s"),
                         need_count(j, "r"),
                         {}};
      if (prob.s < 1 || prob.r < 1) {
        SHRINKLAB_THROW(ParseError, "'s' and 'r' must be positive");
      }
      std::size_t len = prob.n.dim();
      for (std::size_t k = 0; k < prob.s; ++k) {
        len *= prob.r * prob.m.dim();
      }
      for (auto const& v : need_targets(j, "targets", p).make(len, p, false)) {
        prob.targets.push_back(block_tensor_from_dense(prob.m.dim(), prob.n.dim(), prob.s, prob.r, v));
      }
      auto const seed = scenario_seed(j, options);
      auto const cert = solve_shrink(prob, solver_options(j, seed));
      return {cert.serialize(), cert.verified};
    }

    CommandOutput run_shrink_annihilate(json const& j, RunOptions const& options) {
      allow_keys(j, {"command", "mode", "group", "p", "n", "nu", "k", "coefficients", "level", "targets", "seed", "solver"});
      auto const        g    = need_group(j);
      Residue const     p    = need_prime(j);
      std::size_t const n    = need_count(j, "n");
      auto const        nu   = need_index(j, "nu");
      int const         k    = int(need_int(j, "k"));
      auto const        t    = parse_module(need_string(j, "coefficients"), g, p);
      auto const        spec = need_targets(j, "targets", p);
      std::size_t       m    = 0;
      auto const&       lv   = need(j, "level");
      if (lv.is_string() && lv.get<std::string>() == "required") {
        m = required_level(g, p, n, nu, k, t, std::max<std::size_t>(spec.count, 1)).m;
      } else {
        m = need_count(j, "level");
      }
      auto const            setup = annihilation_setup(g, p, n, nu, k, t, m);
      std::vector<CohClass> xs;
      for (auto const& c : spec.make(setup->cohomology->dim(), p, true)) {
        xs.push_back({setup->cohomology, c});
      }
      auto const res = annihilate_classes(*setup, xs, solver_options(j, scenario_seed(j, options)));
      std::string text = res.report();
      if (res.certificate) {
        text += res.certificate->serialize();
      }
      return {text, res.verified};
    }

    CommandOutput run_shrink_two_stage(json const& j, RunOptions const& options) {
      allow_keys(j, {"command", "mode", "group", "p", "n", "nu", "coefficients", "level", "middle", "targets", "tensors",
                     "seed", "solver"});
      auto const        g      = need_group(j);
      Residue const     p      = need_prime(j);
      std::size_t const n      = need_count(j, "n");
      auto const        nu     = need_index(j, "nu");
      auto const        t      = parse_module(need_string(j, "coefficients"), g, p);
      std::size_t const m      = need_count(j, "level");
      std::size_t const r      = need_count(j, "middle");
      auto const        spec   = need_targets(j, "targets", p);
      auto const        tspec  = need_targets(j, "tensors", p);
      auto const        solver = solver_options(j, scenario_seed(j, options));
      auto const        stage1 = annihilation_setup(g, p, r, nu, -2, t, m);
      TwoStageSession   session(stage1, n);
      std::vector<CohClass> xs;
      for (auto const& c : spec.make(stage1->cohomology->dim(), p, true)) {
        xs.push_back({stage1->cohomology, c});
      }
      session.run_stage1(xs, solver);
      session.run_stage2(
          [&](LayerLevel const& level) {
            std::size_t len = t.dim();
            for (int k = 0; k <= nu.j; ++k) {
              len *= level.free_quotient.dim();
            }
            return tspec.make(len, p, false);
          },
          solver);
      return {session.report(), session.verified()};
    }

    CommandOutput run_shrink(json const& j, RunOptions const& options) {
      auto const mode = need_string(j, "mode");
      if (mode == "tensor") {
        return run_shrink_tensor(j, options);
      }
      if (mode == "annihilate") {
        return run_shrink_annihilate(j, options);
      }
      if (mode == "two-stage") {
        return run_shrink_two_stage(j, options);
      }
      SHRINKLAB_THROW(ParseError, "'mode' must be tensor, annihilate or two-stage");
    }

  }  // namespace

  FpGModule parse_module(std::string_view text, GroupPtr group, Residue p) {
    return ModuleParser(text, std::move(group), p).parse();
  }

  std::string cmd_witt(int letters, int max_weight) {
    std::ostringstream out;
    for (int w = 1; w <= max_weight; ++w) {
      out << (w > 1 ? " " : "") << witt_dim(letters, w);
    }
    return out.str();
  }

  std::string cmd_ore(std::string const& group) {
    auto const         tower = ore_tower(load_group(group));
    std::ostringstream out;
    for (std::size_t k = 0; k < tower.size(); ++k) {
      auto const& s = tower[k];
      out << (k ? " ; " : "") << describe(as_group(s.group, s.kernel).group);
      if (!s.actor.is_trivial()) {
        out << " ⋊ " << describe(as_group(s.group, s.actor).group);
      }
    }
    return out.str();
  }

  CommandOutput cmd_verify(std::string const& suite, std::uint64_t seed, bool reproducible) {
    SuiteOptions const options{seed};
    auto const         start   = std::chrono::steady_clock::now();
    auto const         results = run_suites(suite, options);
    std::string        text    = format_report(results, options);
    if (!reproducible) {
      auto report = json::parse(text);
      report["elapsed_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      text = report.dump(2) + "\n";
    }
    bool ok = true;
    for (auto const& r : results) {
      ok = ok && r.passed();
    }
    return {text, ok};
  }

  CommandOutput run_scenario(std::string const& command, std::string_view json_text, RunOptions const& options) {
    json j;
    try {
      j = json::parse(json_text);
    } catch (json::exception const& e) {
      SHRINKLAB_THROW(ParseError, std::string("scenario is not JSON: ") + e.what());
    }
    if (!j.is_object()) {
      SHRINKLAB_THROW(ParseError, "scenario must be a JSON object");
    }
    if (need_string(j, "command") != command) {
      SHRINKLAB_THROW(ParseError, "scenario is for '" + j.at("command").get<std::string>() + "', not '" + command + "'");
    }
    try {
      if (command == "witt") {
        return run_witt(j);
      }
      if (command == "truncate") {
        return run_truncate(j);
      }
      if (command == "cohomology") {
        return run_cohomology(j);
      }
      if (command == "shrink") {
        return run_shrink(j, options);
      }
      if (command == "ore") {
        allow_keys(j, {"command", "group"});
        return {cmd_ore(need_string(j, "group")) + "\n", true};
      }
      if (command == "verify") {
        allow_keys(j, {"command", "suite", "seed"});
        return cmd_verify(need_string(j, "suite"), scenario_seed(j, options), options.reproducible);
      }
    } catch (json::exception const& e) {
      SHRINKLAB_THROW(ParseError, e.what());
    }
    SHRINKLAB_THROW(ParseError, "unknown command '" + command + "'");
  }

}  // namespace shrinklab
