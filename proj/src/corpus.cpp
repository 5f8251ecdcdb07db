#include "shrinklab/corpus.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "shrinklab/error.hpp"

namespace shrinklab {

  extern char const* const kBuiltinCorpusText;

  FiniteGroup CorpusEntry::build(std::size_t cap) const {
    auto g = from_permutations(degree, gens, cap);
    g.set_name(label());
    return g;
  }

  std::vector<CorpusEntry> parse_corpus(std::string_view text) {
    std::vector<CorpusEntry> out;
    std::istringstream       in{std::string(text)};
    std::string              line;
    std::size_t              lineno = 0;
    bool                     open   = false;
    auto where = [&] { return "corpus line " + std::to_string(lineno) + ": "; };
    while (std::getline(in, line)) {
      ++lineno;
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') {
        continue;
      }
      line = line.substr(first);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
        line.pop_back();
      }
      auto        sp   = line.find(' ');
      std::string key  = line.substr(0, sp);
      std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
      if (key == "group") {
        SHRINKLAB_REQUIRE(!open, ParseError, where() + "missing 'end'");
        SHRINKLAB_REQUIRE(!rest.empty(), ParseError, where() + "group needs a name");
        out.push_back({rest, {}, 0, {}});
        open = true;
        continue;
      }
      SHRINKLAB_REQUIRE(open, ParseError, where() + "'" + key + "' outside a group record");
      if (key == "alias") {
        out.back().aliases.push_back(rest);
      } else if (key == "degree") {
        try {
          out.back().degree = std::stoul(rest);
        } catch (std::exception const&) {
          SHRINKLAB_THROW(ParseError, where() + "bad degree");
        }
      } else if (key == "gen") {
        SHRINKLAB_REQUIRE(out.back().degree > 0, ParseError, where() + "degree must precede gen");
        out.back().gens.push_back(parse_cycles(rest, out.back().degree));
      } else if (key == "end") {
        SHRINKLAB_REQUIRE(out.back().degree > 0, ParseError, where() + "record without degree");
        open = false;
      } else {
        SHRINKLAB_THROW(ParseError, where() + "unknown key '" + key + "'");
      }
    }
    SHRINKLAB_REQUIRE(!open, ParseError, "corpus ends inside a record");
    return out;
  }

  std::vector<CorpusEntry> const& builtin_corpus() {
    static std::vector<CorpusEntry> const corpus = parse_corpus(kBuiltinCorpusText);
    return corpus;
  }

  FiniteGroup load_group(std::string_view name) {
    for (auto const& e : builtin_corpus()) {
      if (e.name == name) {
        return e.build();
      }
      for (auto const& a : e.aliases) {
        if (a == name) {
          return e.build();
        }
      }
    }
    SHRINKLAB_THROW(NotFound, "no corpus group named '" + std::string(name) + "'");
  }

  std::string describe(FiniteGroup const& g) {
    static std::mutex                                              lock;
    static std::map<std::size_t, std::vector<std::pair<std::vector<std::size_t>, std::string>>> by_order;
    std::lock_guard<std::mutex> guard(lock);
    if (by_order.empty()) {
      for (auto const& e : builtin_corpus()) {
        auto h = e.build();
        by_order[h.order()].emplace_back(signature(h), e.label());
      }
    }
    auto it = by_order.find(g.order());
    if (it != by_order.end()) {
      auto        sig = signature(g);
      std::string hit;
      int         count = 0;
      for (auto const& [s, label] : it->second) {
        if (s == sig) {
          hit = label;
          ++count;
        }
      }
      if (count == 1) {
        return hit;
      }
    }
    return "order-" + std::to_string(g.order());
  }

}  // namespace shrinklab
