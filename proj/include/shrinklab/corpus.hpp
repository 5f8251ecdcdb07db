#pragma once

// The built-in corpus of small groups given by permutation generators, and
// a line-oriented text format for further groups:
//
//   group <name>
//   alias <other name>        (optional, repeatable)
//   degree <n>
//   gen <cycles>              (repeatable; points are 0-based)
//   end

#include <string>
#include <string_view>
#include <vector>

#include "shrinklab/group.hpp"

namespace shrinklab {

  struct CorpusEntry {
    std::string              name;
    std::vector<std::string> aliases;
    std::size_t              degree = 0;
    std::vector<Permutation> gens;

    FiniteGroup build(std::size_t cap = kClosureCap) const;
    //! First alias if any, else the name.
    std::string const& label() const noexcept {
      return aliases.empty() ? name : aliases.front();
    }
  };

  std::vector<CorpusEntry>        parse_corpus(std::string_view text);
  std::vector<CorpusEntry> const& builtin_corpus();

  //! Looks up a group by name or alias; throws NotFound.
  FiniteGroup load_group(std::string_view name);

  //! Corpus label of a group with the same signature, or "order-N" when no
  //! corpus group matches.
  std::string describe(FiniteGroup const& g);

}  // namespace shrinklab
